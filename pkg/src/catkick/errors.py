"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """A scalar or grid argument is outside the operation's domain."""


class DegenerateConditioningError(RuntimeError):
    """Conditioning probability too small to define a conditional quantity."""


class DegenerateInputError(ValueError):
    """A state with (numerically) zero norm where a physical state is required."""


class InvalidProjectionError(ValueError):
    """Phase-space slice parameters do not define a usable projection."""


class StiffnessError(RuntimeError):
    """Integrator step control underflowed; the generator is too stiff."""
