"""Parameter records and unit conventions.

All rates are expressed in units of the optical decay rate kappa of the
(first) cavity, and all times in 1/kappa; kappa itself is therefore 1.0 by
convention but kept explicit so the formulas read like the physics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from scipy.constants import hbar, k as k_boltzmann

from .errors import InvalidInputError
from .fock import default_fock_dim


@dataclass(frozen=True)
class ModelParams:
    """Rates and couplings of one optomechanical cavity fed by a source cavity.

    gamma:    source-cavity decay rate (units of kappa)
    g0:       bare radiation-pressure coupling (units of kappa)
    omega_m:  mechanical frequency (units of kappa)
    kappa:    optical decay rate, 1.0 by convention
    fock_dim: mechanical truncation N+1; 0 selects it adaptively from
              the displacement scale 2*g0/omega_m
    """

    gamma: float
    g0: float
    omega_m: float
    kappa: float = 1.0
    fock_dim: int = 0

    def __post_init__(self):
        if not (self.kappa > 0 and self.gamma > 0 and self.omega_m > 0):
            raise InvalidInputError("kappa, gamma and omega_m must be positive")
        if self.g0 < 0:
            raise InvalidInputError("g0 must be nonnegative")
        if self.fock_dim == 0:
            object.__setattr__(
                self, "fock_dim", default_fock_dim(2.0 * self.g0 / self.omega_m)
            )
        if int(self.fock_dim) != self.fock_dim or self.fock_dim < 1:
            raise InvalidInputError("fock_dim must be a positive integer")

    def with_dim(self, fock_dim: int) -> "ModelParams":
        return replace(self, fock_dim=fock_dim)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from ModelParams.

    beta:   dimensionless mechanical displacement per cavity photon,
            -g0/omega_m (note: the displacement operators entering the
            conditional states use the opposite sign, +g0/omega_m; see
            single_photon module notes)
    chi:    Kerr rate g0^2/omega_m (units of kappa)
    t_mech: mechanical period 2*pi/omega_m (units of 1/kappa)
    """

    beta: float
    chi: float
    t_mech: float


def derive(params: ModelParams) -> DerivedParams:
    """Compute the displacement, Kerr rate and mechanical period."""
    import math

    return DerivedParams(
        beta=-params.g0 / params.omega_m,
        chi=params.g0**2 / params.omega_m,
        t_mech=2.0 * math.pi / params.omega_m,
    )


@dataclass(frozen=True)
class MZParams:
    """Two optomechanical cavities driven through a balanced interferometer.

    Both cavities share the source decay rate ``gamma`` and the mechanical
    truncation; their optical/mechanical rates may differ (detuned arms).
    """

    cavity1: ModelParams
    cavity2: ModelParams

    def __post_init__(self):
        if self.cavity1.gamma != self.cavity2.gamma:
            raise InvalidInputError("both arms must share the source decay rate")
        if self.cavity1.fock_dim != self.cavity2.fock_dim:
            raise InvalidInputError("both arms must share fock_dim")

    @property
    def gamma(self) -> float:
        return self.cavity1.gamma

    @property
    def fock_dim(self) -> int:
        return self.cavity1.fock_dim

    @staticmethod
    def identical(params: ModelParams) -> "MZParams":
        return MZParams(cavity1=params, cavity2=params)

    def detuned(self, delta: float) -> "MZParams":
        """Scale the second arm's mechanical frequency by (1 + delta)."""
        if delta <= -1.0:
            raise InvalidInputError("detuning must be > -1")
        return MZParams(
            cavity1=self.cavity1,
            cavity2=replace(self.cavity2, omega_m=(1.0 + delta) * self.cavity2.omega_m),
        )


@dataclass(frozen=True)
class BathCheck:
    n_bath: float
    valid: bool


def bath_validity(q_factor: float, temp: float, omega_m_si: float) -> BathCheck:
    """Check the cold-bath condition for neglecting mechanical dissipation.

    n_bath = k_B T / (hbar omega_m) must be far below the mechanical quality
    factor for thermal phonons to be negligible over a mechanical period;
    "far below" is implemented as n_bath < q_factor / 10.

    omega_m_si is the angular mechanical frequency in rad/s.
    """
    if not (q_factor > 0 and temp > 0 and omega_m_si > 0):
        raise InvalidInputError("q_factor, temp and omega_m_si must be positive")
    n_bath = k_boltzmann * temp / (hbar * omega_m_si)
    return BathCheck(n_bath=n_bath, valid=n_bath < q_factor / 10.0)
