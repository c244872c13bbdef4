"""Truncated Fock-space primitives used by every other module.

A mechanical state is a complex numpy vector of amplitudes over Fock levels
0..N (dim = N+1); an operator is a dense complex (N+1)x(N+1) matrix.  No
function here renormalizes implicitly: conditional states carry physically
meaningful norms (the squared norm of a conditional branch is a detection
rate), so normalization is always an explicit caller action.

All returned arrays are freshly allocated or marked read-only when cached, so
values can be shared freely across threads.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.linalg import expm

from .errors import InvalidInputError

# Extra levels appended before exponentiating the displacement generator, so
# that truncation error is confined to the cropped rows/columns.
DISPLACEMENT_PAD = 16

_displacement_cache: dict[tuple[complex, int], np.ndarray] = {}


def _check_dim(dim: int) -> None:
    if int(dim) != dim or dim < 1:
        raise InvalidInputError(f"dimension must be a positive integer, got {dim!r}")


def _check_finite(z: complex, name: str) -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInputError(f"{name} must be finite, got {z!r}")


def vacuum_state(dim: int) -> np.ndarray:
    """Ground state |0> as an amplitude vector."""
    _check_dim(dim)
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    return v


def basis_state(n: int, dim: int) -> np.ndarray:
    """Fock state |n> as an amplitude vector."""
    _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidInputError(f"level {n} outside 0..{dim - 1}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def coherent_state(beta: complex, dim: int) -> np.ndarray:
    """Coherent state amplitudes e^{-|beta|^2/2} beta^n / sqrt(n!), truncated.

    The truncated tail is simply dropped (no renormalization); the squared
    norm equals the Poisson(|beta|^2) mass below ``dim``.
    """
    _check_dim(dim)
    beta = complex(beta)
    _check_finite(beta, "beta")
    amps = np.zeros(dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(beta) ** 2)
    if dim > 1:
        amps[1:] = amps[0] * np.cumprod(beta / np.sqrt(np.arange(1, dim)))
    return amps


def annihilation_matrix(dim: int) -> np.ndarray:
    """Lowering operator b: entry (n-1, n) = sqrt(n)."""
    _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def number_diagonal(dim: int) -> np.ndarray:
    """Diagonal of b^dag b as a real vector (0, 1, ..., N)."""
    _check_dim(dim)
    return np.arange(dim, dtype=float)


def lower(vec: np.ndarray) -> np.ndarray:
    """Apply b to an amplitude vector without building the matrix."""
    out = np.zeros_like(vec)
    out[:-1] = np.sqrt(np.arange(1, len(vec))) * vec[1:]
    return out


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """Displacement operator D(beta) = exp(beta b^dag - beta* b), truncated.

    Built by exponentiating the generator on a padded space
    (dim + DISPLACEMENT_PAD) and cropping, so the low-index block is accurate
    to working precision and column 0 reproduces ``coherent_state(beta, dim)``.
    The returned array is cached and read-only.
    """
    _check_dim(dim)
    beta = complex(beta)
    _check_finite(beta, "beta")
    key = (beta, dim)
    cached = _displacement_cache.get(key)
    if cached is not None:
        return cached
    padded = dim + DISPLACEMENT_PAD
    b = annihilation_matrix(padded)
    gen = beta * b.conj().T - np.conj(beta) * b
    mat = expm(gen)[:dim, :dim]
    mat.flags.writeable = False
    _displacement_cache[key] = mat
    return mat


def inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Inner product <x|y>, conjugate-linear in the first argument."""
    if x.shape != y.shape:
        raise InvalidInputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return complex(np.vdot(x, y))


def cexpm1(z: np.ndarray | complex) -> np.ndarray | complex:
    """exp(z) - 1 for complex z, stable for small |z|.

    Uses e^{x+iy} - 1 = expm1(x) cos(y) - 2 sin^2(y/2) + i e^x sin(y).
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    re = np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2
    im = np.exp(x) * np.sin(y)
    out = re + 1j * im
    return out if out.ndim else complex(out)


def default_fock_dim(beta_eff: float, minimum: int = 32, tail: float = 1e-12) -> int:
    """Smallest truncation dim with Poisson(|beta_eff|^2) tail mass < ``tail``.

    ``beta_eff`` should be the largest coherent amplitude the computation will
    represent (for radiation-pressure conditional states: twice the
    displacement per photon).  Never returns less than ``minimum``.
    """
    lam = abs(beta_eff) ** 2
    if lam == 0.0:
        return minimum
    term = math.exp(-lam)
    cum = term
    n = 0
    # walk the Poisson cdf upward until the residual mass is below `tail`
    while 1.0 - cum >= tail:
        n += 1
        term *= lam / n
        cum += term
        if n > 100_000:
            raise InvalidInputError(f"beta_eff={beta_eff} too large to truncate")
    return max(n + 1, minimum)
