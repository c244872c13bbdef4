"""Two-cavity interferometer conditioning: entangled mechanical cat states.

A single photon split between two optomechanical cavities and detected at the
bright port projects the two mechanical modes onto a three-term
sum-of-products state

    c1 |chi_1>|0> + c2 |0>|chi_2> + c3(t) |0>|0>,

where |chi_i> is each arm's closed-form photon-in-cavity branch (without its
cascade prefactor) and the source term c3 decays as e^{-gamma t/2}.  The
coefficients are calibrated once per parameter set against the direct
interferometer integrator and then held fixed, mirroring the single-cavity
policy; analytically c1 = c2 = -sqrt(gamma) kappa_i / 2 and
c3 = sqrt(gamma) e^{-gamma t/2}.

Late detection near half a mechanical period leaves the two arms maximally
displaced and nearly orthogonal to the ground state, so the state approaches
a Bell-like entangled cat: entanglement entropy close to ln 2 and a Wigner
function with interference negativity (see the wigner module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock, oracle
from .errors import DegenerateInputError, InvalidInputError
from .model import ModelParams, MZParams, derive
from .single_photon import CALIBRATION_T_REF, CALIBRATION_TOL, _raw_cavity_branch


@dataclass
class BipartiteMechState:
    """Sum-of-products state of the two mechanical modes (unnormalized).

    terms: list of (coefficient, mode-1 vector, mode-2 vector); all vectors
    share the per-mode truncation ``dim``.  The Schmidt rank is at most the
    number of terms.
    """

    terms: list[tuple[complex, np.ndarray, np.ndarray]]
    dim: int

    def __post_init__(self):
        for _, u, v in self.terms:
            if len(u) != self.dim or len(v) != self.dim:
                raise InvalidInputError("all term vectors must share dim")

    def norm2(self) -> float:
        return max(float(self.overlap(self).real), 0.0)

    def overlap(self, other: "BipartiteMechState") -> complex:
        """<self|other> via per-mode Gram factors."""
        total = 0.0 + 0.0j
        for ck, uk, vk in self.terms:
            for cl, ul, vl in other.terms:
                total += np.conj(ck) * cl * np.vdot(uk, ul) * np.vdot(vk, vl)
        return complex(total)

    def to_matrix(self) -> np.ndarray:
        """Dense (dim, dim) amplitude matrix, mode 1 on axis 0."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c, u, v in self.terms:
            out += c * np.outer(u, v)
        return out

    def normalized(self) -> "BipartiteMechState":
        n2 = self.norm2()
        if n2 <= 0.0:
            raise DegenerateInputError("cannot normalize a zero-norm state")
        s = 1.0 / math.sqrt(n2)
        return BipartiteMechState(
            [(c * s, u, v) for c, u, v in self.terms], self.dim
        )

    def mean_amplitude(self, mode: int = 1) -> complex:
        """<b_mode> of the normalized state."""
        n2 = self.norm2()
        if n2 <= 0.0:
            raise DegenerateInputError("zero-norm state has no moments")
        total = 0.0 + 0.0j
        for ck, uk, vk in self.terms:
            for cl, ul, vl in self.terms:
                if mode == 1:
                    total += np.conj(ck) * cl * np.vdot(uk, fock.lower(ul)) * np.vdot(vk, vl)
                else:
                    total += np.conj(ck) * cl * np.vdot(uk, ul) * np.vdot(vk, fock.lower(vl))
        return complex(total) / n2


_coefficient_cache: dict[MZParams, tuple[complex, complex, complex]] = {}


def cat_coefficients(
    mz: MZParams,
    t_ref: float = CALIBRATION_T_REF,
    tol: float = CALIBRATION_TOL,
) -> tuple[complex, complex, complex]:
    """(c1, c2, c3_scale) calibrated against the interferometer integrator.

    Fitted by least squares on the three-dimensional span of the closed-form
    terms at one reference time, then held fixed; c3(t) = c3_scale
    e^{-gamma t/2}.
    """
    cached = _coefficient_cache.get(mz)
    if cached is not None:
        return cached
    d = mz.fock_dim
    vac = fock.vacuum_state(d)
    raw1 = _raw_cavity_branch(t_ref, mz.cavity1)
    raw2 = _raw_cavity_branch(t_ref, mz.cavity2)
    basis = [np.outer(raw1, vac), np.outer(vac, raw2), np.outer(vac, vac)]
    state = oracle.integrate_no_jump(mz, oracle.ground_state(mz), t_ref, tol=tol)
    target = oracle.apply_jump(mz, state, "D1")
    gram = np.array([[np.vdot(a, b) for b in basis] for a in basis])
    proj = np.array([np.vdot(a, target) for a in basis])
    coeff, *_ = np.linalg.lstsq(gram, proj, rcond=None)
    c3_scale = coeff[2] / math.exp(-0.5 * mz.gamma * t_ref)
    out = (complex(coeff[0]), complex(coeff[1]), complex(c3_scale))
    _coefficient_cache[mz] = out
    return out


def conditional_state(t: float, mz: MZParams) -> BipartiteMechState:
    """Mechanical state after a bright-port count at t (unnormalized)."""
    if t < 0:
        raise InvalidInputError("time must be nonnegative")
    c1, c2, c3_scale = cat_coefficients(mz)
    d = mz.fock_dim
    vac = fock.vacuum_state(d)
    return BipartiteMechState(
        [
            (c1, _raw_cavity_branch(t, mz.cavity1), vac),
            (c2, vac, _raw_cavity_branch(t, mz.cavity2)),
            (c3_scale * math.exp(-0.5 * mz.gamma * t), vac, vac),
        ],
        d,
    )


def entanglement_entropy(state: BipartiteMechState) -> float:
    """Von Neumann entropy (nats) of either reduced mode.

    Works on the K-dimensional span of the sum-of-products terms: the nonzero
    spectrum of the reduced density matrix equals that of
    diag(c) conj(Gv) diag(c)* Gu built from the per-mode Gram matrices, so no
    (dim x dim) density matrix is ever formed.  0 ln 0 is taken as 0.
    """
    c = np.array([term[0] for term in state.terms])
    us = [term[1] for term in state.terms]
    vs = [term[2] for term in state.terms]
    gu = np.array([[np.vdot(a, b) for b in us] for a in us])
    gv = np.array([[np.vdot(a, b) for b in vs] for a in vs])
    m = np.diag(c) @ np.conj(gv) @ np.diag(np.conj(c)) @ gu
    p = np.linalg.eigvals(m).real
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if total <= 0.0:
        raise DegenerateInputError("zero-norm state has no entropy")
    p = p / total
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def mean_amplitude_trajectory(mz: MZParams, t_grid: np.ndarray) -> np.ndarray:
    """Conditional <b_1> of the normalized bright-port state along t_grid."""
    ts = np.asarray(t_grid, dtype=float)
    if ts.size == 0:
        raise InvalidInputError("t_grid must be nonempty")
    if np.any(np.diff(ts) < 0):
        raise InvalidInputError("t_grid must be nondecreasing")
    return np.array([conditional_state(float(t), mz).mean_amplitude(1) for t in ts])


def fidelity_vs_detuning(mz_base: MZParams, delta_grid: np.ndarray) -> np.ndarray:
    """Overlap fidelity with the identical-frequency cat vs arm detuning.

    Both states are conditioned at the identical-frequency half period of
    arm 1 (a single shared detection time), normalized, and compared as the
    overlap magnitude |<ident|detuned>|.  Of the two standard pure-state
    conventions this is the one that reproduces the quoted anchor values
    (about 0.9 at ten percent detuning for these parameters); the squared
    convention sits visibly lower.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    if np.any(deltas <= -1.0):
        raise InvalidInputError("detunings must be > -1")
    t_half = 0.5 * derive(mz_base.cavity1).t_mech
    ident = conditional_state(t_half, mz_base).normalized()
    out = np.empty(deltas.shape, dtype=float)
    for i, delta in enumerate(deltas):
        detuned = conditional_state(t_half, mz_base.detuned(float(delta))).normalized()
        out[i] = abs(ident.overlap(detuned))
    return out
