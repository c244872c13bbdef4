"""Direct integration of the no-jump dynamics; the ground truth.

The closed-form results elsewhere in the package are calibrated against and
validated by this module, which implements the Hamiltonian and jump operators
literally:

    H   = omega_m b^dag b + g0 a^dag a (b + b^dag) + H_cas
    H_cas (single arm) = -i sqrt(kappa gamma) (c a^dag - c^dag a) / 2
    J   = sqrt(gamma) c + sqrt(kappa) a

and, for the two-arm interferometer, the same with the cascade coupling
divided by sqrt(2) per arm and two detection ports

    J1 = sqrt(gamma) c + (sqrt(kappa1) a1 + sqrt(kappa2) a2)/sqrt(2)
    J2 = (sqrt(kappa1) a1 - sqrt(kappa2) a2)/sqrt(2).

Exactly one photon exists per stage, so the photonic space is restricted to
the single-excitation basis: 2 states for one cavity (index 0 = photon in the
cavity, 1 = photon in the source), 3 for the interferometer (0 = source,
1 = cavity 1, 2 = cavity 2).  The non-Hermitian generator
-iH - (1/2) sum J^dag J is kept dense for the single cavity (the joint space
is small) and applied blockwise for the interferometer, where a dense matrix
on photonic x mech1 x mech2 would be prohibitively large; ``to_matrix``
materializes it on demand for structural checks at small dimension.

Unnormalized states throughout; the squared norm decays at the total count
rate, and applying a jump operator yields the (unnormalized) conditional
mechanical state whose squared norm is that detector's instantaneous rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, StiffnessError
from .model import ModelParams, MZParams

DEFAULT_TOL = 1e-10  # relative squared-norm drift per unit time
_MONOTONE_SLACK = 1e-12


@dataclass
class JointState:
    """State vector on (photonic basis) x (mechanics), unnormalized.

    amps has shape (2, d) for a single cavity and (3, d, d) for the
    interferometer (mechanics of arm 1 on axis 1, arm 2 on axis 2).
    """

    amps: np.ndarray
    t: float

    @property
    def photonic_dim(self) -> int:
        return self.amps.shape[0]

    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def copy(self) -> "JointState":
        return JointState(self.amps.copy(), self.t)


def ground_state(params: ModelParams | MZParams) -> JointState:
    """Photon in the source, mechanics in the ground state, at t = 0."""
    if isinstance(params, MZParams):
        d = params.fock_dim
        amps = np.zeros((3, d, d), dtype=complex)
        amps[0, 0, 0] = 1.0
    else:
        amps = np.zeros((2, params.fock_dim), dtype=complex)
        amps[1, 0] = 1.0
    return JointState(amps, 0.0)


class SingleCavityGenerator:
    """-iH - (1/2) J^dag J for one cascaded source -> cavity pair."""

    def __init__(self, params: ModelParams):
        d = params.fock_dim
        self.params = params
        kg = math.sqrt(params.kappa * params.gamma)
        # photonic basis (cavity, source)
        h_cas = np.array([[0.0, -0.5j * kg], [0.5j * kg, 0.0]])
        j = np.array([math.sqrt(params.kappa), math.sqrt(params.gamma)])
        ph = -1j * h_cas - 0.5 * np.outer(j, j)
        self.jumps = {"D": j}

        n = np.arange(d, dtype=float)
        b = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1)
        dense = np.kron(ph, np.eye(d)) + np.kron(
            np.eye(2), -1j * params.omega_m * np.diag(n)
        )
        dense[:d, :d] += -1j * params.g0 * (b + b.T)
        self._dense = dense

    def apply(self, amps: np.ndarray) -> np.ndarray:
        return (self._dense @ amps.reshape(-1)).reshape(amps.shape)

    def scale(self) -> float:
        p = self.params
        d = self._dense.shape[0] // 2
        return (
            p.omega_m * (d - 1)
            + 2.0 * p.g0 * math.sqrt(d)
            + 0.5 * (p.kappa + p.gamma)
            + math.sqrt(p.kappa * p.gamma)
        )

    def to_matrix(self) -> np.ndarray:
        return self._dense.copy()


class MZGenerator:
    """-iH - (1/2)(J1^dag J1 + J2^dag J2) for the two-arm interferometer."""

    def __init__(self, mz: MZParams):
        self.mz = mz
        d = mz.fock_dim
        c1, c2 = mz.cavity1, mz.cavity2
        self.sq = np.sqrt(np.arange(1, d, dtype=float))
        # photonic basis (source, cavity1, cavity2)
        h_cas = np.zeros((3, 3), dtype=complex)
        for i, cav in enumerate((c1, c2), start=1):
            g = math.sqrt(cav.kappa * mz.gamma) / (2.0 * math.sqrt(2.0))
            h_cas[i, 0] = -1j * g
            h_cas[0, i] = 1j * g
        j1 = np.array(
            [math.sqrt(mz.gamma), math.sqrt(c1.kappa / 2.0), math.sqrt(c2.kappa / 2.0)]
        )
        j2 = np.array([0.0, math.sqrt(c1.kappa / 2.0), -math.sqrt(c2.kappa / 2.0)])
        self.ph = -1j * h_cas - 0.5 * (np.outer(j1, j1) + np.outer(j2, j2))
        self.jumps = {"D1": j1, "D2": j2}
        n = np.arange(d, dtype=float)
        self._free = -1j * (c1.omega_m * n[:, None] + c2.omega_m * n[None, :])
        self._ig1 = 1j * c1.g0
        self._ig2 = 1j * c2.g0

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = np.tensordot(self.ph, amps, axes=(1, 0))
        out += self._free * amps
        sq = self.sq
        a1, a2 = amps[1], amps[2]
        o1, o2 = out[1], out[2]
        o1[:-1, :] -= self._ig1 * (sq[:, None] * a1[1:, :])
        o1[1:, :] -= self._ig1 * (sq[:, None] * a1[:-1, :])
        o2[:, :-1] -= self._ig2 * (sq[None, :] * a2[:, 1:])
        o2[:, 1:] -= self._ig2 * (sq[None, :] * a2[:, :-1])
        return out

    def scale(self) -> float:
        c1, c2 = self.mz.cavity1, self.mz.cavity2
        d = len(self.sq) + 1
        return (
            (c1.omega_m + c2.omega_m) * (d - 1)
            + 2.0 * (c1.g0 + c2.g0) * math.sqrt(d)
            + 0.5 * (c1.kappa + c2.kappa + self.mz.gamma)
            + math.sqrt(max(c1.kappa, c2.kappa) * self.mz.gamma)
        )

    def to_matrix(self) -> np.ndarray:
        d = len(self.sq) + 1
        eye = np.eye(d)
        b = np.diag(self.sq, k=1)
        q = b + b.T
        c1, c2 = self.mz.cavity1, self.mz.cavity2
        nmat = np.diag(np.arange(d, dtype=float))
        mech = np.kron(-1j * c1.omega_m * nmat, eye) + np.kron(
            eye, -1j * c2.omega_m * nmat
        )
        big = np.kron(self.ph, np.eye(d * d)) + np.kron(np.eye(3), mech)
        dd = d * d
        big[dd : 2 * dd, dd : 2 * dd] += -1j * c1.g0 * np.kron(q, eye)
        big[2 * dd :, 2 * dd :] += -1j * c2.g0 * np.kron(eye, q)
        return big


_generator_cache: dict = {}
_dt_cache: dict = {}


def effective_generator(params: ModelParams | MZParams):
    """Cached no-jump generator for the given configuration."""
    gen = _generator_cache.get(params)
    if gen is None:
        gen = MZGenerator(params) if isinstance(params, MZParams) else SingleCavityGenerator(params)
        _generator_cache[params] = gen
    return gen


def _rk4_run(gen, amps, t0, times, dt):
    """Fixed-step RK4 to each time in `times`; returns states and norms there.

    Raises ArithmeticError if the squared norm ever grows beyond rounding
    slack or stops being finite (the no-jump generator is dissipative, so
    either means the step is too coarse).
    """
    f = gen.apply
    y = amps.copy()
    t = t0
    out_states, out_norms = [], []
    prev_norm = float(np.vdot(y, y).real)
    for target in times:
        span = target - t
        if span < -1e-15:
            raise InvalidInputError("checkpoint times must be nondecreasing")
        nsteps = max(1, math.ceil(span / dt)) if span > 1e-15 else 0
        h = span / nsteps if nsteps else 0.0
        hh, h6 = 0.5 * h, h / 6.0
        for _ in range(nsteps):
            k1 = f(y)
            k2 = f(y + hh * k1)
            k3 = f(y + hh * k2)
            k4 = f(y + h * k3)
            y = y + h6 * (k1 + 2.0 * (k2 + k3) + k4)
            norm = float(np.vdot(y, y).real)
            if not math.isfinite(norm) or norm > prev_norm * (1.0 + _MONOTONE_SLACK) + 1e-300:
                raise ArithmeticError("squared norm grew during a no-jump step")
            prev_norm = norm
        t = target
        out_states.append(y.copy())
        out_norms.append(prev_norm)
    return out_states, np.array(out_norms)


def integrate_no_jump(
    params: ModelParams | MZParams,
    state: JointState,
    t_end: float,
    tol: float = DEFAULT_TOL,
    dt: float | None = None,
    checkpoints: tuple[float, ...] = (),
) -> JointState | list[JointState]:
    """Propagate the unnormalized state under exp[(-iH - J^dag J/2) t].

    Classic 4th-order fixed-step integration with step control: the step is
    halved until the squared-norm drift between the full-step and half-step
    runs stays below ``tol`` per unit time (relative to the current norm, so
    long strongly-decayed evolutions keep their relative accuracy).  Passing
    ``dt`` bypasses the control (used by convergence tests).

    With ``checkpoints`` given, returns the list of states at those times
    (t_end is appended if absent); otherwise returns the state at ``t_end``.
    """
    if t_end < state.t:
        raise InvalidInputError("t_end must not precede the state's time")
    times = tuple(checkpoints) + (
        (t_end,) if (not checkpoints or checkpoints[-1] < t_end) else ()
    )
    gen = effective_generator(params)
    span = t_end - state.t
    if span == 0 and not checkpoints:
        return state.copy()

    if dt is not None:
        states, _ = _rk4_run(gen, state.amps, state.t, times, dt)
        results = [JointState(s, tc) for s, tc in zip(states, times)]
        return results if checkpoints else results[-1]

    # Seed from the last accepted step for these parameters (the error scale
    # is set by the occupied spectrum, which the control discovers); fall
    # back to a stability-safe fraction of the generator norm bound.
    seeded = _dt_cache.get((params, tol))
    step = seeded if seeded is not None else min(0.05, 2.0 / gen.scale())
    step = min(step, max(span, 1e-12))
    run_a = None
    while True:
        try:
            run_b = _rk4_run(gen, state.amps, state.t, times, step)
        except ArithmeticError:
            run_b = None
        if run_a is not None and run_b is not None:
            drift = float(
                np.max(np.abs(run_a[1] - run_b[1]) / np.maximum(run_b[1], 1e-300))
            )
            if drift <= tol * max(span, 1e-12):
                _dt_cache[(params, tol)] = min(0.05, 4.0 * step)
                results = [
                    JointState(s, tc) for s, tc in zip(run_b[0], times)
                ]
                return results if checkpoints else results[-1]
        run_a = run_b
        step /= 2.0
        if step < 1e-12:
            raise StiffnessError("step control underflowed (dt < 1e-12)")


def apply_jump(params: ModelParams | MZParams, state: JointState, which: str = "D") -> np.ndarray:
    """Apply a detector's jump operator; returns the mechanical remainder.

    The photonic part collapses to vacuum, so the result is a mechanical
    amplitude vector (single cavity) or a dense (d, d) two-mode amplitude
    matrix (interferometer).  Its squared norm is that detector's
    instantaneous count rate.
    """
    gen = effective_generator(params)
    try:
        j = gen.jumps[which]
    except KeyError:
        raise InvalidInputError(
            f"unknown detector {which!r}; expected one of {sorted(gen.jumps)}"
        ) from None
    return np.tensordot(j, state.amps, axes=(0, 0))


def two_photon_conditioned(
    params: ModelParams,
    t1: float,
    t_d: float,
    tau: float,
    tol: float = DEFAULT_TOL,
    stage1: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Two sequential photons: returns (final mechanical state, its rate).

    Stage 1 integrates the first photon to its detection at t1 and applies
    the jump; stage 2 rotates the mechanics freely for t_d (exact diagonal
    phases); stage 3 re-embeds a fresh photon in the source, integrates for
    tau and applies the jump again.  The squared norm of the result is the
    doubly conditioned detection rate.

    ``stage1`` optionally supplies a precomputed stage-1 mechanical state so
    sweeps over (t_d, tau) do not re-integrate the first photon.
    """
    if min(t1, t_d, tau) < 0:
        raise InvalidInputError("times must be nonnegative")
    d = params.fock_dim
    if stage1 is None:
        stage1 = apply_jump(
            params, integrate_no_jump(params, ground_state(params), t1, tol=tol)
        )
    mech = np.exp(-1j * params.omega_m * np.arange(d) * t_d) * stage1
    amps = np.zeros((2, d), dtype=complex)
    amps[1] = mech
    final = integrate_no_jump(params, JointState(amps, 0.0), tau, tol=tol)
    mech_final = apply_jump(params, final)
    return mech_final, float(np.vdot(mech_final, mech_final).real)
