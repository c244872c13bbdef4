"""Second-photon conditional detection: temporal histories and rates.

A first photon detected at t1 kicks the mechanics; after a free delay t_d a
second photon is prepared in the source, interacts for tau and is detected at
t2 = t1 + t_d + tau.  Four indistinguishable temporal histories contribute,
labelled by whether each photon was reflected (R) or transmitted (T); with a
ground-state start and the time-homogeneous injection propagator K they are

    rr = e^{-gamma (t1+tau)/2} |0>
    rt = e^{-i omega_m n (t_d+tau)} e^{-gamma tau/2} K(t1)|0>
    tr = e^{-gamma t1/2} K(tau)|0>
    tt = K(tau) e^{-i omega_m n t_d} K(t1)|0>

and the doubly conditioned state is kappa tt + gamma rr + sqrt(kappa gamma)
(rt + tr).  Its squared norm is the second-photon rate; the decomposition
assigns the pure double-reflection term to "reflected", every
positive-definite term in which the second photon entered the cavity to
"transmitted", and all cross terms to "interference", mirroring the
single-photon split.

The displacement left by the first photon detunes the cavity; a quarter
mechanical period into the free evolution the detuning is maximal and the
second photon is routed off (the transmitted part collapses), recovering
every half period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .errors import DegenerateConditioningError, InvalidInputError
from .model import ModelParams, derive
from .single_photon import count_rate, no_jump_state, propagator


@dataclass(frozen=True)
class HistorySet:
    """The four unnormalized mechanical history branches at t2."""

    rr: np.ndarray
    rt: np.ndarray
    tr: np.ndarray
    tt: np.ndarray
    t1: float
    t_d: float
    tau: float


@dataclass(frozen=True)
class Rate2Sample:
    """Second-photon detection rate at one (t1, t_d, tau), decomposed."""

    t1: float
    t_d: float
    tau: float
    total: float
    reflected: float
    transmitted: float
    interference: float


@dataclass
class RateGrid:
    """Rate surfaces over (tau, t_d); arrays are indexed [i_tau, j_td]."""

    tau_axis: np.ndarray
    td_axis: np.ndarray
    total: np.ndarray
    reflected: np.ndarray
    transmitted: np.ndarray
    interference: np.ndarray


def _check_times(*ts: float) -> None:
    if min(ts) < 0:
        raise InvalidInputError("times must be nonnegative")


def histories(t1: float, t_d: float, tau: float, params: ModelParams) -> HistorySet:
    """Build the four history branches for a ground-state start."""
    _check_times(t1, t_d, tau)
    d = params.fock_dim
    n = np.arange(d)
    vac = fock.vacuum_state(d)
    first = no_jump_state(t1, params).phi1  # K(t1)|0>
    k_tau = propagator(tau, 0.0, params)
    rr = math.exp(-0.5 * params.gamma * (t1 + tau)) * vac
    rt = (
        np.exp(-1j * params.omega_m * n * (t_d + tau))
        * math.exp(-0.5 * params.gamma * tau)
        * first
    )
    tr = math.exp(-0.5 * params.gamma * t1) * (k_tau @ vac)
    tt = k_tau @ (np.exp(-1j * params.omega_m * n * t_d) * first)
    return HistorySet(rr=rr, rt=rt, tr=tr, tt=tt, t1=t1, t_d=t_d, tau=tau)


def _assemble(h: HistorySet, params: ModelParams, normalized: bool) -> Rate2Sample:
    k, g = params.kappa, params.gamma
    sg = math.sqrt(k * g)
    combined = k * h.tt + g * h.rr + sg * (h.rt + h.tr)
    total = float(np.vdot(combined, combined).real)
    if total < -1e-12:
        raise ArithmeticError("rate turned negative beyond rounding")
    total = max(total, 0.0)

    def ip(a, b):
        return complex(np.vdot(a, b))

    reflected = g**2 * ip(h.rr, h.rr).real
    transmitted = k**2 * ip(h.tt, h.tt).real + k * g * (
        ip(h.rt, h.rt).real + ip(h.tr, h.tr).real
    )
    interference = 2.0 * (
        k * g * (ip(h.tt, h.rr) + ip(h.rt, h.tr)).real
        + k * sg * (ip(h.tt, h.rt) + ip(h.tt, h.tr)).real
        + g * sg * (ip(h.rr, h.rt) + ip(h.rr, h.tr)).real
    )
    scale = 1.0
    if normalized:
        scale = 1.0 / count_rate(h.t1, params).total
    return Rate2Sample(
        t1=h.t1,
        t_d=h.t_d,
        tau=h.tau,
        total=total * scale,
        reflected=reflected * scale,
        transmitted=transmitted * scale,
        interference=interference * scale,
    )


def rate(
    t1: float, t_d: float, tau: float, params: ModelParams, normalized: bool = False
) -> Rate2Sample:
    """Second-photon detection rate, decomposed.

    ``normalized`` divides by the first photon's count rate at t1, turning
    the raw squared norm into a properly conditioned rate.
    """
    return _assemble(histories(t1, t_d, tau, params), params, normalized)


def rate_grid(
    t1: float,
    tau_axis: np.ndarray,
    td_axis: np.ndarray,
    params: ModelParams,
    normalized: bool = False,
) -> RateGrid:
    """Rate surfaces over a (tau, t_d) grid.

    The injection propagator is built once per tau and the free-evolution
    phases once per grid, so the sweep is a handful of matrix products per
    tau row.
    """
    taus = np.asarray(tau_axis, dtype=float)
    tds = np.asarray(td_axis, dtype=float)
    if taus.size == 0 or tds.size == 0:
        raise InvalidInputError("axes must be nonempty")
    if np.any(np.diff(taus) <= 0) or np.any(np.diff(tds) <= 0):
        raise InvalidInputError("axes must be strictly increasing")
    _check_times(t1, float(taus[0]), float(tds[0]))

    p = params
    d = p.fock_dim
    n = np.arange(d)
    vac = fock.vacuum_state(d)
    first = no_jump_state(t1, p).phi1
    ph_td = np.exp(-1j * p.omega_m * np.outer(tds, n))  # (n_td, d)
    first_td = ph_td * first[None, :]
    k, g = p.kappa, p.gamma
    sg = math.sqrt(k * g)
    shape = (len(taus), len(tds))
    out = {
        name: np.empty(shape) for name in ("total", "reflected", "transmitted", "interference")
    }
    scale = 1.0 / count_rate(t1, p).total if normalized else 1.0

    for i, tau in enumerate(taus):
        k_tau = propagator(float(tau), 0.0, p)
        rr = math.exp(-0.5 * g * (t1 + tau)) * vac
        tr = math.exp(-0.5 * g * t1) * (k_tau @ vac)
        rt = ph_td * (
            np.exp(-1j * p.omega_m * n * tau) * math.exp(-0.5 * g * tau) * first
        )[None, :]
        tt = first_td @ k_tau.T  # row j: K(tau) applied to the t_d-evolved kick
        combined = k * tt + g * rr[None, :] + sg * (rt + tr[None, :])
        total = np.einsum("td,td->t", combined.conj(), combined).real
        rr_ip = float(np.vdot(rr, rr).real)
        tr_ip = float(np.vdot(tr, tr).real)
        rt_ip = np.einsum("td,td->t", rt.conj(), rt).real
        tt_ip = np.einsum("td,td->t", tt.conj(), tt).real
        tt_rr = np.einsum("td,d->t", tt.conj(), rr)
        rt_tr = np.einsum("td,d->t", rt.conj(), tr)
        tt_rt = np.einsum("td,td->t", tt.conj(), rt)
        tt_tr = np.einsum("td,d->t", tt.conj(), tr)
        rr_rt = np.einsum("d,td->t", rr.conj(), rt)
        rr_tr = np.full(len(tds), np.vdot(rr, tr))
        interference = 2.0 * (
            k * g * (tt_rr + rt_tr).real
            + k * sg * (tt_rt + tt_tr).real
            + g * sg * (rr_rt + rr_tr).real
        )
        out["total"][i] = np.maximum(total, 0.0) * scale
        out["reflected"][i] = g**2 * rr_ip * scale
        out["transmitted"][i] = (k**2 * tt_ip + k * g * (rt_ip + tr_ip)) * scale
        out["interference"][i] = interference * scale
    return RateGrid(tau_axis=taus, td_axis=tds, **out)


@dataclass(frozen=True)
class RouterContrast:
    suppressed: float
    resonant: float
    contrast: float


def router_contrast(t1: float, tau: float, params: ModelParams) -> RouterContrast:
    """Transmission contrast between quarter- and half-period delays.

    The kick from the first photon detunes the cavity maximally a quarter
    period into the free evolution (suppressed transmission) and restores
    resonance at half period.
    """
    tm = derive(params).t_mech
    suppressed = rate(t1, tm / 4.0, tau, params).transmitted
    resonant = rate(t1, tm / 2.0, tau, params).transmitted
    if suppressed < 1e-300:
        raise DegenerateConditioningError("suppressed transmission underflowed")
    return RouterContrast(
        suppressed=suppressed, resonant=resonant, contrast=resonant / suppressed
    )
