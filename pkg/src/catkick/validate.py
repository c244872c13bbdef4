"""Cross-validation harness: every closed form against the direct integrator.

Each criterion function returns the list of individual checks it ran plus a
dict of headline scalars; the truncation-doubling criterion reruns the others
at twice the mechanical dimension and demands every headline scalar move by
less than 1e-6.  The CLI's validate subcommand composes the same checks for a
user-chosen parameter set and reports one line per check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fock, mz, oracle, single_photon as sp, twophoton as tp, wigner
from .model import ModelParams, MZParams, derive

RATE_DEFAULTS = dict(gamma=2.0, g0=0.02, omega_m=0.02)
MOMENTUM_DEFAULTS = dict(gamma=2.0, g0=0.01, omega_m=0.02)
TWO_PHOTON_DEFAULTS = dict(gamma=2.0, g0=0.05, omega_m=0.02)

MATRIX_GAMMAS = (0.5, 1.0, 2.0)
MATRIX_G0S = (0.0, 0.02, 0.1)
MATRIX_OMEGAS = (0.02, 0.2, 0.5)
EQUIVALENCE_TIMES = (0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass
class Check:
    name: str
    threshold: float
    observed: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.note})" if self.note else ""
        return f"[{status}] {self.name}: observed {self.observed:.3e} vs {self.threshold:.3e}{extra}"


@dataclass
class CriterionResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    scalars: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _below(name: str, observed: float, threshold: float, note: str = "") -> Check:
    return Check(name, threshold, observed, observed < threshold, note)


def matrix_params(dim_factor: int = 1) -> list[ModelParams]:
    out = []
    for gamma in MATRIX_GAMMAS:
        for g0 in MATRIX_G0S:
            for omega in MATRIX_OMEGAS:
                p = ModelParams(gamma=gamma, g0=g0, omega_m=omega)
                out.append(p.with_dim(dim_factor * p.fock_dim))
    return out


def criterion_conservation(dim_factor: int = 1) -> CriterionResult:
    """Total count probability equals 1 on the full parameter matrix."""
    res = CriterionResult("probability conservation")
    worst = 0.0
    for p in matrix_params(dim_factor):
        err = abs(sp.total_count_probability(p) - 1.0)
        worst = max(worst, err)
        key = f"consv_g{p.gamma}_c{p.g0}_w{p.omega_m}"
        res.scalars[key] = err
    res.checks.append(_below("max |int R1 dt - 1| over matrix", worst, 1e-6))
    return res


def criterion_oracle_equivalence(dim_factor: int = 1, fault: float = 1.0) -> CriterionResult:
    """Detected analytic state matches the integrator jump output entrywise."""
    res = CriterionResult("one-photon oracle equivalence")
    worst = 0.0
    for p in matrix_params(dim_factor):
        states = oracle.integrate_no_jump(
            p, oracle.ground_state(p), EQUIVALENCE_TIMES[-1], checkpoints=EQUIVALENCE_TIMES
        )
        for st in states:
            det = fault * sp.detected_state(st.t, p)
            target = oracle.apply_jump(p, st)
            worst = max(worst, float(np.max(np.abs(det - target))))
    res.scalars["max_entrywise_dev"] = worst
    res.checks.append(_below("max entrywise |analytic - oracle| after one-constant calibration", worst, 1e-8))
    return res


def _refined_extremum(ts: np.ndarray, ys: np.ndarray, k: int) -> float:
    """Vertex of the parabola through the grid point k and its neighbors."""
    if k == 0 or k == len(ts) - 1:
        return float(ts[k])
    denom = ys[k - 1] - 2 * ys[k] + ys[k + 1]
    if denom == 0:
        return float(ts[k])
    return float(ts[k] + 0.5 * (ts[k] - ts[k - 1]) * (ys[k - 1] - ys[k + 1]) / denom)


def criterion_rate_minimum(dim_factor: int = 1) -> CriterionResult:
    """The total count rate dips at finite time, driven by interference."""
    res = CriterionResult("count-rate interference minimum")
    p = ModelParams(**RATE_DEFAULTS)
    p = p.with_dim(dim_factor * p.fock_dim)
    ts = np.arange(0.01, 15.0, 0.01)
    total = np.array([sp.count_rate(float(t), p).total for t in ts])
    # the dip is a local minimum; the late-time exponential tail undercuts it
    interior = (total[1:-1] < total[:-2]) & (total[1:-1] < total[2:])
    hits = np.nonzero(interior)[0]
    strict = hits.size > 0
    k = int(hits[0]) + 1 if strict else int(np.argmin(total))
    t_min = _refined_extremum(ts, total, k)
    interf = sp.count_rate(t_min, p).interference
    res.scalars.update(t_min=t_min, total_min=float(total[k]), interference_at_min=interf)
    res.checks.append(Check("strict interior minimum of total rate", 1.0, float(strict), strict))
    res.checks.append(_below("interference at the minimum", interf, 0.0))
    return res


def criterion_momentum(dim_factor: int = 1) -> CriterionResult:
    """Semiclassical momentum kick: slope -2 g0, extremum at quarter period."""
    res = CriterionResult("conditional momentum semiclassics")
    p = ModelParams(**MOMENTUM_DEFAULTS)
    p = p.with_dim(dim_factor * p.fock_dim)
    ts = np.linspace(5.0, 15.0, 21)
    mom = np.array([sp.conditional_momentum(float(t), p) for t in ts])
    slope = float(np.polyfit(ts, mom, 1)[0])
    slope_err = abs(slope - (-2.0 * p.g0)) / (2.0 * p.g0)
    tm = derive(p).t_mech
    grid = np.arange(0.5, tm / 2, 0.2)
    mags = np.abs([sp.conditional_momentum(float(t), p) for t in grid])
    t_peak = _refined_extremum(grid, mags, int(np.argmax(mags)))
    peak_err = abs(t_peak - tm / 4) / (tm / 4)
    res.scalars.update(slope=slope, t_peak=t_peak)
    res.checks.append(_below("momentum slope relative error vs -2 g0", slope_err, 0.15))
    res.checks.append(_below("momentum peak offset from quarter period", peak_err, 0.10))
    return res


def _cat_params(dim_factor: int = 1) -> MZParams:
    p = ModelParams(**RATE_DEFAULTS, fock_dim=64 * dim_factor)
    return MZParams.identical(p)


def criterion_entropy(dim_factor: int = 1) -> CriterionResult:
    """Entanglement entropy bounded by ln 2 and maximal at half period."""
    res = CriterionResult("entanglement entropy bound and peak")
    cat = _cat_params(dim_factor)
    tm = derive(cat.cavity1).t_mech
    ts = np.linspace(0.0, tm, 64)
    ent = np.array([mz.entanglement_entropy(mz.conditional_state(float(t), cat)) for t in ts])
    res.scalars.update(ent_max=float(ent.max()), t_argmax=float(ts[int(np.argmax(ent))]))
    res.checks.append(_below("entropy above ln 2", float(ent.max()) - math.log(2), 1e-9))
    res.checks.append(_below("entropy below 0", -float(ent.min()), 1e-9))
    step = ts[1] - ts[0]
    res.checks.append(
        _below("entropy argmax offset from half period", abs(res.scalars["t_argmax"] - tm / 2), step + 1e-9)
    )
    return res


def slice_scale(mu: complex) -> float:
    """Projection scale from a conditional amplitude: dominant quadrature."""
    return mu.imag if abs(mu.imag) > abs(mu.real) else mu.real


def criterion_wigner(dim_factor: int = 1) -> CriterionResult:
    """Cat-state slice negativity; Gaussian control stays nonnegative."""
    res = CriterionResult("Wigner slice negativity")
    cat = _cat_params(dim_factor)
    t_half = 0.5 * derive(cat.cavity1).t_mech
    state = mz.conditional_state(t_half, cat).normalized()
    alpha = slice_scale(sp.conditional_mean_amplitude(t_half, cat.cavity1))
    scan = (0.5, 0.75, 1.25, 1.5) if dim_factor == 1 else ()
    sl = wigner.wigner_slice(state, alpha, points=161, scan_scales=scan)
    dim = cat.fock_dim
    control = mz.BipartiteMechState(
        [(1.0, fock.coherent_state(alpha, dim), fock.coherent_state(0.4, dim))], dim
    ).normalized()
    control_min = wigner.wigner_slice(control, alpha, points=81, scan_scales=()).min_value
    res.scalars.update(slice_min=sl.min_value, control_min=control_min)
    res.checks.append(_below("conditional-cat slice minimum", sl.min_value, -1e-6))
    res.checks.append(_below("product-state slice negativity", -control_min, 1e-10))
    return res


def criterion_fidelity(dim_factor: int = 1) -> CriterionResult:
    """Detuning tolerance anchors of the cat fidelity."""
    res = CriterionResult("cat fidelity vs detuning")
    cat = _cat_params(dim_factor)
    deltas = np.array([0.1, -0.1, 0.2, 0.3])
    f = mz.fidelity_vs_detuning(cat, deltas)
    res.scalars.update(
        f_p10=float(f[0]), f_m10=float(f[1]), f_p20=float(f[2]), f_p30=float(f[3])
    )
    res.checks.append(_below("1 - fidelity at ten percent detuning", 1.0 - min(f[0], f[1]), 0.15))
    res.checks.append(_below("1 - fidelity at twenty percent detuning", 1.0 - f[2], 0.25))
    res.checks.append(
        Check("fidelity falls from twenty to thirty percent", float(f[2]), float(f[3]), f[3] < f[2])
    )
    return res


def criterion_two_photon(dim_factor: int = 1, n_points: int = 5) -> CriterionResult:
    """Closed-form second-photon rate matches the two-stage integrator."""
    res = CriterionResult("two-photon oracle equivalence")
    p = ModelParams(**TWO_PHOTON_DEFAULTS)
    p = p.with_dim(dim_factor * p.fock_dim)
    t1 = 2.0
    stage1 = oracle.apply_jump(
        p, oracle.integrate_no_jump(p, oracle.ground_state(p), t1, tol=1e-11)
    )
    tm = derive(p).t_mech
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(n_points):
        td = float(rng.uniform(0.0, 2 * tm))
        tau = float(rng.uniform(0.1, 8.0))
        _, want = oracle.two_photon_conditioned(p, t1, td, tau, tol=1e-11, stage1=stage1)
        got = tp.rate(t1, td, tau, p).total
        worst = max(worst, abs(got - want))
    res.scalars["max_rate2_dev"] = worst
    res.checks.append(_below("max |rate - two-stage oracle| over sampled points", worst, 1e-6))
    return res


def criterion_router(dim_factor: int = 1) -> CriterionResult:
    """Half-period recurrence along the delay axis; early kicks do nothing."""
    res = CriterionResult("router periodicity")
    p = ModelParams(**TWO_PHOTON_DEFAULTS)
    p = p.with_dim(dim_factor * p.fock_dim)
    tm = derive(p).t_mech
    tds = np.linspace(1e-6, 2 * tm, 101)
    late = tp.rate_grid(tm / 4.0, np.array([1.0]), tds, p).total[0]
    signal = late - late.mean()
    ac = np.correlate(signal, signal, mode="full")[len(signal) - 1 :]
    k = 1
    while k + 1 < len(ac) and not (ac[k] > ac[k - 1] and ac[k] >= ac[k + 1]):
        k += 1
    step = tds[1] - tds[0]
    lag = k * step
    early = tp.rate_grid(0.1, np.linspace(0.2, 6.0, 9), tds, p).total
    variation = float(np.max((early.max(axis=1) - early.min(axis=1)) / early.max(axis=1)))
    res.scalars.update(autocorr_lag=lag, early_variation=variation)
    res.checks.append(
        _below("autocorrelation lag offset from half period", abs(lag - tm / 2), step + 1e-9)
    )
    res.checks.append(_below("early-detection variation along delay axis", variation, 0.02))
    return res


NUMBERED_CRITERIA = (
    criterion_conservation,
    criterion_oracle_equivalence,
    criterion_rate_minimum,
    criterion_momentum,
    criterion_entropy,
    criterion_wigner,
    criterion_fidelity,
    criterion_two_photon,
    criterion_router,
)


def criterion_convergence(base: list[CriterionResult] | None = None) -> CriterionResult:
    """Doubling the truncation moves no headline scalar; integrator is order 4."""
    res = CriterionResult("truncation and integrator convergence")
    if base is None:
        base = [fn(dim_factor=1) for fn in NUMBERED_CRITERIA]
    worst_key, worst = "", 0.0
    for fn, base_res in zip(NUMBERED_CRITERIA, base):
        doubled = fn(dim_factor=2)
        for key, val in base_res.scalars.items():
            change = abs(doubled.scalars[key] - val)
            if change > worst:
                worst_key, worst = f"{base_res.name}:{key}", change
    res.scalars["max_scalar_change"] = worst
    res.checks.append(
        _below("max headline-scalar change under dim doubling", worst, 1e-6, note=worst_key)
    )

    p = ModelParams(**RATE_DEFAULTS)
    ref = oracle.integrate_no_jump(p, oracle.ground_state(p), 2.0, dt=0.0025)
    coarse = oracle.integrate_no_jump(p, oracle.ground_state(p), 2.0, dt=0.02)
    fine = oracle.integrate_no_jump(p, oracle.ground_state(p), 2.0, dt=0.01)
    ratio = float(
        np.linalg.norm(coarse.amps - ref.amps) / np.linalg.norm(fine.amps - ref.amps)
    )
    res.scalars["halving_ratio"] = ratio
    res.checks.append(
        Check("step-halving error ratio in [12, 20]", 16.0, ratio, 12.0 < ratio < 20.0)
    )
    return res


def run_validation(params: ModelParams, fault: float = 1.0) -> list[Check]:
    """Checks for the CLI validate subcommand: parameter-aware, one line each."""
    checks: list[Check] = []

    err = abs(sp.total_count_probability(params) - 1.0)
    checks.append(_below("count probability conservation", err, 1e-6))

    states = oracle.integrate_no_jump(
        params, oracle.ground_state(params), 10.0, checkpoints=EQUIVALENCE_TIMES
    )
    worst = max(
        float(np.max(np.abs(fault * sp.detected_state(st.t, params) - oracle.apply_jump(params, st))))
        for st in states
    )
    checks.append(_below("analytic vs oracle detected state", worst, 1e-8))

    doubled = params.with_dim(2 * params.fock_dim)
    trunc = max(
        abs(sp.count_rate(t, params).total - sp.count_rate(t, doubled).total)
        for t in (0.5, 2.0, 10.0, 40.0)
    )
    checks.append(_below("truncation convergence of count rate", trunc, 1e-9))

    eps = 1e-4
    rate_dev = 0.0
    for t in (0.5, 2.0, 6.0):
        sm, s0, sp_ = oracle.integrate_no_jump(
            params, oracle.ground_state(params), t + eps, checkpoints=(t - eps, t, t + eps)
        )
        deriv = -(sp_.norm2() - sm.norm2()) / (2 * eps)
        jump = oracle.apply_jump(params, s0)
        rate = float(np.vdot(jump, jump).real)
        rate_dev = max(rate_dev, abs(deriv - rate) / rate)
    checks.append(_below("norm decay equals count rate (finite difference)", rate_dev, 1e-5))

    cat = MZParams.identical(params)
    ost = oracle.integrate_no_jump(cat, oracle.ground_state(cat), 2.0, tol=1e-11)
    target = oracle.apply_jump(cat, ost, "D1")
    got = fault * mz.conditional_state(2.0, cat).to_matrix()
    checks.append(_below("interferometer cat vs oracle", float(np.max(np.abs(got - target))), 1e-8))

    tm = derive(params).t_mech
    ent = [
        mz.entanglement_entropy(mz.conditional_state(float(t), cat))
        for t in np.linspace(0.0, tm, 17)
    ]
    checks.append(_below("entropy within [0, ln 2]", max(max(ent) - math.log(2), -min(ent)), 1e-9))

    stage1 = oracle.apply_jump(
        params, oracle.integrate_no_jump(params, oracle.ground_state(params), 1.5, tol=1e-11)
    )
    rng = np.random.default_rng(7)
    worst2 = 0.0
    for _ in range(3):
        td = float(rng.uniform(0.0, 2 * tm))
        tau = float(rng.uniform(0.1, 6.0))
        _, want = oracle.two_photon_conditioned(params, 1.5, td, tau, tol=1e-11, stage1=stage1)
        worst2 = max(worst2, abs(tp.rate(1.5, td, tau, params).total - want))
    checks.append(_below("two-photon rate vs two-stage oracle", worst2, 1e-6))

    return checks
