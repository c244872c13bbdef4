"""catkick command line: conditional-optomechanics curves and grids as CSV.

Subcommands (defaults reproduce the standard parameter sets; run with no
flags to regenerate every curve the renderer consumes):

    rate1     single-photon count rate decomposition vs detection time
    moments   conditional mean amplitude and momentum vs detection time
    mz        interferometer cat: entropy, trajectory, Wigner slice, fidelity
    rate2     second-photon rate surfaces over (tau, t_d)
    validate  cross-check the closed forms against the direct integrator

Exit status: 0 on success, 1 on validation failure, 2 on usage errors.
No network access and no environment variables; output is deterministic.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import mz as mzmod, single_photon as sp, twophoton as tp, validate as val, wigner
from .csvio import format_number, params_lines, write_csv
from .errors import InvalidInputError
from .model import ModelParams, MZParams, derive


def _params_from(args, defaults: dict) -> ModelParams:
    return ModelParams(
        gamma=defaults["gamma"] if args.gamma is None else args.gamma,
        g0=defaults["g0"] if args.g0 is None else args.g0,
        omega_m=defaults["omega_m"] if args.omega_m is None else args.omega_m,
        fock_dim=args.fock_dim,
    )


def _add_param_flags(sub):
    sub.add_argument("--gamma", type=float, default=None, help="source decay rate (units of kappa)")
    sub.add_argument("--g0", type=float, default=None, help="radiation-pressure coupling (units of kappa)")
    sub.add_argument("--omega-m", type=float, default=None, help="mechanical frequency (units of kappa)")
    sub.add_argument("--fock-dim", type=int, default=0, help="mechanical truncation (0 = adaptive)")
    sub.add_argument("--out", default=None, help="output path (rate1/moments/rate2) or directory (mz)")
    sub.add_argument(
        "--validate",
        action="store_true",
        help="run the integrator cross-checks for these parameters after writing",
    )


def _maybe_validate(args, params) -> int:
    if not args.validate:
        return 0
    checks = val.run_validation(params)
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else 1


def cmd_rate1(args) -> int:
    params = _params_from(args, val.RATE_DEFAULTS)
    ts = np.linspace(0.0, args.t_max, args.steps)
    samples = sp.count_rate_series(ts, params)
    write_csv(
        args.out or "out/rate1.csv",
        {
            "t": ts,
            "total": [s.total for s in samples],
            "reflected": [s.reflected for s in samples],
            "transmitted": [s.transmitted for s in samples],
            "interference": [s.interference for s in samples],
        },
        params_lines(params),
    )
    return _maybe_validate(args, params)


def cmd_moments(args) -> int:
    base = _params_from(args, val.MOMENTUM_DEFAULTS)
    omegas = [base.omega_m] if args.omega_m is not None else [0.5, 0.2, 0.02]
    ts = np.linspace(0.0, args.t_max, args.steps)
    cols = {"omega_m": [], "t": [], "re_b": [], "im_b": [], "momentum": []}
    for omega in omegas:
        params = ModelParams(
            gamma=base.gamma, g0=base.g0, omega_m=omega, fock_dim=args.fock_dim
        )
        for t in ts:
            mu = sp.conditional_mean_amplitude(float(t), params)
            cols["omega_m"].append(omega)
            cols["t"].append(float(t))
            cols["re_b"].append(mu.real)
            cols["im_b"].append(mu.imag)
            cols["momentum"].append(2.0 * mu.imag)
    write_csv(
        args.out or "out/moments.csv",
        cols,
        params_lines(base, [f"omega_m_series: {' '.join(map(format_number, omegas))}"]),
    )
    return _maybe_validate(args, base)


def cmd_mz(args) -> int:
    params = _params_from(args, val.RATE_DEFAULTS)
    cat = MZParams.identical(params)
    tm = derive(params).t_mech
    outdir = args.out or "out"

    ts = np.linspace(0.0, tm, args.steps)
    entropy = [
        mzmod.entanglement_entropy(mzmod.conditional_state(float(t), cat)) for t in ts
    ]
    write_csv(f"{outdir}/mz_entropy.csv", {"t": ts, "entropy": entropy}, params_lines(params))

    traj = mzmod.mean_amplitude_trajectory(cat, ts)
    write_csv(
        f"{outdir}/mz_trajectory.csv",
        {"t": ts, "re_b": traj.real, "im_b": traj.imag},
        params_lines(params),
    )

    t_half = tm / 2.0
    mu = sp.conditional_mean_amplitude(t_half, params)
    alpha = val.slice_scale(mu)
    state = mzmod.conditional_state(t_half, cat).normalized()
    sl = wigner.wigner_slice(state, alpha, points=args.wigner_points)
    xg, pg = np.meshgrid(sl.x_axis, sl.p_axis)
    write_csv(
        f"{outdir}/mz_wigner.csv",
        {"x1": xg.ravel(), "p1": pg.ravel(), "w": sl.values.ravel()},
        params_lines(
            params,
            [
                f"slice: {sl.constraint} alpha={format_number(sl.alpha)} t={format_number(t_half)}",
                f"min: value={format_number(sl.min_value)} x1={format_number(sl.min_x1)} "
                f"p1={format_number(sl.min_p1)} deeper_off_slice={int(sl.deeper_off_slice)}",
            ],
        ),
    )

    deltas = np.linspace(-args.delta_max, args.delta_max, args.delta_steps)
    fid = mzmod.fidelity_vs_detuning(cat, deltas)
    write_csv(
        f"{outdir}/mz_fidelity.csv",
        {"delta": deltas, "fidelity": fid},
        params_lines(params, [f"conditioned_at: t={format_number(t_half)}"]),
    )
    return _maybe_validate(args, params)


def cmd_rate2(args) -> int:
    params = _params_from(args, val.TWO_PHOTON_DEFAULTS)
    tm = derive(params).t_mech
    td_max = args.td_max if args.td_max is not None else 2.0 * tm
    taus = np.linspace(0.0, args.tau_max, args.steps)
    tds = np.linspace(0.0, td_max, args.steps)
    grid = tp.rate_grid(args.t1, taus, tds, params, normalized=args.normalize_r2)
    tau_col = np.repeat(taus, len(tds))
    td_col = np.tile(tds, len(taus))
    write_csv(
        args.out or "out/rate2.csv",
        {
            "tau": tau_col,
            "td": td_col,
            "total": grid.total.ravel(),
            "reflected": grid.reflected.ravel(),
            "transmitted": grid.transmitted.ravel(),
            "interference": grid.interference.ravel(),
        },
        params_lines(
            params,
            [
                f"t1: {format_number(args.t1)}",
                f"normalized: {int(args.normalize_r2)}",
            ],
        ),
    )
    return _maybe_validate(args, params)


def cmd_validate(args) -> int:
    params = _params_from(args, val.RATE_DEFAULTS)
    fault = 1.01 if args.inject_fault else 1.0
    checks = val.run_validation(params, fault=fault)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catkick",
        description="Conditional single-photon optomechanics simulations (CSV output).",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_rate1 = subs.add_parser("rate1", help="count-rate decomposition vs detection time")
    _add_param_flags(p_rate1)
    p_rate1.add_argument("--t-max", type=float, default=40.0)
    p_rate1.add_argument("--steps", type=int, default=2001)
    p_rate1.set_defaults(fn=cmd_rate1)

    p_mom = subs.add_parser("moments", help="conditional amplitude and momentum")
    _add_param_flags(p_mom)
    p_mom.add_argument("--t-max", type=float, default=160.0)
    p_mom.add_argument("--steps", type=int, default=801)
    p_mom.set_defaults(fn=cmd_moments)

    p_mz = subs.add_parser("mz", help="interferometer cat state outputs")
    _add_param_flags(p_mz)
    p_mz.add_argument("--steps", type=int, default=129, help="time points over one period")
    p_mz.add_argument("--delta-max", type=float, default=0.3)
    p_mz.add_argument("--delta-steps", type=int, default=25)
    p_mz.add_argument("--wigner-points", type=int, default=161)
    p_mz.set_defaults(fn=cmd_mz)

    p_rate2 = subs.add_parser("rate2", help="second-photon rate surfaces")
    _add_param_flags(p_rate2)
    p_rate2.add_argument("--t1", type=float, required=True, help="first detection time (1/kappa)")
    p_rate2.add_argument("--tau-max", type=float, default=10.0)
    p_rate2.add_argument("--td-max", type=float, default=None, help="default: two mechanical periods")
    p_rate2.add_argument("--steps", type=int, default=101)
    p_rate2.add_argument("--normalize-r2", action="store_true", help="divide by the first photon's rate")
    p_rate2.set_defaults(fn=cmd_rate2)

    p_val = subs.add_parser("validate", help="closed forms vs direct integrator")
    _add_param_flags(p_val)
    p_val.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p_val.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # grid sanity shared by all subcommands
    for attr in ("steps", "delta_steps", "wigner_points"):
        if getattr(args, attr, None) is not None and getattr(args, attr) < 2:
            print(f"error: --{attr.replace('_', '-')} must be at least 2", file=sys.stderr)
            return 2
    for attr in ("t_max", "tau_max", "td_max", "delta_max"):
        if getattr(args, attr, None) is not None and getattr(args, attr) <= 0:
            print(f"error: --{attr.replace('_', '-')} must be positive", file=sys.stderr)
            return 2
    try:
        return args.fn(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
