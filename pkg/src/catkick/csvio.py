"""Deterministic CSV emission shared by the CLI subcommands.

Every file starts with the unit-convention comment line the downstream
renderer checks, then parameter comment lines, then a column header.
Numbers are written with 17 significant digits so values round-trip exactly
in double precision; output is byte-identical across runs for a fixed
configuration.
"""

from __future__ import annotations

import os
from collections.abc import Sequence

import numpy as np

UNITS_LINE = "# units: rates in kappa, times in 1/kappa; convention x=(b+b_dag)/sqrt2"


def format_number(x: float) -> str:
    return f"{x:.17g}"


def write_csv(
    path: str,
    columns: dict[str, np.ndarray | Sequence[float]],
    param_lines: Sequence[str] = (),
) -> None:
    arrays = [np.asarray(col, dtype=float) for col in columns.values()]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("all columns must share a length")
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(UNITS_LINE + "\n")
            for line in param_lines:
                fh.write(f"# {line}\n")
            fh.write(",".join(columns.keys()) + "\n")
            for i in range(length):
                fh.write(",".join(format_number(a[i]) for a in arrays) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path!r}: {exc}") from exc


def params_lines(params, extra: Sequence[str] = ()) -> list[str]:
    out = [
        "params: "
        f"gamma={format_number(params.gamma)} g0={format_number(params.g0)} "
        f"omega_m={format_number(params.omega_m)} kappa={format_number(params.kappa)} "
        f"fock_dim={params.fock_dim}"
    ]
    out.extend(extra)
    return out
