"""Acceptance suite: one test per criterion, one printed line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the pass/fail lines.
The final truncation-doubling criterion reruns the other criteria at twice
the mechanical dimension, so this module is the slow part of the suite.
"""

import numpy as np

from catkick import validate as val

_BASE_RESULTS: dict[int, val.CriterionResult] = {}


def _run(number: int, fn, *args, **kwargs):
    res = fn(*args, **kwargs)
    _BASE_RESULTS[number] = res
    status = "PASS" if res.passed else "FAIL"
    print(f"\n[criterion {number:2d}] {status}: {res.name}")
    for c in res.checks:
        print(f"    {c.line()}")
    assert res.passed, f"criterion {number} failed: {res.name}\n" + "\n".join(
        c.line() for c in res.checks if not c.passed
    )
    return res


def test_criterion_01_probability_conservation():
    res = _run(1, val.criterion_conservation)
    assert max(res.scalars.values()) < 1e-6


def test_criterion_02_oracle_equivalence():
    res = _run(2, val.criterion_oracle_equivalence)
    assert res.scalars["max_entrywise_dev"] < 1e-8


def test_criterion_03_rate_minimum():
    res = _run(3, val.criterion_rate_minimum)
    assert res.scalars["t_min"] > 0
    assert res.scalars["interference_at_min"] < 0


def test_criterion_04_momentum_semiclassics():
    _run(4, val.criterion_momentum)


def test_criterion_05_entropy():
    _run(5, val.criterion_entropy)


def test_criterion_06_wigner_negativity():
    res = _run(6, val.criterion_wigner)
    assert res.scalars["slice_min"] < 0
    assert res.scalars["control_min"] >= -1e-10


def test_criterion_07_fidelity_anchors():
    res = _run(7, val.criterion_fidelity)
    assert min(res.scalars["f_p10"], res.scalars["f_m10"]) >= 0.85
    assert res.scalars["f_p20"] >= 0.75
    assert res.scalars["f_p30"] < res.scalars["f_p20"]


def test_criterion_08_two_photon_equivalence():
    res = _run(8, val.criterion_two_photon)
    assert res.scalars["max_rate2_dev"] < 1e-6


def test_criterion_09_router_periodicity():
    _run(9, val.criterion_router)


def test_criterion_10_convergence():
    base = [_BASE_RESULTS[k] for k in range(1, 10)] if len(_BASE_RESULTS) >= 9 else None
    res = _run(10, val.criterion_convergence, base)
    assert res.scalars["max_scalar_change"] < 1e-6
    assert 12.0 < res.scalars["halving_ratio"] < 20.0
