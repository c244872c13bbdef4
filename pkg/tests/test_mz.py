import math

import numpy as np
import pytest

from catkick import fock, mz, oracle
from catkick.errors import DegenerateInputError, InvalidInputError
from catkick.model import ModelParams, MZParams, derive

CAT_PARAMS = ModelParams(gamma=2.0, g0=0.02, omega_m=0.02, fock_dim=32)
CAT = MZParams.identical(CAT_PARAMS)


def test_cat_coefficients_match_cascade_values():
    c1, c2, c3 = mz.cat_coefficients(CAT)
    want = -math.sqrt(CAT.gamma) * CAT_PARAMS.kappa / 2.0
    assert abs(c1 - want) < 1e-8
    assert abs(c2 - want) < 1e-8
    assert abs(c3 - math.sqrt(CAT.gamma)) < 1e-8


def test_conditional_state_at_zero_is_joint_vacuum():
    st = mz.conditional_state(0.0, CAT)
    mat = st.to_matrix()
    vac_part = abs(mat[0, 0]) ** 2
    assert st.norm2() == pytest.approx(vac_part, rel=1e-12)
    assert st.norm2() == pytest.approx(CAT.gamma, rel=1e-9)


def test_conditional_state_swap_symmetry():
    st = mz.conditional_state(2.0, CAT)
    mat = st.to_matrix()
    np.testing.assert_allclose(mat, mat.T, atol=1e-12)


def test_conditional_state_matches_interferometer_oracle():
    for t in (0.5, 2.0, 5.0):
        ost = oracle.integrate_no_jump(CAT, oracle.ground_state(CAT), t, tol=1e-11)
        target = oracle.apply_jump(CAT, ost, "D1")
        got = mz.conditional_state(t, CAT).to_matrix()
        assert np.max(np.abs(got - target)) < 1e-8


def test_norm_equals_bright_port_rate():
    for t in (0.5, 2.0, 5.0):
        ost = oracle.integrate_no_jump(CAT, oracle.ground_state(CAT), t, tol=1e-11)
        d1 = oracle.apply_jump(CAT, ost, "D1")
        rate = float(np.vdot(d1, d1).real)
        assert abs(mz.conditional_state(t, CAT).norm2() - rate) < 1e-8


def test_entropy_product_state():
    u = fock.coherent_state(1.0, 16)
    v = fock.coherent_state(-0.5, 16)
    st = mz.BipartiteMechState([(2.0, u, v)], 16)
    assert mz.entanglement_entropy(st) == pytest.approx(0.0, abs=1e-12)


def test_entropy_bell_form():
    u = fock.basis_state(1, 8)
    vac = fock.vacuum_state(8)
    st = mz.BipartiteMechState([(1.0, u, vac), (1.0, vac, u)], 8)
    assert mz.entanglement_entropy(st) == pytest.approx(math.log(2), abs=1e-12)


def test_entropy_zero_norm_rejected():
    vac = fock.vacuum_state(8)
    with pytest.raises(DegenerateInputError):
        mz.entanglement_entropy(mz.BipartiteMechState([(0.0, vac, vac)], 8))


def test_entropy_bounded_and_peaks_at_half_period():
    tm = derive(CAT_PARAMS).t_mech
    ts = np.linspace(0.0, tm, 65)
    ent = np.array(
        [mz.entanglement_entropy(mz.conditional_state(float(t), CAT)) for t in ts]
    )
    assert np.all(ent >= -1e-9)
    assert np.all(ent <= math.log(2) + 1e-9)
    step = ts[1] - ts[0]
    assert abs(ts[int(np.argmax(ent))] - tm / 2) <= step + 1e-9


def test_trajectory_morphology():
    # The conditional amplitude circles the displaced equilibrium: its
    # magnitude is maximal at half period (where it is real-dominant in this
    # quadrature convention) and its imaginary part is extremal near the
    # quarter period, consistent with the momentum-kick picture.
    tm = derive(CAT_PARAMS).t_mech
    ts = np.linspace(1e-3, tm, 65)
    traj = mz.mean_amplitude_trajectory(CAT, ts)
    assert abs(traj[0]) < 5e-3
    mags = np.abs(traj)
    step = ts[1] - ts[0]
    # the weak Kerr phase delays the magnitude peak by ~2/kappa, within one
    # step of the half period on this grid
    assert abs(ts[int(np.argmax(mags))] - tm / 2) <= step + 1e-9
    half = traj[int(np.argmin(np.abs(ts - tm / 2)))]
    assert abs(half.imag) < 0.1 * abs(half.real)
    imags = np.abs(traj.imag)
    t_imax = ts[int(np.argmax(imags))]
    assert min(abs(t_imax - tm / 4), abs(t_imax - 3 * tm / 4)) <= 0.1 * tm / 4


def test_trajectory_grid_validation():
    with pytest.raises(InvalidInputError):
        mz.mean_amplitude_trajectory(CAT, [])
    with pytest.raises(InvalidInputError):
        mz.mean_amplitude_trajectory(CAT, [2.0, 1.0])


def test_fidelity_identity_and_anchors():
    deltas = np.array([0.0, 0.1, -0.1, 0.2, -0.2, 0.3, -0.3])
    f = mz.fidelity_vs_detuning(CAT, deltas)
    assert abs(f[0] - 1.0) < 1e-12
    assert np.all((f >= 0.0) & (f <= 1.0 + 1e-12))
    # anchors: ~0.9 at ten percent detuning (both signs), ~0.8 at twenty
    # percent (the slow-arm side sits lower), then a rapid fall
    assert f[1] >= 0.85 and f[2] >= 0.85
    assert f[3] >= 0.75
    assert f[5] < f[3] and f[6] < f[4]


def test_fidelity_rejects_bad_detuning():
    with pytest.raises(InvalidInputError):
        mz.fidelity_vs_detuning(CAT, np.array([-1.0]))


def test_bipartite_state_validation():
    vac = fock.vacuum_state(8)
    with pytest.raises(InvalidInputError):
        mz.BipartiteMechState([(1.0, vac, fock.vacuum_state(9))], 8)
