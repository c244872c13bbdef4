import math

import numpy as np
import pytest

from catkick import oracle, single_photon as sp
from catkick.errors import InvalidInputError
from catkick.model import ModelParams, MZParams

FIG_RATE = ModelParams(gamma=2.0, g0=0.02, omega_m=0.02)


def small(g0=0.05, gamma=2.0, omega_m=0.3, dim=6):
    return ModelParams(gamma=gamma, g0=g0, omega_m=omega_m, fock_dim=dim)


def test_zero_coupling_generator_block_diagonalizes():
    # without radiation pressure the generator is photonic 2x2 (cascade plus
    # damping) tensor identity, plus identity tensor free mechanics
    p = small(g0=0.0)
    mat = oracle.effective_generator(p).to_matrix()
    d = p.fock_dim
    free = -1j * p.omega_m * np.diag(np.arange(d))
    kg = math.sqrt(p.kappa * p.gamma)
    ph = np.array([[-0.5 * p.kappa, -kg], [0.0, -0.5 * p.gamma]], dtype=complex)
    want = np.kron(ph, np.eye(d)) + np.kron(np.eye(2), free)
    np.testing.assert_allclose(mat, want, atol=1e-14)


def test_dissipator_part_negative_semidefinite():
    gen = oracle.effective_generator(small())
    mat = gen.to_matrix()
    herm = 0.5 * (mat + mat.conj().T)
    evals = np.linalg.eigvalsh(herm)
    assert evals.max() <= 1e-12


def test_mz_generator_commutes_with_arm_swap():
    p = small(dim=6)
    mz = MZParams.identical(p)
    gen = oracle.effective_generator(mz)
    mat = gen.to_matrix()
    d = p.fock_dim
    perm_ph = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float)
    swap = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    s = np.kron(perm_ph, swap)
    np.testing.assert_allclose(mat @ s, s @ mat, atol=1e-10)


def test_mz_blockwise_apply_matches_dense():
    p = small(dim=5)
    mz = MZParams.identical(p)
    gen = oracle.effective_generator(mz)
    rng = np.random.default_rng(7)
    amps = rng.normal(size=(3, 5, 5)) + 1j * rng.normal(size=(3, 5, 5))
    got = gen.apply(amps).reshape(-1)
    want = gen.to_matrix() @ amps.reshape(-1)
    np.testing.assert_allclose(got, want, atol=1e-13)


def test_source_decay_without_coupling():
    p = ModelParams(gamma=1.7, g0=0.0, omega_m=0.3, fock_dim=8)
    st = oracle.integrate_no_jump(p, oracle.ground_state(p), 3.0)
    assert abs(st.amps[1, 0] - math.exp(-0.5 * 1.7 * 3.0)) < 1e-10
    # everything else in the source branch stays empty
    assert np.max(np.abs(st.amps[1, 1:])) < 1e-14


def test_step_halving_is_fourth_order():
    p = FIG_RATE
    ref = oracle.integrate_no_jump(p, oracle.ground_state(p), 2.0, dt=0.0025)
    coarse = oracle.integrate_no_jump(p, oracle.ground_state(p), 2.0, dt=0.02)
    fine = oracle.integrate_no_jump(p, oracle.ground_state(p), 2.0, dt=0.01)
    e_coarse = np.linalg.norm(coarse.amps - ref.amps)
    e_fine = np.linalg.norm(fine.amps - ref.amps)
    assert 12.0 < e_coarse / e_fine < 20.0


def test_norm_never_exceeds_one():
    states = oracle.integrate_no_jump(
        FIG_RATE, oracle.ground_state(FIG_RATE), 5.0, checkpoints=(1.0, 2.0, 5.0)
    )
    norms = [s.norm2() for s in states]
    assert all(n <= 1.0 + 1e-12 for n in norms)
    assert all(a >= b for a, b in zip(norms, norms[1:]))


def test_count_rate_identity_finite_difference():
    # -d|psi|^2/dt equals the total jump rate |J psi|^2
    p = FIG_RATE
    eps = 1e-4
    for t in (0.5, 2.0, 6.0):
        sm, s0, sp_ = oracle.integrate_no_jump(
            p, oracle.ground_state(p), t + eps, checkpoints=(t - eps, t, t + eps)
        )
        deriv = -(sp_.norm2() - sm.norm2()) / (2 * eps)
        jump = oracle.apply_jump(p, s0)
        rate = float(np.vdot(jump, jump).real)
        assert abs(deriv - rate) / rate < 1e-5


def test_survival_matches_integrated_rate():
    p = FIG_RATE
    t = 3.0
    st = oracle.integrate_no_jump(p, oracle.ground_state(p), t)
    absorbed = sp._adaptive_simpson(lambda u: sp.count_rate(u, p).total, 0.0, t, 1e-10)
    assert abs(st.norm2() - (1.0 - absorbed)) < 1e-6


def test_jump_at_start_is_pure_source():
    p = FIG_RATE
    out = oracle.apply_jump(p, oracle.ground_state(p))
    want = np.zeros(p.fock_dim, dtype=complex)
    want[0] = math.sqrt(p.gamma)
    np.testing.assert_allclose(out, want, atol=1e-15)
    assert float(np.vdot(out, out).real) == pytest.approx(p.gamma)


def test_mz_dark_port():
    # An empty interferometer routes everything to D1: with g0 = 0 the D2
    # amplitude cancels exactly.  With radiation pressure on, the mechanical
    # displacement stores which-arm information, so the cancellation is only
    # approximate; the residual D2 rate scales with the displacement and
    # stays far below the bright port at these couplings.
    empty = MZParams.identical(ModelParams(gamma=2.0, g0=0.0, omega_m=0.02, fock_dim=16))
    st = oracle.integrate_no_jump(empty, oracle.ground_state(empty), 2.0)
    d2 = oracle.apply_jump(empty, st, "D2")
    assert float(np.vdot(d2, d2).real) < 1e-12

    p = ModelParams(gamma=2.0, g0=0.02, omega_m=0.02, fock_dim=32)
    mz = MZParams.identical(p)
    st = oracle.integrate_no_jump(mz, oracle.ground_state(mz), 2.0)
    rate2 = float(np.vdot(oracle.apply_jump(mz, st, "D2"), oracle.apply_jump(mz, st, "D2")).real)
    rate1 = float(np.vdot(oracle.apply_jump(mz, st, "D1"), oracle.apply_jump(mz, st, "D1")).real)
    assert rate2 < 0.01 * rate1


def test_mz_swap_invariance_of_state():
    p = ModelParams(gamma=2.0, g0=0.02, omega_m=0.02, fock_dim=24)
    mz = MZParams.identical(p)
    st = oracle.integrate_no_jump(mz, oracle.ground_state(mz), 1.5)
    swapped = st.amps[[0, 2, 1]].transpose(0, 2, 1)
    f = abs(np.vdot(swapped, st.amps)) ** 2 / (st.norm2() ** 2)
    assert f > 1.0 - 1e-10


def test_two_photon_rate_ignores_delay_without_coupling():
    p = ModelParams(gamma=2.0, g0=0.0, omega_m=0.02, fock_dim=8)
    rates = [
        oracle.two_photon_conditioned(p, 1.0, td, 0.7)[1] for td in (0.0, 40.0, 111.0)
    ]
    spread = (max(rates) - min(rates)) / max(rates)
    assert spread < 1e-9


def test_bad_detector_rejected():
    with pytest.raises(InvalidInputError):
        oracle.apply_jump(FIG_RATE, oracle.ground_state(FIG_RATE), "D7")


def test_backwards_time_rejected():
    st = oracle.integrate_no_jump(FIG_RATE, oracle.ground_state(FIG_RATE), 1.0)
    with pytest.raises(InvalidInputError):
        oracle.integrate_no_jump(FIG_RATE, st, 0.5)
