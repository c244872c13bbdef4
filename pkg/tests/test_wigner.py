import math

import numpy as np
import pytest

from catkick import fock, mz, wigner
from catkick.errors import DegenerateInputError, InvalidProjectionError
from catkick.model import ModelParams, MZParams


def product_state(u, v, dim):
    return mz.BipartiteMechState([(1.0, u, v)], dim).normalized()


def reference_cat(u, dim):
    c = fock.coherent_state(u, dim)
    vac = fock.vacuum_state(dim)
    return mz.BipartiteMechState([(1.0, c, vac), (1.0, vac, c)], dim).normalized()


def closed_form_cat_wigner(u, z1, z2):
    """Two-mode Wigner of N(|u>|0> + |0>|u>) from coherent-state algebra."""
    n2 = 2.0 * (1.0 + math.exp(-abs(u) ** 2))
    bump1 = np.exp(-2 * np.abs(z1 - u) ** 2) * np.exp(-2 * np.abs(z2) ** 2)
    bump2 = np.exp(-2 * np.abs(z1) ** 2) * np.exp(-2 * np.abs(z2 - u) ** 2)
    cross = 2.0 * np.real(
        np.exp(
            -abs(u) ** 2
            - 2 * np.abs(z1) ** 2
            - 2 * np.abs(z2) ** 2
            + 2 * np.conj(u) * z1
            + 2 * u * np.conj(z2)
        )
    )
    return (bump1 + bump2 + cross) / (n2 * math.pi**2)


def test_vacuum_origin_value():
    st = product_state(fock.vacuum_state(16), fock.vacuum_state(16), 16)
    assert wigner.wigner_two_mode_at(st, 0, 0, 0, 0) == pytest.approx(
        1.0 / math.pi**2, rel=1e-12
    )


def test_vacuum_marginal_recovers_single_mode():
    dim = 16
    st = product_state(fock.vacuum_state(dim), fock.vacuum_state(dim), dim)
    axis = np.linspace(-6.0, 6.0, 81)
    step = axis[1] - axis[0]
    x2, p2 = np.meshgrid(axis, axis)
    for x1, p1 in ((0.0, 0.0), (0.7, -0.4), (1.5, 1.0)):
        marg = (
            wigner.wigner_two_mode_batch(
                st, np.full_like(x2, x1), np.full_like(p2, p1), x2, p2
            ).sum()
            * step**2
        )
        want = math.exp(-(x1**2) - p1**2) / math.pi
        assert abs(marg - want) < 1e-4


def test_coherent_peak_location_and_value():
    dim = 24
    a = 0.9 + 0.4j
    st = product_state(fock.coherent_state(a, dim), fock.vacuum_state(dim), dim)
    x_peak, p_peak = math.sqrt(2) * a.real, math.sqrt(2) * a.imag
    peak = wigner.wigner_two_mode_at(st, x_peak, p_peak, 0, 0)
    assert peak == pytest.approx(1.0 / math.pi**2, rel=1e-10)
    axis = np.linspace(-3, 3, 41)
    xg, pg = np.meshgrid(axis, axis)
    vals = wigner.wigner_two_mode_batch(st, xg, pg, np.zeros_like(xg), np.zeros_like(pg))
    kp, kx = np.unravel_index(np.argmax(vals), vals.shape)
    step = axis[1] - axis[0]
    assert abs(axis[kx] - x_peak) <= step and abs(axis[kp] - p_peak) <= step


def test_matches_closed_form_reference_cat():
    dim = 40
    u = 1.5
    cat = reference_cat(u, dim)
    rng = np.random.default_rng(3)
    pts = rng.uniform(-3, 3, size=(30, 4))
    got = wigner.wigner_two_mode_batch(cat, pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3])
    z1 = (pts[:, 0] + 1j * pts[:, 1]) / math.sqrt(2)
    z2 = (pts[:, 2] + 1j * pts[:, 3]) / math.sqrt(2)
    want = closed_form_cat_wigner(u, z1, z2)
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_displaced_parity_consistent_with_expm_construction():
    # two independent displacement constructions: triangular factorization
    # here, padded generator exponential in the fock module
    dim = 24
    zeta = 1.3 - 0.7j
    parity = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    want = fock.displacement_matrix(zeta, dim) * parity[None, :]
    basis = np.eye(dim, dtype=complex)
    got = wigner.displaced_parity_elements(np.array([zeta]), basis)[0]
    assert np.max(np.abs(got[:12, :12] - want[:12, :12])) < 1e-8


def test_reference_cat_slice_negative():
    cat = reference_cat(1.5, 40)
    sl = wigner.wigner_slice(cat, 1.5, points=81)
    assert sl.min_value < -1e-4
    assert sl.values.shape == (81, 81)


def test_product_coherent_slice_nonnegative():
    dim = 40
    st = product_state(
        fock.coherent_state(1.5, dim), fock.coherent_state(0.5, dim), dim
    )
    sl = wigner.wigner_slice(st, 1.5, points=61)
    assert sl.min_value >= -1e-10


def test_four_dim_norm_reference_cat():
    assert wigner.four_dim_norm(reference_cat(1.5, 40)) == pytest.approx(1.0, abs=1e-3)


def test_conditional_cat_slice_negative():
    p = ModelParams(gamma=2.0, g0=0.02, omega_m=0.02, fock_dim=32)
    cat = MZParams.identical(p)
    from catkick.model import derive

    t_half = 0.5 * derive(p).t_mech
    state = mz.conditional_state(t_half, cat).normalized()
    from catkick import single_photon as sp

    mu = sp.conditional_mean_amplitude(t_half, p)
    alpha = mu.imag if abs(mu.imag) > abs(mu.real) else mu.real
    sl = wigner.wigner_slice(state, alpha, points=81)
    assert sl.min_value < -1e-5


def test_requires_normalized_state():
    vac = fock.vacuum_state(8)
    st = mz.BipartiteMechState([(2.0, vac, vac)], 8)
    with pytest.raises(DegenerateInputError):
        wigner.wigner_two_mode_at(st, 0, 0, 0, 0)


def test_zero_alpha_rejected():
    st = product_state(fock.vacuum_state(8), fock.vacuum_state(8), 8)
    with pytest.raises(InvalidProjectionError):
        wigner.wigner_slice(st, 0.0)
