"""Energy, constraint, Hamiltonian, and coercivity checks."""

import numpy as np
import pytest

from iswaves.functionals import (
    constraint_F,
    energy_E,
    energy_E_spectral,
    estimate_I_lambda,
    hamiltonian_H,
    inner,
    quadratic_form_check,
)
from iswaves.params import ModelParams
from iswaves.spectral import WavePair, make_grid

from conftest import P1_KW


def _random_band_limited_pair(grid, rng):
    cut = grid.dealias_cut
    nk = grid.k_half.shape[0]

    def field():
        spec = np.zeros(nk, dtype=complex)
        spec[: cut + 1] = rng.standard_normal(cut + 1) + 1j * rng.standard_normal(cut + 1)
        spec[0] = spec[0].real
        return np.fft.irfft(spec, n=grid.N)

    return WavePair(grid=grid, xi=field(), nu=field())


def test_inner_is_periodic_quadrature():
    g = make_grid(5.0, 64)
    u = np.cos(np.pi / 5.0 * g.x)
    # int cos^2 over the period = L
    assert inner(g, u, u) == pytest.approx(5.0, rel=1e-13)


def test_energy_physical_equals_spectral(p1_mu2_4):
    g = make_grid(20.0, 256)
    rng = np.random.default_rng(0)
    for _ in range(5):
        w = _random_band_limited_pair(g, rng)
        a = energy_E(p1_mu2_4, 0.1, w)
        b = energy_E_spectral(p1_mu2_4, 0.1, w)
        assert a == pytest.approx(b, rel=1e-11)


def test_energy_nonnegative_for_admissible_speed(p1_mu2_4, p1_inf):
    g = make_grid(20.0, 256)
    rng = np.random.default_rng(1)
    for p in (p1_mu2_4, p1_inf):
        for _ in range(20):
            w = _random_band_limited_pair(g, rng)
            assert energy_E(p, 0.1, w) >= 0.0


def test_energy_scaling_quadratic(p1_mu2_4):
    g = make_grid(20.0, 256)
    rng = np.random.default_rng(2)
    w = _random_band_limited_pair(g, rng)
    w3 = WavePair(grid=g, xi=3.0 * w.xi, nu=3.0 * w.nu)
    assert energy_E(p1_mu2_4, 0.1, w3) == pytest.approx(
        9.0 * energy_E(p1_mu2_4, 0.1, w), rel=1e-12
    )


def test_constraint_cubic_homogeneity(p1_mu2_4):
    g = make_grid(20.0, 256)
    rng = np.random.default_rng(3)
    w = _random_band_limited_pair(g, rng)
    w2 = WavePair(grid=g, xi=2.0 * w.xi, nu=2.0 * w.nu)
    assert constraint_F(p1_mu2_4, w2) == pytest.approx(
        8.0 * constraint_F(p1_mu2_4, w), rel=1e-12
    )
    # r = epsilon/(2 gamma) prefactor
    direct = 0.1 * inner(g, w.xi, w.nu**2)
    assert constraint_F(p1_mu2_4, w) == pytest.approx(direct, rel=1e-13)


def test_quadratic_form_window_detection(p1_mu2_4):
    g = make_grid(20.0, 1024)
    inside = quadratic_form_check(p1_mu2_4, 0.1, g)
    assert inside.global_min > 0.0
    assert inside.coercivity_const > 0.0
    assert inside.min_eigen_by_freq.shape == g.frequencies.shape
    outside = quadratic_form_check(p1_mu2_4, 0.17, g)
    assert outside.global_min < 0.0


def test_quadratic_form_boundary_is_tight(p1_mu2_4):
    # exactly at the window edge the large-k eigenvalue tends to zero but
    # never crosses: min over a truncated grid stays nonnegative
    g = make_grid(20.0, 2048)
    edge = quadratic_form_check(p1_mu2_4, 1.0 / 6.0, g)
    assert edge.global_min >= 0.0
    assert edge.global_min < 0.5


def test_hamiltonian_requires_equal_weights(p1_mu2_4):
    g = make_grid(20.0, 128)
    w = WavePair(grid=g, xi=np.exp(-g.x**2), nu=np.zeros(128))
    p_bad = ModelParams(gamma=0.5, epsilon=0.1, mu=0.1, a=-1.0 / 12, b=0.3,
                        c=-1.0 / 12, d=0.2, mu2=4.0)
    with pytest.raises(ValueError):
        hamiltonian_H(p_bad, w)
    with pytest.raises(ValueError):
        hamiltonian_H(p1_mu2_4, w, coth_arg="bogus")


def test_hamiltonian_quadratic_part_matches_energy(p1_mu2_4):
    # with the cubic term removed (nu*zeta product zero) H equals E at
    # omega = 0: same quadratic assembly
    g = make_grid(20.0, 128)
    zeta = np.exp(-g.x**2)
    w = WavePair(grid=g, xi=zeta, nu=np.zeros(128))
    assert hamiltonian_H(p1_mu2_4, w) == pytest.approx(
        energy_E(p1_mu2_4, 0.0, w), rel=1e-13
    )


def test_hamiltonian_coth_arg_variants_differ(p1_mu2_4):
    g = make_grid(20.0, 128)
    v = np.exp(-g.x**2)
    w = WavePair(grid=g, xi=np.zeros(128), nu=v)
    h_mu2 = hamiltonian_H(p1_mu2_4, w, coth_arg="mu2")
    h_mu = hamiltonian_H(p1_mu2_4, w, coth_arg="mu")
    assert h_mu2 != pytest.approx(h_mu, rel=1e-6)


def test_i_lambda_rejects_nonpositive_lambda(p1_mu2_4):
    g = make_grid(20.0, 128)
    with pytest.raises(ValueError):
        estimate_I_lambda(p1_mu2_4, 0.1, 0.0, g)
