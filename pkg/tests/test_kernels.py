"""Decay kernels: closed forms vs transform oracle, plateaus, tail fitting."""

import csv
import math

import numpy as np
import pytest

from iswaves.kernels import (
    default_fit_window,
    fit_algebraic_tail,
    fit_exponential_tail,
    kernel_fft_oracle,
    kernel_K1,
    kernel_K2_plateau,
    kernel_K2_quadrature,
    kernel_K3_series,
    kernel_K_plateau,
    kernel_K_quadrature,
    kernel_samples_to_csv,
)
from iswaves.params import ModelParams, compute_decay_rates
from iswaves.spectral import make_grid, make_multiplier, zcothz


def _oracle_at(oracle, xs):
    g = oracle.grid
    idx = [int(round((x + g.L) / g.dx)) for x in xs]
    return [float(oracle.values[i]) for i in idx]


@pytest.fixture(scope="module")
def k1_oracle():
    sigma = 3.0
    g = make_grid(16.0, 2**16)
    sym = make_multiplier(
        "k1_symbol", lambda k: math.sqrt(2.0 * math.pi) * sigma / (sigma**2 + k**2), g
    )
    return kernel_fft_oracle(sym, g)


@pytest.fixture(scope="module")
def k2_oracle(p1_mu2_4):
    p = p1_mu2_4
    alpha = p.gamma / ((p.beta - 1.0) * math.sqrt(p.mu))
    g = make_grid(1024.0, 2**22)
    sym = make_multiplier("k2_symbol", lambda k: 1.0 / (abs(k) + alpha), g)
    return kernel_fft_oracle(sym, g)


@pytest.fixture(scope="module")
def k_oracle(p1_inf):
    rates = compute_decay_rates(p1_inf)
    ell, c_k = rates.ell, rates.c_K
    g = make_grid(1024.0, 2**20)
    sym = make_multiplier("k_symbol", lambda k: 1.0 / (k**2 - ell * abs(k) + c_k), g)
    return kernel_fft_oracle(sym, g)


@pytest.fixture(scope="module")
def k3_oracle(p1_mu2_4):
    rates = compute_decay_rates(p1_mu2_4)
    theta = rates.theta
    smu2 = math.sqrt(p1_mu2_4.mu2)
    g = make_grid(32.0, 2**21)
    sym = make_multiplier(
        "k3_symbol", lambda k: theta / (zcothz(smu2 * abs(k)) + theta), g
    )
    return kernel_fft_oracle(sym, g)


def test_k1_closed_form_vs_oracle(k1_oracle):
    xs = [0.5, 1.0, 2.0, 4.0]
    closed = [kernel_K1(3.0, x) for x in xs]
    for c, o in zip(closed, _oracle_at(k1_oracle, xs)):
        assert abs(c - o) <= 1e-5
    assert kernel_K1(3.0, 0.0) == pytest.approx(math.pi)
    assert kernel_K1(3.0, -1.0) == kernel_K1(3.0, 1.0)
    with pytest.raises(ValueError):
        kernel_K1(0.0, 1.0)


def test_k2_quadrature_vs_oracle(p1_mu2_4, k2_oracle):
    xs = [1.0, 5.0, 10.0]
    closed = [kernel_K2_quadrature(p1_mu2_4, x) for x in xs]
    for c, o in zip(closed, _oracle_at(k2_oracle, xs)):
        assert abs(c - o) <= 1e-5
    with pytest.raises(ValueError):
        kernel_K2_quadrature(p1_mu2_4, 0.0)


def test_k_quadrature_vs_oracle(p1_inf, k_oracle):
    xs = [1.0, 2.0, 5.0]
    closed = [kernel_K_quadrature(p1_inf, x) for x in xs]
    for c, o in zip(closed, _oracle_at(k_oracle, xs)):
        assert abs(c - o) <= 1e-5
    with pytest.raises(ValueError):
        kernel_K_quadrature(p1_inf, 0.0)


def test_k_refuses_degenerate_constants():
    # large a drives 4 c_K - ell^2 negative (symbol loses positivity) ...
    base = dict(gamma=0.5, b=0.25, d=0.25, c=-1.0 / 12.0, mu=0.1, epsilon=0.1)
    p_neg_disc = ModelParams(mu2=math.inf, a=3.5, **base)
    with pytest.raises(ValueError, match="must be positive"):
        kernel_K_quadrature(p_neg_disc, 1.0)
    # ... and past a = 1/gamma^2 the constants are undefined altogether
    p_undef = ModelParams(mu2=math.inf, a=4.5, **base)
    with pytest.raises(ValueError, match="undefined"):
        kernel_K_quadrature(p_undef, 1.0)


def test_k3_series_vs_oracle(p1_mu2_4, k3_oracle):
    xs = [1.0, 2.0, 5.0]
    closed = [kernel_K3_series(p1_mu2_4, x)[0] for x in xs]
    for c, o in zip(closed, _oracle_at(k3_oracle, xs)):
        assert abs(c - o) <= 1e-5


def test_k3_refusals(p1_mu2_4, p1_inf):
    with pytest.raises(ValueError):
        kernel_K3_series(p1_mu2_4, 0.0)
    with pytest.raises(ValueError):
        kernel_K3_series(p1_inf, 1.0)


def test_k3_truncation_bound(p1_mu2_4):
    # all series terms are positive, so the first omitted term is a strict
    # lower bound on the truncation error and, with the ~pi spacing of the
    # decay rates, stays within a small geometric factor of it
    x = 0.5
    v20, b20 = kernel_K3_series(p1_mu2_4, x, n_terms=20)
    v200, b200 = kernel_K3_series(p1_mu2_4, x, n_terms=200)
    diff = v200 - v20
    assert diff > 0.0
    assert b20 <= diff <= 2.0 * b20
    assert b200 < b20
    # the default truncation is far below the value itself
    val, bound = kernel_K3_series(p1_mu2_4, x)
    assert bound < 1e-12 * abs(val)


def test_k3_even_in_x(p1_mu2_4):
    v_pos, _ = kernel_K3_series(p1_mu2_4, 1.5)
    v_neg, _ = kernel_K3_series(p1_mu2_4, -1.5)
    assert v_pos == v_neg


def test_plateau_closed_forms(p1_inf, p1_mu2_4):
    assert kernel_K_plateau(p1_inf) == pytest.approx(-0.20605582263164643, rel=1e-12)
    assert kernel_K2_plateau(p1_mu2_4) == pytest.approx(0.3191538243211462, rel=1e-12)
    rates = compute_decay_rates(p1_inf)
    ell, c_k = rates.ell, rates.c_K
    assert kernel_K_plateau(p1_inf) == pytest.approx(
        -2.0 * ell / (c_k**2 * math.sqrt(2.0 * math.pi)), rel=1e-14
    )


def test_plateau_recovered_from_oracle(p1_inf, p1_mu2_4, k_oracle, k2_oracle):
    # x = 150 on the half-width-1024 grids: periodization images contribute
    # about 1.8% there and grow quadratically with x, so sample no deeper
    x = 150.0
    k_val = _oracle_at(k_oracle, [x])[0]
    k2_val = _oracle_at(k2_oracle, [x])[0]
    k_rel = abs(x**2 * k_val - kernel_K_plateau(p1_inf)) / abs(kernel_K_plateau(p1_inf))
    k2_rel = abs(x**2 * k2_val - kernel_K2_plateau(p1_mu2_4)) / kernel_K2_plateau(p1_mu2_4)
    assert k_rel < 0.03
    assert k2_rel < 0.03


def test_oracle_rejects_nonpositive_symbol():
    g = make_grid(10.0, 64)
    sym = make_multiplier("indefinite", lambda k: k**2 - 1.0, g)
    with pytest.raises(ValueError):
        kernel_fft_oracle(sym, g)


def test_fit_exponential_synthetic():
    g = make_grid(30.0, 1024)
    field_vals = np.exp(-3.0 * np.abs(g.x))
    from iswaves.spectral import RealField

    prof = RealField(grid=g, values=field_vals)
    rep = fit_exponential_tail(prof, window=(2.0, 8.0), predicted=3.0)
    assert rep.kind == "exponential"
    assert rep.measured == pytest.approx(3.0, rel=1e-6)
    assert rep.r_squared > 0.999999
    assert rep.flags == []
    assert rep.reliable
    assert rep.rel_error < 1e-6
    assert rep.details["resolvable_rate_cap"] > 3.0
    d = rep.to_dict()
    assert d["kind"] == "exponential" and d["fit_window"] == [2.0, 8.0]


def test_fit_exponential_cap_flag():
    # a predicted rate steeper than the window can resolve is capped and flagged
    g = make_grid(30.0, 1024)
    from iswaves.spectral import RealField

    prof = RealField(grid=g, values=np.exp(-3.0 * np.abs(g.x)))
    rep = fit_exponential_tail(prof, window=(2.0, 8.0), predicted=50.0)
    assert "rate-capped-by-grid" in rep.flags
    assert rep.details["effective_predicted"] == rep.details["resolvable_rate_cap"]
    assert rep.details["resolvable_rate_cap"] < 50.0


def test_fit_exponential_unreliable_flag():
    rng = np.random.default_rng(11)
    x = np.linspace(1.0, 9.0, 400)
    v = np.exp(-x) * (1.0 + 0.9 * rng.standard_normal(x.size))
    v = np.abs(v) + 1e-300
    rep = fit_exponential_tail(x, v, window=(2.0, 8.0))
    assert "unreliable-fit" in rep.flags
    assert not rep.reliable


def test_fit_algebraic_synthetic():
    x = np.linspace(0.05, 60.0, 4000)
    v = 2.5 / (1.0 + x**2)
    rep = fit_algebraic_tail(x, v, window=(15.0, 45.0), predicted=2.5)
    assert rep.kind == "algebraic"
    assert rep.measured == pytest.approx(2.5, rel=2e-3)
    assert rep.flags == []
    assert rep.rel_error < 2e-3
    assert abs(rep.details["loglog_slope"] + 2.0) < 0.01


def test_fit_algebraic_negative_control():
    # an exponential profile is not an x^{-2} tail: the plateau check flags it
    x = np.linspace(0.05, 30.0, 2000)
    v = np.exp(-x)
    rep = fit_algebraic_tail(x, v, window=(5.0, 15.0))
    assert "non-plateau" in rep.flags
    assert rep.details["max_rel_deviation"] > 0.10


def test_fit_window_handling():
    g = make_grid(40.0, 512)
    assert default_fit_window(g) == (12.0, 36.0)
    x = np.linspace(0.1, 10.0, 100)
    v = 1.0 / (1.0 + x**2)
    with pytest.raises(ValueError):
        fit_algebraic_tail(x, v)  # raw arrays need an explicit window
    with pytest.raises(ValueError):
        fit_algebraic_tail(x, v, window=(9.95, 10.0))  # fewer than 8 samples
    # a profile that has dropped below the noise floor leaves no usable samples
    spike = np.where(x < 0.5, 1.0, 1e-300)
    with pytest.raises(ValueError):
        fit_exponential_tail(x, spike, window=(1.0, 9.0))


def test_kernel_samples_to_csv(tmp_path):
    xs = [1.0, 2.0, 5.0]
    vals = [0.3, 0.05, 0.008]
    bounds = [1e-8, 1e-9, 1e-12]
    plain = tmp_path / "plain.csv"
    kernel_samples_to_csv(str(plain), xs, vals)
    with open(plain, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "value"]
    assert [float(r[0]) for r in rows[1:]] == xs
    assert [float(r[1]) for r in rows[1:]] == vals

    with_bounds = tmp_path / "bounds.csv"
    kernel_samples_to_csv(str(with_bounds), xs, vals, bounds=bounds)
    with open(with_bounds, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "value", "truncation_bound"]
    assert [float(r[2]) for r in rows[1:]] == bounds
