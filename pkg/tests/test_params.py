"""Admissibility arithmetic, decay constants, and parameter validation."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from iswaves.params import (
    AdmissibilityReport,
    DegenerateParameterError,
    InadmissibleParameterError,
    ModelParams,
    admissibility_report,
    check_kernel_discriminant,
    compute_decay_rates,
    compute_f_min,
    compute_M,
    compute_mu2_threshold,
    compute_speed_window,
    eta_roots,
    symbol_f,
    validate_bfd_params,
)

from conftest import P1_KW, SHARP_KW


def test_derived_coefficient_and_depth_flag(p1_mu2_4, p1_inf):
    assert p1_mu2_4.r == pytest.approx(0.1)
    assert p1_mu2_4.finite_depth
    assert not p1_inf.finite_depth


def test_round_trip_dict(p1_inf):
    d = p1_inf.to_dict()
    assert d["mu2"] == "inf"
    back = ModelParams.from_dict(d)
    assert back == p1_inf


@pytest.mark.parametrize(
    "kw",
    [
        dict(gamma=0.0), dict(gamma=1.0), dict(epsilon=0.0), dict(mu=-0.1),
        dict(mu2=0.0), dict(beta=1.0),
    ],
)
def test_parameter_range_rejection(kw):
    base = dict(P1_KW, mu2=4.0)
    base.update(kw)
    with pytest.raises(InadmissibleParameterError):
        ModelParams(**base)


def test_speed_window_value(p1_mu2_4):
    # (1-gamma) min{1, |c|/b} = 0.5 * (1/12)/(1/4) = 1/6
    assert compute_speed_window(p1_mu2_4) == pytest.approx(1.0 / 6.0, abs=1e-15)


def test_f_min_closed_form(p1_mu2_4):
    f_min, x0, beta0 = compute_f_min(p1_mu2_4, 0.0)
    assert f_min == pytest.approx(74.0 / 49.0, abs=1e-12)
    assert beta0 == pytest.approx(49.0 / 6.0, abs=1e-12)
    # the symbol attains the reported minimum at the reported location
    assert symbol_f(p1_mu2_4, 0.0, x0) == pytest.approx(f_min, abs=1e-12)


def test_f_min_matches_brute_force(p1_mu2_4):
    for omega in (0.0, 0.05, 0.1):
        f_min, x0, _ = compute_f_min(p1_mu2_4, omega)
        res = minimize_scalar(
            lambda x: float(symbol_f(p1_mu2_4, omega, x)),
            bounds=(0.0, 10.0 * x0),
            method="bounded",
            options={"xatol": 1e-14},
        )
        assert f_min == pytest.approx(res.fun, abs=1e-10)


def test_mu2_threshold_value(p1_mu2_4):
    thr = compute_mu2_threshold(p1_mu2_4, 0.0)
    assert thr == pytest.approx(0.7015339663988314, abs=1e-12)
    # direct arithmetic: mu/(gamma^2 f_min)^2
    assert thr == pytest.approx(0.1 / (0.25 * 74.0 / 49.0) ** 2, abs=1e-14)


def test_amplitude_constant_value(p1_mu2_4):
    assert compute_M(p1_mu2_4, 0.0) == pytest.approx(37.0 / 12.0, abs=1e-12)


def test_sum_rule_and_sign_conditions():
    # a + b + c + d must equal 1/3 for the family to be consistent
    bad = ModelParams(gamma=0.5, epsilon=0.1, mu=0.1, a=0.0, b=0.25, c=-1.0 / 12, d=0.25)
    msgs = validate_bfd_params(bad)
    assert any("1/3" in m or "sum" in m.lower() for m in msgs)
    good = ModelParams(mu2=4.0, **P1_KW)
    assert validate_bfd_params(good) == []


def test_admissibility_report_roundtrip(p1_mu2_4):
    rep = admissibility_report(p1_mu2_4, 0.1)
    assert isinstance(rep, AdmissibilityReport)
    assert rep.admissible
    assert rep.violations == ()
    d = rep.to_dict()
    assert d["speed_bound"] == pytest.approx(1.0 / 6.0)

    bad = admissibility_report(p1_mu2_4, 0.2)
    assert not bad.admissible
    assert any("speed" in v for v in bad.violations)


def test_admissibility_flags_low_mu2():
    p = ModelParams(mu2=0.5, **P1_KW)  # below the ~0.7015 threshold
    rep = admissibility_report(p, 0.0)
    assert not rep.admissible
    assert any("mu2" in v for v in rep.violations)


def test_eta_roots_bracketing_and_equation():
    theta = math.sqrt(10.0)
    roots = eta_roots(theta, 6)
    assert roots[0] == pytest.approx(2.477100572052743, abs=1e-10)
    for m, e in enumerate(roots, start=1):
        assert (2 * m - 1) * math.pi / 2 < e < m * math.pi
        assert e + theta * math.tan(e) == pytest.approx(0.0, abs=1e-9)
    assert all(b > a for a, b in zip(roots, roots[1:]))


def test_eta_roots_rejects_nonpositive_theta():
    with pytest.raises(DegenerateParameterError):
        eta_roots(0.0, 3)


def test_decay_rates_finite_depth(p1_mu2_4):
    rates = compute_decay_rates(p1_mu2_4)
    assert rates.sigma == pytest.approx(9.698075483206937, rel=1e-12)
    assert rates.theta == pytest.approx(math.sqrt(10.0), rel=1e-12)
    assert rates.ilw_rate == pytest.approx(1.2385502860263715, rel=1e-10)
    # eta_1/sqrt(mu2) consistency
    assert rates.ilw_rate == pytest.approx(rates.eta_roots[0] / 2.0, rel=1e-12)


def test_decay_rates_mu2_25(p1_mu2_25):
    rates = compute_decay_rates(p1_mu2_25)
    assert rates.theta == pytest.approx(7.905694150420948, rel=1e-12)
    assert rates.eta_roots[0] == pytest.approx(2.8010816582645544, abs=1e-10)
    assert rates.ilw_rate == pytest.approx(0.5602163316529108, rel=1e-10)


def test_decay_rates_infinite_depth(p1_inf):
    rates = compute_decay_rates(p1_inf)
    assert rates.ell == pytest.approx(1.5488706906947165, rel=1e-12)
    assert rates.c_K == pytest.approx(2.4489795918367347, rel=1e-12)
    assert rates.discriminant == pytest.approx(7.396917950853811, rel=1e-12)
    assert rates.algebraic_plateau_K == pytest.approx(-0.20605582263164643, rel=1e-12)
    assert check_kernel_discriminant(p1_inf)


def test_decay_rates_sharp_point(p_sharp):
    rates = compute_decay_rates(p_sharp)
    assert rates.sigma == pytest.approx(1.4079179830635131, rel=1e-10)


def test_threshold_raises_when_no_finite_depth_admissible():
    # a > 0 large enough drives f_min below zero (at gamma = 1/2 the
    # crossover is a = 3), so no finite lower-layer depth is admissible
    p = ModelParams(gamma=0.5, epsilon=0.1, mu=0.1, a=3.5, b=0.25,
                    c=-1.0 / 12, d=0.25)
    f_min, _, _ = compute_f_min(p, 0.0)
    assert f_min < 0.0
    with pytest.raises(InadmissibleParameterError):
        compute_mu2_threshold(p, 0.0)
