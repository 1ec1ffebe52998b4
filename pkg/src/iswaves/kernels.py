"""Decay-kernel oracles and tail diagnostics.

Four convolution kernels govern the far-field behavior of the solitary
waves: K (two-layer, infinite depth, algebraic with an oscillatory
exponential part), K1 (exponential, finite depth), K2 (one-layer infinite
depth, algebraic), and K3 (one-layer finite depth, exponential series).
Each has a closed form or rapidly convergent quadrature/series here, plus
an independent discrete-transform oracle (kernel_fft_oracle).

Transform convention: unitary, symmetric in the sqrt(2*pi) factor,
    khat(k) = (2*pi)^{-1/2} integral K(x) exp(-i k x) dx,
so the oracle evaluates K(x) = (2*pi)^{-1/2} integral khat(k) exp(ikx) dk
by a trapezoidal sum over the grid frequencies.  All closed forms and all
comparisons in this module state their symbols in this convention.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .params import ModelParams, compute_decay_rates
from .spectral import Grid, Multiplier, RealField

_EPS = np.finfo(float).eps


def _infinite_depth_constants(p: ModelParams) -> tuple[float, float, float]:
    rates = compute_decay_rates(p)
    if rates.ell is None or rates.c_K is None:
        raise ValueError("kernel constants undefined: " + "; ".join(rates.notes))
    return rates.ell, rates.c_K, rates.discriminant


@dataclass
class DecayReport:
    """Result of a tail fit: measured constant or rate vs the predicted one."""

    kind: str  # "algebraic" or "exponential"
    measured: float
    predicted: float | None
    rel_error: float | None
    fit_window: tuple[float, float]
    r_squared: float
    flags: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def reliable(self) -> bool:
        return not self.flags

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "measured": self.measured,
            "predicted": self.predicted,
            "rel_error": self.rel_error,
            "fit_window": list(self.fit_window),
            "r_squared": self.r_squared,
            "flags": list(self.flags),
            "details": dict(self.details),
        }


# ---------------------------------------------------------------------------
# closed forms and quadratures
# ---------------------------------------------------------------------------


def _laplace_cutoff(x: float) -> float:
    # e^{-|x| Y} < 1e-16 for Y = 40/|x|; the analytic tail is below roundoff
    return 40.0 / abs(x)


def kernel_K1(sigma: float, x: float) -> float:
    """Exponential kernel pi*exp(-sigma|x|); transform of sqrt(2pi)*sigma/(sigma^2+k^2)."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return math.pi * math.exp(-sigma * abs(x))


def kernel_K2_quadrature(p: ModelParams, x: float) -> float:
    """Algebraic kernel sqrt(2/pi) * int_0^inf y e^{-|x|y}/(alpha^2+y^2) dy.

    The symbol is 1/(|k| + alpha) with alpha = gamma/((beta-1) sqrt(mu)).
    Logarithmically divergent at x = 0, which is refused.
    """
    if x == 0.0:
        raise ValueError("K2 is singular at x = 0 (logarithmic divergence)")
    alpha = p.gamma / ((p.beta - 1.0) * math.sqrt(p.mu))
    ax = abs(x)
    upper = max(_laplace_cutoff(ax), 10.0 * alpha)

    def integrand(y: float) -> float:
        return y * math.exp(-ax * y) / (alpha * alpha + y * y)

    val, err = quad(integrand, 0.0, upper, epsabs=1e-12, epsrel=1e-12, limit=400)
    # analytic tail bound: integrand < e^{-ax y}/y beyond the cutoff
    tail = math.exp(-ax * upper) / (ax * upper)
    if err + tail > 1e-10:
        raise RuntimeError(f"quadrature failed to reach tolerance (err {err:.2e})")
    return math.sqrt(2.0 / math.pi) * val


def kernel_K_quadrature(p: ModelParams, x: float) -> float:
    """Two-layer infinite-depth kernel: Laplace integral plus oscillatory term.

        K(x) = -(2 ell / sqrt(2pi)) int_0^inf y e^{-|x|y}/((cK - y^2)^2 + ell^2 y^2) dy
               + (2 sqrt(2pi)/sqrt(4 cK - ell^2)) e^{-sqrt(4 cK - ell^2)|x|/2} cos(ell x / 2)

    The symbol is 1/(k^2 - ell|k| + cK); positivity requires 4 cK > ell^2.
    """
    if x == 0.0:
        raise ValueError("K is not evaluated at x = 0")
    ell, c_k, disc = _infinite_depth_constants(p)
    if disc <= 0.0:
        raise ValueError(f"4 c_K - ell^2 = {disc:.6g} must be positive")
    ax = abs(x)
    upper = max(_laplace_cutoff(ax), 10.0 * math.sqrt(c_k))

    def integrand(y: float) -> float:
        den = (c_k - y * y) ** 2 + ell * ell * y * y
        return y * math.exp(-ax * y) / den

    val, err = quad(
        integrand, 0.0, upper, epsabs=1e-12, epsrel=1e-12, limit=400,
        points=[math.sqrt(c_k)] if upper > math.sqrt(c_k) else None,
    )
    tail = math.exp(-ax * upper) / (ax * upper**3)
    if err + tail > 1e-10:
        raise RuntimeError(f"quadrature failed to reach tolerance (err {err:.2e})")
    rate = 0.5 * math.sqrt(disc)
    osc = 2.0 * math.sqrt(2.0 * math.pi) / math.sqrt(disc)
    osc *= math.exp(-rate * ax) * math.cos(0.5 * ell * x)
    return -2.0 * ell / math.sqrt(2.0 * math.pi) * val + osc


def kernel_K_plateau(p: ModelParams) -> float:
    """Large-x limit of x^2 K(x): -2 ell/(cK^2 sqrt(2pi))."""
    ell, c_k, _ = _infinite_depth_constants(p)
    return -2.0 * ell / (c_k**2 * math.sqrt(2.0 * math.pi))


def kernel_K2_plateau(p: ModelParams) -> float:
    """Large-x limit of x^2 K2(x): sqrt(2/pi)/alpha^2."""
    alpha = p.gamma / ((p.beta - 1.0) * math.sqrt(p.mu))
    return math.sqrt(2.0 / math.pi) / alpha**2


def kernel_K3_series(
    p: ModelParams, x: float, n_terms: int = 80
) -> tuple[float, float]:
    """Finite-depth one-layer kernel by its exponential eigen-series.

    K3(x) = (theta/sqrt(mu2)) h(x/sqrt(mu2)) with
    h(X) = sqrt(2pi) sum_m c_m e^{-eta_m |X|}, c_m = eta_m/(eta_m^2 + theta^2 + theta),
    eta_m the positive roots of eta = -theta tan(eta).  Returns the partial
    sum together with the magnitude of the first omitted term (truncation
    bound).  The symbol is theta/(zcothz(sqrt(mu2) k) + theta).
    """
    if x == 0.0:
        raise ValueError("K3 series is evaluated for x != 0")
    if not p.finite_depth:
        raise ValueError("K3 requires finite mu2")
    rates = compute_decay_rates(p, n_eta=n_terms + 1)
    theta = rates.theta
    etas = rates.eta_roots
    smu2 = math.sqrt(p.mu2)
    ax = abs(x) / smu2
    total = 0.0
    for m in range(n_terms):
        eta = etas[m]
        total += eta / (eta * eta + theta * theta + theta) * math.exp(-eta * ax)
    eta_next = etas[n_terms]
    bound = (
        math.sqrt(2.0 * math.pi)
        * theta
        / smu2
        * eta_next
        / (eta_next * eta_next + theta * theta + theta)
        * math.exp(-eta_next * ax)
    )
    value = math.sqrt(2.0 * math.pi) * theta / smu2 * total
    return value, bound


# ---------------------------------------------------------------------------
# discrete transform oracle
# ---------------------------------------------------------------------------


def kernel_fft_oracle(symbol: Multiplier, g: Grid) -> RealField:
    """Inverse unitary transform of a tabulated kernel symbol, on the grid.

    Approximates (2pi)^{-1/2} int khat(k) e^{ikx} dk by the trapezoidal sum
    over the grid's frequency set; the alternating phase recenters the
    output on x in [-L, L).  Refuses symbols that are not strictly positive
    (all kernel symbols here are positive; a sign change would signal an
    inadmissible parameter set).
    """
    table = symbol.table
    if np.min(table) <= 0.0:
        raise ValueError(
            f"symbol {symbol.name!r} is not strictly positive on the grid"
        )
    n = g.N
    dk = math.pi / g.L
    phase = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    vals = dk / math.sqrt(2.0 * math.pi) * n * np.real(np.fft.ifft(table * phase))
    return RealField(grid=g, values=vals)


# ---------------------------------------------------------------------------
# tail fitting
# ---------------------------------------------------------------------------


def default_fit_window(g: Grid) -> tuple[float, float]:
    """Standard tail window [0.3 L, 0.9 L]: past the core, before the wrap."""
    return 0.3 * g.L, 0.9 * g.L


def _profile_arrays(profile, values=None) -> tuple[np.ndarray, np.ndarray, float | None]:
    if isinstance(profile, RealField):
        return profile.grid.x, profile.values, profile.grid.L
    x = np.asarray(profile, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.shape != v.shape:
        raise ValueError("x and values must have matching shapes")
    return x, v, None


def fit_algebraic_tail(
    profile, values=None, window: tuple[float, float] | None = None,
    predicted: float | None = None,
) -> DecayReport:
    """Fit an x^{-2} tail: plateau of x^2 * profile over the window.

    The plateau is the mean of x^2 v(x) on the window; a max relative
    deviation above 10% raises the non-plateau flag (an exponential profile
    fails this, a genuine quadratic-decay profile passes).  r_squared is
    taken from the log-log regression of |v| against x, whose slope should
    sit near -2 for a true algebraic tail (slope reported in details).
    """
    x, v, domain_l = _profile_arrays(profile, values)
    if window is None:
        if domain_l is None:
            raise ValueError("window is required for raw sample arrays")
        window = (0.3 * domain_l, 0.9 * domain_l)
    lo, hi = window
    sel = (x >= lo) & (x <= hi)
    xs, vs = x[sel], v[sel]
    if xs.size < 8:
        raise ValueError("window under-resolved: fewer than 8 samples")
    floor = 100.0 * _EPS * np.max(np.abs(v))
    if np.max(np.abs(vs)) <= floor:
        raise ValueError("window under-resolved: values at machine noise")

    plateau_vals = xs**2 * vs
    plateau = float(np.mean(plateau_vals))
    max_dev = float(np.max(np.abs(plateau_vals - plateau)) / max(abs(plateau), 1e-300))

    keep = np.abs(vs) > floor
    logx = np.log(xs[keep])
    logv = np.log(np.abs(vs[keep]))
    slope, intercept = np.polyfit(logx, logv, 1)
    fitted = slope * logx + intercept
    ss_res = float(np.sum((logv - fitted) ** 2))
    ss_tot = float(np.sum((logv - np.mean(logv)) ** 2))
    r2 = 1.0 - ss_res / max(ss_tot, 1e-300)

    flags = []
    if max_dev > 0.10:
        flags.append("non-plateau")
    rel = None
    if predicted is not None and predicted != 0.0:
        rel = abs(plateau - predicted) / abs(predicted)
    return DecayReport(
        kind="algebraic",
        measured=plateau,
        predicted=predicted,
        rel_error=rel,
        fit_window=(float(lo), float(hi)),
        r_squared=float(r2),
        flags=flags,
        details={"max_rel_deviation": max_dev, "loglog_slope": float(slope)},
    )


def fit_exponential_tail(
    profile, values=None, window: tuple[float, float] | None = None,
    predicted: float | None = None,
) -> DecayReport:
    """Fit an exponential tail: least-squares slope of log|v| over the window.

    Samples below the noise floor (100 eps relative to the global peak) are
    excluded.  The report always carries the resolvable-rate cap: the
    steepest decay observable before the remaining window hits the floor; a
    predicted rate is compared against min(predicted, cap).  r^2 below 0.99
    raises the unreliable-fit flag.
    """
    x, v, domain_l = _profile_arrays(profile, values)
    if window is None:
        if domain_l is None:
            raise ValueError("window is required for raw sample arrays")
        window = (0.3 * domain_l, 0.9 * domain_l)
    lo, hi = window
    floor = 100.0 * _EPS * np.max(np.abs(v))
    sel = (x >= lo) & (x <= hi) & (np.abs(v) > floor)
    xs, vs = x[sel], np.abs(v[sel])
    if xs.size < 8:
        raise ValueError("window under-resolved: fewer than 8 usable samples")

    logv = np.log(vs)
    slope, intercept = np.polyfit(xs, logv, 1)
    fitted = slope * xs + intercept
    ss_res = float(np.sum((logv - fitted) ** 2))
    ss_tot = float(np.sum((logv - np.mean(logv)) ** 2))
    r2 = 1.0 - ss_res / max(ss_tot, 1e-300)
    rate = float(-slope)

    cap = float(math.log(vs[0] / floor) / (xs[-1] - xs[0])) if vs[0] > floor else 0.0
    flags = []
    if r2 < 0.99:
        flags.append("unreliable-fit")
    rel = None
    effective = predicted
    if predicted is not None:
        effective = min(predicted, cap)
        if predicted > cap:
            flags.append("rate-capped-by-grid")
        if effective != 0.0:
            rel = abs(rate - effective) / abs(effective)
    return DecayReport(
        kind="exponential",
        measured=rate,
        predicted=predicted,
        rel_error=rel,
        fit_window=(float(lo), float(hi)),
        r_squared=float(r2),
        flags=flags,
        details={"resolvable_rate_cap": cap, "effective_predicted": effective},
    )


def kernel_samples_to_csv(path: str, x, values, bounds=None) -> None:
    """Write kernel samples: columns x, value and truncation_bound when given."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if bounds is None:
            writer.writerow(["x", "value"])
            for xi, vi in zip(x, values):
                writer.writerow([repr(float(xi)), repr(float(vi))])
        else:
            bounds = np.asarray(bounds, dtype=float)
            writer.writerow(["x", "value", "truncation_bound"])
            for xi, vi, bi in zip(x, values, bounds):
                writer.writerow([repr(float(xi)), repr(float(vi)), repr(float(bi))])
