"""Growth indicators, the resonance counting law, Born zero curves, sigma(t)
and pairwise uniqueness diagnostics.

Geometry: with rho the order of Vhat and alpha = pi / rho, the sector
Gamma_minus is |arg k + pi/2| <= alpha / 2. The predicted indicator of D is

    h_D(theta) = 2**rho (h(pi/2) + h(-pi/2)) cos(rho (theta + pi/2))

inside Gamma_minus and 0 outside, where h is the indicator of Vhat.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .determinant import determinant
from .errors import SingularityError, ValidationError
from .jost import jost_function
from .potential import (Potential, fit_growth, fourier_values, log_abs_fourier,
                        max_modulus_profile)
from .rootfinder import (CachedFunction, ContourRegion, CountingResult, as_region,
                         counting_function, find_zeros)

DEFAULT_LADDER = tuple(np.linspace(4.0, 12.0, 9))


# ---------------------------------------------------------------------------
# indicators


def _wrap_angle(theta: float) -> float:
    return float(theta) % (2 * math.pi)


def in_gamma_minus(theta: float, rho: float) -> bool:
    """|arg k + pi/2| <= alpha/2 with alpha = pi/rho."""
    d = (theta + math.pi / 2 + math.pi) % (2 * math.pi) - math.pi
    return abs(d) <= math.pi / (2 * rho)


def predicted_indicator_of_D(theta: float, rho: float, h_up: float, h_down: float) -> float:
    if not in_gamma_minus(theta, rho):
        return 0.0
    return 2 ** rho * (h_up + h_down) * math.cos(rho * (theta + math.pi / 2))


@dataclass(frozen=True)
class IndicatorFit:
    h: float
    residual: float
    radii: tuple
    flagged: bool


def indicator_fit(f, theta: float, rho: float, radius_ladder, *, log_abs=None) -> IndicatorFit:
    """Slope of ln|f(r e^{i theta})| against r**rho (least squares with intercept).

    ``log_abs`` may be given instead of ``f`` to supply ln|f| directly
    (useful when |f| itself overflows). Ladder points where |f| underflows
    to 0 or is not finite are dropped and the fit is flagged.
    """
    r = np.asarray(radius_ladder, dtype=float)
    if r.size < 5 or np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise ValidationError("radius ladder needs at least 5 ascending positive entries")
    z = r * np.exp(1j * theta)
    if log_abs is not None:
        y = np.array([float(log_abs(zz)) for zz in z])
    else:
        with np.errstate(divide="ignore"):
            y = np.array([math.log(abs(complex(f(zz)))) if abs(complex(f(zz))) > 0 else -math.inf
                          for zz in z])
    ok = np.isfinite(y)
    flagged = not bool(np.all(ok))
    r, y = r[ok], y[ok]
    if r.size < 3:
        raise ValidationError("fewer than three usable ladder points after underflow")
    A = np.column_stack([r ** rho, np.ones_like(r)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = A @ coef - y
    return IndicatorFit(float(coef[0]), float(np.sqrt(np.mean(resid ** 2))), tuple(r.tolist()), flagged)


def indicator(f, theta: float, rho: float, radius_ladder) -> float:
    """h_f(theta) estimated as the slope of ln|f(r e^{i theta})| against r**rho."""
    return indicator_fit(f, theta, rho, radius_ladder).h


def fourier_indicator(spec: Potential, theta: float, rho: float, radius_ladder=None) -> float:
    """Indicator of Vhat, using ln|Vhat| directly so it never overflows."""
    if radius_ladder is None:
        radius_ladder = np.linspace(10.0, 30.0, 11)
    return indicator_fit(None, theta, rho, radius_ladder,
                         log_abs=lambda z: float(log_abs_fourier(spec, z))).h


def estimate_order(spec: Potential, radii=None) -> tuple[float, float]:
    """(rho, sigma) from the max-modulus fit of Vhat (same fit as hypothesis_check)."""
    if radii is None:
        radii = np.geomspace(2.0, 30.0, 16)
    rho, sigma, _, _ = fit_growth(radii, max_modulus_profile(spec, radii))
    return rho, sigma


@dataclass(frozen=True)
class IndicatorEstimate:
    theta_grid: tuple
    h_values: tuple
    rho_used: float
    radius_ladder: tuple
    fit_residuals: tuple
    predicted: tuple = ()
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in self.__dict__.items()}


def indicator_of_D(spec: Potential, rho: float | None = None, thetas=None, radius_ladder=None, *,
                   method: str = "jost", tol: float = 1e-10) -> IndicatorEstimate:
    """h_D(theta) along rays, with the predicted profile for comparison.

    ln|D| is taken from the log-magnitude of the determinant, so values
    far beyond the floating point range are fine. ``method="jost"`` uses
    the transfer march (same D), which stays accurate deep in Gamma_minus.
    """
    if rho is None:
        rho, _ = estimate_order(spec)
    if thetas is None:
        thetas = (-math.pi / 2, 0.0, math.pi / 2)
    if radius_ladder is None:
        radius_ladder = DEFAULT_LADDER
    h_up = fourier_indicator(spec, math.pi / 2, rho)
    h_dn = fourier_indicator(spec, -math.pi / 2, rho)

    def logd(z):
        return determinant(spec, z, tol=tol, method=method).log_abs

    hs, res, pred, flags = [], [], [], []
    for th in thetas:
        fit = indicator_fit(None, th, rho, radius_ladder, log_abs=logd)
        hs.append(fit.h)
        res.append(fit.residual)
        pred.append(predicted_indicator_of_D(th, rho, h_up, h_dn))
        if fit.flagged:
            flags.append(f"ladder shrunk at theta={th:.6g}")
    return IndicatorEstimate(tuple(_wrap_angle(t) for t in thetas), tuple(hs), float(rho),
                             tuple(float(r) for r in radius_ladder), tuple(res), tuple(pred),
                             tuple(flags))


# ---------------------------------------------------------------------------
# counting law


@dataclass(frozen=True)
class CountingReport:
    radii: tuple
    measured_n: tuple
    predicted_constant: float
    fitted_constant: float
    relative_error: float
    fitted_exponent: float | None
    rho_used: float
    h_up: float
    h_down: float
    flags: tuple = ()
    zeros: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "zeros"}
        out["radii"] = list(self.radii)
        out["measured_n"] = list(self.measured_n)
        out["flags"] = list(self.flags)
        out["zeros"] = [[z.location.real, z.location.imag, z.multiplicity] for z in self.zeros]
        return out


def resonance_search(spec: Potential, radius: float, tol: float = 1e-10) -> CountingResult:
    """Zeros of D over the disk tiling of the given radius (transfer-march D).

    V is real, so D(-conj k) = conj D(k) and only half the disk is searched.
    """
    fc = CachedFunction(jost_function(spec))
    return counting_function(fc, [radius], tol, method="fredholm", fc=fc, symmetric=True)


def counting_law_compare(spec: Potential, radii, *, rho: float | None = None, tol: float = 1e-10,
                         search: CountingResult | None = None) -> CountingReport:
    """Measured n(r) against predicted_constant * r**rho.

    ``search`` may carry zeros already located on a disk of radius at
    least max(radii); otherwise the search is run here.
    """
    radii = [float(r) for r in radii]
    if spec.is_trivial():
        return CountingReport(tuple(radii), tuple(0 for _ in radii), 0.0, 0.0, 0.0, None, 0.0,
                              -math.inf, -math.inf, ("trivial_potential",))
    flags = []
    if rho is None:
        rho, _ = estimate_order(spec)
    if rho <= 1.05:
        flags.append("order_not_above_one")
    h_up = fourier_indicator(spec, math.pi / 2, rho)
    h_dn = fourier_indicator(spec, -math.pi / 2, rho)
    predicted = 2 ** rho * (h_up + h_dn) / (2 * math.pi)
    if search is None or (search.radii and max(search.radii) < max(radii)):
        search = resonance_search(spec, max(radii), tol)
    mods = np.array([abs(z.location) for z in search.zeros])
    mult = np.array([z.multiplicity for z in search.zeros], dtype=int)
    n = [int(mult[mods <= r].sum()) if mods.size else 0 for r in radii]
    r = np.array(radii)
    y = np.array(n, dtype=float)
    x = r ** rho
    fitted = float(np.dot(x, y) / np.dot(x, x))
    expo = None
    if np.all(y > 0):
        expo = float(np.polyfit(np.log(r), np.log(y), 1)[0])
    rel = abs(fitted - predicted) / abs(predicted) if predicted else math.inf
    if any(not z.converged for z in search.zeros):
        flags.append("unconverged_zeros")
    return CountingReport(tuple(radii), tuple(n), float(predicted), fitted, float(rel), expo,
                          float(rho), float(h_up), float(h_dn), tuple(flags), tuple(search.zeros))


# ---------------------------------------------------------------------------
# Born zero curves


def born_condition(spec: Potential):
    """k -> 4k^2 + Vhat(2k) Vhat(-2k); zero exactly where 1 + Vhat(2k)Vhat(-2k)/(4k^2) is."""
    def g(k):
        k = complex(k)
        return 4 * k * k + complex(fourier_values(spec, 2 * k)) * complex(fourier_values(spec, -2 * k))
    return g


@dataclass(frozen=True)
class BornComparison:
    pairs: tuple  # (resonance, nearest born zero or None, distance)
    born_zeros: tuple
    resonances: tuple
    region: ContourRegion
    injective: bool

    def band_mean(self, lo: float, hi: float) -> float:
        d = [p[2] for p in self.pairs if lo < abs(p[0]) < hi]
        return float(np.mean(d)) if d else math.nan

    def to_dict(self) -> dict:
        return {
            "region": self.region.to_list(),
            "injective": self.injective,
            "pairs": [[p[0].real, p[0].imag,
                       None if p[1] is None else p[1].real, None if p[1] is None else p[1].imag,
                       p[2] if math.isfinite(p[2]) else None] for p in self.pairs],
            "born_zeros": [[z.real, z.imag] for z in self.born_zeros],
        }


def born_zero_compare(spec: Potential, region, *, resonances=None, tol: float = 1e-10,
                      match_radius: float = 1.0, margin: float = 0.5) -> BornComparison:
    """Pair each resonance in ``region`` with the nearest Born-condition zero.

    Only the part of the region with Im k <= -1 is used. Born zeros are
    searched on the region widened by ``margin`` so that partners of
    resonances near the edge are not lost. A resonance without a Born zero
    within ``match_radius`` is reported with distance infinity.
    """
    reg = as_region(region)
    if reg.im_min >= -1.0:
        raise ValidationError("Born comparison needs part of the region below Im k = -1")
    reg = ContourRegion(reg.re_min, reg.re_max, reg.im_min, min(reg.im_max, -1.0))
    if spec.is_trivial():
        return BornComparison((), (), (), reg, True)
    if resonances is None:
        rs = find_zeros(jost_function(spec), reg, tol, method="fredholm")
        resonances = [z.location for z in rs.zeros]
    else:
        resonances = [complex(getattr(z, "location", z)) for z in resonances]
        resonances = [z for z in resonances if reg.contains(z)]
    wide = ContourRegion(reg.re_min - margin, reg.re_max + margin, reg.im_min - margin,
                         min(reg.im_max + margin, -0.5))
    born = find_zeros(born_condition(spec), wide, tol, method="fourier_hat")
    bz = np.array([z.location for z in born.zeros], dtype=complex)
    pairs = []
    used = []
    for z in sorted(resonances, key=abs):
        if bz.size == 0:
            pairs.append((z, None, math.inf))
            continue
        i = int(np.argmin(np.abs(bz - z)))
        d = float(abs(bz[i] - z))
        if d > match_radius:
            pairs.append((z, None, math.inf))
        else:
            pairs.append((z, complex(bz[i]), d))
            used.append(i)
    injective = len(used) == len(set(used))
    return BornComparison(tuple(pairs), tuple(complex(b) for b in bz), tuple(resonances), reg,
                          injective)


# ---------------------------------------------------------------------------
# sigma(t)


def _sigma_at(spec: Potential, t: float, y: float) -> float:
    def g(x):
        return float(log_abs_fourier(spec, complex(x, y)))

    lo, hi = (0.0, t) if t >= 0 else (t, 0.0)
    # points where |Vhat| nearly vanishes get their own breakpoints
    xs = np.linspace(lo, hi, 2001)
    vals = log_abs_fourier(spec, xs + 1j * y)
    m = np.nonzero((vals[1:-1] < vals[:-2]) & (vals[1:-1] < vals[2:]))[0] + 1
    pts = [float(xs[i]) for i in m] or None
    val, err = integrate.quad(g, lo, hi, points=pts, limit=1000, epsabs=1e-13, epsrel=1e-13)
    if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        loc = pts[int(np.argmin([g(p) for p in pts]))] if pts else (lo + hi) / 2
        raise SingularityError("log|Vhat| integral does not converge", location=loc, error=err)
    return val if t >= 0 else -val


def sigma_integral(spec: Potential, t: float, y: float = 1e-4) -> float:
    """sigma(t) = int_0^t ln|Vhat(x + iy)| dx in the limit y -> 0+.

    Computed at y and y/2 and combined as 2 sigma(y/2) - sigma(y), which
    removes the linear term in y.
    """
    t = float(t)
    if t == 0:
        return 0.0
    if y <= 0:
        raise ValidationError("y must be positive")
    if spec.is_trivial():
        raise ValidationError("log|Vhat| is -infinity for the zero potential")
    return 2 * _sigma_at(spec, t, y / 2) - _sigma_at(spec, t, y)


# ---------------------------------------------------------------------------
# uniqueness diagnostics


def standard_k_test_set(count: int = 40, seed: int = 0) -> np.ndarray:
    """Pseudo-random k with 1 <= |k| <= 6, -4 <= Im k <= -0.2, plus a few in C+."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        z = complex(rng.uniform(-6, 6), rng.uniform(-4, -0.2))
        if 1 <= abs(z) <= 6:
            out.append(z)
    out += [1 + 1j, -2 + 0.5j, 3j, 4 + 2j]
    return np.array(out)


def set_distance(a, b) -> float:
    """Greedy nearest matching after sorting by modulus; inf if sizes differ."""
    a = sorted((complex(z) for z in a), key=abs)
    b = [complex(z) for z in b]
    if len(a) != len(b):
        return math.inf
    worst = 0.0
    for z in a:
        i = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(i)))
    return worst


@dataclass(frozen=True)
class UniquenessReport:
    resonance_set_distance: float
    sup_D_difference: float
    sup_absFT_difference: float
    sigma_difference: float
    born_product_difference: float
    sup_D_difference_abs: float = 0.0
    resonances_a: tuple = field(default=(), repr=False)
    resonances_b: tuple = field(default=(), repr=False)

    def differences(self) -> dict:
        return {k: getattr(self, k) for k in ("resonance_set_distance", "sup_D_difference",
                                              "sup_absFT_difference", "sigma_difference",
                                              "born_product_difference")}

    def to_dict(self) -> dict:
        out = {k: (v if math.isfinite(v) else "inf") for k, v in self.differences().items()}
        out["sup_D_difference_abs"] = self.sup_D_difference_abs
        out["resonances_a"] = [[z.real, z.imag] for z in self.resonances_a]
        out["resonances_b"] = [[z.real, z.imag] for z in self.resonances_b]
        return out


DEFAULT_REGION = (0.0, 6.0, -4.0, -0.05)


def uniqueness_compare(spec_a: Potential, spec_b: Potential, region=DEFAULT_REGION,
                       real_axis_grid=None, *, k_test=None, t_values=None, tol: float = 1e-10,
                       method: str = "jost") -> UniquenessReport:
    """Numerical diagnostics of the chain that identifies V up to sign.

    Fields: distance between the resonance sets in ``region``, sup |D_A - D_B|
    / max(1, |D_A|, |D_B|) on ``k_test`` (|D| reaches 1e9 on the standard
    set, where an absolute difference only measures rounding; the absolute
    value is kept in ``sup_D_difference_abs``), sup ||Vhat_A| - |Vhat_B|| on
    the real grid, max |sigma_A(t)
    - sigma_B(t)| over ``t_values`` and sup |Vhat_A(2k)Vhat_A(-2k) -
    Vhat_B(2k)Vhat_B(-2k)| over real k from the same grid.
    """
    reg = as_region(region)
    if real_axis_grid is None:
        real_axis_grid = np.linspace(-10.0, 10.0, 401)
    grid = np.asarray(real_axis_grid, dtype=float)
    if k_test is None:
        k_test = standard_k_test_set()
    if t_values is None:
        t_values = np.linspace(0.5, 4.0, 8)

    def zeros(spec):
        if method == "nystrom":
            f = lambda k: determinant(spec, k, tol=1e-12).D
        else:
            f = jost_function(spec)
        return tuple(z.location for z in find_zeros(f, reg, tol, method="fredholm").zeros)

    za, zb = zeros(spec_a), zeros(spec_b)
    dist = set_distance(za, zb)
    dd = dd_abs = 0.0
    for k in k_test:
        da = determinant(spec_a, k, tol=1e-12, method=method).D
        db = determinant(spec_b, k, tol=1e-12, method=method).D
        diff = abs(da - db)
        dd_abs = max(dd_abs, diff)
        dd = max(dd, diff / max(1.0, abs(da), abs(db)))
    fa, fb = fourier_values(spec_a, grid + 0j), fourier_values(spec_b, grid + 0j)
    ft = float(np.max(np.abs(np.abs(fa) - np.abs(fb))))
    sig = max(abs(sigma_integral(spec_a, t) - sigma_integral(spec_b, t)) for t in t_values)
    pa = fourier_values(spec_a, 2 * grid + 0j) * fourier_values(spec_a, -2 * grid + 0j)
    pb = fourier_values(spec_b, 2 * grid + 0j) * fourier_values(spec_b, -2 * grid + 0j)
    bp = float(np.max(np.abs(pa - pb)))
    return UniquenessReport(float(dist), float(dd), ft, float(sig), bp, float(dd_abs), za, zb)


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_counting_csv(report: CountingReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "n", "predicted"])
        for r, n in zip(report.radii, report.measured_n):
            w.writerow([_fmt(r), n, _fmt(report.predicted_constant * r ** report.rho_used)])


def write_indicator_csv(est: IndicatorEstimate, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "h", "predicted", "fit_residual"])
        for row in zip(est.theta_grid, est.h_values, est.predicted, est.fit_residuals):
            w.writerow([_fmt(v) for v in row])


def scatter_svg(resonances, born_zeros, width: int = 480, height: int = 480) -> str:
    """Static SVG scatter: resonances as filled circles, Born zeros as crosses."""
    pts = [complex(z) for z in resonances] + [complex(z) for z in born_zeros]
    if pts:
        xs = [p.real for p in pts]
        ys = [p.imag for p in pts]
        x0, x1 = min(xs) - 0.5, max(xs) + 0.5
        y0, y1 = min(ys) - 0.5, max(ys) + 0.5
    else:
        x0, x1, y0, y1 = -1.0, 1.0, -1.0, 1.0
    pad = 30

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
             'fill="none" stroke="#888"/>',
             f'<text x="{pad}" y="{pad - 10}" font-size="11">Re k [{x0:.2f}, {x1:.2f}], '
             f'Im k [{y0:.2f}, {y1:.2f}]; dots: resonances, crosses: Born zeros</text>']
    for z in resonances:
        lines.append(f'<circle cx="{sx(z.real):.2f}" cy="{sy(z.imag):.2f}" r="3" fill="#1f4e9c"/>')
    for z in born_zeros:
        x, y = sx(z.real), sy(z.imag)
        lines.append(f'<path d="M{x - 4:.2f},{y - 4:.2f}L{x + 4:.2f},{y + 4:.2f}'
                     f'M{x - 4:.2f},{y + 4:.2f}L{x + 4:.2f},{y - 4:.2f}" stroke="#c0392b"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
