"""Jost solutions, the T-matrix, Born partial sums and the square-well oracle.

Conventions
-----------
The Jost-type solution of -u'' + V u = k^2 u normalised at +infinity is
written u = exp(ikx) m_plus(x, k), where

    m_plus(x) = 1 + int_x^inf (exp(2ik(t - x)) - 1) / (2ik) V(t) m_plus(t) dt.

The transmission coefficient is T(k) = 1 / a(k) with

    a(k) = 1 + (i / 2k) int V(x) m_plus(x, k) dx,

and a(k) coincides with the Fredholm determinant D(k). The corrections
f_plus and f_minus appearing in the T-matrix integrals are evaluated at
kappa = -k, where (for k in the lower half plane) all Volterra kernels decay:

    1 - f_plus(x, k)  = m_plus(x, kappa)  / a(kappa)
    1 - f_minus(x, k) = m_minus(x, kappa) / a(kappa)

With this, f_plus vanishes as x -> -infinity and tends to 1 - T(kappa) as
x -> +infinity (and symmetrically for f_minus). The 2x2 determinant
det(I + (i/2k) T) equals D(k) / D(-k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .determinant import DeterminantValue, _region_tuple
from .errors import ContinuationDepthError, NumericalError, ValidationError
from .paths import ContourPath, check_k, choose_path, panel_edges, truncation_radius
from .potential import Potential, SquareWell, fourier_values
from .quadrature import QuadratureRule, gauss_legendre, rule_from_edges, volterra_matrices

MARCH_ORDER = 16
MARCH_C = 6.0


def _e(u, k):
    # (exp(2iku) - 1) / (2ik), accurate for small 2ku
    return np.expm1(2j * k * u) / (2j * k)


# ---------------------------------------------------------------------------
# transfer march along a (possibly rotated) path


def jost_march(spec: Potential, k: complex, path: ContourPath | None = None,
               c: float = MARCH_C, order: int = MARCH_ORDER) -> tuple[complex, int]:
    """a(k) = D(k) by marching the Volterra equation for m_plus right to left.

    Each panel's local problem is linear in the state (m(b), P_b) carried in
    from the right, so all panels are solved at once and only the 2x2 state
    is propagated sequentially. Returns ``(a, number_of_nodes)``.
    """
    k = check_k(k)
    if spec.is_trivial():
        return 1.0 + 0j, 0
    if path is None:
        path = choose_path(spec, k)
    edges = panel_edges(spec, path, k, c=c, osc=2.0)
    right, _ = volterra_matrices(order)
    tg, wg = gauss_legendre(order)
    a, b = edges[:-1], edges[1:]
    hw = (b - a) / 2
    t = (a + b)[:, None] / 2 + hw[:, None] * tg[None, :]
    rot = path.rot
    x = path.points(t)
    xa, xb = path.points(a), path.points(b)
    if spec.analytic and path.theta != 0.0:
        V = np.exp(spec.log_value(x))
    else:
        V = spec.value(x.real).astype(complex)
    hr = (hw * rot)[:, None, None]
    if not np.all(np.isfinite(V)):
        raise NumericalError("potential overflows on the chosen path", k=k)
    # exp(2ik(x_j - x_i)) factorised about the panel centre (|2k(x - xc)| is
    # at most ~c/2 there); absolute error stays at rounding level
    xc = path.points((a + b) / 2)[:, None]
    E = np.exp(2j * k * (x - xc))
    A = right[None] * hr * ((E[:, None, :] / E[:, :, None] - 1) / (2j * k)) * V[:, None, :]
    eye = np.eye(order)[None]
    rhs = np.stack([np.ones_like(x), _e(xb[:, None] - x, k)], axis=-1)
    U = np.linalg.solve(eye - A, rhs)
    g = V[:, :, None] * U
    wl = wg[None, :] * (hw * rot)[:, None]
    cR = np.einsum("np,npc->nc", wl * _e(x - xa[:, None], k), g)
    cP = np.einsum("np,npc->nc", wl * np.exp(2j * k * (x - xa[:, None])), g)
    cQ = np.einsum("np,npc->nc", wl, g)
    eb = _e(xb - xa, k)
    ex = np.exp(2j * k * (xb - xa))
    s, P, Q = 1.0 + 0j, 0j, 0j
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(len(a) - 1, -1, -1):
            Q += cQ[n, 0] * s + cQ[n, 1] * P
            s, P = (s + cR[n, 0] * s + cR[n, 1] * P + P * eb[n],
                    cP[n, 0] * s + cP[n, 1] * P + ex[n] * P)
        val = 1 + 0.5j / k * Q
    if not np.isfinite(val):
        raise NumericalError("Jost march overflowed", k=k)
    return complex(val), int(t.size)


def jost_determinant(spec: Potential, k: complex, tol: float = 1e-8, refine: bool = True,
                     c: float = MARCH_C) -> DeterminantValue:
    """D(k) through the transfer march, with an optional half-resolution check."""
    k = check_k(k)
    if spec.is_trivial():
        return DeterminantValue(k, 1.0 + 0j, 0, 0.0, True, 0.0, 1.0 + 0j, tol, "jost", 0.0, 1.0 + 0j)
    path = choose_path(spec, k)
    val, n = jost_march(spec, k, path, c=c)
    delta = 0.0
    if refine:
        coarse, _ = jost_march(spec, k, path, c=2 * c)
        delta = abs(val - coarse)
    la = math.log(abs(val)) if val != 0 else -math.inf
    ph = val / abs(val) if val != 0 else 1.0 + 0j
    return DeterminantValue(k, val, n, delta, delta < tol * max(1.0, abs(val)), la, ph, tol,
                            "jost", path.theta, val)


def jost_function(spec: Potential, refine: bool = False):
    """Handle k -> D(k) evaluated by the transfer march (for zero searches)."""
    def f(k):
        return jost_march(spec, k)[0]
    f.spec = spec
    return f


# ---------------------------------------------------------------------------
# real-axis Volterra operators


def default_rule(spec: Potential, k: complex, growth: float = 0.0) -> QuadratureRule:
    """Gauss-Legendre rule on [-L, L] resolving exp(2ikx) and bounding V e^{growth |x|}."""
    sup = spec.support()
    if sup is not None:
        lo, hi = sup
    else:
        L = truncation_radius(spec, 1e-15, growth / 2)
        lo, hi = -L, L
    _, w = spec.center_scale()
    h = min(w, 6.0 / (2 * abs(k) + 1))
    npan = max(1, int(math.ceil((hi - lo) / h)))
    return rule_from_edges(np.linspace(lo, hi, npan + 1), MARCH_ORDER)


def _cumulative(rule: QuadratureRule):
    """Matrices with (CR f)_i = int_{x_i}^{L} f and (CL f)_i = int_{-L}^{x_i} f."""
    if rule.kind != "gauss_legendre_composite":
        raise ValidationError("Volterra operators need a Gauss-Legendre composite rule")
    p = rule.order
    right, left = volterra_matrices(p)
    n = rule.size
    npan = n // p
    hw = (rule.edges[1:] - rule.edges[:-1]) / 2
    w = rule.weights
    CR = np.zeros((n, n))
    CL = np.zeros((n, n))
    for q in range(npan):
        s = slice(q * p, (q + 1) * p)
        CR[s, s] = hw[q] * right
        CL[s, s] = hw[q] * left
        CR[s, (q + 1) * p:] = w[(q + 1) * p:]
        CL[s, :q * p] = w[:q * p]
    return CR, CL


@dataclass(frozen=True, eq=False)
class JostCorrection:
    """Sampled f_side(x, k) on the rule nodes.

    Attributes
    ----------
    k : complex
        Argument in the package convention (the Volterra problem is solved
        at -k).
    side : str
        ``plus`` or ``minus``.
    values : ndarray
        f_side at ``nodes``.
    sup_norm : float
    m : ndarray
        The normalised solution m_side(x, -k).
    a : complex
        a(-k) = 1 / T(-k).
    residual : float
        Sup-norm residual of the Volterra equation for ``m``.
    iterations : int
    """

    k: complex
    side: str
    values: np.ndarray
    sup_norm: float
    nodes: np.ndarray
    weights: np.ndarray
    m: np.ndarray
    a: complex
    residual: float
    iterations: int

    @property
    def vanishing_edge_value(self) -> float:
        """|f| at the end of the interval where f must vanish."""
        return float(abs(self.values[0] if self.side == "plus" else self.values[-1]))


def _volterra_matrix(rule: QuadratureRule, kappa: complex, side: str) -> np.ndarray:
    CR, CL = _cumulative(rule)
    x = rule.nodes
    # the exponent is zeroed outside the causal part, where it could overflow
    if side == "plus":
        return CR * _e(np.where(CR != 0, x[None, :] - x[:, None], 0.0), kappa)
    if side == "minus":
        return CL * _e(np.where(CL != 0, x[:, None] - x[None, :], 0.0), kappa)
    raise ValidationError(f"side must be 'plus' or 'minus', got {side!r}")


def solve_correction(spec: Potential, k: complex, side: str = "plus",
                     rule: QuadratureRule | None = None, *, iterations: int | None = None,
                     max_iter: int = 400, tol: float = 1e-10) -> JostCorrection:
    """f_side(x, k) from the Volterra equation for m = 1 - f, by Picard iteration.

    Parameters
    ----------
    spec : Potential
    k : complex
        Argument in the package convention; the equation is solved at kappa = -k.
    side : {"plus", "minus"}
    rule : QuadratureRule, optional
        Gauss-Legendre composite rule; chosen automatically when omitted.
    iterations : int, optional
        Perform exactly this many Picard steps from m = 1 (no convergence
        requirement). Used to inspect individual Neumann iterates.

    Raises
    ------
    ContinuationDepthError
        If the iteration does not reach ``tol`` within ``max_iter`` steps.
    """
    k = check_k(k)
    kappa = -k
    if rule is None:
        rule = default_rule(spec, k)
    W = _volterra_matrix(rule, kappa, side)
    v = spec.value(rule.nodes).astype(float)
    WV = W * v[None, :]
    m = np.ones(rule.size, dtype=complex)
    n_it = 0
    res = 0.0
    steps = max_iter if iterations is None else iterations
    for n_it in range(1, steps + 1):
        new = 1.0 + WV @ m
        if not np.all(np.isfinite(new)):
            break
        res = float(np.max(np.abs(new - m)))
        m = new
        if iterations is None and res < tol * max(1.0, float(np.max(np.abs(m)))):
            break
    res = float(np.max(np.abs(m - 1.0 - WV @ m))) if np.all(np.isfinite(m)) else math.inf
    if iterations is None and not res < tol * max(1.0, float(np.max(np.abs(m)))):
        raise ContinuationDepthError(
            "Volterra iteration did not contract; try a smaller |Im k|",
            k=k, residual=res, suggested_max_abs_im=abs(k.imag) / 2)
    a = 1 + 0.5j / kappa * np.sum(rule.weights * v * m)
    f = 1.0 - m / a
    return JostCorrection(k, side, f, float(np.max(np.abs(f))), rule.nodes, rule.weights, m,
                          complex(a), res, n_it)


@dataclass(frozen=True)
class TMatrix:
    """T11 = int V (1 - f_plus),          T12 = int e^{2ikx} V (1 - f_minus),
    T21 = int e^{-2ikx} V (1 - f_plus),   T22 = int V (1 - f_minus)."""

    k: complex
    T11: complex
    T12: complex
    T21: complex
    T22: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.T11, self.T12], [self.T21, self.T22]])


def t_matrix(spec: Potential, k: complex, which=("T11", "T12", "T21", "T22")) -> TMatrix:
    """The four T-matrix integrals at k (entries not in ``which`` are NaN).

    T12 and T21 carry exp(+-2ikx), so they are integrated on a longer
    interval that bounds V exp(2|Im k| |x|).
    """
    k = check_k(k)
    out = dict.fromkeys(("T11", "T12", "T21", "T22"), complex(math.nan, math.nan))
    if spec.is_trivial():
        return TMatrix(k, 0j, 0j, 0j, 0j)
    need_diag = {"T11", "T22"} & set(which)
    need_off = {"T12", "T21"} & set(which)
    if need_diag:
        rule = default_rule(spec, k)
        v = spec.value(rule.nodes)
        for name, side in (("T11", "plus"), ("T22", "minus")):
            if name in need_diag:
                fc = solve_correction(spec, k, side, rule)
                out[name] = complex(np.sum(rule.weights * v * (1 - fc.values)))
    if need_off:
        rule = default_rule(spec, k, growth=2 * abs(k.imag))
        v = spec.value(rule.nodes)
        x = rule.nodes
        with np.errstate(over="ignore", invalid="ignore"):
            if "T21" in need_off:
                fc = solve_correction(spec, k, "plus", rule)
                out["T21"] = complex(np.sum(rule.weights * np.exp(-2j * k * x) * v * (1 - fc.values)))
            if "T12" in need_off:
                fc = solve_correction(spec, k, "minus", rule)
                out["T12"] = complex(np.sum(rule.weights * np.exp(2j * k * x) * v * (1 - fc.values)))
    return TMatrix(k, **out)


def e_det_2x2(spec: Potential, k: complex) -> complex:
    """det(I + (i/2k) T) with T the T-matrix at k; equals D(k) / D(-k)."""
    k = check_k(k)
    if spec.is_trivial():
        return 1.0 + 0j
    T = t_matrix(spec, k).as_array()
    return complex(np.linalg.det(np.eye(2) + 0.5j / k * T))


@dataclass(frozen=True)
class BornSeries:
    """Partial sums s_0..s_n of the Neumann expansion of T21 (or T12).

    ``partial_sums[0]`` is Vhat(2k) for T21 and Vhat(-2k) for T12;
    ``contraction_estimate`` is |s_n - s_{n-1}| / |s_{n-1} - s_{n-2}| or
    None when undefined.
    """

    k: complex
    target: str
    partial_sums: tuple
    contraction_estimate: float | None
    terms: tuple = ()


def born_series(spec: Potential, k: complex, n: int = 8, target: str = "T21") -> BornSeries:
    """Born partial sums of T21 or T12 up to order n (n <= 8).

    The n-th term is (-1)^n int e^{-2ikx} V (B^n 1) dx with B the
    Lippmann-Schwinger operator of 1 - f_plus, so the full series sums to
    the T-matrix entry.
    """
    k = check_k(k)
    if not 0 <= int(n) <= 8:
        raise ValidationError("Born order must be between 0 and 8")
    if target not in ("T21", "T12"):
        raise ValidationError("target must be 'T21' or 'T12'")
    n = int(n)
    sgn = 1 if target == "T21" else -1
    s0 = complex(fourier_values(spec, 2 * sgn * k))
    if spec.is_trivial():
        return BornSeries(k, target, tuple([0j] * (n + 1)), None, tuple([0j] * (n + 1)))
    kappa = -k
    rule = default_rule(spec, k, growth=2 * abs(k.imag))
    x = rule.nodes
    v = spec.value(x)
    CR, CL = _cumulative(rule)
    if target == "T21":
        B = (0.5j / kappa) * (CL + CR * np.exp(2j * kappa * np.where(CR != 0, x[None, :] - x[:, None], 0.0)))
    else:
        B = (0.5j / kappa) * (CR + CL * np.exp(2j * kappa * np.where(CL != 0, x[:, None] - x[None, :], 0.0)))
    B = B * v[None, :]
    weight = rule.weights * v * np.exp(-2j * sgn * k * x)
    u = np.ones(rule.size, dtype=complex)
    sums = [s0]
    terms = [s0]
    for j in range(1, n + 1):
        u = B @ u
        term = (-1) ** j * complex(np.sum(weight * u))
        terms.append(term)
        sums.append(sums[-1] + term)
    est = None
    if n >= 2:
        # s_n - s_{n-1} is the n-th term; using the terms directly avoids the
        # cancellation against a huge leading Vhat(2k) deep in the lower half plane
        den = abs(terms[-2])
        if den > 0:
            est = abs(terms[-1]) / den
    return BornSeries(k, target, tuple(sums), est, tuple(terms))


def estimate_jost_constant(spec: Potential, grid=None) -> float:
    """max |k| sup_x |f_plus|, |k| sup_x |f_minus| over a calibration grid.

    The default grid is |k| = 5 at seven angles spread over the open lower
    half plane.
    """
    if grid is None:
        grid = 5.0 * np.exp(-1j * np.pi * np.array([1, 3, 5, 6, 7, 9, 11]) / 12)
    best = 0.0
    for k in grid:
        for side in ("plus", "minus"):
            fc = solve_correction(spec, complex(k), side)
            best = max(best, abs(k) * fc.sup_norm)
    return float(best)


# ---------------------------------------------------------------------------
# square-well oracle


def _sinc_q(q2, L):
    """sin(qL)/q as an entire function of q**2."""
    z2 = q2 * L * L
    small = np.abs(z2) < 1e-4
    q = np.sqrt(q2 + 0j)
    safe_q = np.where(small, 1.0, q)
    series = L * (1 - z2 / 6 + z2 * z2 / 120)
    return np.where(small, series, np.sin(safe_q * L) / safe_q)


def square_well_jost(well: SquareWell, k):
    """a(k) of a square well from the explicit transfer-matrix product.

    Coefficients (A, B) of A e^{ikx} + B e^{-ikx} are mapped to (psi, psi')
    at x = -h, propagated across the well by the interior matrix, which
    depends on q**2 = k**2 - depth only (so no branch of q is needed), and
    mapped back to coefficients at x = h. With det M = 1, a(k) = M[1, 1].
    """
    k = np.asarray(k, dtype=complex)
    h = well.half_width
    q2 = k * k - well.depth
    L = 2 * h
    cq = np.cos(np.sqrt(q2 + 0j) * L)
    sq = _sinc_q(q2, L)  # sin(qL)/q
    # interior propagator in the (psi, psi') basis
    p11, p12, p21, p22 = cq, sq, -q2 * sq, cq
    em, ep = np.exp(-1j * k * h), np.exp(1j * k * h)
    # N(x) = [[e^{ikx}, e^{-ikx}], [ik e^{ikx}, -ik e^{-ikx}]]; we need column 2 of N(-h)
    n12, n22 = ep, -1j * k * ep
    # P @ column
    y1 = p11 * n12 + p12 * n22
    y2 = p21 * n12 + p22 * n22
    # second row of N(h)^{-1} = [ik e^{-ikh}, ... ] / det; det N(h) = -2ik
    # N(h)^{-1} = (1/(-2ik)) [[-ik e^{-ikh}, -e^{-ikh}], [-ik e^{ikh}, e^{ikh}]]
    a = (-1j * k * ep * y1 + ep * y2) / (-2j * k)
    return a


def square_well_oracle(well: SquareWell):
    def f(k):
        return complex(square_well_jost(well, k))
    return f


def transfer_matrix_resonances(well: SquareWell, region, tol: float = 1e-12):
    """Zeros of the square-well transfer-matrix Jost function in ``region``."""
    from .rootfinder import ContourRegion, find_zeros
    if not isinstance(well, SquareWell):
        raise ValidationError("transfer-matrix oracle needs a square_well potential")
    reg = region if isinstance(region, ContourRegion) else ContourRegion(*_region_tuple(region))
    if well.is_trivial():
        return find_zeros(lambda k: 1.0 + 0j, reg, tol, method="jost_oracle")
    return find_zeros(square_well_oracle(well), reg, tol, method="jost_oracle")
