"""Fredholm determinant D(k) = det(1 + V^(1/2) R0(k) |V|^(1/2)).

The free resolvent kernel in one dimension is (i/2k) exp(ik|x-y|). It is
discretised by a Nystrom rule with symmetrised weights, and the determinant
is taken through a pivoted LU factorisation with the log-modulus summed
along the diagonal, so values as large as exp(300) deep in the lower half
plane are represented without overflow.

The kernel has a derivative jump on the diagonal, so the Nystrom
determinant converges only like N**-2. Every reported value is therefore the
Richardson extrapolation (4 D_N - D_{N/2}) / 3, and the resolution is
doubled until two successive extrapolated values agree to ``tol``.

For analytic potentials the integration line may be rotated into the
complex x plane (see :mod:`resonancelab.paths`), which is what keeps the
evaluation accurate for large |Im k|.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DivisionError, NumericalError, ValidationError
from .paths import K_MIN, ContourPath, check_k, choose_path, panel_edges, truncation_radius
from .potential import Potential
from .quadrature import QuadratureRule, build_rule, rule_from_edges

__all__ = [
    "KernelMatrix", "DeterminantValue", "GridField", "build_rule", "truncation_radius",
    "assemble_kernel", "fredholm_det", "determinant", "det_value", "det_grid",
    "scattering_det", "write_grid_csv", "K_MIN",
]

NYSTROM_ORDER = 8
NYSTROM_C = 3.0
LOG_OVERFLOW = 709.0


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Nystrom matrix of V^(1/2) R0(k) |V|^(1/2) at one k.

    ``entries[i, j] = sqrt(w_i) Vs(x_i) G0(x_i, x_j; k) Va(x_j) sqrt(w_j)``
    with G0 = (i/2k) exp(ik|x - y|). On a rotated path x = c + e^{i theta} t
    the weights carry the factor e^{i theta} and the distance is measured
    along the path.
    """

    k: complex
    entries: np.ndarray
    rule: QuadratureRule
    spec: Potential | None = None
    path: ContourPath | None = None

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DeterminantValue:
    """D(k) with its provenance.

    Attributes
    ----------
    k : complex
    D : complex
        Reported determinant; Richardson-extrapolated for ``determinant``,
        the raw discrete value for ``fredholm_det``. May be infinite when
        ``log_abs`` exceeds the double range; ``log_abs`` and ``phase`` are
        always finite.
    grid_size : int
        Largest number of nodes used.
    refinement_delta : float
        |D_N - D_{N/2}| between the last two resolutions.
    converged : bool
        ``refinement_delta < tol * max(1, |D|)``.
    """

    k: complex
    D: complex
    grid_size: int
    refinement_delta: float
    converged: bool
    log_abs: float = 0.0
    phase: complex = 1.0
    tol: float = 1e-8
    method: str = "nystrom"
    theta: float = 0.0
    raw: complex | None = None

    @property
    def value(self) -> complex:
        return self.D


def _from_log(log_abs: float, phase: complex) -> complex:
    if log_abs > LOG_OVERFLOW:
        return complex(math.copysign(math.inf, phase.real), math.copysign(math.inf, phase.imag))
    if log_abs == -math.inf:
        return 0j
    return phase * math.exp(log_abs)


def _log_sqrt_weights(spec: Potential, rule: QuadratureRule, path: ContourPath | None):
    """Left/right half logarithms h_l, h_r with exp(h_l + h_r) = V(x) w dx/dt."""
    t, w = rule.nodes, rule.weights
    if path is None or path.theta == 0.0:
        c = 0.0 if path is None else path.center
        x = c + t
        if spec.analytic:
            lv = spec.log_value(x)
            labs, neg = lv.real, np.cos(lv.imag) < 0
        else:
            v = spec.value(x)
            with np.errstate(divide="ignore"):
                labs = np.log(np.abs(v))
            neg = v < 0
        la = 0.5 * (labs + np.log(w))
        hl = la + np.where(neg, 1j * math.pi, 0.0)
        return hl.astype(complex), la.astype(complex), c + t.astype(complex)
    x = path.points(t)
    h = 0.5 * (spec.log_value(x) + np.log(w * path.rot))
    return h, h, x


def assemble_kernel(spec: Potential, rule: QuadratureRule, k: complex,
                    path: ContourPath | None = None) -> KernelMatrix:
    """Nystrom matrix of the sandwiched free resolvent.

    Parameters
    ----------
    spec : Potential
    rule : QuadratureRule
        Nodes in the path parameter t; on the default real path x = t.
    k : complex
        Must satisfy |k| >= 1e-3.
    path : ContourPath, optional
        Rotated line for analytic potentials.

    Raises
    ------
    PoleProximityError
        If |k| < 1e-3.
    """
    k = check_k(k)
    hl, hr, x = _log_sqrt_weights(spec, rule, path)
    t = rule.nodes
    rot = 1.0 if path is None else path.rot
    dist = rot * np.abs(t[:, None] - t[None, :])
    with np.errstate(over="ignore", invalid="ignore"):
        ex = hl[:, None] + hr[None, :] + 1j * k * dist
        ent = (0.5j / k) * np.exp(ex)
    ent[~np.isfinite(ex.real) & (ex.real < 0)] = 0.0
    if not np.all(np.isfinite(ent)):
        raise NumericalError("kernel entries overflow; use a rotated path or smaller |Im k|", k=k)
    return KernelMatrix(k, ent, rule, spec, path)


def _logdet(matrix: np.ndarray) -> tuple[float, complex]:
    """log|det(I + matrix)| and its phase through partial-pivot LU."""
    n = matrix.shape[0]
    if n == 0:
        return 0.0, 1.0 + 0j
    a = np.eye(n, dtype=complex) + matrix
    lu, piv = sla.lu_factor(a, check_finite=True)
    d = np.diag(lu)
    if np.any(d == 0):
        return -math.inf, 1.0 + 0j
    swaps = int(np.sum(piv != np.arange(n)))
    ph = d / np.abs(d)
    phase = complex(np.prod(ph)) * (-1.0) ** swaps
    phase /= abs(phase)
    return float(np.sum(np.log(np.abs(d)))), phase


def _diff_abs(la: float, pa: complex, lb: float, pb: complex) -> float:
    """|A - B| for A = pa e^la, B = pb e^lb, without overflow where possible."""
    m = max(la, lb)
    if m == -math.inf:
        return 0.0
    diff = abs(pa * math.exp(la - m) - pb * math.exp(lb - m))
    if diff == 0:
        return 0.0
    out = math.log(diff) + m
    return math.inf if out > LOG_OVERFLOW else math.exp(out)


def fredholm_det(km: KernelMatrix, refine: bool = True) -> DeterminantValue:
    """det(I + K) of a kernel matrix, plus a half-resolution comparison.

    Returns the raw discrete value. With ``refine`` the matrix is rebuilt on
    the coarsened rule and ``refinement_delta = |D_N - D_{N/2}|``.
    """
    la, pa = _logdet(km.entries)
    delta = 0.0
    if refine and km.spec is not None and km.size:
        coarse = km.rule.coarsened()
        lb, pb = _logdet(assemble_kernel(km.spec, coarse, km.k, km.path).entries)
        delta = _diff_abs(la, pa, lb, pb)
    D = _from_log(la, pa)
    theta = 0.0 if km.path is None else km.path.theta
    scale = max(1.0, math.exp(min(la, LOG_OVERFLOW)))
    return DeterminantValue(km.k, D, km.size, delta, delta < 1e-8 * scale, la, pa, 1e-8,
                            "nystrom", theta, D)


def nystrom_base_rule(spec: Potential, k: complex, path: ContourPath,
                      order: int = NYSTROM_ORDER, c: float = NYSTROM_C) -> QuadratureRule:
    edges = panel_edges(spec, path, k, c=c, osc=1.0)
    return rule_from_edges(edges, order)


def _romberg(levels: list[tuple[float, complex]], depth: int) -> tuple[list, float]:
    """Romberg table on log-form determinants from successive doublings.

    Returns the diagonal estimates (log_abs, phase) for each level and the
    common log scale used. The discretisation error expands in even powers
    of the panel width, so column m removes the h**(2m) term.
    """
    scale = max(l for l, _ in levels)
    if scale == -math.inf:
        scale = 0.0
    vals = [p * math.exp(l - scale) for l, p in levels]
    table = []
    for j, v in enumerate(vals):
        row = [v]
        for m in range(1, min(j, depth) + 1):
            f = 4.0 ** m
            row.append((f * row[m - 1] - table[j - 1][m - 1]) / (f - 1))
        table.append(row)
    diag = []
    for row in table:
        v = row[-1]
        diag.append((math.log(abs(v)) + scale if v != 0 else -math.inf, v / abs(v) if v != 0 else 1 + 0j))
    return diag, scale


def determinant(spec: Potential, k: complex, tol: float = 1e-8, n_max: int = 2048, *,
                method: str = "nystrom", path: ContourPath | None = None,
                rule: QuadratureRule | None = None, depth: int = 3) -> DeterminantValue:
    """D(k) to relative accuracy ``tol`` by resolution doubling.

    Parameters
    ----------
    spec : Potential
    k : complex
        Any point with |k| >= 1e-3.
    tol : float
        Target for |D_N - D_{N/2}| / max(1, |D|), where D_N is the
        extrapolated estimate after the doubling that reached N nodes.
    n_max : int
        Largest number of nodes; if reached the value is flagged unconverged.
    method : {"nystrom", "jost"}
        ``jost`` evaluates D through the Volterra transfer march instead
        (identical mathematically, much faster for long searches).
    path, rule : optional
        Override the automatic path or starting rule.
    depth : int
        Number of Richardson (Romberg) columns; 1 is plain Richardson.
    """
    k = check_k(k)
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if method == "jost":
        from .jost import jost_determinant
        return jost_determinant(spec, k, tol=tol)
    if method != "nystrom":
        raise ValidationError(f"unknown determinant method {method!r}")
    if spec.is_trivial():
        return DeterminantValue(k, 1.0 + 0j, 0, 0.0, True, 0.0, 1.0 + 0j, tol, "nystrom", 0.0, 1.0 + 0j)
    if path is None:
        path = choose_path(spec, k)
    if rule is None:
        rule = nystrom_base_rule(spec, k, path)
    while rule.size > max(n_max // 4, 16) and len(rule.edges) > 2:
        rule = rule.coarsened()

    levels = [_logdet(assemble_kernel(spec, rule, k, path).entries)]
    size = rule.size
    delta = math.inf
    converged = False
    diag = [levels[0]]
    while True:
        rule = rule.refined()
        if rule.size > n_max:
            break
        levels.append(_logdet(assemble_kernel(spec, rule, k, path).entries))
        size = rule.size
        diag, _ = _romberg(levels, depth)
        delta = _diff_abs(*diag[-1], *diag[-2])
        bound = tol * max(1.0, math.exp(min(diag[-1][0], LOG_OVERFLOW)))
        if len(levels) >= 3 and delta < bound:
            converged = True
            break
    la, pa = diag[-1]
    return DeterminantValue(k, _from_log(la, pa), size, delta, converged, la, pa, tol,
                            "nystrom", path.theta, _from_log(*levels[-1]))


def det_value(spec: Potential, k: complex, tol: float = 1e-8, method: str = "nystrom") -> complex:
    """Shortcut returning only the complex value of D(k)."""
    return determinant(spec, k, tol=tol, method=method).D


@dataclass(frozen=True, eq=False)
class GridField:
    """Row-major field of determinant values; ``values[iy][ix]``, masked cells None."""

    re: np.ndarray
    im: np.ndarray
    values: list = field(repr=False)

    def array(self) -> np.ndarray:
        out = np.full((len(self.im), len(self.re)), np.nan + 0j)
        for iy, row in enumerate(self.values):
            for ix, v in enumerate(row):
                if v is not None:
                    out[iy, ix] = v.D
        return out

    @property
    def mask(self) -> np.ndarray:
        return np.array([[v is None for v in row] for row in self.values])


def det_grid(spec: Potential, region, resolution=(41, 41), *, tol: float = 1e-8,
             method: str = "nystrom", threads: int = 1) -> GridField:
    """D on a uniform nx-by-ny grid over ``region`` (re_min, re_max, im_min, im_max).

    Samples with |k| < 1e-3 are masked (stored as None).
    """
    re_min, re_max, im_min, im_max = (float(v) for v in _region_tuple(region))
    nx, ny = (int(v) for v in resolution)
    if not (re_max > re_min and im_max > im_min) or nx < 1 or ny < 1:
        raise ValidationError("empty region or resolution")
    re = np.linspace(re_min, re_max, nx) if nx > 1 else np.array([re_min])
    im = np.linspace(im_min, im_max, ny) if ny > 1 else np.array([im_min])
    pts = [complex(x, y) for y in im for x in re]

    def one(kk):
        if abs(kk) < K_MIN:
            return None
        return determinant(spec, kk, tol=tol, method=method)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            flat = list(ex.map(one, pts))
    else:
        flat = [one(p) for p in pts]
    values = [flat[i * nx:(i + 1) * nx] for i in range(ny)]
    return GridField(re, im, values)


def _region_tuple(region):
    if hasattr(region, "re_min"):
        return region.re_min, region.re_max, region.im_min, region.im_max
    if isinstance(region, str):
        try:
            parts = tuple(float(v) for v in region.split(":"))
        except ValueError:
            parts = ()
        if len(parts) != 4:
            raise ValidationError(f"bad region {region!r}; expected re_min:re_max:im_min:im_max")
        return parts
    return tuple(region)


def scattering_det(spec: Potential, k: complex, tol: float = 1e-10, method: str = "nystrom") -> complex:
    """E(-k) = D(k) / D(-k).

    Raises
    ------
    DivisionError
        If |D(-k)| < 1e-13.
    """
    k = check_k(k)
    num = determinant(spec, k, tol=tol, method=method)
    den = determinant(spec, -k, tol=tol, method=method)
    if den.log_abs < math.log(1e-13):
        raise DivisionError("D(-k) vanishes numerically; -k is (near) a resonance", k=k)
    la = num.log_abs - den.log_abs
    return _from_log(la, num.phase / den.phase)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_grid_csv(grid: GridField, path) -> None:
    """CSV with columns re_k, im_k, re_D, im_D, abs_D, converged (17 significant digits)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re_k", "im_k", "re_D", "im_D", "abs_D", "converged"])
        for iy, y in enumerate(grid.im):
            for ix, x in enumerate(grid.re):
                v = grid.values[iy][ix]
                if v is None:
                    w.writerow([_fmt(x), _fmt(y), "nan", "nan", "nan", 0])
                else:
                    absd = math.exp(v.log_abs) if v.log_abs < LOG_OVERFLOW else math.inf
                    w.writerow([_fmt(x), _fmt(y), _fmt(v.D.real), _fmt(v.D.imag), _fmt(absd),
                                int(v.converged)])
