"""Rotated integration paths for analytic potentials.

For k deep in the lower half plane the free kernel exp(ik|x-y|) grows like
exp(|Im k| |x-y|) while the Gaussian tail decays; on the real axis the
determinant is then a sum of huge terms that cancel, and double precision
loses everything. For an entire potential the integrals can be taken along
the rotated line x = c + exp(i theta) t instead (Cauchy), with the kernel
continued as exp(ik sgn(t-s)(x(t) - x(s))). Choosing theta so that the
largest intermediate product stays small restores full accuracy.

This module picks theta, the truncation T of the path parameter, and a
panel layout adapted to the local oscillation of the integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PoleProximityError, RegionError
from .potential import Potential

K_MIN = 1e-3
LOG_EPS = math.log(1e-16)
_SNAP = 16.0  # paths are chosen per cell of side 1/_SNAP in the k plane


@dataclass(frozen=True)
class ContourPath:
    """The line x = center + exp(1j*theta)*t for t in [-half_length, half_length].

    ``loss`` is the natural log of the largest intermediate magnitude the
    integrals meet on this path; roughly ``exp(loss) * 1e-16`` is the
    relative accuracy that can be expected.
    """

    center: float
    theta: float
    half_length: float
    loss: float = 0.0

    @property
    def rot(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta))

    def points(self, t):
        return self.center + self.rot * np.asarray(t)


def check_k(k: complex) -> complex:
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise PoleProximityError("k must be finite", k=k)
    if abs(k) < K_MIN:
        raise PoleProximityError(f"|k| = {abs(k):.3g} is inside the excluded disk |k| < {K_MIN}", k=k)
    return k


def truncation_radius(spec: Potential, eps: float = 1e-12, k_region_max_im: float = 0.0) -> float:
    """Smallest L on the ladder 0.1, 0.2, ... with |V(+-L)| exp(2 m L) < eps.

    ``m = |k_region_max_im|``. The bound is also required at every larger
    ladder value, so the tail beyond L stays below ``eps``. Compactly
    supported potentials return the edge of their support.

    Raises
    ------
    RegionError
        If no ladder value up to 100 works.
    """
    if eps <= 0:
        raise RegionError("eps must be positive")
    sup = spec.support()
    if sup is not None:
        return float(max(abs(sup[0]), abs(sup[1])))
    m = abs(float(k_region_max_im))
    ladder = np.round(np.arange(1, 1001) * 0.1, 10)
    vals = np.maximum(spec.log_abs_bound(ladder), spec.log_abs_bound(-ladder)) + 2 * m * ladder
    bad = vals >= math.log(eps)
    if bad[-1]:
        raise RegionError("no truncation radius up to 100 bounds the kernel tail",
                          eps=eps, k_region_max_im=m)
    idx = np.nonzero(bad)[0]
    first = 0 if idx.size == 0 else idx[-1] + 1
    return float(ladder[first])


def _theta_max(spec: Potential) -> float:
    power = getattr(spec, "power", 2)
    # keep exp(-((t e^{i theta})**p)) decaying: |p theta| < pi/2, with margin
    return 0.83 * math.pi / (2 * power)


def _real_path(spec: Potential, k: complex) -> ContourPath:
    sup = spec.support()
    if sup is not None:
        c = (sup[0] + sup[1]) / 2
        return ContourPath(c, 0.0, (sup[1] - sup[0]) / 2, 0.0)
    L = truncation_radius(spec, 1e-16, max(0.0, -k.imag))
    return ContourPath(0.0, 0.0, L, 0.0)


def choose_path(spec: Potential, k: complex, budget: float = 14.0) -> ContourPath:
    """Pick the rotation and truncation for evaluating integrals at ``k``.

    Non-analytic potentials always get the real axis. Analytic ones get the
    cheapest rotation whose intermediate loss is within ``budget`` (or within
    one unit of the best available loss).
    """
    k = check_k(k)
    if not spec.analytic or spec.is_trivial():
        return _real_path(spec, k)
    kr = complex(round(k.real * _SNAP) / _SNAP, round(k.imag * _SNAP) / _SNAP)
    if abs(kr) < K_MIN:
        kr = k
    return _choose_cached(spec, kr, float(budget))


MAX_PATH_SAMPLES = 100_000  # about |k| = 2000 for unit width


@lru_cache(maxsize=4096)
def _choose_cached(spec: Potential, k: complex, budget: float) -> ContourPath:
    c, w = spec.center_scale()
    tmax = _theta_max(spec)
    thetas = np.linspace(-tmax, tmax, 27)
    T0 = 2.0 * (7.0 * w + abs(k) * w * w) + 4.0 * w
    dt = 0.04 * w
    if T0 / dt > MAX_PATH_SAMPLES:
        raise RegionError("k too large for the rotated-path search", k=k)
    tt = np.arange(-T0, T0 + dt / 2, dt)
    rot = np.exp(1j * thetas)[:, None]
    g = rot * tt[None, :]
    logv = spec.log_value(c + g)
    lv = np.real(logv)
    gr = -2.0 * np.imag(k * g)
    A = lv + gr
    B = lv - gr
    runB = np.maximum.accumulate(B, axis=1)
    revA = np.maximum.accumulate(A[:, ::-1], axis=1)[:, ::-1]
    loss = np.maximum(0.0, np.max(A + runB, axis=1))
    loss = np.maximum(loss, np.max(lv, axis=1))
    cap = max(loss.min() + 1.0, budget)
    im_deriv = np.abs(np.gradient(np.imag(logv), dt, axis=1))

    best = None
    for i, th in enumerate(thetas):
        if loss[i] > cap:
            continue
        thr = loss[i] + LOG_EPS
        keep = (lv[i] > LOG_EPS) | (A[i] + runB[i] > thr) | (B[i] + revA[i] > thr)
        idx = np.nonzero(keep)[0]
        if idx.size == 0:
            T = w
        else:
            T = max(abs(tt[idx[0]]), abs(tt[idx[-1]])) + 0.5 * w
        if T >= T0 - w:
            continue
        mask = np.abs(tt) <= T
        cost = float(np.sum(im_deriv[i][mask]) * dt) + 2 * abs(k) * 2 * T + 2 * T / w
        cand = (cost, abs(th), th, T, float(loss[i]))
        if best is None or cand < best:
            best = cand
    if best is None:
        raise RegionError("no rotated path keeps the integrals bounded", k=k)
    _, _, th, T, ls = best
    return ContourPath(float(c), float(th), float(T), ls)


def panel_edges(spec: Potential, path: ContourPath, k: complex, c: float, osc: float,
                hmax: float | None = None) -> np.ndarray:
    """Panel boundaries on [-T, T] with width ~ c / (local angular frequency).

    ``osc`` multiplies |k| in the frequency model (2 for the Volterra
    kernels exp(2ikx), 1 for the resolvent kernel).
    """
    T = path.half_length
    sup = spec.support()
    _, w = spec.center_scale()
    if hmax is None:
        hmax = w
    if spec.analytic and path.theta != 0.0:
        tt = np.linspace(-T, T, 801)
        dt = tt[1] - tt[0]
        ph = np.imag(spec.log_value(path.points(tt)))
        om_v = np.abs(np.gradient(ph, dt))
    else:
        tt = np.array([-T, T])
        om_v = np.zeros(2)
    base = osc * abs(k) + 1.0 / w
    # panels of equal "phase budget": density max(omega / c, 1 / hmax),
    # edges at equal steps of its running integral
    dens = np.maximum((om_v + base) / c, 1.0 / hmax)
    if tt.size == 2:
        tt = np.linspace(-T, T, 3)
        dens = np.full(3, dens[0])
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(tt))])
    n = max(1, int(math.ceil(cum[-1] - 1e-9)))
    edges = np.interp(np.linspace(0.0, cum[-1], n + 1), cum, tt)
    edges[0], edges[-1] = -T, T
    if sup is not None and path.theta == 0.0:
        # keep jumps of compactly supported data on panel boundaries
        edges = np.unique(np.concatenate([edges, np.array(sup) - path.center]))
        edges = edges[(edges >= -T) & (edges <= T)]
    return edges
