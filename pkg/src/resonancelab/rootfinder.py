"""Zeros of analytic functions in rectangles via the argument principle.

The winding number of f around a rectangle is accumulated from phase
increments between boundary samples. A segment is bisected while its phase
increment is pi/2 or more (or disagrees with the local phase rate), and the
result is accepted only if it survives one further bisection of every
segment. Function values are cached
by point, so edges shared between neighbouring cells are evaluated once.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryZeroError, NumericalError, ValidationError

SPLIT = 0.50618  # off-centre split keeps internal edges off symmetry axes
MIN_DIAMETER = 0.05
PHASE_STEP = math.pi / 2
METHODS = ("fredholm", "jost_oracle", "fourier_hat", "function")


@dataclass(frozen=True)
class ContourRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        vals = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValidationError("region bounds must be finite")
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValidationError(f"empty region {vals}")

    @classmethod
    def parse(cls, text: str) -> "ContourRegion":
        """From ``re_min:re_max:im_min:im_max``."""
        parts = str(text).split(":")
        if len(parts) != 4:
            raise ValidationError(f"region must look like a:b:c:d, got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as exc:
            raise ValidationError(f"bad region {text!r}") from exc

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex((self.re_min + self.re_max) / 2, (self.im_min + self.im_max) / 2)

    def corners(self) -> tuple:
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (self.re_min - slack <= z.real <= self.re_max + slack
                and self.im_min - slack <= z.imag <= self.im_max + slack)

    def expanded(self, d: float) -> "ContourRegion":
        return ContourRegion(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def split(self, fx: float = SPLIT, fy: float = SPLIT) -> list["ContourRegion"]:
        xm = self.re_min + fx * self.width
        ym = self.im_min + fy * self.height
        return [ContourRegion(self.re_min, xm, self.im_min, ym),
                ContourRegion(xm, self.re_max, self.im_min, ym),
                ContourRegion(self.re_min, xm, ym, self.im_max),
                ContourRegion(xm, self.re_max, ym, self.im_max)]

    def tiles(self, nx: int, ny: int) -> list["ContourRegion"]:
        xs = np.linspace(self.re_min, self.re_max, nx + 1)
        ys = np.linspace(self.im_min, self.im_max, ny + 1)
        return [ContourRegion(float(xs[i]), float(xs[i + 1]), float(ys[j]), float(ys[j + 1]))
                for j in range(ny) for i in range(nx)]

    def to_list(self) -> list:
        return [self.re_min, self.re_max, self.im_min, self.im_max]


def as_region(region) -> ContourRegion:
    if isinstance(region, ContourRegion):
        return region
    if isinstance(region, str):
        return ContourRegion.parse(region)
    return ContourRegion(*(float(v) for v in region))


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int
    residual: float
    method: str
    converged: bool = True

    def to_dict(self) -> dict:
        return {"re": self.location.real, "im": self.location.imag,
                "multiplicity": self.multiplicity, "residual": self.residual,
                "converged": self.converged}


@dataclass(frozen=True)
class ResonanceSet:
    """Zeros found in ``region``.

    ``region`` is the rectangle actually used; it differs from
    ``requested_region`` only when a zero on the requested boundary forced
    a small outward expansion.
    """

    zeros: tuple
    region: ContourRegion
    total_winding: int
    method: str
    tol: float
    requested_region: ContourRegion | None = None
    notes: tuple = ()

    @property
    def locations(self) -> np.ndarray:
        return np.array([z.location for z in self.zeros], dtype=complex)

    def __len__(self):
        return len(self.zeros)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "region": self.region.to_list(),
            "requested_region": (self.requested_region or self.region).to_list(),
            "tol": self.tol,
            "total_winding": self.total_winding,
            "zeros": [z.to_dict() for z in self.zeros],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ResonanceSet":
        zeros = tuple(Zero(complex(z["re"], z["im"]), int(z["multiplicity"]), float(z["residual"]),
                           d["method"], bool(z.get("converged", True))) for z in d["zeros"])
        return cls(zeros, ContourRegion(*d["region"]), int(d["total_winding"]), d["method"],
                   float(d["tol"]), ContourRegion(*d.get("requested_region", d["region"])),
                   tuple(d.get("notes", ())))


class CachedFunction:
    """Memoising wrapper; the key is the exact complex point."""

    def __init__(self, f):
        self.f = f
        self.cache: dict = {}

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        v = self.cache.get(z)
        if v is None:
            v = complex(self.f(z))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise NumericalError("function value is not finite", k=z)
            self.cache[z] = v
        return v

    @property
    def evaluations(self) -> int:
        return len(self.cache)


def _wrap(f) -> CachedFunction:
    return f if isinstance(f, CachedFunction) else CachedFunction(f)


def _edge_phase(f: CachedFunction, z0: complex, z1: complex, ts, max_depth: int = 40):
    """Winding contribution of the segment z0 -> z1 and the parameters used.

    ``ts`` are the starting parameters in [0, 1]. A step is accepted when
    its phase increment is below pi/2 and agrees (within pi/4) with the
    trapezoid prediction from the phase rates at its two ends; otherwise it
    is bisected. The rate test catches increments aliased by multiples of
    2 pi, which a plain increment test (even under doubling) cannot see.
    Points are generated in a canonical orientation so that an edge walked
    in the opposite direction by a neighbour hits exactly the same points.
    """
    flip = (z1.real, z1.imag) < (z0.real, z0.imag)
    a, b = (z1, z0) if flip else (z0, z1)
    d = b - a

    def pt(t):
        return a + t * d

    def sample(t):
        z = pt(t)
        v = f(z)
        if v == 0:
            raise BoundaryZeroError("function vanishes on the contour", k=z)
        dt = 1e-6 * max(1.0, abs(z)) / abs(d)
        return v, cmath.phase(f(pt(t + dt)) / v) / dt

    vals = [sample(t) for t in ts]
    out_t, out_v = [ts[0]], [vals[0][0]]
    total = 0.0
    stack = [(ts[i], vals[i], ts[i + 1], vals[i + 1], 0) for i in range(len(ts) - 1)][::-1]
    while stack:
        t0, s0, t1, s1, depth = stack.pop()
        inc = cmath.phase(s1[0] / s0[0])
        pred = 0.5 * (s0[1] + s1[1]) * (t1 - t0)
        if abs(inc) >= PHASE_STEP or abs(pred) >= PHASE_STEP or abs(inc - pred) >= PHASE_STEP / 2:
            if depth >= max_depth:
                raise BoundaryZeroError("phase jump does not resolve; zero on or near the contour",
                                        k=pt((t0 + t1) / 2))
            tm = (t0 + t1) / 2
            sm = sample(tm)
            stack.append((tm, sm, t1, s1, depth + 1))
            stack.append((t0, s0, tm, sm, depth + 1))
            continue
        total += inc
        out_t.append(t1)
        out_v.append(s1[0])
    # near-zero test on log|f|: a zero shows up as a dip of more than 12
    # decades below the neighbouring samples. A global min/max ratio is
    # useless here, |f| can span a hundred decades along one edge.
    logs = np.log(np.abs(np.array(out_v)))
    if logs.size > 2:
        dip = 0.5 * (logs[:-2] + logs[2:]) - logs[1:-1]
        bad = dip > 12 * math.log(10)
        if np.any(bad):
            i = int(np.argmax(bad)) + 1
            raise BoundaryZeroError("function nearly vanishes on the contour", k=pt(out_t[i]),
                                    log_dip=float(dip[i - 1]))
    if flip:
        total = -total
    return total, out_t


def _doubled(ts):
    mids = [(p + q) / 2 for p, q in zip(ts[:-1], ts[1:])]
    out = [ts[0]]
    for m, q in zip(mids, ts[1:]):
        out += [m, q]
    return out


def _winding_once(f: CachedFunction, region: ContourRegion, grids) -> tuple[int, float, list]:
    c = region.corners()
    total = 0.0
    used = []
    for i in range(4):
        ph, ts = _edge_phase(f, c[i], c[(i + 1) % 4], grids[i])
        total += ph
        used.append(ts)
    w = total / (2 * math.pi)
    return int(round(w)), abs(w - round(w)), used


def winding_number(f, region, initial_steps: int = 4, *, max_doublings: int = 8) -> int:
    """Number of zeros (with multiplicity) of f inside the rectangle.

    Parameters
    ----------
    f : callable
        Analytic function handle, scalar complex in and out.
    region : ContourRegion or (re_min, re_max, im_min, im_max)
    initial_steps : int
        Uniform samples per edge before adaptive bisection.

    Notes
    -----
    After the adaptive pass every accepted boundary step is halved once
    more; the integer is returned only when this doubling reproduces it.

    Raises
    ------
    BoundaryZeroError
        If f (nearly) vanishes on the contour: min |f| < 1e-12 max |f|, or a
        phase jump persists under repeated bisection.
    """
    region = as_region(region)
    fc = _wrap(f)
    steps = max(1, int(initial_steps))
    grid = [i / steps for i in range(steps + 1)]
    prev, _, used = _winding_once(fc, region, [grid] * 4)
    for _ in range(max_doublings):
        cur, _, used = _winding_once(fc, region, [_doubled(ts) for ts in used])
        if cur == prev:
            return cur
        prev = cur
    raise NumericalError("winding number did not stabilise under doubling", region=region.to_list())


def newton(f, z0: complex, tol: float, max_iter: int = 50,
           max_step: float = math.inf) -> tuple[complex, float, bool]:
    """Newton iteration with central-difference derivative (step 1e-6 max(1, |z|)).

    Steps longer than ``max_step`` are shortened to that length.
    """
    z = complex(z0)
    fz = complex(f(z))
    for _ in range(max_iter):
        if abs(fz) < tol:
            return z, abs(fz), True
        h = 1e-6 * max(1.0, abs(z))
        d = (complex(f(z + h)) - complex(f(z - h))) / (2 * h)
        if d == 0 or not cmath.isfinite(d):
            break
        step = fz / d
        if abs(step) > max_step:
            step *= max_step / abs(step)
        # damp steps that increase |f|
        for _ in range(30):
            zn = z - step
            try:
                fn = complex(f(zn))
            except (NumericalError, ValidationError):
                fn = complex(math.inf)
            if cmath.isfinite(fn) and abs(fn) < abs(fz) * (1 + 1e-12) + tol:
                break
            step /= 2
        else:
            break
        if abs(zn - z) < 1e-15 * max(1.0, abs(z)) and abs(fn) >= abs(fz):
            z, fz = zn, fn
            break
        z, fz = zn, fn
    return z, abs(fz), abs(fz) < tol


def _locate(f, fc, region, w, tol, method, min_diameter, out, depth=0):
    if w == 0:
        return
    if w == 1 or region.diameter < min_diameter:
        # a zero of this cell is within one diameter of its centre
        z, res, ok = newton(f, region.center, tol, max_step=region.diameter)
        inside = region.contains(z, slack=1e-9 * max(1.0, abs(z)))
        if ok and inside:
            out.append(Zero(z, w, res, method, True))
            return
        if region.diameter < min_diameter:
            if not inside:
                z, res = region.center, abs(complex(f(region.center)))
            out.append(Zero(z, w, res, method, False))
            return
    # quadrisect; move the split if a zero sits on an internal edge
    for fx, fy in ((SPLIT, SPLIT), (0.4618, 0.5382), (0.5382, 0.4618), (0.43, 0.57)):
        kids = region.split(fx, fy)
        try:
            ws = [winding_number(fc, kid) for kid in kids]
        except BoundaryZeroError:
            continue
        if sum(ws) != w:
            continue
        for kid, kw in zip(kids, ws):
            _locate(f, fc, kid, kw, tol, method, min_diameter, out, depth + 1)
        return
    z, res, ok = newton(f, region.center, tol, max_step=region.diameter)
    out.append(Zero(z, w, res, method, ok and region.contains(z)))


def find_zeros(f, region, tol: float = 1e-10, *, method: str = "function",
               min_diameter: float = MIN_DIAMETER, expand_on_boundary: bool = True,
               fc: CachedFunction | None = None) -> ResonanceSet:
    """Zeros of f in the rectangle by quadrisection and Newton polishing.

    If f vanishes on the requested boundary the rectangle is pushed outward
    by 1e-3 of its size (then 2e-3, 4e-3); the rectangle actually used is
    stored in the result.
    """
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    requested = as_region(region)
    fc = fc or _wrap(f)
    reg = requested
    notes = []
    jitter = 1e-3 * max(requested.width, requested.height)
    for attempt in range(4):
        try:
            w = winding_number(fc, reg)
            break
        except BoundaryZeroError as exc:
            if not expand_on_boundary or attempt == 3:
                raise
            notes.append(f"zero near boundary at {exc.details.get('k')}; region expanded by {jitter:.3g}")
            reg = requested.expanded(jitter)
            jitter *= 2
    out: list = []
    _locate(fc, fc, reg, w, tol, method, min_diameter, out)
    zeros = tuple(sorted(out, key=lambda z: (abs(z.location), z.location.real)))
    return ResonanceSet(zeros, reg, w, method, tol, requested, tuple(notes))


def count_zeros(f, region, tiles=(1, 1)) -> int:
    """Total winding over an nx-by-ny tiling of the region."""
    region = as_region(region)
    fc = _wrap(f)
    return sum(winding_number(fc, t) for t in region.tiles(*tiles))


MIRROR_OFFSET = 0.0123


def disk_tiles(r: float, cell: float = 3.0, hole: float = 0.05,
               half: bool = False) -> list[ContourRegion]:
    """Rectangles covering the disk |k| <= r minus a small square around 0.

    The plane is cut into horizontal bands of height ``cell``; the band
    holding the real axis is split so that [-hole, hole]^2 is left out.
    Bands are trimmed to the disk's extent and cut into cells about
    ``cell`` wide. With ``half`` only Re k >= -MIRROR_OFFSET is covered
    (the offset keeps zeros on the imaginary axis off the tile edges).
    """
    R = float(r) * (1 + 1e-3) + 1e-6
    n = max(1, int(math.ceil(R / cell)))
    ys = np.linspace(0.0, R, n + 1)
    bands = []
    for j in range(n):
        lo, hi = float(ys[j]), float(ys[j + 1])
        bands.append((max(lo, hole), hi))
        bands.append((-hi, -max(lo, hole)))
    out = []
    for lo, hi in bands:
        ymin = min(abs(lo), abs(hi))
        xmax = max(math.sqrt(max(R * R - ymin * ymin, 0.0)), hole)
        xmin = -MIRROR_OFFSET if half else -xmax
        m = max(1, int(math.ceil((xmax - xmin) / cell)))
        xs = np.linspace(xmin, xmax, m + 1)
        out += [ContourRegion(float(xs[i]), float(xs[i + 1]), lo, hi) for i in range(m)]
    # the strip along the real axis on both sides of the hole
    if not half:
        out.append(ContourRegion(-R, -hole, -hole, hole))
    out.append(ContourRegion(hole, R, -hole, hole))
    return out


@dataclass(frozen=True)
class CountingResult:
    radii: tuple
    counts: tuple
    zeros: tuple
    tiles: int
    evaluations: int
    notes: tuple = field(default=())

    def pairs(self) -> list:
        return list(zip(self.radii, self.counts))


def _mirrored(z: Zero) -> Zero:
    return Zero(-z.location.conjugate(), z.multiplicity, z.residual, z.method, z.converged)


def zeros_in_disk(f, r: float, tol: float = 1e-10, *, method: str = "function", cell: float = 3.0,
                  fc: CachedFunction | None = None, symmetric: bool = False) -> CountingResult:
    """All zeros in the disk tiling for radius r (see ``disk_tiles``).

    ``symmetric`` declares conj(f(k)) = f(-conj(k)) (true for D of a real
    potential): only the right half is searched and zeros are mirrored.
    """
    fc = fc or _wrap(f)
    zs, notes = [], []
    tiles = disk_tiles(r, cell, half=symmetric)
    for t in tiles:
        rs = find_zeros(fc, t, tol, method=method, fc=fc)
        notes += list(rs.notes)
        zs += list(rs.zeros)
    if symmetric:
        zs += [_mirrored(z) for z in zs if abs(z.location.real) > 1e-9 * max(1.0, abs(z.location))]
    # a zero on a shared tile edge can be reported by both expanded neighbours
    uniq: list = []
    for z in sorted(zs, key=lambda z: abs(z.location)):
        if any(abs(z.location - u.location) < 1e-8 * max(1.0, abs(z.location)) for u in uniq):
            continue
        uniq.append(z)
    return CountingResult((float(r),), (), tuple(uniq), len(tiles), fc.evaluations, tuple(notes))


def counting_function(f, radii, tol: float = 1e-10, *, method: str = "function",
                      cell: float = 3.0, fc: CachedFunction | None = None,
                      symmetric: bool = False) -> CountingResult:
    """n(r) = number of zeros (with multiplicity) of modulus <= r, for each r.

    Zeros are located once over a rectangle tiling of the largest disk and
    then counted by modulus, so the counts are non-decreasing by
    construction. A zero whose modulus is within 1e-9 of a requested radius
    moves that radius out by 1e-3 (noted in the result).
    """
    radii = [float(r) for r in radii]
    if not radii or any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
        raise ValidationError("radii must be positive and strictly ascending")
    fc = fc or _wrap(f)
    res = zeros_in_disk(fc, radii[-1], tol, method=method, cell=cell, fc=fc, symmetric=symmetric)
    mods = np.array([abs(z.location) for z in res.zeros])
    mult = np.array([z.multiplicity for z in res.zeros], dtype=int)
    notes = list(res.notes)
    counts, used = [], []
    for r in radii:
        if mods.size and np.any(np.abs(mods - r) < 1e-9 * max(1.0, r)):
            notes.append(f"zero on |k| = {r}; radius jittered by 1e-3")
            r = r + 1e-3
        used.append(r)
        counts.append(int(mult[mods <= r].sum()) if mods.size else 0)
    return CountingResult(tuple(used), tuple(counts), res.zeros, res.tiles, fc.evaluations, tuple(notes))
