"""Potential families, pointwise values, Fourier transforms and growth diagnostics.

All potentials are real valued on the real line and decay faster than any
exponential. The analytic families (``Gaussian``, ``SuperGaussian``,
``GaussianSum``) also expose a complex logarithm ``log_value`` valid on the
whole complex plane, which the determinant and Jost solvers use to deform
their integration paths. ``SquareWell`` and ``Tabulated`` are compactly
supported and are only ever sampled on the real axis.

Fourier convention used everywhere::

    Vhat(zeta) = integral of exp(-1j * zeta * x) * V(x) dx
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np
from scipy import optimize
from scipy.integrate import trapezoid
from scipy.special import logsumexp

from .errors import FitError, TruncationError, ValidationError

LOG_SQRT_PI = 0.5 * math.log(math.pi)

# Gauss-Legendre panel used for Fourier quadrature of non closed-form families.
_GL_T, _GL_W = np.polynomial.legendre.leggauss(16)


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def _complex_logsumexp(logs: np.ndarray) -> np.ndarray:
    # log(sum(exp(logs), axis=0)) for complex logs, shifted by the largest
    # real part (much cheaper than the general complex path of scipy)
    m = np.max(logs.real, axis=0)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return m + np.log(np.sum(np.exp(logs - m), axis=0))


def _log_amplitude(a: float) -> complex:
    # complex log of a real amplitude, branch +i*pi for negatives
    return complex(math.log(abs(a)), math.pi if a < 0 else 0.0)


class Potential:
    """Common behaviour of all potential families.

    Subclasses are frozen dataclasses. Instances are hashable and safe to
    share between threads.
    """

    family: ClassVar[str] = ""
    analytic: ClassVar[bool] = False
    closed_form_fourier: ClassVar[bool] = False

    # -- values ---------------------------------------------------------
    def __call__(self, x):
        return self.value(x)

    def value(self, x):
        raise NotImplementedError

    def log_value(self, z):
        """Complex logarithm of V at complex points (analytic families only)."""
        raise NotImplementedError(f"{self.family} potentials have no analytic continuation")

    def log_abs_bound(self, x):
        """Upper bound for log|V(x)| at real x, safe against underflow."""
        v = np.abs(self.value(np.asarray(x, dtype=float)))
        with np.errstate(divide="ignore"):
            return np.log(v)

    # -- geometry -------------------------------------------------------
    def support(self) -> tuple[float, float] | None:
        """Closed interval outside which V vanishes, or None."""
        return None

    def center_scale(self) -> tuple[float, float]:
        """A representative center and length scale of the potential."""
        raise NotImplementedError

    def is_trivial(self) -> bool:
        raise NotImplementedError

    def sign(self) -> int:
        """+1 if V >= 0 everywhere, -1 if V <= 0 everywhere, 0 if mixed."""
        raise NotImplementedError

    def reflected(self) -> "Potential":
        """The potential x -> V(-x)."""
        raise NotImplementedError

    # -- Fourier --------------------------------------------------------
    def fourier_closed(self, zeta, order: int = 0):
        raise NotImplementedError

    def log_fourier_closed(self, zeta):
        raise NotImplementedError

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        raise NotImplementedError

    @property
    def name(self) -> str:
        return self.label or self.family


@dataclass(frozen=True)
class Gaussian(Potential):
    """V(x) = amplitude * exp(-((x - center) / width)**2)."""

    amplitude: float
    width: float = 1.0
    center: float = 0.0
    label: str = ""

    family: ClassVar[str] = "gaussian"
    analytic: ClassVar[bool] = True
    closed_form_fourier: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _check_finite("amplitude", self.amplitude))
        object.__setattr__(self, "width", _check_positive("width", self.width))
        object.__setattr__(self, "center", _check_finite("center", self.center))

    def value(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.amplitude * np.exp(-u * u)

    def log_value(self, z):
        if self.amplitude == 0:
            return np.full(np.shape(z), -np.inf + 0j)
        u = (np.asarray(z, dtype=complex) - self.center) / self.width
        return _log_amplitude(self.amplitude) - u * u

    def log_abs_bound(self, x):
        if self.amplitude == 0:
            return np.full(np.shape(x), -np.inf)
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        return math.log(abs(self.amplitude)) - u * u

    def center_scale(self):
        return self.center, self.width

    def is_trivial(self):
        return self.amplitude == 0

    def sign(self):
        return int(np.sign(self.amplitude)) if self.amplitude else 1

    def reflected(self):
        return Gaussian(self.amplitude, self.width, -self.center, self.label)

    def fourier_closed(self, zeta, order: int = 0):
        """Closed form of Vhat and its derivatives up to ``order`` (0, 1 or 2)."""
        z = np.asarray(zeta, dtype=complex)
        w, c = self.width, self.center
        base = self.amplitude * w * math.sqrt(math.pi) * np.exp(-(z * w) ** 2 / 4 - 1j * z * c)
        if order == 0:
            return base
        g = -z * w * w / 2 - 1j * c
        if order == 1:
            return base * g
        return base * (g * g - w * w / 2)

    def log_fourier_closed(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        if self.amplitude == 0:
            return np.full(z.shape, -np.inf + 0j)
        w = self.width
        return (_log_amplitude(self.amplitude) + math.log(w) + LOG_SQRT_PI
                - (z * w) ** 2 / 4 - 1j * z * self.center)

    def to_dict(self):
        return {"family": self.family, "label": self.label, "amplitude": self.amplitude,
                "width": self.width, "center": self.center}


@dataclass(frozen=True)
class SuperGaussian(Potential):
    """V(x) = amplitude * exp(-((x - center) / width)**power), power even."""

    amplitude: float
    width: float = 1.0
    power: int = 4
    center: float = 0.0
    label: str = ""

    family: ClassVar[str] = "super_gaussian"
    analytic: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _check_finite("amplitude", self.amplitude))
        object.__setattr__(self, "width", _check_positive("width", self.width))
        object.__setattr__(self, "center", _check_finite("center", self.center))
        p = self.power
        if isinstance(p, float) and p.is_integer():
            p = int(p)
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or p < 2 or p % 2:
            raise ValidationError(f"power must be an even integer >= 2, got {self.power!r}")
        object.__setattr__(self, "power", int(p))

    def value(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.amplitude * np.exp(-(u ** self.power))

    def log_value(self, z):
        if self.amplitude == 0:
            return np.full(np.shape(z), -np.inf + 0j)
        u = (np.asarray(z, dtype=complex) - self.center) / self.width
        return _log_amplitude(self.amplitude) - u ** self.power

    def log_abs_bound(self, x):
        if self.amplitude == 0:
            return np.full(np.shape(x), -np.inf)
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        return math.log(abs(self.amplitude)) - u ** self.power

    def center_scale(self):
        return self.center, self.width

    def is_trivial(self):
        return self.amplitude == 0

    def sign(self):
        return int(np.sign(self.amplitude)) if self.amplitude else 1

    def reflected(self):
        return SuperGaussian(self.amplitude, self.width, self.power, -self.center, self.label)

    def to_dict(self):
        return {"family": self.family, "label": self.label, "amplitude": self.amplitude,
                "width": self.width, "power": self.power, "center": self.center}


@dataclass(frozen=True)
class GaussianSum(Potential):
    """Finite sum of Gaussian terms."""

    terms: tuple[Gaussian, ...]
    label: str = ""

    family: ClassVar[str] = "gaussian_sum"
    analytic: ClassVar[bool] = True
    closed_form_fourier: ClassVar[bool] = True

    def __post_init__(self):
        terms = tuple(t if isinstance(t, Gaussian) else Gaussian(**t) for t in self.terms)
        if not terms:
            raise ValidationError("gaussian_sum needs at least one term")
        object.__setattr__(self, "terms", terms)

    def value(self, x):
        return sum(t.value(x) for t in self.terms)

    def log_value(self, z):
        live = [t for t in self.terms if t.amplitude != 0]
        if not live:
            return np.full(np.shape(z), -np.inf + 0j)
        logs = np.stack([np.broadcast_to(t.log_value(z), np.shape(z)) for t in live])
        return _complex_logsumexp(logs)

    def log_abs_bound(self, x):
        logs = np.stack([np.broadcast_to(t.log_abs_bound(x), np.shape(x)) for t in self.terms])
        return logsumexp(logs, axis=0)

    def center_scale(self):
        live = [t for t in self.terms if t.amplitude != 0] or list(self.terms)
        lo = min(t.center - t.width for t in live)
        hi = max(t.center + t.width for t in live)
        weights = np.array([abs(t.amplitude) * t.width for t in live]) + 1e-300
        c = float(np.average([t.center for t in live], weights=weights))
        return c, max(max(t.width for t in live), (hi - lo) / 2)

    def is_trivial(self):
        return all(t.amplitude == 0 for t in self.terms)

    def sign(self):
        signs = {int(np.sign(t.amplitude)) for t in self.terms if t.amplitude}
        if len(signs) <= 1:
            return signs.pop() if signs else 1
        return 0

    def reflected(self):
        return GaussianSum(tuple(t.reflected() for t in self.terms), self.label)

    def fourier_closed(self, zeta, order: int = 0):
        return sum(t.fourier_closed(zeta, order) for t in self.terms)

    def log_fourier_closed(self, zeta):
        live = [t for t in self.terms if t.amplitude != 0]
        z = np.asarray(zeta, dtype=complex)
        if not live:
            return np.full(z.shape, -np.inf + 0j)
        logs = np.stack([np.broadcast_to(t.log_fourier_closed(z), z.shape) for t in live])
        return logsumexp(logs, axis=0)

    def to_dict(self):
        return {"family": self.family, "label": self.label,
                "terms": [{"amplitude": t.amplitude, "width": t.width, "center": t.center}
                          for t in self.terms]}


@dataclass(frozen=True)
class SquareWell(Potential):
    """V(x) = depth on [-half_width, half_width], zero elsewhere."""

    depth: float
    half_width: float = 1.0
    label: str = ""

    family: ClassVar[str] = "square_well"
    closed_form_fourier: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "depth", _check_finite("depth", self.depth))
        object.__setattr__(self, "half_width", _check_positive("half_width", self.half_width))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= self.half_width, self.depth, 0.0)

    def support(self):
        return -self.half_width, self.half_width

    def center_scale(self):
        return 0.0, self.half_width

    def is_trivial(self):
        return self.depth == 0

    def sign(self):
        return int(np.sign(self.depth)) if self.depth else 1

    def reflected(self):
        return self

    def fourier_closed(self, zeta, order: int = 0):
        if order:
            raise NotImplementedError
        z = np.asarray(zeta, dtype=complex)
        a = self.half_width
        za = z * a
        small = np.abs(za) < 1e-6
        safe = np.where(small, 1.0, za)
        sinc = np.where(small, 1 - za * za / 6, np.sin(safe) / safe)
        return 2 * self.depth * a * sinc

    def log_fourier_closed(self, zeta):
        with np.errstate(divide="ignore"):
            return np.log(self.fourier_closed(zeta).astype(complex))

    def to_dict(self):
        return {"family": self.family, "label": self.label, "depth": self.depth,
                "half_width": self.half_width}


@dataclass(frozen=True)
class Tabulated(Potential):
    """Samples (x_j, V_j), linearly interpolated and zero outside the sample range."""

    x: tuple[float, ...]
    v: tuple[float, ...]
    interpolation: str = "linear"
    label: str = ""
    _xa: np.ndarray = field(init=False, repr=False, compare=False)
    _va: np.ndarray = field(init=False, repr=False, compare=False)

    family: ClassVar[str] = "tabulated"

    def __post_init__(self):
        xa = np.asarray(self.x, dtype=float).ravel()
        va = np.asarray(self.v, dtype=float).ravel()
        if self.interpolation != "linear":
            raise ValidationError(f"unsupported interpolation {self.interpolation!r}")
        if xa.size < 2 or xa.size != va.size:
            raise ValidationError("tabulated potential needs >= 2 (x, V) pairs of equal length")
        if not (np.all(np.isfinite(xa)) and np.all(np.isfinite(va))):
            raise ValidationError("tabulated samples must be finite")
        if np.any(np.diff(xa) <= 0):
            raise ValidationError("tabulated x samples must be strictly increasing")
        object.__setattr__(self, "x", tuple(xa.tolist()))
        object.__setattr__(self, "v", tuple(va.tolist()))
        xa.setflags(write=False)
        va.setflags(write=False)
        object.__setattr__(self, "_xa", xa)
        object.__setattr__(self, "_va", va)

    @classmethod
    def from_function(cls, fn, x, label: str = ""):
        x = np.asarray(x, dtype=float)
        return cls(tuple(x), tuple(np.asarray(fn(x), dtype=float)), label=label)

    def value(self, x):
        return np.interp(np.asarray(x, dtype=float), self._xa, self._va, left=0.0, right=0.0)

    def support(self):
        return float(self._xa[0]), float(self._xa[-1])

    def center_scale(self):
        lo, hi = self.support()
        return (lo + hi) / 2, (hi - lo) / 2

    def is_trivial(self):
        return not np.any(self._va)

    def sign(self):
        if np.all(self._va >= 0):
            return 1
        if np.all(self._va <= 0):
            return -1
        return 0

    def reflected(self):
        return Tabulated(tuple(-self._xa[::-1]), tuple(self._va[::-1]), self.interpolation, self.label)

    def to_dict(self):
        return {"family": self.family, "label": self.label, "interpolation": self.interpolation,
                "samples": [[a, b] for a, b in zip(self.x, self.v)]}


PotentialSpec = Potential

_FAMILIES = {cls.family: cls for cls in (Gaussian, SuperGaussian, GaussianSum, SquareWell, Tabulated)}


def spec_from_dict(data: dict) -> Potential:
    """Build a potential from its structured-text (JSON) form."""
    if not isinstance(data, dict) or "family" not in data:
        raise ValidationError("potential spec must be a mapping with a 'family' key")
    data = dict(data)
    family = data.pop("family")
    label = str(data.pop("label", "") or "")
    try:
        if family == "gaussian":
            return Gaussian(label=label, **data)
        if family == "super_gaussian":
            return SuperGaussian(label=label, **data)
        if family == "gaussian_sum":
            return GaussianSum(tuple(Gaussian(**t) for t in data.pop("terms")), label=label, **data)
        if family == "square_well":
            return SquareWell(label=label, **data)
        if family == "tabulated":
            samples = np.asarray(data.pop("samples"), dtype=float)
            if samples.ndim != 2 or samples.shape[1] != 2:
                raise ValidationError("tabulated samples must be a list of [x, V] pairs")
            return Tabulated(tuple(samples[:, 0]), tuple(samples[:, 1]), label=label, **data)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for family {family!r}: {exc}") from None
    except KeyError as exc:
        raise ValidationError(f"missing key {exc} for family {family!r}") from None
    raise ValidationError(f"unknown potential family {family!r}; expected one of {sorted(_FAMILIES)}")


def spec_to_dict(spec: Potential) -> dict:
    return spec.to_dict()


def load_spec(path) -> Potential:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return spec_from_dict(data)


def save_spec(spec: Potential, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# pointwise operations


def evaluate(spec: Potential, x):
    """V(x) for real x (scalar or array)."""
    out = spec.value(x)
    return float(out) if np.ndim(out) == 0 else out


def sqrt_split(spec_or_values, x=None):
    """Sign-carrying and absolute square roots of V.

    Parameters
    ----------
    spec_or_values : Potential or array_like
        Either a potential (then ``x`` is required) or raw values of V.
    x : array_like, optional
        Sample points.

    Returns
    -------
    signed_root, abs_root : ndarray or float
        ``V/|V|**0.5`` (zero where V vanishes) and ``|V|**0.5``; their
        product reproduces V.
    """
    v = spec_or_values.value(x) if isinstance(spec_or_values, Potential) else spec_or_values
    v = np.asarray(v, dtype=float)
    abs_root = np.sqrt(np.abs(v))
    signed = np.sign(v) * abs_root
    if v.ndim == 0:
        return float(signed), float(abs_root)
    return signed, abs_root


# ---------------------------------------------------------------------------
# Fourier transforms


@dataclass(frozen=True)
class FourierValue:
    argument: complex
    value: complex
    method: str  # "closed_form" or "quadrature"


def _tail_radius(spec: Potential, growth: float, tol: float = 1e-12) -> float:
    """Smallest R with |V(x)| exp(growth |x|) < tol for |x - c| >= R (analytic families)."""
    c, w = spec.center_scale()
    for r in np.arange(0.5, 400.0, 0.25) * w:
        xs = c + r * np.array([-1.0, 1.0])
        if np.all(spec.log_abs_bound(xs) + growth * np.abs(xs) < math.log(tol)):
            # require the bound to keep holding further out
            far = c + np.outer([-1.0, 1.0], r + w * np.arange(1, 40)).ravel()
            if np.all(spec.log_abs_bound(far) + growth * np.abs(far) < math.log(tol)):
                return float(r)
    raise TruncationError(
        "potential does not decay fast enough to bound the Fourier tail",
        required_radius=math.inf, growth=growth)


def _moment_quadrature(spec: Potential, zeta: complex, order: int = 0) -> complex:
    """integral of (-i x)**order exp(-i zeta x) V(x) dx by composite Gauss-Legendre."""
    zeta = complex(zeta)
    sup = spec.support()
    if sup is None:
        c, _ = spec.center_scale()
        r = _tail_radius(spec, abs(zeta.imag))
        lo, hi = c - r, c + r
    else:
        lo, hi = sup
    _, w = spec.center_scale()
    h = min(w / 2, 3.0 / (abs(zeta) + 1e-300), (hi - lo))
    npan = max(1, int(math.ceil((hi - lo) / h)))
    edges = np.linspace(lo, hi, npan + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    hw = (edges[1:] - edges[:-1]) / 2
    x = (mid[:, None] + hw[:, None] * _GL_T).ravel()
    wt = (hw[:, None] * _GL_W).ravel()
    f = spec.value(x) * np.exp(-1j * zeta * x)
    if order:
        f = f * (-1j * x) ** order
    return complex(np.sum(wt * f))


def _tabulated_fourier(spec: Tabulated, zeta: complex, tol: float = 1e-12) -> complex:
    x, v = spec._xa, spec._va
    zeta = complex(zeta)
    edge = np.abs(v[[0, -1]]) * np.exp(zeta.imag * x[[0, -1]])
    if np.max(edge) >= tol:
        # extrapolate the log-decay at each end to estimate the radius needed
        need = []
        for i0, i1, sgn in ((0, 1, -1.0), (-1, -2, 1.0)):
            a0, a1 = abs(v[i0]), abs(v[i1])
            if a0 == 0 or a1 == 0:
                continue
            rate = (math.log(a1) - math.log(a0)) / abs(x[i1] - x[i0])
            grow = sgn * zeta.imag
            if rate - grow <= 0:
                need.append(math.inf)
            else:
                excess = math.log(a0) + zeta.imag * x[i0] - math.log(tol)
                need.append(abs(x[i0]) + excess / (rate - grow))
        raise TruncationError(
            "tabulated data end before the Fourier integrand is negligible",
            available_radius=float(max(abs(x[0]), abs(x[-1]))),
            required_radius=float(max(need)) if need else math.inf,
            argument=zeta)
    f = v * np.exp(-1j * zeta * x)
    return complex(trapezoid(f, x))


def fourier_transform(spec: Potential, zeta: complex) -> FourierValue:
    """Vhat(zeta) = integral of exp(-1j*zeta*x) V(x) dx.

    Closed forms are used for gaussian, gaussian_sum and square_well. Other
    families use quadrature whose truncation is chosen so the neglected tail
    stays below 1e-12 for the given ``Im zeta``.

    Raises
    ------
    TruncationError
        If the available support cannot bound the tail (tabulated data that
        stop before exp(Im zeta * x) * V(x) is negligible).
    """
    zeta = complex(zeta)
    if spec.closed_form_fourier:
        return FourierValue(zeta, complex(spec.fourier_closed(zeta)), "closed_form")
    if isinstance(spec, Tabulated):
        return FourierValue(zeta, _tabulated_fourier(spec, zeta), "quadrature")
    return FourierValue(zeta, _moment_quadrature(spec, zeta), "quadrature")


def fourier_values(spec: Potential, zeta) -> np.ndarray:
    """Vectorised Vhat on an array of complex arguments."""
    z = np.asarray(zeta, dtype=complex)
    if spec.closed_form_fourier:
        return np.asarray(spec.fourier_closed(z), dtype=complex)
    flat = np.array([fourier_transform(spec, zz).value for zz in z.ravel()], dtype=complex)
    return flat.reshape(z.shape)


def log_abs_fourier(spec: Potential, zeta) -> np.ndarray:
    """log|Vhat| computed without overflow for closed-form families."""
    z = np.asarray(zeta, dtype=complex)
    if isinstance(spec, (Gaussian, GaussianSum)):
        return np.real(spec.log_fourier_closed(z))
    with np.errstate(divide="ignore"):
        return np.log(np.abs(fourier_values(spec, z)))


def fourier_derivatives(spec: Potential, zeta: complex) -> tuple[complex, complex, complex]:
    """(Vhat, Vhat', Vhat'') at one complex argument."""
    if isinstance(spec, (Gaussian, GaussianSum)):
        return tuple(complex(spec.fourier_closed(zeta, n)) for n in range(3))
    if isinstance(spec, Tabulated):
        x, v = spec._xa, spec._va
        e = v * np.exp(-1j * complex(zeta) * x)
        return tuple(complex(trapezoid(e * (-1j * x) ** n, x)) for n in range(3))
    return tuple(_moment_quadrature(spec, zeta, n) for n in range(3))


def abs_fourier_imag(spec: Potential, lam: float) -> float:
    """Fourier transform of |V| at 2*i*lam, i.e. integral of exp(2 lam x)|V(x)| dx."""
    s = spec.sign()
    if s != 0:
        return float(abs(fourier_values(spec, 2j * lam)))
    sup = spec.support()
    if sup is None:
        c, w = spec.center_scale()
        r = _tail_radius(spec, 2 * abs(lam))
        lo, hi = c - r, c + r
    else:
        lo, hi = sup
    x = np.linspace(lo, hi, 20001)
    return float(trapezoid(np.exp(2 * lam * x) * np.abs(spec.value(x)), x))


# ---------------------------------------------------------------------------
# hypotheses


@dataclass(frozen=True)
class HypothesisReport:
    """Sampled diagnostics for the growth and zero hypotheses on Vhat.

    Attributes
    ----------
    order_estimate, type_estimate : float
        Fitted rho and sigma in log M(r) ~ sigma r**rho + beta log r + c.
    h2_bound_margin : float
        max of (|Vhat|+|Vhat'|+|Vhat''|) exp(-b|Im k|) over sampled k in the
        sectors around the real axis.
    h3_sampled_fraction : float
        Fraction of sampled real lambda satisfying the |V|-transform
        inequality with the empirical Jost constant.
    h4_zero_halfplane : str
        One of ``upper``, ``lower``, ``zero_free``, ``mixed``.
    """

    order_estimate: float
    type_estimate: float
    h2_bound_margin: float
    h3_sampled_fraction: float
    h4_zero_halfplane: str
    log_correction: float = 0.0
    order_exceeds_one: bool = True
    jost_constant: float = float("nan")
    delta: float = 0.1
    b: float = 0.0
    zero_counts: tuple[int, int] = (0, 0)
    radii: tuple[float, ...] = ()
    log_max_modulus: tuple[float, ...] = ()
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for k in ("zero_counts", "radii", "log_max_modulus", "flags"):
            out[k] = list(out[k])
        return out


def max_modulus_profile(spec: Potential, radii, n_angles: int = 720) -> np.ndarray:
    """log max_{|zeta|=r} |Vhat(zeta)| for each r."""
    phi = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    out = []
    for r in radii:
        out.append(float(np.max(log_abs_fourier(spec, r * np.exp(1j * phi)))))
    return np.array(out)


def fit_growth(radii, log_m) -> tuple[float, float, float, float]:
    """Fit log M(r) = sigma r**rho + beta log r + c.

    Returns (rho, sigma, beta, rms residual). The inner linear problem is
    solved exactly for each rho and rho itself by bounded scalar search.
    """
    r = np.asarray(radii, dtype=float)
    y = np.asarray(log_m, dtype=float)
    if r.size < 4 or not np.all(np.isfinite(y)):
        raise FitError("growth fit needs at least four finite samples")
    if np.any(np.diff(y) <= 0):
        raise FitError("max-modulus data are not increasing; cannot fit order/type",
                       radii=r.tolist(), log_max_modulus=y.tolist())

    def inner(rho):
        A = np.column_stack([r ** rho, np.log(r), np.ones_like(r)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return coef, A @ coef - y

    def cost(rho):
        return float(np.sum(inner(rho)[1] ** 2))

    grid = np.linspace(0.3, 5.0, 95)
    r0 = grid[np.argmin([cost(g) for g in grid])]
    res = optimize.minimize_scalar(cost, bounds=(max(0.25, r0 - 0.1), r0 + 0.1), method="bounded",
                                   options={"xatol": 1e-10})
    rho = float(res.x)
    coef, resid = inner(rho)
    return rho, float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid ** 2)))


def _sector_samples(rho: float, count: int, rng, r_max: float) -> np.ndarray:
    """Random points in the sectors |arg(+-k)| <= (pi - pi/rho)/2."""
    half = max(0.0, (math.pi - math.pi / rho) / 2) if rho > 0 else 0.0
    ang = rng.uniform(-half, half, count)
    rad = rng.uniform(0.0, r_max, count)
    k = rad * np.exp(1j * ang)
    flip = rng.random(count) < 0.5
    k[flip] = -k[flip]
    return k


def hypothesis_check(spec: Potential, b: float = 1.0, sample_count: int = 200, *,
                     seed: int = 0, radii: Sequence[float] | None = None, delta: float = 0.1,
                     jost_constant: float | None = None, zero_scan_radius: float = 6.0,
                     lambda_max: float = 6.0) -> HypothesisReport:
    """Sampled numerical diagnostics of the growth hypotheses for ``spec``.

    Parameters
    ----------
    spec : Potential
        Must not vanish identically.
    b : float
        Exponential rate allowed in the derivative bound.
    sample_count : int
        Number of random sample points for the bound and the lambda set.
    seed : int
        Seed of the sampling generator.
    radii : sequence of float, optional
        Radius ladder for the order/type fit (default: 16 geometric radii in
        [2, 30]).
    delta : float
        Margin in the lambda inequality.
    jost_constant : float, optional
        Constant C of the Jost correction bound; estimated when omitted.

    Raises
    ------
    ValidationError
        For the zero potential.
    FitError
        If the max-modulus data are not increasing.
    """
    if spec.is_trivial():
        raise ValidationError("hypothesis check is meaningless for the zero potential")
    rng = np.random.default_rng(seed)
    flags = []
    if radii is None:
        radii = np.geomspace(2.0, 30.0, 16)
    radii = np.asarray(radii, dtype=float)
    log_m = max_modulus_profile(spec, radii)
    rho, sigma, beta, _ = fit_growth(radii, log_m)
    if rho <= 1.0 + 0.05:
        flags.append("order_not_above_one")

    ks = _sector_samples(rho, sample_count, rng, r_max=20.0)
    margin = 0.0
    for k in ks:
        d = fourier_derivatives(spec, k)
        val = (abs(d[0]) + abs(d[1]) + abs(d[2])) * math.exp(-b * abs(k.imag))
        margin = max(margin, val)

    if jost_constant is None:
        from .jost import estimate_jost_constant
        jost_constant = estimate_jost_constant(spec)
    lam = rng.uniform(0.25, lambda_max, sample_count) * np.where(rng.random(sample_count) < 0.5, -1, 1)
    ok = 0
    for x in lam:
        lhs = abs_fourier_imag(spec, x)
        rhs = (1 - delta) / jost_constant * abs(x) * abs(complex(fourier_values(spec, 2j * x)))
        ok += lhs <= rhs
    fraction = ok / sample_count

    from .rootfinder import ContourRegion, count_zeros
    f = lambda z: fourier_values(spec, z)
    R = zero_scan_radius
    n_up = count_zeros(f, ContourRegion(-R, R, 0.05, R), tiles=(2, 2))
    n_lo = count_zeros(f, ContourRegion(-R, R, -R, -0.05), tiles=(2, 2))
    # zeros on (or near) the real axis belong to neither half plane
    n_mid = count_zeros(f, ContourRegion(-R * 1.0013, R * 1.0013, -0.05, 0.05))
    if n_mid:
        flags.append(f"real_axis_zeros:{n_mid}")
    if n_up == 0 and n_lo == 0:
        half = "zero_free"
    elif n_lo == 0:
        half = "upper"
    elif n_up == 0:
        half = "lower"
    else:
        half = "mixed"

    return HypothesisReport(
        order_estimate=rho, type_estimate=sigma, h2_bound_margin=float(margin),
        h3_sampled_fraction=float(fraction), h4_zero_halfplane=half, log_correction=beta,
        order_exceeds_one=rho > 1.0 + 0.05, jost_constant=float(jost_constant), delta=delta, b=b,
        zero_counts=(int(n_up), int(n_lo)), radii=tuple(radii.tolist()),
        log_max_modulus=tuple(log_m.tolist()), flags=tuple(flags))
