"""Composite quadrature rules on symmetric intervals.

Rules are built from panels so they can be refined (every panel split in
two) or coarsened (adjacent panels merged), which is what the determinant
uses for its self-convergence checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .errors import ValidationError

KINDS = ("gauss_legendre_composite", "clenshaw_curtis")


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = legendre.leggauss(order)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


@lru_cache(maxsize=None)
def clenshaw_curtis(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Clenshaw-Curtis nodes (ascending) and weights on [-1, 1] with n+1 points."""
    if n < 1:
        raise ValidationError("Clenshaw-Curtis needs at least two points")
    j = np.arange(n + 1)
    theta = np.pi * j / n
    w = np.zeros(n + 1)
    for i in range(n + 1):
        s = 0.0
        for k in range(1, n // 2 + 1):
            b = 1.0 if 2 * k == n else 2.0
            s += b / (4 * k * k - 1) * np.cos(2 * k * theta[i])
        c = 1.0 if i in (0, n) else 2.0
        w[i] = c / n * (1 - s)
    x = -np.cos(theta)
    x[np.abs(x) < 1e-16] = 0.0
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def volterra_matrices(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Spectral integration matrices on the Gauss-Legendre panel [-1, 1].

    Returns ``(right, left)`` with ``right[i, j] = int_{t_i}^{1} l_j`` and
    ``left[i, j] = int_{-1}^{t_i} l_j`` for the Lagrange basis l_j on the
    Gauss nodes.
    """
    t, w = gauss_legendre(order)
    vinv = np.linalg.inv(legendre.legvander(t, order - 1))
    left = np.zeros((order, order))
    for j in range(order):
        c = legendre.legint(vinv[:, j], lbnd=-1)
        left[:, j] = legendre.legval(t, c)
    right = w[None, :] - left
    right.setflags(write=False)
    left.setflags(write=False)
    return right, left


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights on [-L, L] assembled from panels.

    Attributes
    ----------
    nodes, weights : ndarray
        Ascending nodes and their weights.
    interval_radius : float
        L; the rule integrates over [-L, L].
    kind : str
        ``gauss_legendre_composite`` or ``clenshaw_curtis``.
    edges : ndarray
        Panel boundaries, ``edges[0] = -L`` and ``edges[-1] = L``.
    order : int
        Points per panel (for Clenshaw-Curtis, intervals per panel).
    """

    nodes: np.ndarray
    weights: np.ndarray
    interval_radius: float
    kind: str
    edges: np.ndarray
    order: int

    @property
    def size(self) -> int:
        return len(self.nodes)

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> complex:
        return np.sum(self.weights * values)

    def refined(self) -> "QuadratureRule":
        mid = (self.edges[:-1] + self.edges[1:]) / 2
        return rule_from_edges(np.sort(np.concatenate([self.edges, mid])), self.order, self.kind)

    def coarsened(self) -> "QuadratureRule":
        npan = len(self.edges) - 1
        if npan % 2 == 0:
            return rule_from_edges(self.edges[::2], self.order, self.kind)
        if npan > 1:
            # odd count: merge pairs, the last panel stays as it is
            return rule_from_edges(np.r_[self.edges[:-1:2], self.edges[-1]], self.order, self.kind)
        if self.order % 2 == 0 and self.order >= 4:
            return rule_from_edges(self.edges, self.order // 2, self.kind)
        raise ValidationError("rule cannot be coarsened further")


def rule_from_edges(edges, order: int, kind: str = "gauss_legendre_composite") -> QuadratureRule:
    edges = np.asarray(edges, dtype=float)
    if kind not in KINDS:
        raise ValidationError(f"unknown quadrature kind {kind!r}")
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ValidationError("panel edges must be strictly increasing")
    a, b = edges[:-1], edges[1:]
    mid, hw = (a + b) / 2, (b - a) / 2
    if kind == "gauss_legendre_composite":
        t, w = gauss_legendre(order)
        nodes = (mid[:, None] + hw[:, None] * t).ravel()
        weights = (hw[:, None] * w).ravel()
    else:
        t, w = clenshaw_curtis(order)
        pn = mid[:, None] + hw[:, None] * t
        pw = hw[:, None] * w
        # merge the shared endpoints of adjacent panels
        nodes = [pn[0]]
        weights = [pw[0].copy()]
        for i in range(1, len(pn)):
            weights[-1][-1] += pw[i, 0]
            nodes.append(pn[i, 1:])
            weights.append(pw[i, 1:].copy())
        nodes = np.concatenate(nodes)
        weights = np.concatenate(weights)
    L = float(max(abs(edges[0]), abs(edges[-1])))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    edges = edges.copy()
    edges.setflags(write=False)
    return QuadratureRule(nodes, weights, L, kind, edges, order)


def build_rule(L: float, N: int, kind: str = "gauss_legendre_composite") -> QuadratureRule:
    """Composite rule with N nodes on [-L, L].

    Gauss-Legendre rules use 16-point panels when 16 divides N, 8-point
    panels when 8 divides N, and a single N-point panel otherwise.
    Clenshaw-Curtis rules use 16-interval panels when 16 divides N - 1 and a
    single panel otherwise.

    Raises
    ------
    ValidationError
        If L <= 0, N < 8 or the kind is unknown.
    """
    L = float(L)
    if not np.isfinite(L) or L <= 0:
        raise ValidationError(f"interval radius must be positive, got {L!r}")
    if int(N) != N or N < 8:
        raise ValidationError(f"need an integer N >= 8, got {N!r}")
    N = int(N)
    if kind == "gauss_legendre_composite":
        order = 16 if N % 16 == 0 else 8 if N % 8 == 0 else N
        npan = N // order
    elif kind == "clenshaw_curtis":
        order = 16 if (N - 1) % 16 == 0 else N - 1
        npan = (N - 1) // order
    else:
        raise ValidationError(f"unknown quadrature kind {kind!r}")
    return rule_from_edges(np.linspace(-L, L, npan + 1), order, kind)
