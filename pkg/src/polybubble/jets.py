"""Jets: tables of partial derivatives at a point, plus finite-difference
oracles used throughout the test suite.

A jet stores one entry per *multiset* of coordinate indices, so symmetry of
mixed partials is structural rather than checked entry-by-entry.  Accessors
derive Laplacian iterates and their gradients/Hessians from the raw table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb, factorial

import numpy as np

__all__ = [
    "multisets",
    "multiset_multiplicity",
    "Jet",
    "fd_partial",
    "fd_laplacian",
    "fd_laplacian_iter",
]


def multisets(n: int, order: int):
    """All index multisets of exactly the given order over n coordinates."""
    return list(combinations_with_replacement(range(n), order))


def multiset_multiplicity(alpha: tuple[int, ...]) -> int:
    """Number of distinct orderings of the multiset (tensor-entry count)."""
    m = factorial(len(alpha))
    for i in set(alpha):
        m //= factorial(alpha.count(i))
    return m


def _alpha_to_exponents(alpha, n):
    ex = [0] * n
    for i in alpha:
        ex[i] += 1
    return tuple(ex)


@dataclass
class Jet:
    """All partial derivatives of a function at a point up to a fixed order.

    table maps a sorted index tuple to the value of that partial derivative;
    the empty tuple holds the function value.
    """

    x: np.ndarray
    n: int
    order: int
    table: dict[tuple[int, ...], float]

    def __post_init__(self):
        self.x = np.asarray(self.x, float)
        if () not in self.table:
            raise ValueError("jet table missing the value entry ()")

    def partial(self, alpha) -> float:
        return self.table[tuple(sorted(alpha))]

    def value(self) -> float:
        return self.table[()]

    def grad(self) -> np.ndarray:
        return np.array([self.table[(i,)] for i in range(self.n)])

    def hessian(self) -> np.ndarray:
        H = np.empty((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                H[i, j] = self.table[tuple(sorted((i, j)))]
        return H

    # -- Laplacian iterates --------------------------------------------------

    def _lap_multi(self, i: int):
        """(multi-index m of |m|=i over n coords, multinomial weight)."""
        out = []
        for alpha in combinations_with_replacement(range(self.n), i):
            ex = _alpha_to_exponents(alpha, self.n)
            w = factorial(i)
            for m in ex:
                w //= factorial(m)
            out.append((ex, w))
        return out

    def lap_iter(self, i: int, extra=()) -> float:
        """(-Delta)^i u, optionally with extra derivative indices applied."""
        base = tuple(sorted(extra))
        if 2 * i + len(base) > self.order:
            raise ValueError(f"jet order {self.order} too low for (-Delta)^{i}"
                             f" with {len(base)} extra derivatives")
        tot = 0.0
        for ex, w in self._lap_multi(i):
            idx = list(base)
            for coord, m in enumerate(ex):
                idx += [coord] * (2 * m)
            tot += w * self.table[tuple(sorted(idx))]
        return (-1.0) ** i * tot

    def grad_lap(self, i: int) -> np.ndarray:
        return np.array([self.lap_iter(i, extra=(j,)) for j in range(self.n)])

    def hess_lap(self, i: int) -> np.ndarray:
        H = np.empty((self.n, self.n))
        for a in range(self.n):
            for b in range(a, self.n):
                H[a, b] = H[b, a] = self.lap_iter(i, extra=(a, b))
        return H

    def tensor_norm(self, l: int) -> float:
        """Frobenius norm of the order-l derivative tensor."""
        tot = 0.0
        for alpha in multisets(self.n, l):
            tot += multiset_multiplicity(alpha) * self.table[alpha] ** 2
        return math.sqrt(tot)


# ---------------------------------------------------------------------------
# Finite-difference oracles
# ---------------------------------------------------------------------------

def fd_partial(f, x, alpha, h: float = 1e-4) -> float:
    """Central finite difference of the mixed partial given by the index
    multiset alpha.  f maps an (m, n) array to an (m,) array."""
    x = np.asarray(x, float)
    alpha = tuple(alpha)
    if not alpha:
        return float(np.asarray(f(x[None, :])).ravel()[0])
    i, rest = alpha[0], alpha[1:]
    xp = x.copy()
    xm = x.copy()
    xp[i] += h
    xm[i] -= h
    return (fd_partial(f, xp, rest, h) - fd_partial(f, xm, rest, h)) / (2 * h)


def fd_laplacian(f, x, h: float = 1e-4):
    """Second-order central FD Laplacian; f vectorized over points."""
    x = np.asarray(x, float)
    n = x.size
    pts = [x]
    for i in range(n):
        for s in (+1.0, -1.0):
            xp = x.copy()
            xp[i] += s * h
            pts.append(xp)
    vals = np.asarray(f(np.asarray(pts)), float)
    return (np.sum(vals[1:]) - 2 * n * vals[0]) / h**2


def fd_laplacian_iter(f, x, k: int, h: float = 1e-3):
    """(-Delta)^k via nested FD Laplacians (O(h^2) per level)."""
    if k == 0:
        return float(np.asarray(f(np.asarray(x, float)[None, :])).ravel()[0])

    def g(pts):
        pts = np.atleast_2d(pts)
        return np.array([-fd_laplacian(f, p, h) for p in pts])

    if k == 1:
        return float(g(np.asarray(x)[None, :])[0])
    return fd_laplacian_iter(g, x, k - 1, h)
