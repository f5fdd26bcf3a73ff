"""Symmetric quadrature rules on the reference simplex.

Rules are built as conical (Duffy) products of Gauss-Jacobi lines, which
are exact for polynomials up to the requested degree with strictly positive
weights at every order, then symmetrized over the barycentric coordinate
permutations so that node sets are invariant under vertex relabeling.
Weights sum to the reference simplex volume 1/n!.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import factorial

import numpy as np
from scipy.special import roots_jacobi

from .errors import DegreeOutOfRange


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in barycentric coordinates with positive weights.

    `order` is the polynomial exactness degree on the flat reference
    simplex; curved integrands are not polynomials, so for them the order
    acts as a convergence parameter.
    """

    dimension: int
    order: int
    nodes: np.ndarray    # (q, dimension+1)
    weights: np.ndarray  # (q,)

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.ascontiguousarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.ascontiguousarray(self.weights, dtype=float))


def conical_rule(dimension: int, points_per_axis: int) -> QuadratureRule:
    """Tensor Gauss-Jacobi rule on the reference simplex.

    Axis j carries the weight (1-x)^(dimension-1-j), making the collapsed
    (Duffy) coordinate transform exact; with m points per axis the rule
    integrates polynomials of total degree 2m-1.
    """
    n, m = dimension, points_per_axis
    if n < 1 or m < 1:
        raise DegreeOutOfRange("dimension and points per axis must be >= 1")
    axes = []
    for j in range(n):
        x, w = roots_jacobi(m, n - 1 - j, 0.0)
        x = 0.5 * (x + 1.0)
        w = w * 0.5 ** (n - j)
        axes.append((x, w))
    nodes = np.zeros((m ** n, n + 1))
    weights = np.ones(m ** n)
    idx = np.stack(np.meshgrid(*[np.arange(m)] * n, indexing="ij"), axis=-1).reshape(-1, n)
    remaining = np.ones(m ** n)
    for j, (x, w) in enumerate(axes):
        t = x[idx[:, j]]
        nodes[:, j] = remaining * t
        weights *= w[idx[:, j]]
        remaining = remaining * (1.0 - t)
    nodes[:, n] = remaining
    return QuadratureRule(n, 2 * m - 1, nodes, weights)


def symmetric_rule(dimension: int, order: int) -> QuadratureRule:
    """Permutation-symmetric rule of the given exactness degree.

    The conical rule is averaged over all (n+1)! barycentric permutations;
    coinciding nodes are merged, so the node multiset is invariant under
    any relabeling of the simplex vertices.
    """
    n = dimension
    m = (order + 2) // 2  # 2m-1 >= order
    base = conical_rule(n, m)
    perms = list(permutations(range(n + 1)))
    merged = {}
    scale = 1.0 / len(perms)
    for p in perms:
        pts = base.nodes[:, p]
        for b, w in zip(pts, base.weights):
            key = tuple(np.round(b, 12))
            if key in merged:
                merged[key][1] += w * scale
            else:
                merged[key] = [b, w * scale]
    items = sorted(merged.items(), key=lambda kv: kv[0])
    nodes = np.array([it[1][0] for it in items])
    weights = np.array([it[1][1] for it in items])
    return QuadratureRule(n, 2 * m - 1, nodes, weights)


def default_rule(dimension: int, order: int = 4) -> QuadratureRule:
    """The rule used throughout assembly; symmetric, exactness >= order."""
    return symmetric_rule(dimension, order)


def reference_monomial_integral(alpha) -> float:
    """Exact integral of prod b_i^alpha_i over the reference n-simplex.

    Dirichlet's formula: int prod b_i^a_i dx = (prod a_i!) / (n + sum a_i)!
    over the simplex x_1,...,x_n >= 0, sum x_i <= 1.
    """
    alpha = list(alpha)
    n = len(alpha) - 1
    num = 1
    for a in alpha:
        num *= factorial(a)
    return num / factorial(n + sum(alpha))
