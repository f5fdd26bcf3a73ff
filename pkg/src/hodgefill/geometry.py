"""Constant-curvature simplex realization, pullback metrics, and nets.

A simplex with prescribed edge lengths is realized in the model space of
its curvature sign: affine space for kappa = 0, the upper hyperboloid sheet
in Minkowski space for kappa = -1 (inner product x.y - x_t y_t), the unit
sphere for kappa = +1.  Placement is canonical: the first vertex sits at
the basepoint and the remaining ones are placed by a Cholesky (Gram-
Schmidt) frame, so realizations are deterministic.

Integration happens in the barycentric chart x = (b_1, ..., b_k): curved
simplices are parametrized by central projection of the affine simplex,
p(b) = sum b_i p_i normalized back to the model surface, and the pullback
metric of that map is evaluated at quadrature nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product

import numpy as np
import scipy.linalg as la

from .complexes import MetricData, OrientedComplex
from .errors import (
    DegenerateSimplex,
    EmptyPointSet,
    MetricUnrealizable,
    ParseError,
    PointNotInSimplex,
)
from .quadrature import QuadratureRule, default_rule

_DEGENERACY_REL_TOL = 1e-12

#: Psi(1) = 2 * 3^121.5 * 5^-81, the admissibility radius at epsilon = 1.
PSI1 = 2.0 * 3.0 ** 121.5 * 5.0 ** -81


@dataclass(frozen=True)
class RealizedSimplex:
    """Vertex coordinates in the model space plus the cached vertex Gram."""

    curvature: int
    dimension: int
    vertices: np.ndarray  # (k+1, ambient)
    gram: np.ndarray      # (k+1, k+1) ambient-signature vertex Gram

    def _ambient_inner(self, U, V):
        """Row-wise ambient inner products, Minkowski-signed for kappa=-1."""
        U = np.asarray(U, dtype=float)
        W = np.array(V, dtype=float, copy=True)
        if self.curvature == -1:
            W[..., -1] = -W[..., -1]
        return np.sum(U * W, axis=-1)

    def metric_at(self, bary: np.ndarray):
        """Model points and pullback metric tensors at barycentric nodes.

        Returns (points (q, ambient), g (q, k, k)) where g is the metric of
        the chart b -> p(b) in the coordinates (b_1, ..., b_k).
        """
        b = np.atleast_2d(np.asarray(bary, dtype=float))
        k = self.dimension
        P = b @ self.vertices
        E = self.vertices[1:] - self.vertices[0]
        GE = np.empty((k, k))
        for i in range(k):
            for j in range(k):
                GE[i, j] = self._ambient_inner(E[i], E[j])
        if self.curvature == 0:
            g = np.broadcast_to(GE, (b.shape[0], k, k)).copy()
            return P, g
        q = np.empty((b.shape[0], k))
        for a in range(k):
            q[:, a] = self._ambient_inner(P, E[a])
        s2 = self._ambient_inner(P, P)
        if self.curvature == -1:
            s2 = -s2
        if np.any(s2 <= 0):
            raise DegenerateSimplex("barycentric point leaves the model chart")
        sign = 1.0 if self.curvature == -1 else -1.0
        g = GE[None, :, :] / s2[:, None, None] \
            + sign * q[:, :, None] * q[:, None, :] / (s2 ** 2)[:, None, None]
        points = P / np.sqrt(s2)[:, None]
        return points, g

    def point(self, bary):
        return self.metric_at(np.asarray(bary))[0][0]


def realize_simplex(lengths, curvature: int) -> RealizedSimplex:
    """Realize a simplex with the given pairwise edge lengths.

    `lengths` is a symmetric (k+1)x(k+1) matrix with zero diagonal.  Raises
    MetricUnrealizable when the vertex Gram matrix fails the positivity /
    signature test of the model space.
    """
    L = np.asarray(lengths, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise MetricUnrealizable("length table must be square")
    if not np.allclose(L, L.T) or np.any(np.diag(L) != 0):
        raise MetricUnrealizable("length table must be symmetric with zero diagonal")
    k = L.shape[0] - 1
    if k < 1:
        raise MetricUnrealizable("a simplex needs at least two vertices")
    off = L[~np.eye(k + 1, dtype=bool)]
    if np.any(off <= 0):
        raise MetricUnrealizable("edge lengths must be positive")

    if curvature == 0:
        d0 = L[0]
        G = 0.5 * (d0[1:, None] ** 2 + d0[None, 1:] ** 2 - L[1:, 1:] ** 2)
        C = _chol_or_unrealizable(G, "flat")
        vertices = np.zeros((k + 1, k))
        vertices[1:] = C
        gram = np.zeros((k + 1, k + 1))
        gram[1:, 1:] = G
    elif curvature == -1:
        t = np.cosh(L[0])
        t[0] = 1.0
        G = t[1:, None] * t[None, 1:] - np.cosh(L[1:, 1:])
        np.fill_diagonal(G, t[1:] ** 2 - 1.0)
        C = _chol_or_unrealizable(G, "hyperbolic")
        vertices = np.zeros((k + 1, k + 1))
        vertices[0, k] = 1.0
        vertices[1:, :k] = C
        vertices[1:, k] = t[1:]
        gram = -np.cosh(L)
        np.fill_diagonal(gram, -1.0)
    elif curvature == 1:
        if np.any(off >= np.pi):
            raise MetricUnrealizable("spherical edge lengths must be < pi")
        G = np.cos(L)
        np.fill_diagonal(G, 1.0)
        C = _chol_or_unrealizable(G, "spherical")
        vertices = C
        gram = G
    else:
        raise MetricUnrealizable(f"curvature must be -1, 0 or 1, got {curvature}")

    return RealizedSimplex(curvature, k, vertices, gram)


def _chol_or_unrealizable(G, label):
    try:
        return la.cholesky(G, lower=True)
    except la.LinAlgError:
        raise MetricUnrealizable(
            f"{label} vertex Gram matrix is not positive definite"
        ) from None


def barycentric_point(sigma: RealizedSimplex, bary):
    """Model point and pullback metric tensor at one barycentric coordinate."""
    b = np.asarray(bary, dtype=float)
    if b.shape != (sigma.dimension + 1,):
        raise PointNotInSimplex(f"expected {sigma.dimension + 1} barycentric coordinates")
    if np.any(b < -1e-12) or abs(b.sum() - 1.0) > 1e-10:
        raise PointNotInSimplex("coordinates must be nonnegative and sum to 1")
    pts, g = sigma.metric_at(b[None, :])
    _check_nondegenerate(g)
    return pts[0], g[0]


def _check_nondegenerate(g):
    k = g.shape[-1]
    dets = np.linalg.det(g)
    scale = (np.trace(g, axis1=-2, axis2=-1) / k) ** k
    if np.any(dets <= _DEGENERACY_REL_TOL * scale):
        raise DegenerateSimplex("pullback metric determinant vanishes")
    return dets


def simplex_volume(sigma: RealizedSimplex, rule: QuadratureRule = None) -> float:
    """Riemannian volume by quadrature of sqrt(det g) in the barycentric chart."""
    if rule is None:
        rule = default_rule(sigma.dimension)
    if rule.dimension != sigma.dimension:
        raise DegenerateSimplex("quadrature rule dimension mismatch")
    _, g = sigma.metric_at(rule.nodes)
    dets = _check_nondegenerate(g)
    return float(rule.weights @ np.sqrt(dets))


def realized_lengths(sigma: RealizedSimplex) -> np.ndarray:
    """Pairwise model distances of the realized vertices (round-trip check)."""
    G = sigma.gram
    k = sigma.dimension
    out = np.zeros((k + 1, k + 1))
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            if sigma.curvature == 0:
                d = np.sqrt(G[i, i] + G[j, j] - 2 * G[i, j])
            elif sigma.curvature == -1:
                inner = sigma._ambient_inner(sigma.vertices[i], sigma.vertices[j])
                d = np.arccosh(max(-inner, 1.0))
            else:
                inner = sigma._ambient_inner(sigma.vertices[i], sigma.vertices[j])
                d = np.arccos(min(max(inner, -1.0), 1.0))
            out[i, j] = out[j, i] = d
    return out


def lengths_of(K: OrientedComplex, metric: MetricData, simplex) -> np.ndarray:
    """Pairwise length matrix of one simplex from the edge-length table."""
    t = tuple(simplex)
    k = len(t) - 1
    L = np.zeros((k + 1, k + 1))
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            L[i, j] = L[j, i] = metric.length(t[i], t[j])
    return L


def realize_top(K: OrientedComplex, metric: MetricData, simplex) -> RealizedSimplex:
    return realize_simplex(lengths_of(K, metric, simplex), metric.curvature)


def complex_volume(K: OrientedComplex, metric: MetricData,
                   rule: QuadratureRule = None) -> float:
    """Total volume, summed over top simplices in index order."""
    if rule is None:
        rule = default_rule(K.dimension)
    vols = [simplex_volume(realize_top(K, metric, t), rule)
            for t in K.simplices[K.dimension]]
    return float(np.sum(vols))


# -- nets and admissibility ---------------------------------------------------

@dataclass(frozen=True)
class NetParameters:
    """Separation fraction mu and injectivity lower bound epsilon."""

    mu: float
    epsilon: float

    def __post_init__(self):
        if not 0 < self.mu <= 1:
            raise ParseError("mu must lie in (0, 1]")
        if not self.epsilon > 0:
            raise ParseError("epsilon must be positive")

    @property
    def epsilon0(self) -> float:
        return min(self.epsilon / 10.0, PSI1)


@dataclass(frozen=True)
class GEpsReport:
    """Edge-length admissibility report; informational only."""

    epsilon: float
    epsilon0: float
    lower: float
    upper: float
    violations: tuple
    passed: bool
    notes: tuple = (
        "deep-embedding condition (combinatorial 1-neighborhoods lift "
        "isometrically to the model space): not checked",
    )


def check_G_eps(K: OrientedComplex, metric: MetricData, epsilon: float) -> GEpsReport:
    """Check every edge length against the admissible interval.

    epsilon0 = min(epsilon/10, Psi(1)) and the admissible edge interval is
    [2 epsilon0 / 5, 2 epsilon0].  Report-only: violations are listed, not
    raised.
    """
    if not epsilon > 0:
        raise ParseError("epsilon must be positive")
    eps0 = min(epsilon / 10.0, PSI1)
    lo, hi = 2.0 * eps0 / 5.0, 2.0 * eps0
    bad = []
    for (a, b) in K.simplices[1]:
        ell = metric.length(a, b)
        if not lo <= ell <= hi:
            bad.append(((a, b), ell))
    return GEpsReport(epsilon, eps0, lo, hi, tuple(bad), not bad)


def net_predicates(points, mu: float, epsilon: float, probes, distance=None):
    """(dense, separated) for a candidate net.

    separated:  every pairwise distance >= mu * epsilon.
    dense:      every probe point lies within epsilon of some net point.
    `distance` is a two-argument callable; Euclidean when omitted.  Density
    is sample-based against the caller-supplied probes.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    if not pts:
        raise EmptyPointSet("net has no points")
    if distance is None:
        distance = lambda p, q: float(np.linalg.norm(p - q))
    separated = True
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if distance(pts[i], pts[j]) < mu * epsilon:
                separated = False
                break
        if not separated:
            break
    dense = True
    for probe in probes:
        probe = np.asarray(probe, dtype=float)
        if min(distance(probe, p) for p in pts) > epsilon:
            dense = False
            break
    return dense, separated


# -- bundled complex generators ----------------------------------------------

def _torus_label(chain_coords, n):
    """Translation-invariant label of a torus cell from lex-sorted cover coords."""
    anchor = chain_coords[0]
    offsets = tuple(tuple(int(c - a) for c, a in zip(pt, anchor)) for pt in chain_coords)
    base = tuple(int(a % n) for a in anchor)
    return (base, offsets)


def torus_mesh(n: int, d: int, scale: float = 1.0):
    """Standard triangulated flat d-torus on an n^d vertex grid.

    Each lattice cube is split into d! simplices along vertex-monotone
    lattice paths; lengths come from the flat metric of the cover.  Cells
    are quotient classes of cover cells under the lattice (n Z)^d, labeled
    by (anchor mod n, offset shape); at n = 2 distinct cells can share a
    vertex set, which the explicit cell structure represents faithfully.

    The returned complex carries `grid = (n, d, scale)` and `top_cover`,
    per-top arrays of integer cover coordinates aligned with the vertex
    tuple, which the geodesic tracer and the dual-cell geometry use.
    """
    if d not in (2, 3):
        raise ParseError("torus dimension must be 2 or 3")
    if n < 2:
        raise ParseError("torus subdivision count must be >= 2")
    if not scale > 0:
        raise ParseError("scale must be positive")

    def vid(z):
        out = 0
        for c in z:
            out = out * n + (c % n)
        return int(out)

    by_degree = {k: {} for k in range(d + 1)}
    faces = {}
    top_cover_by_label = {}
    lengths = {}
    for base in product(range(n), repeat=d):
        for perm in permutations(range(d)):
            chain = [np.array(base, dtype=int)]
            for axis in perm:
                nxt = chain[-1].copy()
                nxt[axis] += 1
                chain.append(nxt)
            coords = [tuple(int(x) for x in z) for z in chain]
            ids = [vid(z) for z in chain]
            top_cover_by_label[_torus_label(coords, n)] = np.array(chain, dtype=int)
            for k in range(d + 1):
                for subset in combinations(range(d + 1), k + 1):
                    sub = [coords[p] for p in subset]
                    lab = _torus_label(sub, n)
                    if lab not in by_degree[k]:
                        by_degree[k][lab] = tuple(ids[p] for p in subset)
                        if k >= 1:
                            faces[(k, lab)] = tuple(
                                _torus_label(sub[:p] + sub[p + 1:], n)
                                for p in range(k + 1)
                            )
            for i in range(d + 1):
                for j in range(i + 1, d + 1):
                    delta = chain[j] - chain[i]
                    ell = scale * float(np.sqrt(np.dot(delta, delta)))
                    key = (min(ids[i], ids[j]), max(ids[i], ids[j]))
                    lengths.setdefault(key, ell)

    cell_lists = {k: sorted(by_degree[k].items()) for k in range(d + 1)}
    K = OrientedComplex(d, cells=(cell_lists, faces))
    metric = MetricData(0, lengths)
    K.grid = (n, d, scale)
    K.top_cover = [top_cover_by_label[lab] for lab in K.labels[d]]
    return K, metric


def single_simplex(dimension: int, edge: float = 1.0, curvature: int = 0):
    """The full n-simplex with all edge lengths equal."""
    verts = tuple(range(dimension + 1))
    K = OrientedComplex(dimension, [verts])
    lengths = {(i, j): edge for i in verts for j in verts if i < j}
    return K, MetricData(curvature, lengths)


def triangle_complex(l01: float = 1.0, l02: float = 1.0, l12: float = 1.0,
                     curvature: int = 0):
    """One triangle; the smallest pure 2-complex."""
    K = OrientedComplex(2, [(0, 1, 2)])
    return K, MetricData(curvature, {(0, 1): l01, (0, 2): l02, (1, 2): l12})


def boundary_tetrahedron(edge: float = 1.0, curvature: int = 0):
    """The boundary of the 3-simplex: a triangulated 2-sphere."""
    K = OrientedComplex(2, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    lengths = {(i, j): edge for i in range(4) for j in range(i + 1, 4)}
    return K, MetricData(curvature, lengths)
