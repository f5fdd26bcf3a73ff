"""Whitney forms: mass matrices, codifferential, Laplacian, Hodge parts, gaps.

The Whitney form of the oriented q-cell with local vertex positions
tau = (i_0, ..., i_q) inside a top simplex is

    W_tau = q! sum_j (-1)^j b_{i_j} db_{i_0} ^ ... ^ (db_{i_j} omitted) ^ ...,

expressed in the barycentric chart x = (b_1, ..., b_n), where db_0 = -sum dx_a
and db_i = dx_i are constant covectors.  With B(x) = D g(x)^{-1} D^T the Gram
matrix of the db's, pointwise inner products of basis forms reduce to signed
minors of B, and mass matrices are quadrature sums of those minors times the
volume density sqrt(det g).  Everything is assembled per top cell and summed
in index order, so results are independent of the thread count.

Smoothed mode replaces the barycentric coordinates by the clamped, mollified,
renormalized partition of unity computed by `smooth_partition`; it needs an
ambient flat chart (stars of vertices unfold isometrically into R^n), so it
is restricted to flat metrics.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import beta as beta_fn, gamma as gamma_fn

from .complexes import Cochain, MetricData, OrientedComplex
from .errors import (
    ChartUnavailable,
    DegreeMismatch,
    DegreeOutOfRange,
    NoPositiveEigenvalue,
    PointNotInSimplex,
    SingularMass,
)
from .geometry import realize_top
from .linalg import factor_spd, integer_rank, nullspace_psd, smallest_positive_pencil
from .quadrature import QuadratureRule, default_rule


def _chart_differentials(n: int) -> np.ndarray:
    """Rows are db_0, ..., db_n in the chart basis dx_1..dx_n."""
    D = np.zeros((n + 1, n))
    D[0] = -1.0
    D[1:] = np.eye(n)
    return D


def _wedge_inner(B: np.ndarray, left, right) -> np.ndarray:
    """det of the B-minor with the given db rows/columns, batched over nodes."""
    if len(left) == 0:
        return np.ones(B.shape[0])
    sub = B[:, np.array(left)[:, None], np.array(right)[None, :]]
    return np.linalg.det(sub)


def _form_inner(b: np.ndarray, B: np.ndarray, tau, tau2) -> np.ndarray:
    """Pointwise <W_tau, W_tau'> at the quadrature nodes."""
    q = len(tau) - 1
    fact = math.factorial(q) ** 2
    total = np.zeros(B.shape[0])
    for j in range(q + 1):
        left = tau[:j] + tau[j + 1:]
        for l in range(q + 1):
            right = tau2[:l] + tau2[l + 1:]
            minor = _wedge_inner(B, left, right)
            total += (-1) ** (j + l) * b[:, tau[j]] * b[:, tau2[l]] * minor
    return fact * total


def _metric_data_at_nodes(sigma, nodes):
    """(sqrt det g, g^{-1}) stacks at the quadrature nodes of one simplex."""
    _, g = sigma.metric_at(nodes)
    det = np.linalg.det(g)
    if np.any(det <= 0):
        raise SingularMass("metric degenerates at a quadrature node")
    return np.sqrt(det), np.linalg.inv(g)


def _local_mass_standard(sigma, rule: QuadratureRule, degree: int) -> np.ndarray:
    """Local mass matrix of all degree-q faces of one realized top simplex."""
    n = sigma.dimension
    sqrtdet, ginv = _metric_data_at_nodes(sigma, rule.nodes)
    D = _chart_differentials(n)
    B = np.einsum("ia,qab,jb->qij", D, ginv, D)
    faces = list(combinations(range(n + 1), degree + 1))
    w = rule.weights * sqrtdet
    local = np.zeros((len(faces), len(faces)))
    for r, tau in enumerate(faces):
        for c in range(r, len(faces)):
            val = float(w @ _form_inner(rule.nodes, B, tau, faces[c]))
            local[r, c] = val
            local[c, r] = val
    return local


def _local_mass_smoothed(sigma, rule, degree, beta, grad) -> np.ndarray:
    """Smoothed-mode local mass: beta replaces b, frame gradients replace db.

    `beta` is (nodes, n+1); `grad` is (nodes, n+1, n) in the Euclidean frame
    of the realized simplex, where form inner products are plain dot products.
    """
    sqrtdet, _ = _metric_data_at_nodes(sigma, rule.nodes)
    B = np.einsum("qia,qja->qij", grad, grad)
    faces = list(combinations(range(sigma.dimension + 1), degree + 1))
    w = rule.weights * sqrtdet
    local = np.zeros((len(faces), len(faces)))
    for r, tau in enumerate(faces):
        for c in range(r, len(faces)):
            val = float(w @ _form_inner(beta, B, tau, faces[c]))
            local[r, c] = val
            local[c, r] = val
    return local


# -- pointwise evaluation --------------------------------------------------------


def _resolve_top(K: OrientedComplex, sigma) -> int:
    if isinstance(sigma, (int, np.integer)):
        t = int(sigma)
        if not 0 <= t < K.n_simplices(K.dimension):
            raise DegreeOutOfRange(f"top cell index {t} out of range")
        return t
    key = tuple(sigma)
    try:
        return K.index[K.dimension][key]
    except KeyError:
        raise DegreeOutOfRange(f"{key} is not a top cell label") from None


def _eval_chart(K: OrientedComplex, f: Cochain, top: int, b: np.ndarray) -> np.ndarray:
    """Chart components of W(f) at a barycentric point (no interiority check)."""
    n = K.dimension
    q = f.degree
    D = _chart_differentials(n)
    table = K.top_subcells(top)
    comps = list(combinations(range(n), q))
    out = np.zeros(len(comps))
    fact = math.factorial(q)
    for tau in combinations(range(n + 1), q + 1):
        _, di = table[tau]
        coeff = float(f.values[di])
        if coeff == 0.0:
            continue
        for j in range(q + 1):
            rows = tau[:j] + tau[j + 1:]
            scale = coeff * fact * (-1) ** j * b[tau[j]]
            for s, S in enumerate(comps):
                out[s] += scale * (la.det(D[np.ix_(rows, S)]) if q else 1.0)
    return out


def whitney_eval(K: OrientedComplex, f: Cochain, sigma, b) -> np.ndarray:
    """Coefficients of W(f) at an interior barycentric point of a top cell.

    Components are reported against the chart basis dx_S, S running over
    increasing degree-q subsets of (1..n); they depend only on f restricted
    to the faces of sigma.  The chart representation is metric free.
    """
    top = _resolve_top(K, sigma)
    n = K.dimension
    b = np.asarray(b, dtype=float)
    if b.shape != (n + 1,) or abs(b.sum() - 1.0) > 1e-9:
        raise PointNotInSimplex("barycentric point must have n+1 coordinates summing to 1")
    if np.any(b <= 0):
        raise PointNotInSimplex("point is not interior to the simplex")
    return _eval_chart(K, f, top, b)


def whitney_integrate(K: OrientedComplex, f: Cochain, sigma, positions=None,
                      rule: QuadratureRule = None) -> float:
    """Integral of W(f) over an oriented face of a top cell.

    `positions` selects the face by vertex positions inside the top cell
    (default: the whole top cell); its length must be f.degree + 1.  The
    pullback of W(f) to the face is polynomial in the face chart, so the
    quadrature is exact at the default order.  The integration pairing
    returns f evaluated on that face, which is what tests check.
    """
    top = _resolve_top(K, sigma)
    n = K.dimension
    q = f.degree
    if positions is None:
        positions = tuple(range(n + 1))
    positions = tuple(positions)
    if len(positions) != q + 1:
        raise DegreeMismatch(
            f"a degree-{q} form integrates over faces with {q + 1} vertices"
        )
    if q == 0:
        (pos,) = positions
        b = np.zeros(n + 1)
        b[pos] = 1.0
        table = K.top_subcells(top)
        return float(f.values[table[(pos,)][1]])
    if rule is None:
        rule = default_rule(q, 4)
    # face chart: s in the reference q-simplex maps to b with b[positions[j]] = s_j
    J = np.zeros((n, q))
    for j, pos in enumerate(positions):
        if j == 0:
            if pos >= 1:
                J[pos - 1, :] = -1.0
        else:
            if pos >= 1:
                J[pos - 1, j - 1] = 1.0
    comps = list(combinations(range(n), q))
    minors = np.array([la.det(J[np.ix_(S, tuple(range(q)))]) for S in comps])
    total = 0.0
    for snode, w in zip(rule.nodes, rule.weights):
        b = np.zeros(n + 1)
        for j, pos in enumerate(positions):
            b[pos] = snode[j]
        total += w * float(_eval_chart(K, f, top, b) @ minors)
    return total


# -- smoothed partition of unity ---------------------------------------------------


def _point_simplex_distance(p: np.ndarray, verts: np.ndarray) -> float:
    """Euclidean distance from a point to the convex hull of `verts`."""
    k = verts.shape[0] - 1
    if k == 0:
        return float(np.linalg.norm(p - verts[0]))
    E = verts[1:] - verts[0]
    G = E @ E.T
    rhs = E @ (p - verts[0])
    try:
        lam = la.solve(G, rhs, assume_a="pos")
    except la.LinAlgError:
        lam = la.lstsq(G, rhs)[0]
    bary = np.concatenate([[1.0 - lam.sum()], lam])
    if np.all(bary >= -1e-12):
        proj = bary @ verts
        return float(np.linalg.norm(p - proj))
    return min(
        _point_simplex_distance(p, verts[list(face)])
        for face in combinations(range(k + 1), k)
    )


def _unfold_star(K: OrientedComplex, metric: MetricData, vertex: int, root: int):
    """Isometric placements of the tops around a vertex, rooted at `root`.

    `vertex` is a 0-cell index.  Returns a list of (top index, coords
    (n+1, n)) in BFS order over shared (n-1)-faces containing the vertex
    with exactly two top cofaces; the root is placed by its own flat
    realization.  A face's vertex order is the order induced from either
    coface, so face rows align between neighbors without reordering.
    """
    n = K.dimension
    star = set(K.star_tops(0, vertex))
    placed = {root: realize_top(K, metric, K.simplices[n][root]).vertices}
    order = [root]
    fa = K.face_array(n)
    inc = {}
    for t in sorted(star):
        for p in range(n + 1):
            fidx = int(fa[t, p])
            if vertex in K.subcell_vertices(n - 1, fidx):
                inc.setdefault(fidx, []).append((t, p))
    queue = [root]
    while queue:
        t = queue.pop(0)
        for p in range(n + 1):
            fidx = int(fa[t, p])
            pairs = inc.get(fidx, [])
            if len(pairs) != 2:
                continue
            (t1, p1), (t2, p2) = pairs
            other, po = ((t2, p2) if (t1, p1) == (t, p) else (t1, p1))
            if other in placed:
                continue
            face_pos_t = [i for i in range(n + 1) if i != p]
            face_pos_o = [i for i in range(n + 1) if i != po]
            vo = K.simplices[n][other]
            coords_t = placed[t]
            Y = coords_t[face_pos_t]
            dists = np.array(
                [metric.length(vo[po], vo[i]) for i in face_pos_o], dtype=float
            )
            new_pt = _place_by_distances(Y, dists, coords_t[p])
            coords_o = np.zeros((n + 1, n))
            for j, i in enumerate(face_pos_o):
                coords_o[i] = Y[j]
            coords_o[po] = new_pt
            placed[other] = coords_o
            order.append(other)
            queue.append(other)
    return [(t, placed[t]) for t in order]


def _place_by_distances(Y: np.ndarray, dists: np.ndarray, opposite: np.ndarray):
    """Point at the given distances from the rows of Y, on the far side of
    the affine hull of Y from `opposite` (the unfolding mirror choice)."""
    base = Y[0]
    E = Y[1:] - base
    if E.shape[0] == 0:
        direction = base - opposite
        direction /= np.linalg.norm(direction)
        return base + dists[0] * direction
    rhs = 0.5 * (
        np.sum(Y[1:] ** 2, axis=1) - np.sum(base ** 2)
        + dists[0] ** 2 - dists[1:] ** 2
    )
    # minimum-norm affine solution plus a normal component
    sol, *_ = la.lstsq(E, rhs - E @ base)
    p0 = base + sol
    # component of p inside the affine hull is p0; normal magnitude from d_0
    h2 = dists[0] ** 2 - np.sum((p0 - base) ** 2)
    h = math.sqrt(max(h2, 0.0))
    # orthonormal complement of span(E)
    Q = la.null_space(E)
    if Q.shape[1] != 1:
        raise ChartUnavailable("degenerate face in star unfolding")
    nrm = Q[:, 0]
    side = np.dot(opposite - p0, nrm)
    sign = -1.0 if side > 0 else 1.0
    return p0 + sign * h * nrm


@dataclass
class SmoothPartition:
    """Clamped, mollified, renormalized barycentric partition of unity.

    `delta` and `rho` are per-vertex: delta is 0.9 times the sampled
    distance from supp(clamped coordinate) to the faces of the star not
    containing the vertex, and rho = (3/4) delta is the kernel radius of
    eta(r) = c (1 - (r/rho)^2)^3, normalized to unit mass on R^n.
    Values and frame gradients at arbitrary points come from `evaluate`.
    """

    K: OrientedComplex
    metric: MetricData
    rule: QuadratureRule
    delta: np.ndarray
    rho: np.ndarray
    kernel: str = "eta(r) = c*(1-(r/rho)^2)^3 on r < rho"
    _charts: dict = field(default_factory=dict, repr=False)
    _ball: dict = field(default_factory=dict, repr=False)

    def clamped_at(self, bary: np.ndarray) -> np.ndarray:
        """bar b values: ((n+2) b - 1)/(n+1), clamped at zero."""
        n = self.K.dimension
        b = np.asarray(bary, dtype=float)
        return np.maximum(((n + 2) * b - 1.0) / (n + 1), 0.0)

    def _chart(self, top: int, local_vertex: int):
        key = (top, local_vertex)
        if key not in self._charts:
            vidx = self.K.top_subcells(top)[(local_vertex,)][1]
            self._charts[key] = _unfold_star(self.K, self.metric, vidx, top)
        return self._charts[key]

    def _ball_rule(self, rho: float, m: int = 10):
        key = (round(rho, 14), m)
        if key not in self._ball:
            n = self.K.dimension
            x, w = np.polynomial.legendre.leggauss(m)
            x = 0.5 * (x + 1.0)  # [0, 1]
            w = 0.5 * w
            grids = np.meshgrid(*([x] * n), indexing="ij")
            wgrids = np.meshgrid(*([w] * n), indexing="ij")
            pts = np.stack([g.reshape(-1) for g in grids], axis=1)
            wts = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=1), axis=1)
            offs = (2.0 * pts - 1.0) * rho
            wts = wts * (2.0 * rho) ** n
            r = np.linalg.norm(offs, axis=1)
            keep = r < rho
            self._ball[key] = (offs[keep], wts[keep], r[keep])
        return self._ball[key]

    def _kernel_const(self, rho: float) -> float:
        n = self.K.dimension
        surface = 2.0 * math.pi ** (n / 2.0) / gamma_fn(n / 2.0)
        radial = 0.5 * beta_fn(n / 2.0, 4.0)
        return 1.0 / (surface * radial * rho ** n)

    def _mollified(self, top: int, local_vertex: int, points: np.ndarray):
        """(tilde b, gradient) of one vertex coordinate at frame points."""
        chart = self._chart(top, local_vertex)
        n = self.K.dimension
        vidx = self.K.top_subcells(top)[(local_vertex,)][1]
        rho = float(self.rho[vidx])
        offs, wts, r = self._ball_rule(rho)
        c = self._kernel_const(rho)
        eta = c * (1.0 - (r / rho) ** 2) ** 3
        deta_over_r = c * 3.0 * (1.0 - (r / rho) ** 2) ** 2 * (-2.0 / rho ** 2)
        npts = points.shape[0]
        samples = points[:, None, :] + offs[None, :, :]
        flat = samples.reshape(-1, n)
        bbar = np.zeros(flat.shape[0])
        located = np.zeros(flat.shape[0], dtype=bool)
        for t, coords in chart:
            verts_t = self.K.subcell_vertices(n, t)
            if vidx not in verts_t:
                continue
            pos = verts_t.index(vidx)
            E = (coords[1:] - coords[0]).T
            try:
                lam = la.solve(E, (flat - coords[0]).T)
            except la.LinAlgError:
                raise ChartUnavailable("degenerate simplex in star chart") from None
            bary = np.vstack([1.0 - lam.sum(axis=0), lam])
            inside = np.all(bary >= -1e-12, axis=0) & ~located
            if np.any(inside):
                vals = np.maximum(((n + 2) * bary[pos, inside] - 1.0) / (n + 1), 0.0)
                bbar[inside] = vals
                located[inside] = True
        bbar = bbar.reshape(npts, -1)
        val = bbar @ (eta * wts)
        # grad_x eta(|x-y|) = eta'(r) (x - y)/r = -deta_over_r * offs ... with
        # y = x + off, x - y = -off, and eta'(r)/r = deta_over_r
        gw = (deta_over_r * wts)[None, :, None] * (-offs)[None, :, :]
        grad = np.einsum("pq,pqa->pa", bbar, gw)
        return val, grad

    def evaluate(self, top: int, bary: np.ndarray):
        """(beta, frame gradients) at barycentric points of one top cell.

        Returns (beta (m, n+1), grad (m, n+1, n)); gradients live in the
        Euclidean frame of the top cell's own flat realization, where form
        inner products are plain dot products.
        """
        n = self.K.dimension
        bary = np.asarray(bary, dtype=float)
        single = bary.ndim == 1
        bary = np.atleast_2d(bary)
        sigma = realize_top(self.K, self.metric, self.K.simplices[n][top])
        points = bary @ sigma.vertices
        vals = np.zeros((bary.shape[0], n + 1))
        grads = np.zeros((bary.shape[0], n + 1, n))
        for i in range(n + 1):
            v, g = self._mollified(top, i, points)
            vals[:, i] = v
            grads[:, i] = g
        S = vals.sum(axis=1)
        if np.any(S <= 0):
            raise ChartUnavailable("partition sum vanished at an evaluation point")
        gS = grads.sum(axis=1)
        beta = vals / S[:, None]
        grad = (grads * S[:, None, None] - vals[:, :, None] * gS[:, None, :]) \
            / (S ** 2)[:, None, None]
        if single:
            return beta[0], grad[0]
        return beta, grad


def smooth_partition(K: OrientedComplex, metric: MetricData,
                     rule: QuadratureRule = None) -> SmoothPartition:
    """Clamp, mollify, and renormalize the barycentric coordinates.

    Flat metrics only: the mollification integral runs in the isometric
    unfolding of each vertex star into R^n, and each vertex's kernel radius
    is kept below the distance from its clamped support to the star faces
    not containing it, so supports stay strictly inside open stars.
    """
    if metric.curvature != 0:
        raise ChartUnavailable(
            "mollification integrates in an ambient flat chart; "
            "curved metrics are not supported"
        )
    n = K.dimension
    if rule is None:
        rule = default_rule(n, 4)
    nv = K.n_simplices(0)
    delta = np.zeros(nv)
    for vidx in range(nv):
        star = K.star_tops(0, vidx)
        root = star[0]
        chart = _unfold_star(K, metric, vidx, root)
        # sample points of supp(bar b) = {b_v >= 1/(n+2)} in each placed top,
        # as clamp-region corners plus quadrature nodes pulled into the region
        dmin = math.inf
        thresh = 1.0 / (n + 2)
        for t, coords in chart:
            verts_t = K.subcell_vertices(n, t)
            if vidx not in verts_t:
                continue
            pos = verts_t.index(vidx)
            corners = []
            for j in range(n + 1):
                corner = np.full(n + 1, 0.0)
                if j == pos:
                    corner[pos] = 1.0
                else:
                    corner[pos] = thresh
                    corner[j] = 1.0 - thresh
                corners.append(corner)
            for b in corners + list(rule.nodes):
                if b[pos] < thresh - 1e-12:
                    continue
                p = b @ coords
                for t2, coords2 in chart:
                    verts2 = K.subcell_vertices(n, t2)
                    if vidx not in verts2:
                        continue
                    pos2 = verts2.index(vidx)
                    opp = [i for i in range(n + 1) if i != pos2]
                    dmin = min(dmin, _point_simplex_distance(p, coords2[opp]))
        if not (dmin > 0) or not math.isfinite(dmin):
            raise ChartUnavailable("clamped support touches the star boundary")
        delta[vidx] = 0.9 * dmin
    return SmoothPartition(K, metric, rule, delta, 0.75 * delta)


# -- global structure ------------------------------------------------------------


class WhitneyStructure:
    """Assembled inner products on cochains of every degree.

    Local matrices are computed per top cell (optionally across threads) and
    summed in lexicographic cell order, so assembly is reproducible.  With a
    flat metric, congruent tops share one local matrix via a length-table
    cache.  `mode` is "standard" (barycentric coordinates) or "smoothed"
    (the mollified partition, flat metrics only).
    """

    def __init__(self, K: OrientedComplex, metric: MetricData, quad_order: int = 4,
                 mode: str = "standard", threads: int = 1):
        if mode not in ("standard", "smoothed"):
            raise DegreeMismatch(f"unknown mode {mode!r}")
        self.K = K
        self.metric = metric
        self.quad_order = int(quad_order)
        self.mode = mode
        self.threads = max(1, int(threads))
        self.rule = default_rule(K.dimension, self.quad_order)
        n = K.dimension
        self._tops = [realize_top(K, metric, K.simplices[n][t])
                      for t in range(K.n_simplices(n))]
        self.partition = smooth_partition(K, metric, self.rule) if mode == "smoothed" else None
        self._mass = {}
        self._factor = {}
        self._smooth_eval = {}

    # -- assembly ------------------------------------------------------------

    def _local(self, top: int, degree: int, cache: dict) -> np.ndarray:
        if self.mode == "standard":
            key = self._tops[top].gram.tobytes()
            if key not in cache:
                cache[key] = _local_mass_standard(self._tops[top], self.rule, degree)
            return cache[key]
        if top not in self._smooth_eval:
            self._smooth_eval[top] = self.partition.evaluate(top, self.rule.nodes)
        beta, grad = self._smooth_eval[top]
        return _local_mass_smoothed(self._tops[top], self.rule, degree, beta, grad)

    def mass(self, k: int) -> sp.csr_matrix:
        """Symmetric positive definite Gram matrix of the degree-k basis."""
        if not 0 <= k <= self.K.dimension:
            raise DegreeOutOfRange(f"degree {k} not in [0, {self.K.dimension}]")
        if k in self._mass:
            return self._mass[k]
        K = self.K
        n = K.dimension
        faces = list(combinations(range(n + 1), k + 1))
        ntop = K.n_simplices(n)
        cache = {}
        if self.threads == 1:
            locals_ = [self._local(t, k, cache) for t in range(ntop)]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                locals_ = list(pool.map(lambda t: self._local(t, k, cache), range(ntop)))
        rows, cols, vals = [], [], []
        for t in range(ntop):
            table = K.top_subcells(t)
            gidx = [table[tau][1] for tau in faces]
            loc = locals_[t]
            for a in range(len(faces)):
                for bcol in range(len(faces)):
                    rows.append(gidx[a])
                    cols.append(gidx[bcol])
                    vals.append(loc[a, bcol])
        M = sp.coo_matrix((vals, (rows, cols)),
                          shape=(K.n_simplices(k), K.n_simplices(k))).tocsr()
        M.sum_duplicates()
        diff = M - M.T
        if diff.nnz and np.max(np.abs(diff.data)) > 1e-12 * np.max(np.abs(M.data)):
            raise SingularMass("assembled mass matrix is not symmetric")
        self._mass[k] = M
        return M

    def solve_mass(self, k: int, rhs: np.ndarray) -> np.ndarray:
        if k not in self._factor:
            self._factor[k] = factor_spd(self.mass(k))
        return self._factor[k](np.asarray(rhs, dtype=float))

    def inner(self, f: Cochain, g: Cochain) -> float:
        if f.degree != g.degree:
            raise DegreeMismatch("inner product needs equal degrees")
        return float(f.values @ (self.mass(f.degree) @ g.values))

    def norm(self, f: Cochain) -> float:
        val = self.inner(f, f)
        return math.sqrt(max(val, 0.0))

    # -- operators ---------------------------------------------------------------

    def codifferential_apply(self, k: int, values: np.ndarray) -> np.ndarray:
        """d*_W g = M_{k-1}^{-1} d^T M_k g for a degree-k cochain g."""
        if not 1 <= k <= self.K.dimension:
            raise DegreeOutOfRange(f"codifferential degree {k} not in [1, {self.K.dimension}]")
        d = self.K.coboundary_matrix(k - 1)
        return self.solve_mass(k - 1, d.T @ (self.mass(k) @ np.asarray(values, dtype=float)))

    def up_stiffness(self, k: int) -> sp.csr_matrix:
        """d_k^T M_{k+1} d_k, the Galerkin stiffness of the up-Laplacian."""
        d = self.K.coboundary_matrix(k)
        S = (d.T @ self.mass(k + 1) @ d).tocsr()
        return 0.5 * (S + S.T)


@dataclass
class Codifferential:
    """The adjoint of d in the Whitney inner products, as an operator."""

    W: WhitneyStructure
    degree: int

    def apply(self, g) -> np.ndarray:
        vals = g.values if isinstance(g, Cochain) else g
        return self.W.codifferential_apply(self.degree, vals)

    def dense(self) -> np.ndarray:
        nk = self.W.K.n_simplices(self.degree)
        return np.column_stack([self.apply(e) for e in np.eye(nk)])


def codifferential(W: WhitneyStructure, k: int) -> Codifferential:
    return Codifferential(W, k)


@dataclass
class WhitneyLaplacian:
    """Delta_W = d d*_W + d*_W d in degree k, self-adjoint in <.,.>_M."""

    W: WhitneyStructure
    degree: int

    def apply(self, f) -> np.ndarray:
        vals = np.asarray(f.values if isinstance(f, Cochain) else f, dtype=float)
        W, k, K = self.W, self.degree, self.W.K
        out = np.zeros_like(vals)
        if k < K.dimension:
            up = W.up_stiffness(k) @ vals
            out += W.solve_mass(k, up)
        if k > 0:
            d = K.coboundary_matrix(k - 1)
            out += d @ W.codifferential_apply(k, vals)
        return out

    def dense(self) -> np.ndarray:
        nk = self.W.K.n_simplices(self.degree)
        return np.column_stack([self.apply(e) for e in np.eye(nk)])

    def kernel_dimension(self) -> int:
        """Betti number of the degree, from exact integer boundary ranks."""
        K, k = self.W.K, self.degree
        r_up = integer_rank(K.boundary_matrix(k + 1)) if k < K.dimension else 0
        r_dn = integer_rank(K.boundary_matrix(k)) if k > 0 else 0
        return K.n_simplices(k) - r_up - r_dn


def whitney_laplacian(W: WhitneyStructure, k: int) -> WhitneyLaplacian:
    if not 0 <= k <= W.K.dimension:
        raise DegreeOutOfRange(f"degree {k} not in [0, {W.K.dimension}]")
    return WhitneyLaplacian(W, k)


# -- Hodge decomposition -------------------------------------------------------


@dataclass
class HodgeParts:
    """M-orthogonal splitting f = harmonic + exact + coexact."""

    degree: int
    harmonic: Cochain
    exact: Cochain
    coexact: Cochain
    harmonic_dim: int
    exact_dim: int
    coexact_dim: int

    @property
    def dims(self):
        return (self.harmonic_dim, self.exact_dim, self.coexact_dim)


def _solve_psd_consistent(S, rhs, dense_threshold: int = 1500):
    """Least-norm solution of a consistent singular SPSD system."""
    nn = S.shape[0]
    if nn <= dense_threshold:
        Sd = S.toarray() if sp.issparse(S) else np.asarray(S)
        sol, *_ = la.lstsq(Sd, rhs)
        return sol
    x, info = spla.cg(sp.csr_matrix(S), rhs, x0=np.zeros(nn), rtol=1e-12,
                      atol=0.0, maxiter=10 * nn)
    if info != 0:
        raise SingularMass(f"conjugate gradient did not converge (info={info})")
    return x


def harmonic_basis(W: WhitneyStructure, k: int) -> np.ndarray:
    """M-orthonormal basis of ker d intersect ker d*_W in degree k.

    Starts from the integer-rank-certified Euclidean kernel (ker d cap
    ker d^T), then subtracts the M-orthogonal projection onto exact
    cochains; the result stays closed and becomes M-orthogonal to im d,
    which characterizes Whitney-harmonic cochains.
    """
    K = W.K
    n = K.dimension
    nk = K.n_simplices(k)
    L = sp.csr_matrix((nk, nk), dtype=np.int64)
    bk = nk
    if k < n:
        d = K.coboundary_matrix(k)
        L = L + d.T @ d
        bk -= integer_rank(K.boundary_matrix(k + 1))
    if k > 0:
        dd = K.coboundary_matrix(k - 1)
        L = L + dd @ dd.T
        bk -= integer_rank(K.boundary_matrix(k))
    if bk == 0:
        return np.zeros((nk, 0))
    Z = nullspace_psd(L.astype(float), bk)
    if k > 0:
        d = K.coboundary_matrix(k - 1)
        Mk = W.mass(k)
        S = (d.T @ Mk @ d).tocsr()
        G = _solve_psd_consistent(S, d.T @ (Mk @ Z))
        Z = Z - d @ G
    # M-orthonormalize
    Mk = W.mass(k)
    gram = Z.T @ (Mk @ Z)
    C = la.cholesky(0.5 * (gram + gram.T), lower=True)
    return la.solve_triangular(C, Z.T, lower=True).T


def hodge_decompose(W: WhitneyStructure, f: Cochain) -> HodgeParts:
    """M-orthogonal projections onto exact, coexact, and harmonic parts.

    Subspace dimensions come from exact integer boundary ranks; the exact
    part is d of a least-norm potential, the harmonic part is the projection
    onto the certified harmonic basis, and the coexact part is the
    remainder (M-orthogonal to both, hence in the image of d*_W).
    """
    K = W.K
    k = f.degree
    nk = K.n_simplices(k)
    vals = np.asarray(f.values, dtype=float)
    Mk = W.mass(k)
    exact = np.zeros(nk)
    exact_dim = 0
    if k > 0:
        d = K.coboundary_matrix(k - 1)
        S = (d.T @ Mk @ d).tocsr()
        g = _solve_psd_consistent(S, d.T @ (Mk @ vals))
        exact = d @ g
        exact_dim = integer_rank(K.boundary_matrix(k))
    H = harmonic_basis(W, k)
    harm = H @ (H.T @ (Mk @ vals)) if H.shape[1] else np.zeros(nk)
    coex = vals - exact - harm
    coexact_dim = integer_rank(K.boundary_matrix(k + 1)) if k < K.dimension else 0
    return HodgeParts(k, Cochain(k, harm), Cochain(k, exact), Cochain(k, coex),
                      H.shape[1], exact_dim, coexact_dim)


def coexact_gap(W: WhitneyStructure, k: int = 1):
    """Smallest positive eigenvalue of (d^T M_{k+1} d, M_k) plus eigencochain.

    Positive eigenvectors of the up-pencil are coexact, so this is the
    first eigenvalue of the Whitney Laplacian on coexact k-cochains; the
    kernel dimension fed to the solver comes from the exact integer rank
    of the coboundary.
    """
    K = W.K
    if not 0 <= k < K.dimension:
        raise DegreeOutOfRange(f"coexact gap needs 0 <= k < {K.dimension}")
    S = W.up_stiffness(k)
    Mk = W.mass(k)
    nk = K.n_simplices(k)
    kernel = nk - integer_rank(K.boundary_matrix(k + 1))
    if kernel >= nk:
        raise NoPositiveEigenvalue(f"no coexact directions in degree {k}")
    w, v = smallest_positive_pencil(S, Mk, kernel)
    vec = v[:, 0]
    vec = vec / math.sqrt(float(vec @ (Mk @ vec)))
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    return float(w[0]), Cochain(k, vec)


def mass_matrix(K: OrientedComplex, metric: MetricData, k: int,
                quad_order: int = 4, mode: str = "standard",
                threads: int = 1) -> sp.csr_matrix:
    """Gram matrix of the degree-k basis forms (convenience wrapper)."""
    return WhitneyStructure(K, metric, quad_order, mode, threads).mass(k)
