"""Dual celluations, Poincare duality, and subdivision of dual 2-cells.

For a closed oriented n-complex K, the dual celluation K* has one k-cell
per (n-k)-cell of K, indexed identically, with boundary operators

    bd*_{n-k} = (-1)^k Phi_{k+1} d_k Phi_k,

where Phi_k is the diagonal sign matrix of the duality map (identity below
the top degree, the orientation signs in degree n).  With these signs
bd* bd* = 0 holds exactly, every dual edge is the signed difference of its
two endpoint dual vertices, and the duality map Phi: C^k(K) -> C_{n-k}(K*)
satisfies bd*(Phi f) = (-1)^k Phi(d f) entrywise in integers.

Each dual 2-cell (dual to an (n-2)-cell rho) is an m-sided polygon whose
corners are the barycenters of the n-cells around rho and whose sides are
the dual edges of the (n-1)-cells around rho.  Subdivision replaces it by
the fan of m triangles joining the cell's own center to its corners, one
triangle per side.  The fan coefficients are forced by the chain-map
identity: with beta(mu) the bd*_1 entry at the larger-indexed coface of mu,

    tau_2(rho*) = sum_mu [bd*_2]_{mu,rho} * beta(mu) * t(rho, mu),

and the spoke edges cancel exactly because bd*_1 bd*_2 = 0.  The honest
barycentric subdivision of K (one simplex per flag of cells) is also
available for counting and embedding arguments; the fan is the coarser
triangulation the filling estimates use.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np
import scipy.sparse as sp

from .complexes import Chain, Cochain, OrientedComplex
from .errors import (
    ClosureViolation,
    DegreeMismatch,
    ParseError,
)


def _exact_spmv(mat: sp.spmatrix, vec: np.ndarray) -> np.ndarray:
    """Sparse matrix times object-dtype vector, in exact arithmetic."""
    coo = mat.tocoo()
    out = np.zeros(mat.shape[0], dtype=object)
    for r, c, v in zip(coo.row, coo.col, coo.data):
        out[r] += int(v) * vec[c]
    return out


def _signed_apply(mat: sp.spmatrix, vec: np.ndarray) -> np.ndarray:
    if vec.dtype == object:
        return _exact_spmv(mat, vec)
    return mat @ vec


class PoincareDuality:
    """Sign-diagonal duality map between cochains on K and chains on K*."""

    def __init__(self, K: OrientedComplex):
        self.K = K
        self.orientation = K.orientation()

    def signs(self, k: int) -> np.ndarray:
        """Diagonal of Phi_k (signs attached to the k-cells of K)."""
        if k == self.K.dimension:
            return self.orientation
        return np.ones(self.K.n_simplices(k), dtype=np.int64)

    def matrix(self, k: int) -> sp.csr_matrix:
        return sp.diags(self.signs(k), format="csr", dtype=np.int64)

    def apply(self, f: Cochain) -> Chain:
        """Phi(sum a_i delta_i) = sum a_i sign_i (cell_i)* in C_{n-k}(K*)."""
        s = self.signs(f.degree)
        return Chain(self.K.dimension - f.degree, s * f.values, dual=True)

    def inverse(self, a: Chain) -> Cochain:
        """Phi is an involution up to the degree swap (signs square to 1)."""
        k = self.K.dimension - a.degree
        return Cochain(k, self.signs(k) * a.values)


def poincare_duality(K: OrientedComplex) -> PoincareDuality:
    return PoincareDuality(K)


class FanComplex:
    """The 2-complex of center fans that subdivides the dual 2-cells.

    Vertices are the barycenters of the top cells of K (the dual vertices)
    followed by the centers of the (n-2)-cells; edges are the straightened
    dual edges ('cross', mu) and the fan spokes ('spoke', rho, top);
    triangles are ('fan', rho, mu), one per incidence of an (n-1)-cell mu
    with an (n-2)-cell rho.  All indexing is lexicographic in the labels.
    """

    def __init__(self, vertex_labels, edge_labels, triangle_labels, bd1, bd2):
        self.vertex_labels = vertex_labels
        self.edge_labels = edge_labels
        self.triangle_labels = triangle_labels
        self.vertex_index = {lab: i for i, lab in enumerate(vertex_labels)}
        self.edge_index = {lab: i for i, lab in enumerate(edge_labels)}
        self.triangle_index = {lab: i for i, lab in enumerate(triangle_labels)}
        self._bd = {1: bd1, 2: bd2}

    def n_cells(self, k: int) -> int:
        return len((self.vertex_labels, self.edge_labels, self.triangle_labels)[k])

    def boundary_matrix(self, k: int) -> sp.csr_matrix:
        if k not in (1, 2):
            raise DegreeMismatch(f"fan complex has boundaries in degrees 1 and 2, not {k}")
        return self._bd[k]

    def __repr__(self):
        return (
            f"FanComplex(vertices={len(self.vertex_labels)}, "
            f"edges={len(self.edge_labels)}, triangles={len(self.triangle_labels)})"
        )


def barycentric_subdivision(K: OrientedComplex) -> OrientedComplex:
    """One simplex per flag of cells; vertex ids are degree-offset cell indices."""
    n = K.dimension
    offsets = np.concatenate([[0], np.cumsum([K.n_simplices(k) for k in range(n + 1)])])
    tops = []
    for t in range(K.n_simplices(n)):
        table = K.top_subcells(t)
        for perm in permutations(range(n + 1)):
            flag = []
            for j in range(n + 1):
                dk, di = table[tuple(sorted(perm[: j + 1]))]
                flag.append(int(offsets[dk] + di))
            tops.append(tuple(flag))
    return OrientedComplex(n, tops)


class DualComplex:
    """Dual celluation K* of a closed oriented complex, with subdivisions.

    Exposes the dual boundary operators, the fan complex subdividing the
    dual 2-cells together with the chain maps tau_0, tau_1, tau_2 into it,
    and (lazily) the full barycentric subdivision as an OrientedComplex.
    """

    def __init__(self, K: OrientedComplex):
        if K.dimension < 2:
            raise ParseError("dual celluation requires dimension >= 2")
        self.K = K
        self.duality = PoincareDuality(K)  # raises NotOrientable if needed
        if not K.is_closed():
            raise ClosureViolation(
                "dual celluation requires a closed complex "
                "(every (n-1)-cell in exactly two top cells)"
            )
        self.dimension = K.dimension
        self.cell_counts = tuple(
            K.n_simplices(K.dimension - k) for k in range(K.dimension + 1)
        )
        self._dual_boundary = {}
        self._build_fan()
        self._barycentric = None

    # -- boundary operators -------------------------------------------------

    def n_cells(self, k: int) -> int:
        """Number of k-cells of K* (= (n-k)-cells of K, same indexing)."""
        return self.cell_counts[k]

    def dual_boundary(self, j: int) -> sp.csr_matrix:
        """bd*_j : C_j(K*) -> C_{j-1}(K*), rows indexed by (n-j+1)-cells of K."""
        if not 1 <= j <= self.dimension:
            raise DegreeMismatch(f"dual boundary degree {j} not in [1, {self.dimension}]")
        if j not in self._dual_boundary:
            k = self.dimension - j
            mat = self.duality.matrix(k + 1) @ self.K.coboundary_matrix(k) @ self.duality.matrix(k)
            self._dual_boundary[j] = ((-1) ** k * mat).tocsr()
        return self._dual_boundary[j]

    # -- fan subdivision ------------------------------------------------------

    def _build_fan(self):
        n = self.dimension
        K = self.K
        bd1 = self.dual_boundary(1)  # rows: n-cells of K, cols: (n-1)-cells
        bd2 = self.dual_boundary(2)  # rows: (n-1)-cells, cols: (n-2)-cells

        n_top = K.n_simplices(n)
        n_mid = K.n_simplices(n - 1)
        n_ctr = K.n_simplices(n - 2)

        # the two top cells around each (n-1)-cell, and beta = bd*_1 entry
        # at the larger-indexed one (each bd*_1 column is one +1 and one -1)
        pair = np.empty((n_mid, 2), dtype=np.int64)
        beta = np.empty(n_mid, dtype=np.int64)
        csc1 = bd1.tocsc()
        for mu in range(n_mid):
            rows = csc1.indices[csc1.indptr[mu]: csc1.indptr[mu + 1]]
            vals = csc1.data[csc1.indptr[mu]: csc1.indptr[mu + 1]]
            if len(rows) != 2 or sorted(abs(vals)) != [1, 1] or vals[0] + vals[1] != 0:
                raise ClosureViolation(
                    "dual edge is not a signed difference of two dual vertices"
                )
            order = np.argsort(rows)
            pair[mu] = rows[order]
            beta[mu] = vals[order][1]

        vertex_labels = [("top", i) for i in range(n_top)] + [
            ("center", i) for i in range(n_ctr)
        ]
        cross = [("cross", mu) for mu in range(n_mid)]
        spokes = sorted(
            ("spoke", rho, top)
            for rho in range(n_ctr)
            for top in K.star_tops(n - 2, rho)
        )
        edge_labels = cross + spokes
        edge_index = {lab: i for i, lab in enumerate(edge_labels)}

        # CSC columns come out with ascending row indices, so iterating
        # rho-major already yields lexicographic (rho, mu) triangle order
        csc2 = bd2.tocsc()
        csc2.sort_indices()
        triangle_labels = []
        tri_gamma = []
        for rho in range(n_ctr):
            rows = csc2.indices[csc2.indptr[rho]: csc2.indptr[rho + 1]]
            vals = csc2.data[csc2.indptr[rho]: csc2.indptr[rho + 1]]
            for mu, v in zip(rows, vals):
                triangle_labels.append(("fan", int(rho), int(mu)))
                tri_gamma.append(int(v) * int(beta[mu]))

        # boundary of edges: cross(mu) = top_b - top_a; spoke(rho, s) = center - top
        rows1, cols1, data1 = [], [], []
        for mu in range(n_mid):
            rows1 += [int(pair[mu, 1]), int(pair[mu, 0])]
            cols1 += [mu, mu]
            data1 += [1, -1]
        for lab in spokes:
            _, rho, top = lab
            e = edge_index[lab]
            rows1 += [n_top + rho, top]
            cols1 += [e, e]
            data1 += [1, -1]
        fan_bd1 = sp.coo_matrix(
            (data1, (rows1, cols1)),
            shape=(len(vertex_labels), len(edge_labels)),
            dtype=np.int64,
        ).tocsr()

        # boundary of triangle [top_a, top_b, center(rho)] over side mu:
        #   cross(mu) + spoke(rho, top_b) - spoke(rho, top_a),
        # with spokes oriented top -> center as in fan_bd1 above
        rows2, cols2, data2 = [], [], []
        for t, (_, rho, mu) in enumerate(triangle_labels):
            a, b = int(pair[mu, 0]), int(pair[mu, 1])
            rows2 += [
                edge_index[("cross", mu)],
                edge_index[("spoke", rho, b)],
                edge_index[("spoke", rho, a)],
            ]
            cols2 += [t, t, t]
            data2 += [1, 1, -1]
        fan_bd2 = sp.coo_matrix(
            (data2, (rows2, cols2)),
            shape=(len(edge_labels), len(triangle_labels)),
            dtype=np.int64,
        ).tocsr()

        self.fan = FanComplex(vertex_labels, edge_labels, triangle_labels, fan_bd1, fan_bd2)

        # chain maps into the fan
        n_tri = len(triangle_labels)
        self.tau2 = sp.coo_matrix(
            (tri_gamma, (np.arange(n_tri), [lab[1] for lab in triangle_labels])),
            shape=(n_tri, n_ctr),
            dtype=np.int64,
        ).tocsr()
        self.tau1 = sp.coo_matrix(
            (beta, (np.arange(n_mid), np.arange(n_mid))),
            shape=(len(edge_labels), n_mid),
            dtype=np.int64,
        ).tocsr()
        self.tau0 = sp.coo_matrix(
            (np.ones(n_top, dtype=np.int64), (np.arange(n_top), np.arange(n_top))),
            shape=(len(vertex_labels), n_top),
            dtype=np.int64,
        ).tocsr()

    # -- derived data -----------------------------------------------------------

    def dual_cell_sides(self) -> np.ndarray:
        """Number of sides of each dual 2-cell (per (n-2)-cell of K)."""
        bd2 = self.dual_boundary(2)
        return np.asarray(np.abs(bd2).sum(axis=0)).reshape(-1).astype(np.int64)

    @property
    def barycentric(self) -> OrientedComplex:
        """Full flag subdivision of K, built on first use."""
        if self._barycentric is None:
            self._barycentric = barycentric_subdivision(self.K)
        return self._barycentric

    def subdivide_1chain(self, a: Chain) -> Chain:
        """Image of a dual 1-chain on the straightened dual edges of the fan."""
        if a.degree != 1 or not a.dual:
            raise DegreeMismatch("expected a degree-1 chain on the dual complex")
        if len(a.values) != self.n_cells(1):
            raise DegreeMismatch("chain length does not match the dual 1-cells")
        return Chain(1, _signed_apply(self.tau1, a.values), dual=False)

    def __repr__(self):
        return f"DualComplex(dim={self.dimension}, cells={self.cell_counts})"


def dual_celluation(K: OrientedComplex) -> DualComplex:
    """Dual cells, dual boundaries, fan subdivision, and chain maps for K."""
    return DualComplex(K)


def subdivide_chain(D: DualComplex, c: Chain) -> Chain:
    """Replace every dual 2-cell by its triangle fan; linear over coefficients.

    The result lives on the triangles of D.fan; its Gromov norm is at most
    the star bound of K times the norm of c, since an m-sided cell maps to
    m triangles with unit coefficients.
    """
    if c.degree != 2 or not c.dual:
        raise DegreeMismatch("subdivide_chain expects a degree-2 chain on K*")
    if len(c.values) != D.n_cells(2):
        raise DegreeMismatch("chain length does not match the dual 2-cells")
    return Chain(2, _signed_apply(D.tau2, c.values), dual=False)
