"""Oriented simplicial and quotient (Delta) complexes with signed incidence.

Cells are indexed by sortable labels, lexicographically within each degree,
so every matrix and report derived from a complex is byte-reproducible.  In
the common case a cell's label is its strictly increasing vertex tuple and
the closure is generated from the top simplices.  Quotient complexes whose
cells are not determined by their vertex sets (a 2x2 triangulated torus has
doubled edges) supply explicit per-degree cell lists and face maps instead;
each cell still carries an ordered vertex tuple for metric lookups, and the
face at position i is the cell with the i-th vertex removed.

The boundary convention is the standard alternating one,

    bd [v0,...,vk] = sum_i (-1)^i [v0,...,^vi,...,vk],

with integer entries throughout; bd_k bd_{k+1} = 0 holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .errors import (
    ClosureViolation,
    DegreeOutOfRange,
    NotOrientable,
    ParseError,
)


@dataclass(frozen=True)
class MetricData:
    """Curvature sign (-1, 0, +1) plus an edge-length table."""

    curvature: int
    lengths: dict

    def length(self, a: int, b: int) -> float:
        key = (a, b) if a < b else (b, a)
        try:
            return self.lengths[key]
        except KeyError:
            raise ParseError(f"no length assigned to edge {key}") from None

    def scaled(self, c: float) -> "MetricData":
        """Uniformly rescale every edge length by c (flat geometry use)."""
        return MetricData(self.curvature, {e: c * l for e, l in self.lengths.items()})


@dataclass
class Chain:
    """Real coefficient vector over the oriented k-cells (of K, or of K* when dual)."""

    degree: int
    values: np.ndarray
    dual: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values)


@dataclass
class Cochain:
    degree: int
    values: np.ndarray
    dual: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values)


class OrientedComplex:
    """Pure n-dimensional complex with deterministic lexicographic indexing.

    Parameters
    ----------
    dimension : int
    top_simplices : iterable of vertex tuples, each of length dimension+1
        (ignored when `cells` is given)
    orientation : optional sequence of +-1 per top simplex, in input order
        (in label order when `cells` is given)
    cells : optional explicit quotient structure, a pair (by_degree, faces):
        by_degree[k] lists (label, vertex_tuple) for every k-cell, and
        faces[(k, label)] gives the k+1 face labels in removal order.
    """

    def __init__(self, dimension, top_simplices=None, orientation=None, cells=None):
        if dimension < 1:
            raise ParseError("dimension must be >= 1")
        self.dimension = dimension
        if cells is None:
            self._init_from_tops(top_simplices)
        else:
            self._init_from_cells(cells)
        self._set_orientation_input(orientation)
        self._boundary_cache = {}
        self._subcell_cache = None
        self._star_cache = None

    # -- construction -----------------------------------------------------

    def _init_from_tops(self, top_simplices):
        n = self.dimension
        tops = []
        for s in top_simplices:
            t = tuple(s)
            if len(t) != n + 1:
                raise ParseError(f"simplex {t} does not have {n + 1} vertices")
            if len(set(t)) != len(t):
                raise ParseError(f"repeated vertex in simplex {t}")
            if any(v < 0 for v in t):
                raise ParseError(f"negative vertex id in simplex {t}")
            tops.append(tuple(sorted(t)))
        if not tops:
            raise ParseError("complex has no top-dimensional simplices")
        if len(set(tops)) != len(tops):
            raise ParseError("duplicate top-dimensional simplex")

        faces = [set() for _ in range(n + 1)]
        for t in tops:
            for k in range(n + 1):
                faces[k].update(combinations(t, k + 1))
        self.labels = [sorted(faces[k]) for k in range(n + 1)]
        self.simplices = [list(lab) for lab in self.labels]
        self.index = [{s: i for i, s in enumerate(self.labels[k])} for k in range(n + 1)]
        self._face_idx = [None] * (n + 1)
        for k in range(1, n + 1):
            arr = np.empty((len(self.labels[k]), k + 1), dtype=np.int64)
            for i, s in enumerate(self.labels[k]):
                for p in range(k + 1):
                    arr[i, p] = self.index[k - 1][s[:p] + s[p + 1:]]
            self._face_idx[k] = arr
        self._input_top_order = [self.index[n][t] for t in tops]

    def _init_from_cells(self, cells):
        n = self.dimension
        by_degree, faces = cells
        self.labels = []
        self.simplices = []
        self.index = []
        for k in range(n + 1):
            recs = sorted(by_degree[k], key=lambda r: r[0])
            labs = [r[0] for r in recs]
            if len(set(labs)) != len(labs):
                raise ParseError(f"duplicate degree-{k} cell label")
            vts = [tuple(r[1]) for r in recs]
            for lab, vt in zip(labs, vts):
                if len(vt) != k + 1:
                    raise ParseError(f"cell {lab} needs {k + 1} vertices")
            self.labels.append(labs)
            self.simplices.append(vts)
            self.index.append({lab: i for i, lab in enumerate(labs)})
        self._face_idx = [None] * (n + 1)
        for k in range(1, n + 1):
            arr = np.empty((len(self.labels[k]), k + 1), dtype=np.int64)
            for i, lab in enumerate(self.labels[k]):
                fl = faces[(k, lab)]
                if len(fl) != k + 1:
                    raise ParseError(f"cell {lab} needs {k + 1} faces")
                for p, f in enumerate(fl):
                    try:
                        arr[i, p] = self.index[k - 1][f]
                    except KeyError:
                        raise ClosureViolation(f"face {f} of {lab} is not listed") from None
            self._face_idx[k] = arr
        if not self.labels[n]:
            raise ParseError("complex has no top-dimensional cells")
        self._input_top_order = list(range(len(self.labels[n])))

    def _set_orientation_input(self, orientation):
        if orientation is None:
            self._orientation = None
            return
        n = self.dimension
        ntop = len(self.labels[n])
        orientation = np.asarray(list(orientation), dtype=np.int64)
        if orientation.shape != (ntop,) or not np.all(np.abs(orientation) == 1):
            raise ParseError("orientation must assign +-1 to each top simplex")
        reordered = np.empty(ntop, dtype=np.int64)
        reordered[self._input_top_order] = orientation
        self._orientation = reordered

    @property
    def is_simplicial(self) -> bool:
        """True when every cell is determined by its vertex set."""
        for k in range(self.dimension + 1):
            sets = {frozenset(v) for v in self.simplices[k]}
            if len(sets) != len(self.simplices[k]):
                return False
        return True

    # -- basic counts -------------------------------------------------------

    def n_simplices(self, k: int) -> int:
        if not 0 <= k <= self.dimension:
            raise DegreeOutOfRange(f"degree {k} not in [0, {self.dimension}]")
        return len(self.labels[k])

    @property
    def f_vector(self):
        return tuple(len(s) for s in self.labels)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(s) for k, s in enumerate(self.labels))

    # -- incidence ----------------------------------------------------------

    def boundary_matrix(self, k: int) -> sp.csr_matrix:
        """Signed integer matrix bd_k : C_k -> C_{k-1}."""
        if not 1 <= k <= self.dimension:
            raise DegreeOutOfRange(f"boundary degree {k} not in [1, {self.dimension}]")
        if k in self._boundary_cache:
            return self._boundary_cache[k]
        nk = len(self.labels[k])
        cols = np.repeat(np.arange(nk), k + 1)
        rows = self._face_idx[k].reshape(-1)
        signs = np.tile([(-1) ** i for i in range(k + 1)], nk)
        mat = sp.coo_matrix(
            (signs, (rows, cols)),
            shape=(len(self.labels[k - 1]), nk),
            dtype=np.int64,
        ).tocsr()
        mat.sum_duplicates()
        self._boundary_cache[k] = mat
        return mat

    def coboundary_matrix(self, k: int) -> sp.csr_matrix:
        """d_k : C^k -> C^{k+1}, the transpose of bd_{k+1}."""
        return self.boundary_matrix(k + 1).T.tocsr()

    def face_index(self, k: int, cell: int, position: int) -> int:
        """Index of the face of a k-cell with the given vertex position removed."""
        return int(self._face_idx[k][cell, position])

    def face_array(self, k: int) -> np.ndarray:
        """(n_k, k+1) integer array; entry [i, p] is the p-th face of k-cell i."""
        if not 1 <= k <= self.dimension:
            raise DegreeOutOfRange(f"face degree {k} not in [1, {self.dimension}]")
        return self._face_idx[k]

    def cell_vertex(self, k: int, cell: int, position: int) -> int:
        """Global 0-cell index at one vertex position of a k-cell."""
        cur_k, cur_i, cur_p = k, cell, position
        while cur_k > 0:
            r = cur_k if cur_p != cur_k else cur_k - 1
            cur_i = int(self._face_idx[cur_k][cur_i, r])
            if r < cur_p:
                cur_p -= 1
            cur_k -= 1
        return cur_i

    def subcell_vertices(self, k: int, cell: int) -> tuple:
        """Global 0-cell indices of a k-cell, in its vertex order."""
        return tuple(self.cell_vertex(k, cell, p) for p in range(k + 1))

    def top_subcells(self, top: int) -> dict:
        """Map from vertex-position subsets of a top cell to (degree, index).

        Subsets are sorted position tuples; the full subset maps to the top
        cell itself.  This is the local-to-global table used by assembly.
        """
        if self._subcell_cache is None:
            self._subcell_cache = [None] * len(self.labels[self.dimension])
        cached = self._subcell_cache[top]
        if cached is not None:
            return cached
        n = self.dimension
        table = {tuple(range(n + 1)): (n, top)}
        for size in range(n, 0, -1):
            for subset in combinations(range(n + 1), size):
                parent = None
                for extra in range(n + 1):
                    if extra in subset:
                        continue
                    merged = tuple(sorted(subset + (extra,)))
                    if merged in table:
                        parent = (merged, merged.index(extra))
                        break
                pk, pi = table[parent[0]]
                table[subset] = (pk - 1, self.face_index(pk, pi, parent[1]))
        self._subcell_cache[top] = table
        return table

    def star_tops(self, k: int, i: int) -> list:
        """Indices of top cells containing the given k-cell."""
        if self._star_cache is None:
            n = self.dimension
            stars = [[set() for _ in self.labels[k2]] for k2 in range(n + 1)]
            for t in range(len(self.labels[n])):
                for (dk, di) in self.top_subcells(t).values():
                    stars[dk][di].add(t)
            self._star_cache = [[sorted(s) for s in deg] for deg in stars]
        return self._star_cache[k][i]

    # -- orientation ----------------------------------------------------------

    def _top_adjacency(self):
        """Per (n-1)-cell, the list of (top index, boundary sign) incidences."""
        n = self.dimension
        inc = [[] for _ in self.labels[n - 1]]
        fi = self._face_idx[n]
        for t in range(fi.shape[0]):
            for p in range(n + 1):
                inc[fi[t, p]].append((t, (-1) ** p))
        return inc

    def orientation(self) -> np.ndarray:
        """Signs per top cell making adjacent induced boundary signs cancel.

        Uses the supplied orientation if one was given (after validating it),
        otherwise propagates signs across shared (n-1)-cells.  Raises
        NotOrientable if no compatible assignment exists or some (n-1)-cell
        has more than two top incidences.
        """
        inc = self._top_adjacency()
        for f, pairs in enumerate(inc):
            if len(pairs) > 2:
                raise NotOrientable(
                    f"(n-1)-cell {self.labels[self.dimension - 1][f]} has "
                    f"{len(pairs)} top incidences"
                )
        if self._orientation is not None:
            self._check_orientation(self._orientation, inc)
            return self._orientation
        ntop = len(self.labels[self.dimension])
        neighbors = [[] for _ in range(ntop)]
        for pairs in inc:
            if len(pairs) == 2:
                (t1, s1), (t2, s2) = pairs
                neighbors[t1].append((t2, s1 * s2))
                neighbors[t2].append((t1, s1 * s2))
        signs = np.zeros(ntop, dtype=np.int64)
        for seed in range(ntop):
            if signs[seed]:
                continue
            signs[seed] = 1
            stack = [seed]
            while stack:
                t = stack.pop()
                for t2, prod in neighbors[t]:
                    want = -signs[t] * prod
                    if signs[t2] == 0:
                        signs[t2] = want
                        stack.append(t2)
                    elif signs[t2] != want:
                        raise NotOrientable("no compatible orientation exists")
        self._orientation = signs
        return signs

    def _check_orientation(self, signs, inc):
        for pairs in inc:
            if len(pairs) == 2:
                (t1, s1), (t2, s2) = pairs
                if signs[t1] * s1 + signs[t2] * s2 != 0:
                    raise NotOrientable("supplied orientation is incompatible")

    def is_closed(self) -> bool:
        """True when every (n-1)-cell lies in exactly two top incidences."""
        counts = np.bincount(
            self._face_idx[self.dimension].reshape(-1),
            minlength=len(self.labels[self.dimension - 1]),
        )
        return bool(np.all(counts == 2))

    # -- misc -------------------------------------------------------------------

    def relabeled(self, perm: dict) -> "OrientedComplex":
        """Complex with vertices renamed by the given bijection.

        Only supported when cells are determined by vertex sets; quotient
        complexes keep their labels under renaming and are rebuilt by their
        generator instead.
        """
        if not self.is_simplicial:
            raise ParseError("relabeling requires a simplicial complex")
        tops = [tuple(perm[v] for v in t) for t in self.simplices[self.dimension]]
        return OrientedComplex(self.dimension, tops)

    def __repr__(self):
        return f"OrientedComplex(dim={self.dimension}, f={self.f_vector})"


def boundary_matrix(K: OrientedComplex, k: int) -> sp.csr_matrix:
    return K.boundary_matrix(k)


def coboundary_matrix(K: OrientedComplex, k: int) -> sp.csr_matrix:
    return K.coboundary_matrix(k)


def star_bound(K: OrientedComplex) -> int:
    """Largest number of cells in the closed star of any cell.

    The closed star of sigma is the set of all faces of all top cells
    containing sigma (the complex is pure by construction).
    """
    n = K.dimension
    best = 0
    for k in range(n + 1):
        for i in range(len(K.labels[k])):
            members = set()
            for t in K.star_tops(k, i):
                members.update(K.top_subcells(t).values())
            best = max(best, len(members))
    return best


def validate_complex(K: OrientedComplex) -> None:
    """Recheck purity and bd bd = 0; raises on violation."""
    n = K.dimension
    for k in range(n):
        for i in range(len(K.labels[k])):
            if not K.star_tops(k, i):
                raise ClosureViolation(f"cell {K.labels[k][i]} has no top coface")
    for k in range(1, n):
        prod = K.boundary_matrix(k) @ K.boundary_matrix(k + 1)
        if prod.nnz and np.any(prod.data):
            raise ClosureViolation("bd bd != 0")


def gromov_norm(values) -> float:
    """l1 norm of a coefficient vector; exact for Fraction entries."""
    vals = values.values if isinstance(values, (Chain, Cochain)) else values
    if isinstance(vals, np.ndarray) and vals.dtype == object:
        return sum(abs(v) for v in vals)
    if len(vals) and isinstance(vals[0] if not isinstance(vals, np.ndarray) else vals.flat[0], Fraction):
        return sum(abs(v) for v in vals)
    return float(np.abs(np.asarray(vals, dtype=float)).sum())


# -- file format ---------------------------------------------------------------

def load_complex(path):
    """Parse the line-oriented complex format.

    Format:  ``dim n`` / ``curvature {-1|0|1}`` / ``simplex k v0 ... vk``
    (top-dimensional only) / ``length v_a v_b L`` / optional ``orient s +-1``.
    ``#`` starts a comment; unknown keys are errors.

    Returns (OrientedComplex, MetricData) after validating closure, purity,
    and per-simplex realizability in the declared model geometry.
    """
    text = open(path, "r", encoding="utf-8").read() if not hasattr(path, "read") else path.read()
    dim = None
    curvature = None
    tops = []
    lengths = {}
    orients = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key == "dim":
                dim = int(parts[1])
            elif key == "curvature":
                curvature = int(parts[1])
                if curvature not in (-1, 0, 1):
                    raise ParseError(f"line {lineno}: curvature must be -1, 0 or 1")
            elif key == "simplex":
                k = int(parts[1])
                verts = tuple(int(v) for v in parts[2:])
                if len(verts) != k + 1:
                    raise ParseError(f"line {lineno}: simplex {k} needs {k + 1} vertices")
                if dim is None or k != dim:
                    raise ParseError(
                        f"line {lineno}: only top-dimensional (k = dim) simplices may be listed"
                    )
                tops.append(verts)
            elif key == "length":
                a, b = int(parts[1]), int(parts[2])
                if a == b:
                    raise ParseError(f"line {lineno}: degenerate edge ({a},{b})")
                val = float(parts[3])
                if not val > 0:
                    raise ParseError(f"line {lineno}: edge length must be positive")
                lengths[(min(a, b), max(a, b))] = val
            elif key == "orient":
                s = int(parts[1])
                sign = int(parts[2])
                if sign not in (-1, 1):
                    raise ParseError(f"line {lineno}: orient sign must be +-1")
                orients[s] = sign
            else:
                raise ParseError(f"line {lineno}: unknown key {key!r}")
        except ParseError:
            raise
        except (IndexError, ValueError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if dim is None:
        raise ParseError("missing 'dim' line")
    if curvature is None:
        raise ParseError("missing 'curvature' line")
    if not tops:
        raise ParseError("no simplices listed")

    orientation = None
    if orients:
        if set(orients) != set(range(len(tops))):
            raise ParseError("orient lines must cover simplices 0..#top-1 exactly")
        orientation = [orients[i] for i in range(len(tops))]
    K = OrientedComplex(dim, tops, orientation=orientation)

    # every edge of the generated closure needs a length; extra lengths are errors
    edge_set = set(K.labels[1])
    missing = edge_set - set(lengths)
    if missing:
        raise ClosureViolation(f"missing length for edges {sorted(missing)[:5]}")
    extra = set(lengths) - edge_set
    if extra:
        raise ParseError(f"length given for non-edges {sorted(extra)[:5]}")

    metric = MetricData(curvature, lengths)
    validate_complex(K)

    from .geometry import realize_top  # deferred: geometry depends on this module

    for t in K.simplices[dim]:
        realize_top(K, metric, t)  # raises MetricUnrealizable
    return K, metric


def dump_complex(K: OrientedComplex, metric: MetricData) -> str:
    """Serialize in the same format load_complex reads.

    Quotient complexes with repeated vertex sets cannot be expressed in the
    vertex-tuple file format and are rejected.
    """
    if not K.is_simplicial:
        raise ParseError(
            "complex has cells not determined by their vertex sets; "
            "the file format cannot express it"
        )
    out = [f"dim {K.dimension}", f"curvature {metric.curvature}"]
    for t in K.simplices[K.dimension]:
        out.append("simplex " + str(K.dimension) + " " + " ".join(map(str, sorted(t))))
    for e in sorted(tuple(sorted(v)) for v in K.simplices[1]):
        out.append(f"length {e[0]} {e[1]} {metric.length(e[0], e[1]):.17g}")
    return "\n".join(out) + "\n"
