"""Linear programming in equality form: minimize c.x with Ax = b, x >= 0.

Two in-house solvers share one two-phase primal simplex with Bland's rule
(smallest eligible index enters and leaves), which cannot cycle and makes
runs deterministic: an exact solver over Fraction entries for small
instances, and a float tableau for medium ones.  Instances above the float
tableau cutoff go to scipy's HiGHS backend, which also returns the equality
duals.  All three report the dual vector so callers can hand out optimality
certificates.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.optimize as opt
import scipy.sparse as sp

from .errors import SolverSizeExceeded, UnboundedProgram

__all__ = ["LPResult", "solve_equality_lp", "RATIONAL_VARIABLE_LIMIT"]

RATIONAL_VARIABLE_LIMIT = 200
_FLOAT_TABLEAU_LIMIT = 600
_EPS = 1e-9


@dataclass
class LPResult:
    status: str            # optimal | infeasible | unbounded
    x: object              # primal solution (list of Fraction, or ndarray)
    objective: object
    dual: object           # y with A^T y <= c at optimality (None if not optimal)
    mode: str
    iterations: int


def _to_fraction_matrix(A):
    return [[Fraction(x) for x in row] for row in A]


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for r in range(len(T)):
        if r != row and T[r][col] != 0:
            f = T[r][col]
            T[r] = [a - f * b for a, b in zip(T[r], T[row])]
    basis[row] = col


def _simplex_phase(T, basis, cost, ncols, limit):
    """Bland-rule primal simplex on a tableau with rows [A | b].

    `cost` is the full cost row (length ncols).  Returns the iteration
    count; raises UnboundedProgram when a column prices out negative with
    no positive entries.
    """
    m = len(T)
    zero = cost[0] * 0
    it = 0
    while True:
        it += 1
        if it > limit:
            raise UnboundedProgram("simplex iteration limit exceeded")
        # reduced costs via the basis multipliers
        y = [cost[basis[r]] for r in range(m)]
        enter = -1
        for j in range(ncols):
            if j in basis:
                continue
            red = cost[j] - sum(y[r] * T[r][j] for r in range(m))
            if red < zero:
                enter = j
                break
        if enter < 0:
            return it
        leave = -1
        best = None
        for r in range(m):
            if T[r][enter] > zero:
                ratio = T[r][ncols] / T[r][enter]
                if best is None or ratio < best or \
                        (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            raise UnboundedProgram("objective unbounded below")
        _pivot(T, basis, leave, enter)


def _solve_rational(A, b, c):
    m = len(A)
    n = len(A[0]) if m else 0
    if n > RATIONAL_VARIABLE_LIMIT:
        raise SolverSizeExceeded(
            f"rational mode handles up to {RATIONAL_VARIABLE_LIMIT} variables, got {n}"
        )
    Af = _to_fraction_matrix(A)
    bf = [Fraction(x) for x in b]
    cf = [Fraction(x) for x in c]
    for r in range(m):
        if bf[r] < 0:
            Af[r] = [-v for v in Af[r]]
            bf[r] = -bf[r]
    # phase 1 tableau with artificial columns
    T = [Af[r] + [Fraction(int(r == s)) for s in range(m)] + [bf[r]] for r in range(m)]
    basis = [n + r for r in range(m)]
    cost1 = [Fraction(0)] * n + [Fraction(1)] * m
    limit = 50000
    it1 = _simplex_phase(T, basis, cost1, n + m, limit)
    resid = sum(T[r][n + m] for r in range(m) if basis[r] >= n)
    if resid > 0:
        return LPResult("infeasible", None, None, None, "rational", it1)
    # Force artificials out of the basis; drop redundant rows.  An artificial
    # that re-entered during phase 1 can sit in a tableau row other than its
    # origin, so the equation it certifies as redundant is basis[r] - n, not
    # the tableau row r being deleted.
    keep = []
    dropped = set()
    for r in range(m):
        if basis[r] >= n:
            piv = next((j for j in range(n) if T[r][j] != 0), -1)
            if piv < 0:
                dropped.add(basis[r] - n)
                continue
            _pivot(T, basis, r, piv)
        keep.append(r)
    keep_eq = [r for r in range(m) if r not in dropped]
    T = [[T[r][j] for j in range(n)] + [T[r][n + m]] for r in keep]
    basis = [basis[r] for r in keep]
    it2 = _simplex_phase(T, basis, cf, n, limit)
    x = [Fraction(0)] * n
    for r, col in enumerate(basis):
        x[col] = T[r][n]
    obj = sum(cf[j] * x[j] for j in range(n))
    # Equality duals: recover y from scratch as c_B B^{-1}, where B is the
    # basis submatrix of the original (sign-fixed) A restricted to the kept
    # equations.  Dropped equations are dependent on the kept ones, so a
    # zero multiplier there preserves dual feasibility and b.y objectives.
    mm = len(basis)
    B = [[Af[keep_eq[r]][basis[s]] for s in range(mm)] for r in range(mm)]
    cB = [cf[col] for col in basis]
    y_kept = _solve_fraction_system_transposed(B, cB)
    y = [Fraction(0)] * m
    for idx, r in enumerate(keep_eq):
        y[r] = y_kept[idx]
    # undo the earlier row sign flips
    for r in range(m):
        if Fraction(b[r]) < 0:
            y[r] = -y[r]
    return LPResult("optimal", x, obj, y, "rational", it1 + it2)


def _solve_fraction_system_transposed(B, cB):
    """Solve y^T B = cB^T (i.e. B^T y = cB) exactly by Gaussian elimination."""
    mm = len(B)
    M = [[B[r][s] for r in range(mm)] + [cB[s]] for s in range(mm)]
    for col in range(mm):
        piv = next(r for r in range(col, mm) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(mm):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * bv for a, bv in zip(M[r], M[col])]
    return [M[r][mm] for r in range(mm)]


def _simplex_phase_float(T, basis, cost, ncols, limit):
    m = T.shape[0]
    it = 0
    inb = np.zeros(ncols, dtype=bool)
    inb[basis] = True
    while True:
        it += 1
        if it > limit:
            raise UnboundedProgram("simplex iteration limit exceeded")
        y = cost[basis]
        red = cost[:ncols] - y @ T[:, :ncols]
        red[inb] = 0.0
        cand = np.flatnonzero(red < -_EPS)
        if cand.size == 0:
            return it
        enter = int(cand[0])
        colv = T[:, enter]
        rows = np.flatnonzero(colv > _EPS)
        if rows.size == 0:
            raise UnboundedProgram("objective unbounded below")
        ratios = T[rows, ncols] / colv[rows]
        best = ratios.min()
        tied = rows[ratios <= best + _EPS * (1.0 + abs(best))]
        leave = int(tied[np.argmin(np.asarray(basis)[tied])])
        inb[basis[leave]] = False
        inb[enter] = True
        piv = T[leave, enter]
        T[leave] /= piv
        fcol = T[:, enter].copy()
        fcol[leave] = 0.0
        T -= np.outer(fcol, T[leave])
        basis[leave] = enter


def _solve_float_tableau(A, b, c):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    sgn = np.where(b < 0, -1.0, 1.0)
    A = A * sgn[:, None]
    b = b * sgn
    T = np.hstack([A, np.eye(m), b[:, None]])
    basis = list(range(n, n + m))
    cost1 = np.concatenate([np.zeros(n), np.ones(m), [0.0]])
    limit = 100000
    it1 = _simplex_phase_float(T, basis, cost1, n + m, limit)
    resid = sum(T[r, n + m] for r in range(m) if basis[r] >= n)
    if resid > 1e-8 * (1.0 + np.abs(b).max(initial=0.0)):
        return LPResult("infeasible", None, None, None, "float", it1)
    # Drive artificials out of the basis; drop redundant rows.  A basic
    # artificial can sit in a tableau row other than its origin after
    # re-entering during phase 1, so the redundant equation is basis[r] - n,
    # not the tableau row r being deleted.
    keep = []
    dropped = set()
    for r in range(m):
        if basis[r] >= n:
            js = np.flatnonzero(np.abs(T[r, :n]) > _EPS)
            inbasis = set(basis)
            js = [j for j in js if j not in inbasis]
            if not js:
                dropped.add(basis[r] - n)
                continue
            piv = T[r, js[0]]
            T[r] /= piv
            fcol = T[:, js[0]].copy()
            fcol[r] = 0.0
            T -= np.outer(fcol, T[r])
            basis[r] = js[0]
        keep.append(r)
    keep_eq = [r for r in range(m) if r not in dropped]
    T2 = np.hstack([T[keep][:, :n], T[keep][:, n + m:n + m + 1]])
    basis2 = [basis[r] for r in keep]
    cost2 = np.concatenate([c, [0.0]])
    it2 = _simplex_phase_float(T2, basis2, cost2, n, limit)
    x = np.zeros(n)
    for r, col in enumerate(basis2):
        x[col] = T2[r, n]
    obj = float(c @ x)
    # Duals come from the basis submatrix on the kept equations; the dropped
    # ones are dependent, so a zero multiplier there keeps the certificate
    # feasible with the same b.y value.
    Bmat = np.asarray(A, dtype=float)[np.ix_(keep_eq, basis2)]
    y_kept = np.linalg.solve(Bmat.T, c[basis2])
    y = np.zeros(m)
    y[keep_eq] = y_kept
    y *= sgn
    return LPResult("optimal", x, obj, y, "float", it1 + it2)


def _solve_highs(A, b, c):
    res = opt.linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 2:
        return LPResult("infeasible", None, None, None, "highs", int(res.nit))
    if res.status == 3:
        raise UnboundedProgram("objective unbounded below")
    if not res.success:
        raise UnboundedProgram(f"LP solver failed: {res.message}")
    return LPResult("optimal", res.x, float(res.fun), -np.asarray(res.eqlin.marginals),
                    "highs", int(res.nit))


def solve_equality_lp(A, b, c, mode: str = "float") -> LPResult:
    """Minimize c.x subject to Ax = b, x >= 0.

    mode "rational" runs the exact Fraction simplex (inputs must be exactly
    representable; size capped); mode "float" uses the in-house tableau up
    to a column cutoff and HiGHS beyond it.  The returned dual y satisfies
    A^T y <= c componentwise and b.y = c.x at optimality.
    """
    if mode == "rational":
        return _solve_rational(A, b, c)
    if mode != "float":
        raise SolverSizeExceeded(f"unknown LP mode {mode!r}")
    if sp.issparse(A):
        if A.shape[1] <= _FLOAT_TABLEAU_LIMIT:
            return _solve_float_tableau(A.toarray(), b, c)
        return _solve_highs(A, b, c)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        A = A.reshape(len(b), -1)
    if A.shape[1] <= _FLOAT_TABLEAU_LIMIT:
        return _solve_float_tableau(A, b, c)
    return _solve_highs(A, b, c)
