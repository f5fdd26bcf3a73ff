"""Shared linear-algebra kernels: exact integer rank, kernel bases, SPD solves.

Rank computations over the rationals are done exactly via Gaussian
elimination over GF(p) for a prime p just under 2^20: all products stay
below 2^40 and blocked matmul updates with inner dimension <= 8192 stay
below 2^53, so float64 arithmetic is exact throughout.  A second prime is
used as a cross-check; boundary matrices have no interesting torsion at
these sizes, and agreement of two primes certifies the rational rank.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import scipy.linalg as la

from .errors import NoPositiveEigenvalue, SingularMass

_PRIMES = (1_048_573, 1_048_571)
_DENSE_LIMIT = 8192


def rank_gfp(A, p=_PRIMES[0], panel=128) -> int:
    """Exact rank of an integer matrix over GF(p), blocked right-looking LU."""
    if sp.issparse(A):
        A = A.toarray()
    M = np.ascontiguousarray(np.asarray(A, dtype=np.float64)) % p
    m, n = M.shape
    if m == 0 or n == 0:
        return 0
    if max(m, n) > _DENSE_LIMIT:
        raise ValueError("matrix too large for exact dense rank")
    r = 0
    c0 = 0
    while c0 < n and r < m:
        c1 = min(c0 + panel, n)
        Lbuf = np.zeros((m - r, c1 - c0))
        t = 0
        for c in range(c0, c1):
            col = M[r + t:, c]
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            piv = r + t + nz[0]
            if piv != r + t:
                M[[r + t, piv]] = M[[piv, r + t]]
                Lbuf[[t, piv - r]] = Lbuf[[piv - r, t]]
            inv = pow(int(M[r + t, c]), p - 2, p)
            M[r + t, c0:c1] = (M[r + t, c0:c1] * inv) % p
            Lbuf[t, t] = inv
            ml = M[r + t + 1:, c].copy()
            if ml.any():
                M[r + t + 1:, c0:c1] = (M[r + t + 1:, c0:c1] - np.outer(ml, M[r + t, c0:c1])) % p
            Lbuf[t + 1:, t] = ml
            t += 1
            if r + t == m:
                break
        if t and c1 < n:
            W = M[r:r + t, c1:]
            for i in range(t):  # replay recorded row ops on the trailing block
                W[i] = (W[i] * Lbuf[i, i]) % p
                if i + 1 < t:
                    ml = Lbuf[i + 1:t, i]
                    if ml.any():
                        W[i + 1:t] = (W[i + 1:t] - np.outer(ml, W[i])) % p
            L21 = Lbuf[t:, :t]
            if L21.size and W.size:
                M[r + t:, c1:] = (M[r + t:, c1:] - L21 @ W) % p
        r += t
        c0 = c1
    return r


def integer_rank(A) -> int:
    """Rank over the rationals of an integer matrix, certified by two primes."""
    r0 = rank_gfp(A, p=_PRIMES[0])
    r1 = rank_gfp(A, p=_PRIMES[1])
    if r0 != r1:  # rank over GF(p) can only undershoot; take the larger
        return max(r0, r1)
    return r0


def float_rank(A, rel_tol=1e-8) -> int:
    """Rank by singular values, zeros below rel_tol times the largest."""
    if sp.issparse(A):
        A = A.toarray()
    s = la.svdvals(np.asarray(A, dtype=float))
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def betti_numbers(K) -> tuple:
    """Betti numbers over Q from exact integer boundary ranks."""
    n = K.dimension
    ranks = [0] + [integer_rank(K.boundary_matrix(k)) for k in range(1, n + 1)] + [0]
    return tuple(K.n_simplices(k) - ranks[k] - ranks[k + 1] for k in range(n + 1))


# -- solvers ------------------------------------------------------------------

def factor_spd(M):
    """Factorization handle for a sparse SPD matrix; returns a solve callable."""
    M = sp.csc_matrix(M)
    try:
        lu = spla.splu(M, permc_spec="NATURAL", options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise SingularMass(str(exc)) from None
    return lu.solve


def pinned_graph_solve(L, rhs, pins):
    """Solve the singular SPD system L x = rhs with the given dofs pinned to 0.

    L must be symmetric PSD with kernel spanned by indicators of the
    connected pieces; `pins` holds one dof per piece.
    """
    L = sp.csr_matrix(L)
    nn = L.shape[0]
    keep = np.setdiff1d(np.arange(nn), np.asarray(pins, dtype=int))
    Lr = L[keep][:, keep].tocsc()
    solve = factor_spd(Lr)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim == 1:
        x = np.zeros(nn)
        x[keep] = solve(rhs[keep])
        return x
    x = np.zeros((nn, rhs.shape[1]))
    x[keep] = solve(rhs[keep])
    return x


def nullspace_psd(L, dim, size_threshold=2000, seed=1234):
    """Orthonormal basis of the kernel of a sparse symmetric PSD matrix.

    `dim` is the known kernel dimension (from exact rank arithmetic).  Dense
    eigendecomposition below the size threshold; above it, shift-invert
    Lanczos at a negative shift, which is deterministic for a fixed start
    vector.
    """
    nn = L.shape[0]
    if dim == 0:
        return np.zeros((nn, 0))
    if dim >= nn:
        return np.eye(nn)
    L = sp.csc_matrix(L).astype(float)
    if nn <= size_threshold:
        w, v = la.eigh(L.toarray())
        basis = v[:, :dim]
        if w[dim - 1] > 1e-6 * max(w[-1], 1.0):
            raise NoPositiveEigenvalue("kernel dimension does not match spectrum")
    else:
        scale = float(np.abs(L.diagonal()).mean()) or 1.0
        shift = 1e-3 * scale
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(nn)
        k = min(dim + 3, nn - 1)
        w, v = spla.eigsh(L, k=k, sigma=-shift, which="LM", v0=v0)
        order = np.argsort(w)
        basis = v[:, order[:dim]]
    q, _ = la.qr(basis, mode="economic")
    return _sign_canonical(q)


def _sign_canonical(q):
    """Flip column signs so the largest-magnitude entry is positive."""
    q = np.array(q)
    for j in range(q.shape[1]):
        i = int(np.argmax(np.abs(q[:, j])))
        if q[i, j] < 0:
            q[:, j] = -q[:, j]
    return q


def smallest_positive_pencil(S, M, kernel_dim, size_threshold=2000, seed=1234,
                             count=1, rel_tol=1e-8):
    """Smallest positive eigenvalues of the SPSD pencil (S, M), M SPD.

    `kernel_dim` is the exact dimension of ker(S) from integer ranks.  Dense
    path: Cholesky-reduce to a standard symmetric problem.  Iterative path
    (above `size_threshold` unknowns): shift-invert Lanczos with which='LA'
    at a small positive shift, which converges to the smallest eigenvalue
    exceeding the shift regardless of the kernel dimension.

    Returns (eigenvalues ascending, eigenvectors as columns).
    """
    nn = S.shape[0]
    if kernel_dim >= nn:
        raise NoPositiveEigenvalue("pencil has no positive spectrum")
    S = sp.csc_matrix(S).astype(float)
    M = sp.csc_matrix(M).astype(float)
    if nn <= size_threshold:
        Sd, Md = S.toarray(), M.toarray()
        try:
            C = la.cholesky(Md, lower=True)
        except la.LinAlgError as exc:
            raise SingularMass(str(exc)) from None
        Y = la.solve_triangular(C, Sd, lower=True)
        A = la.solve_triangular(C, Y.T, lower=True)
        A = 0.5 * (A + A.T)
        w, z = la.eigh(A)
        top = max(w[-1], 1.0)
        pos = np.nonzero(w > rel_tol * top)[0]
        if pos.size == 0:
            raise NoPositiveEigenvalue("pencil has no positive spectrum")
        if pos[0] != kernel_dim:
            raise NoPositiveEigenvalue(
                f"numerical kernel {pos[0]} disagrees with exact kernel {kernel_dim}"
            )
        take = pos[:count]
        vecs = la.solve_triangular(C.T, z[:, take], lower=False)
        return np.array(w[take]), vecs
    # iterative path: Lanczos-type (implicitly restarted, full reorthogonalization).
    # A shift-invert solve at sigma with which='LA' converges to the smallest
    # eigenvalues exceeding sigma, so the (possibly huge) kernel never enters.
    # The only failure mode is sigma landing above the true gap; each candidate
    # is therefore confirmed by re-solving at a strictly smaller shift until
    # the answer is stable or the shift falls below the zero threshold.
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(nn)
    diag_ratio = S.diagonal() / M.diagonal()
    lam_scale = float(diag_ratio.max()) or 1.0
    floor_shift = 0.1 * rel_tol * lam_scale

    def solve_at(shift):
        w, v = spla.eigsh(S, k=count, M=M, sigma=shift, which="LA", v0=v0,
                          maxiter=5000)
        order = np.argsort(w)
        return w[order], v[:, order]

    shift = 1e-6 * lam_scale
    w, v = solve_at(shift)
    for _ in range(40):
        if shift <= floor_shift:
            break
        lower = max(min(shift, w[0]) * 1e-3, floor_shift)
        w2, v2 = solve_at(lower)
        if w2[0] >= w[0] * (1 - 1e-8):
            break  # nothing smaller hides below the previous shift
        w, v, shift = w2, v2, lower
    if w[0] <= rel_tol * lam_scale:
        raise NoPositiveEigenvalue("no eigenvalue above the zero threshold")
    return w, v
