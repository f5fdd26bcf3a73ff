"""Chain and cochain norms, dual norms, and comparison-constant reports.

Three combinatorial norms (l1, l2, linf of the coefficient vector) apply to
chains and cochains alike.  The geometric l2 norm comes from the Whitney
mass matrices, its dual norm on chains has the closed form sqrt(a^T M^-1 a)
through the integration pairing, and the sup norm of a Whitney form is
sampled at quadrature nodes.  `compare_constants` measures the empirical
constants relating these norms on a fixed complex.
"""

import math
from dataclasses import dataclass

import numpy as np

from .complexes import Chain, Cochain, MetricData, OrientedComplex, gromov_norm
from .errors import DegreeMismatch
from .geometry import complex_volume, realize_top
from .quadrature import QuadratureRule, default_rule
from .whitney import WhitneyStructure, _eval_chart, _wedge_inner

__all__ = [
    "NormReport", "gromov_norm", "euclidean_norm", "max_norm", "whitney_l2",
    "whitney_linf", "dual_l2", "sample_vector", "compare_constants",
]


def _coeffs(x) -> np.ndarray:
    if isinstance(x, (Chain, Cochain)):
        return np.asarray(x.values)
    return np.asarray(x)


def euclidean_norm(x) -> float:
    """l2 norm of the coefficient vector."""
    v = _coeffs(x)
    return float(math.sqrt(sum(c * c for c in v))) if v.dtype == object \
        else float(np.linalg.norm(v))


def max_norm(x) -> float:
    """linf norm of the coefficient vector."""
    v = _coeffs(x)
    if len(v) == 0:
        return 0.0
    return float(max(abs(c) for c in v)) if v.dtype == object \
        else float(np.max(np.abs(v)))


def whitney_l2(W: WhitneyStructure, f: Cochain) -> float:
    """sqrt(f^T M_k f), the L2 norm of the Whitney form of f."""
    if not 0 <= f.degree <= W.K.dimension:
        raise DegreeMismatch(f"no mass matrix in degree {f.degree}")
    return W.norm(f)


def whitney_linf(K: OrientedComplex, metric: MetricData, f: Cochain,
                 rule: QuadratureRule = None) -> float:
    """Largest pointwise covector norm of W(f) over all quadrature nodes.

    The true essential supremum of a piecewise polynomial form is not
    computed exactly; the sampled maximum is a lower bound, and inequalities
    involving it should be evaluated with the same rule on both sides.
    """
    n = K.dimension
    q = f.degree
    if rule is None:
        rule = default_rule(n, 4)
    if np.all(np.asarray(f.values, dtype=float) == 0.0):
        return 0.0
    from itertools import combinations
    comps = list(combinations(range(n), q))
    best = 0.0
    for t in range(K.n_simplices(n)):
        sigma = realize_top(K, metric, K.simplices[n][t])
        _, g = sigma.metric_at(rule.nodes)
        ginv = np.linalg.inv(g)
        vals = np.array([_eval_chart(K, f, t, b) for b in rule.nodes])
        sq = np.zeros(len(rule.nodes))
        for a, S in enumerate(comps):
            for c, T in enumerate(comps):
                sq += vals[:, a] * vals[:, c] * _wedge_inner(ginv, S, T)
        best = max(best, float(np.max(sq)))
    return math.sqrt(max(best, 0.0))


def dual_l2(W: WhitneyStructure, a: Chain):
    """Dual norm sup{ integral of W(f) over a : ||f||_2 = 1 } and its maximizer.

    By the integration pairing the functional is f -> f(a), so the dual of
    the M-norm is sqrt(a^T M^-1 a), attained at f* = M^-1 a normalized.
    """
    if not 0 <= a.degree <= W.K.dimension:
        raise DegreeMismatch(f"no mass matrix in degree {a.degree}")
    vals = np.asarray(a.values, dtype=float)
    if not np.any(vals):
        return 0.0, Cochain(a.degree, np.zeros_like(vals))
    y = W.solve_mass(a.degree, vals)
    nrm = math.sqrt(max(float(vals @ y), 0.0))
    return nrm, Cochain(a.degree, y / nrm)


@dataclass
class NormReport:
    """Empirical comparison constant between two norms on one complex."""

    complex_id: str
    norm_pair: str
    samples: int
    max_ratio: float
    constant: float
    seed: int

    def row(self):
        return (self.complex_id, self.norm_pair, self.samples,
                self.max_ratio, self.constant, self.seed)


def sample_vector(size: int, seed: int, index: int) -> np.ndarray:
    """Deterministic sample: basis vectors first, then seeded Gaussians.

    Each index has its own generator, so batches of any size or thread
    layout produce the same vectors.
    """
    if index < size:
        e = np.zeros(size)
        e[index] = 1.0
        return e
    return np.random.default_rng((seed, index)).standard_normal(size)


def compare_constants(K: OrientedComplex, W: WhitneyStructure, samples: int = 200,
                      seed: int = 0, degree: int = 1, complex_id: str = "K",
                      vectors=None) -> list:
    """Measure the constants tying the combinatorial norms to the L2 pair.

    Reports, over the sample set (all coefficient basis vectors plus seeded
    random vectors, or an explicit list):
      - B_cochain: max ||f||_G / (sqrt(vol) ||f||_2),
      - B_chain:   max ||a||_G / (sqrt(vol) ||a||_2*),
      - D:         max ||f||_2 / ||f||_G.
    """
    nk = K.n_simplices(degree)
    vol = complex_volume(K, W.metric, W.rule)
    if vectors is None:
        count = max(samples, nk)
        vectors = [sample_vector(nk, seed, i) for i in range(count)]
    ratios_b_cochain, ratios_b_chain, ratios_d = [], [], []
    for v in vectors:
        f = Cochain(degree, v)
        a = Chain(degree, v)
        l1 = gromov_norm(f)
        l2 = whitney_l2(W, f)
        dual, _ = dual_l2(W, a)
        ratios_b_cochain.append(l1 / l2)
        ratios_b_chain.append(l1 / dual)
        ratios_d.append(l2 / l1)
    out = []
    for name, ratios, normalize in (
        ("gromov_vs_whitney_l2", ratios_b_cochain, True),
        ("gromov_vs_dual_l2", ratios_b_chain, True),
        ("whitney_l2_vs_gromov", ratios_d, False),
    ):
        mx = float(np.max(ratios))
        if not math.isfinite(mx) or mx <= 0:
            raise DegreeMismatch(f"non-finite comparison ratio in {name}")
        const = mx / math.sqrt(vol) if normalize else mx
        out.append(NormReport(complex_id, name, len(vectors), mx, const, seed))
    return out
