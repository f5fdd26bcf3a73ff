"""Simplex quadrature rules against the closed-form monomial integrals."""

import math
from itertools import combinations_with_replacement

import numpy as np
import pytest

from hodgefill.quadrature import (QuadratureRule, conical_rule, default_rule,
                                  reference_monomial_integral, symmetric_rule)


def monomial_integral_oracle(alpha):
    ## integral of prod x_i^a_i over the reference simplex is
    ## prod(a_i!) / (|a| + d)!  (Dirichlet integral)
    d = len(alpha)
    num = 1
    for a in alpha:
        num *= math.factorial(a)
    return num / math.factorial(sum(alpha) + d)


def test_reference_monomial_integral_matches_factorial_formula():
    ## the reference helper takes a full barycentric exponent tuple; with
    ## zero exponent on b_0 it reduces to a coordinate monomial integral
    for d in (1, 2, 3):
        for total in range(0, 5):
            for alpha in combinations_with_replacement(range(total + 1), d):
                if sum(alpha) != total:
                    continue
                assert np.isclose(reference_monomial_integral((0,) + alpha),
                                  monomial_integral_oracle(alpha),
                                  rtol=1e-13)
    ## symmetry in the barycentric exponents
    assert reference_monomial_integral((2, 0, 1)) == \
        reference_monomial_integral((0, 1, 2))
    assert np.isclose(reference_monomial_integral((1, 1)),
                      1.0 / 6.0, rtol=1e-15)


def test_weights_sum_to_simplex_volume():
    for d in (1, 2, 3):
        for order in (2, 4, 6):
            rule = default_rule(d, order)
            assert np.isclose(rule.weights.sum(), 1.0 / math.factorial(d),
                              rtol=1e-12)


def test_nodes_are_barycentric():
    for d in (1, 2, 3):
        rule = default_rule(d, 4)
        assert rule.nodes.shape[1] == d + 1
        assert np.all(rule.nodes >= -1e-14)
        assert np.allclose(rule.nodes.sum(axis=1), 1.0)


def _integrate_monomial(rule, alpha):
    ## nodes are barycentric; cartesian coordinates are nodes[:, 1:]
    x = rule.nodes[:, 1:]
    vals = np.ones(len(rule.weights))
    for i, a in enumerate(alpha):
        vals *= x[:, i] ** a
    return float(rule.weights @ vals)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_default_rule_is_exact_up_to_its_order(d):
    rule = default_rule(d, 4)
    for total in range(rule.order + 1):
        for alpha in combinations_with_replacement(range(total + 1), d):
            if sum(alpha) != total:
                continue
            got = _integrate_monomial(rule, alpha)
            want = monomial_integral_oracle(alpha)
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want)), alpha


def test_conical_rule_is_exact_for_polynomials():
    for d in (2, 3):
        rule = conical_rule(d, 3)
        for alpha in [(1,) * d, (2,) + (0,) * (d - 1), (2, 1) + (0,) * (d - 2)]:
            got = _integrate_monomial(rule, alpha)
            want = monomial_integral_oracle(alpha)
            assert np.isclose(got, want, rtol=1e-12)


def test_symmetric_rule_matches_conical_on_random_polynomials():
    rng = np.random.default_rng(42)
    for d in (2, 3):
        sym = symmetric_rule(d, 4)
        con = conical_rule(d, 4)
        for _ in range(5):
            exps = rng.integers(0, 3, size=(4, d))
            coefs = rng.normal(size=4)
            got_s = sum(c * _integrate_monomial(sym, tuple(e))
                        for c, e in zip(coefs, exps))
            got_c = sum(c * _integrate_monomial(con, tuple(e))
                        for c, e in zip(coefs, exps))
            want = sum(c * monomial_integral_oracle(tuple(e))
                       for c, e in zip(coefs, exps))
            assert np.isclose(got_s, want, rtol=1e-11)
            assert np.isclose(got_c, want, rtol=1e-11)


def test_higher_order_rules_have_more_nodes():
    n4 = len(default_rule(2, 4).weights)
    n8 = len(default_rule(2, 8).weights)
    assert n8 > n4
    assert default_rule(2, 8).order >= 8
