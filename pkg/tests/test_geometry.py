"""Simplex realization in the three model spaces, meshes, and net predicates."""

import math

import numpy as np
import pytest

from hodgefill.errors import (DegenerateSimplex, MetricUnrealizable,
                              PointNotInSimplex)
from hodgefill.geometry import (GEpsReport, boundary_tetrahedron, check_G_eps,
                                complex_volume, net_predicates,
                                realize_simplex, realized_lengths, realize_top,
                                simplex_volume, single_simplex,
                                torus_mesh, triangle_complex)
from hodgefill.quadrature import default_rule


def length_matrix(pairs, k):
    L = np.zeros((k + 1, k + 1))
    for (i, j), v in pairs.items():
        L[i, j] = L[j, i] = v
    return L


def test_flat_right_triangle_area():
    L = length_matrix({(0, 1): 3.0, (0, 2): 4.0, (1, 2): 5.0}, 2)
    sig = realize_simplex(L, 0)
    assert np.isclose(simplex_volume(sig), 6.0, rtol=1e-12)


def test_realized_lengths_round_trip():
    rng = np.random.default_rng(7)
    for kappa in (0, -1, 1):
        scale = 0.6 if kappa == 1 else 1.0
        base = np.array([[0.0, 1.0, 1.1], [1.0, 0.0, 0.9], [1.1, 0.9, 0.0]])
        L = base * scale
        sig = realize_simplex(L, kappa)
        assert np.allclose(realized_lengths(sig), L, atol=1e-10)


def test_flat_regular_tetrahedron_volume():
    L = np.ones((4, 4)) - np.eye(4)
    sig = realize_simplex(L, 0)
    assert np.isclose(simplex_volume(sig), math.sqrt(2.0) / 12.0, rtol=1e-10)


def hyperbolic_equilateral_area(ell):
    ## Gauss-Bonnet: area = pi - 3 alpha with alpha from the law of cosines
    alpha = math.acos((math.cosh(ell) ** 2 - math.cosh(ell))
                      / math.sinh(ell) ** 2)
    return math.pi - 3.0 * alpha


def spherical_equilateral_area(ell):
    alpha = math.acos((math.cos(ell) - math.cos(ell) ** 2)
                      / math.sin(ell) ** 2)
    return 3.0 * alpha - math.pi


@pytest.mark.parametrize("ell,rtol", [(0.5, 2e-5), (1.0, 1e-3), (2.0, 3e-2)])
def test_hyperbolic_triangle_area_gauss_bonnet(ell, rtol):
    L = length_matrix({(0, 1): ell, (0, 2): ell, (1, 2): ell}, 2)
    sig = realize_simplex(L, -1)
    assert np.isclose(simplex_volume(sig), hyperbolic_equilateral_area(ell),
                      rtol=rtol)


def test_hyperbolic_area_quadrature_converges():
    L = length_matrix({(0, 1): 2.0, (0, 2): 2.0, (1, 2): 2.0}, 2)
    sig = realize_simplex(L, -1)
    want = hyperbolic_equilateral_area(2.0)
    errs = [abs(simplex_volume(sig, default_rule(2, order)) - want) / want
            for order in (4, 8, 12, 16)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 2e-6


@pytest.mark.parametrize("ell,rtol", [(0.5, 2e-5), (1.0, 2e-3)])
def test_spherical_triangle_area_gauss_bonnet(ell, rtol):
    L = length_matrix({(0, 1): ell, (0, 2): ell, (1, 2): ell}, 2)
    sig = realize_simplex(L, 1)
    assert np.isclose(simplex_volume(sig), spherical_equilateral_area(ell),
                      rtol=rtol)


def test_triangle_inequality_violation_is_rejected():
    L = length_matrix({(0, 1): 1.0, (0, 2): 1.0, (1, 2): 3.0}, 2)
    with pytest.raises(MetricUnrealizable):
        realize_simplex(L, 0)


def test_degenerate_flat_simplex_is_rejected():
    ## collinear: 1 + 1 = 2 exactly
    L = length_matrix({(0, 1): 1.0, (0, 2): 2.0, (1, 2): 1.0}, 2)
    with pytest.raises((MetricUnrealizable, DegenerateSimplex)):
        sig = realize_simplex(L, 0)
        simplex_volume(sig)


def test_oversized_spherical_simplex_is_rejected():
    L = length_matrix({(0, 1): 3.0, (0, 2): 3.0, (1, 2): 3.0}, 2)
    with pytest.raises(MetricUnrealizable):
        realize_simplex(L, 1)


def test_barycentric_point_validation():
    L = length_matrix({(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}, 2)
    sig = realize_simplex(L, 0)
    from hodgefill.geometry import barycentric_point
    p, g = barycentric_point(sig, np.array([1.0, 1.0, 1.0]) / 3.0)
    assert g.shape == (2, 2)
    with pytest.raises(PointNotInSimplex):
        barycentric_point(sig, np.array([0.7, 0.7, -0.4]))
    with pytest.raises(PointNotInSimplex):
        barycentric_point(sig, np.array([0.5, 0.2]))


def test_torus_mesh_counts_2d(torus4):
    K, metric = torus4
    assert K.f_vector == (16, 48, 32)
    assert K.grid == (4, 2, 0.25)
    assert K.is_closed()


def test_torus_mesh_counts_3d(torus4_3d):
    K, metric = torus4_3d
    assert K.f_vector == (64, 448, 768, 384)
    assert K.is_closed()


def test_torus_mesh_small_quotient():
    K, metric = torus_mesh(2, 2, 0.5)
    assert K.f_vector == (4, 12, 8)
    assert K.euler_characteristic() == 0


def test_unit_torus_volume():
    for n in (2, 4, 8):
        K, metric = torus_mesh(n, 2, 1.0 / n)
        assert np.isclose(complex_volume(K, metric), 1.0, rtol=1e-10)
    K, metric = torus_mesh(4, 2, 0.5)
    assert np.isclose(complex_volume(K, metric), 4.0, rtol=1e-10)


def test_torus_mesh_rejects_bad_parameters():
    with pytest.raises(Exception):
        torus_mesh(1, 2, 1.0)
    with pytest.raises(Exception):
        torus_mesh(4, 4, 1.0)


def test_bundled_constructors():
    K, metric = triangle_complex(3.0, 4.0, 5.0)
    assert K.f_vector == (3, 3, 1)
    K, metric = boundary_tetrahedron()
    assert K.f_vector == (4, 6, 4)
    assert K.is_closed()
    K, metric = single_simplex(3)
    assert K.f_vector == (4, 6, 4, 1)


def test_realize_top_matches_metric(torus4):
    K, metric = torus4
    sig = realize_top(K, metric, K.simplices[2][0])
    got = realized_lengths(sig)
    ## axis edges have length 0.25, the diagonal sqrt(2)/4
    vals = sorted(got[np.triu_indices(3, 1)])
    assert np.allclose(vals[:2], 0.25, atol=1e-12)
    assert np.isclose(vals[2], 0.25 * math.sqrt(2.0), rtol=1e-12)


def test_check_G_eps_window(torus4):
    K, metric = torus4
    ## edge lengths are 0.25 and 0.25*sqrt(2); the window is [2 eps0/5, 2 eps0]
    rep = check_G_eps(K, metric, 1.5)
    assert isinstance(rep, GEpsReport)
    assert rep.epsilon0 == pytest.approx(0.15)
    assert rep.lower == pytest.approx(0.06)
    assert rep.upper == pytest.approx(0.30)
    assert len(rep.violations) == 16
    assert not rep.passed
    rep = check_G_eps(K, metric, 2.0)
    assert rep.passed
    assert len(rep.violations) == 0
    assert any("not checked" in note for note in rep.notes)


def test_net_predicates_flags_separation_and_cover():
    pts = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]])
    probes = np.array([[0.25, 0.25], [0.1, 0.4]])
    ## pairwise minimum is 0.5; every probe is within sqrt(2)/4 of the net
    dense, separated = net_predicates(pts, 0.4, 0.5, probes)
    assert dense and separated
    dense, separated = net_predicates(pts, 1.0, 0.6, probes)
    assert dense and not separated
    dense, separated = net_predicates(pts, 0.4, 0.2, probes)
    assert separated and not dense
    from hodgefill.errors import EmptyPointSet
    with pytest.raises(EmptyPointSet):
        net_predicates([], 0.4, 0.2, probes)
