import numpy as np
import pytest

from netsecgame.graph import Graph, distance, path_graph, random_connected_graph
from netsecgame.lti import (
    ZeroSet,
    build_scenario,
    channel_table,
    characteristic_polynomial,
    check_no_closed_positive_real_zeros,
    closed_rhp_zeros,
    cofactor_numerator,
    invariant_zeros,
    numerator_polynomial,
    relative_degree,
)
from netsecgame.polynomial import Polynomial
from sample import random_graphs

P3 = path_graph(3)


def test_char_poly_p3():
    q = characteristic_polynomial(P3.laplacian)
    assert q.coeffs == (0, 3, 4, 1)
    eig = np.linalg.eigvalsh(P3.laplacian_float())
    assert np.allclose(np.sort(-q.roots().real), eig, atol=1e-12)


def test_char_poly_single_edge():
    assert characteristic_polynomial(path_graph(2).laplacian).coeffs == (0, 2, 1)


def test_numerators_p3():
    lap = P3.laplacian
    assert numerator_polynomial(lap, 3, 1) == Polynomial([1])
    assert numerator_polynomial(lap, 2, 1) == Polynomial([1, 1])
    # principal minor with vertex 1 removed: det [[s+2, -1], [-1, s+1]]
    assert numerator_polynomial(lap, 1, 1) == Polynomial([1, 3, 1])


def test_relative_degree_p3():
    lap = P3.laplacian
    assert relative_degree(lap, 2, 1) == 2
    assert relative_degree(lap, 3, 1) == 3
    assert relative_degree(lap, 2, 2) == 1


def test_zero_sets_p3():
    z = invariant_zeros(build_scenario(P3, 3, 1, 2), "monitor")
    assert np.allclose(z.finite_zeros, [-1]) and z.infinite_zero_degree == 2
    z = invariant_zeros(build_scenario(P3, 2, 1, 3), "monitor")
    assert z.finite_zeros == () and z.infinite_zero_degree == 3
    z = invariant_zeros(build_scenario(path_graph(2), 2, 1, 1), "monitor")
    assert np.allclose(z.finite_zeros, [-1]) and z.infinite_zero_degree == 1


def test_invariant_zeros_bad_channel():
    with pytest.raises(ValueError):
        invariant_zeros(build_scenario(P3, 3, 1, 2), "other")


def test_closed_positive_real_check():
    assert check_no_closed_positive_real_zeros(ZeroSet((-1 + 0j,), 1))
    assert check_no_closed_positive_real_zeros(ZeroSet((), 3))
    assert not check_no_closed_positive_real_zeros(ZeroSet((0.5 + 0j,), 1))
    assert closed_rhp_zeros(ZeroSet((1j, -1j, -2 + 0j), 1)) == [1j, -1j]


def test_cofactor_oracle_matches_faddeev_leverrier():
    rng = np.random.default_rng(11)
    for _ in range(15):
        g = random_connected_graph(int(rng.integers(2, 9)), 0.4, rng)
        tab = channel_table(g)
        for u in g.vertices:
            for a in g.vertices:
                assert cofactor_numerator(g.laplacian, u, a) == tab.numerator(u, a)


def test_channel_invariants_on_sample():
    for g in random_graphs(200, n_min=2, n_max=12, seed=3):
        tab = channel_table(g)
        q = tab.char_poly
        assert q.degree == g.n and q.leading == 1 and q(0) == 0
        for u in g.vertices:
            for a in g.vertices:
                r = tab.relative_degree(u, a)
                assert r == distance(g, u, a) + 1
                assert tab.numerator(u, a).degree + r == g.n


def test_adjugate_trace_identity():
    rng = np.random.default_rng(5)
    for g in random_graphs(30, seed=5):
        tab = channel_table(g)
        dq = tab.char_poly.derivative()
        minors = sum((tab.numerator(u, u) for u in g.vertices), Polynomial.zero())
        for s in rng.normal(size=4) + 1j * rng.normal(size=4):
            assert abs(dq(s) - minors(s)) <= 1e-6 * max(1.0, abs(dq(s)))


def test_numerators_match_resolvent():
    rng = np.random.default_rng(9)
    for g in random_graphs(20, seed=9):
        tab = channel_table(g)
        lap = g.laplacian_float()
        for s in rng.normal(size=10) + 1j * rng.normal(size=10):
            inv = np.linalg.inv(s * np.eye(g.n) + lap) * complex(tab.char_poly(s))
            for u in g.vertices:
                for a in g.vertices:
                    want = inv[u - 1, a - 1]
                    got = complex(tab.numerator(u, a)(s))
                    assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_weighted_graph_float_path():
    g = Graph(3, ((1, 2), (2, 3)), (2.0, 0.5))
    sc = build_scenario(g, 3, 1, 2)
    assert sc.r_target == 3 and sc.r_monitor == 2
    # P_21 = 2 (s + 0.5), P_31 = 2 * 0.5
    assert np.allclose(sc.numerator_monitor.as_array(), [1.0, 2.0])
    assert np.allclose(sc.numerator_target.as_array(), [1.0])


def test_roles_validated():
    with pytest.raises(ValueError):
        build_scenario(P3, 1, 1, 2)
    with pytest.raises(ValueError):
        build_scenario(P3, 1, 2, 1)
    assert build_scenario(P3, 1, 2, 1, allow_monitor_at_target=True).monitor == 1
