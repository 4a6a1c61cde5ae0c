import math

import pytest

import aqsp as A
from aqsp.baseline import linearize, linearized_core

from conftest import make_detour_graph, random_instance, seeds


def test_linearize_size_formulas_on_diamond(g4):
    lg = linearize(g4, 0, 3)
    assert lg.node_count == g4.arc_count + 2
    assert lg.edge_count == g4.quad_arc_count + g4.out_degree(0) + g4.in_degree(3)
    assert lg.edge_count == 2 + 2 + 2


def test_linearize_size_formulas_random():
    for seed in seeds(42, 25):
        g, s, t = random_instance(8, 0.5, seed)
        lg = linearize(g, s, t)
        assert lg.node_count == g.arc_count + 2
        assert lg.edge_count == g.quad_arc_count + g.out_degree(s) + g.in_degree(t)


def test_linearize_grid_internal_edges_match_quad_arc_count():
    g = A.gen_grid(A.random_elevation_grid(100, 100, 1.0, 0), 8, "turn")
    s, t = 0, g.node_count - 1
    lg = linearize(g, s, t)
    internal = lg.edge_count - g.out_degree(s) - g.in_degree(t)
    assert internal == 624_492


def test_linearize_single_arc_graph():
    g = A.build_graph(2, [(0, 1, 4.0)])
    lg = linearize(g, 0, 1)
    assert lg.node_count == 3
    assert lg.edge_count == 2  # S -> arc -> T
    # total S-T weight equals the arc cost
    s_edges = lg.to_node[lg.indptr[lg.source_index]:lg.indptr[lg.source_index + 1]]
    assert list(s_edges) == [0]
    assert A.solve_lin(g, 0, 1).cost == 4.0


def test_linearized_edge_weights_match_cost_plus_interaction(g4):
    lg = linearize(g4, 0, 3)
    sa, at = g4.arc_id(0, 1), g4.arc_id(1, 3)
    row = range(int(lg.indptr[sa]), int(lg.indptr[sa + 1]))
    weights = {int(lg.to_node[e]): float(lg.weight[e]) for e in row}
    assert weights == {at: 1.0 + 10.0}


def test_core_is_cached_per_graph(g4):
    assert linearized_core(g4) is linearized_core(g4)
    scaled = A.scale_quadratic(g4, 2.0)
    assert linearized_core(scaled) is not linearized_core(g4)


def test_solve_lin_examples(g4):
    res = A.solve_lin(g4, 0, 3)
    assert res.cost == 11.0
    assert res.walk == (0, 2, 3)
    assert res.stats.popped >= 2


def test_solve_lin_zero_quad_equals_linear_distance(g4):
    flat = A.scale_quadratic(g4, 0.0)
    _, linear_cost = A.linear_path_upper_bound(flat, 0, 3)
    assert A.solve_lin(flat, 0, 3).cost == pytest.approx(linear_cost, rel=1e-12)


def test_solve_lin_finds_cyclic_walk():
    g = make_detour_graph(100.0)
    res = A.solve_lin(g, 0, 4)
    assert res.cost == pytest.approx(5.0, abs=1e-12)
    assert res.walk == (0, 1, 2, 3, 1, 4)
    assert not res.is_simple
    assert res.alpha_report.improving


def test_solve_lin_no_walk():
    g = A.build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    res = A.solve_lin(g, 0, 3)
    assert not res.found


def test_solve_lin_agrees_with_aq_dijkstra_on_200_instances():
    disagreements = 0
    for seed in seeds(77, 200):
        g, s, t = random_instance(7, 0.5, seed)
        c_lin = A.solve_lin(g, s, t).cost
        c_aqd = A.solve(g, s, t, "aqd").cost
        if math.isinf(c_lin) and math.isinf(c_aqd):
            continue
        if abs(c_lin - c_aqd) > 1e-9 * max(1.0, abs(c_aqd)):
            disagreements += 1
    assert disagreements == 0


def test_brute_force_examples(g4):
    assert A.brute_force(g4, 0, 3, 4) == (11.0, (0, 2, 3))
    cost, walk = A.brute_force(make_detour_graph(100.0), 0, 4, 6)
    assert cost == 5.0
    assert walk == (0, 1, 2, 3, 1, 4)


def test_brute_force_disconnected_pair():
    g = A.build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    cost, walk = A.brute_force(g, 0, 3, 8)
    assert math.isinf(cost)
    assert walk is None


def test_brute_force_validates_budget(g4):
    with pytest.raises(ValueError, match="max_arcs"):
        A.brute_force(g4, 0, 3, 0)


def test_brute_force_walk_budget_counts_arcs_not_nodes():
    # optimal walk needs 5 arcs; a 4-arc budget must miss it
    g = make_detour_graph(100.0)
    tight, _ = A.brute_force(g, 0, 4, 4)
    assert tight == 102.0
    full, walk = A.brute_force(g, 0, 4, 5)
    assert full == 5.0 and len(walk) - 1 == 5


def test_brute_force_matches_solvers_up_to_eight_nodes():
    for n in (4, 6, 8):
        for seed in seeds(900 + n, 12):
            g, s, t = random_instance(n, 0.5, seed)
            cost, _ = A.brute_force(g, s, t, 2 * n)
            res = A.solve(g, s, t, "aqd")
            if math.isinf(cost):
                assert not res.found
            else:
                assert res.cost == pytest.approx(cost, rel=1e-9, abs=1e-9)
