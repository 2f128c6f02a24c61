import pytest

from multipath_tsp.errors import InstanceError
from multipath_tsp.exact import exact_opt
from multipath_tsp.graphs import Graph, bfs_distances
from multipath_tsp.instances import Instance, validate_solution
from multipath_tsp.multipath import solve_derandomized
from multipath_tsp.vrp import VrpInstance, distance_sum, solve_combiner, solve_vrp_forest

from conftest import random_instances


class TestVrpInstance:
    def test_from_instance_requires_equal_endpoints(self, fig1):
        with pytest.raises(InstanceError) as err:
            VrpInstance.from_instance(fig1)
        assert err.value.code == "not-vrp"

    def test_round_trip(self):
        inst = Instance(Graph(3, [[0, 1], [1, 2]]), ((0, 0), (2, 2)))
        vrp = VrpInstance.from_instance(inst)
        assert vrp.depots == (0, 2)
        assert vrp.to_instance() == inst


class TestForestBaseline:
    def test_all_vertices_are_depots(self):
        g = Graph(4, [[0, 1], [1, 2], [2, 3]])
        vrp = VrpInstance(g, (0, 1, 2, 3))
        sol = solve_vrp_forest(vrp)
        assert sol.cost == 0
        assert sol.walks == ((0,), (1,), (2,), (3,))

    def test_star_single_depot(self):
        n = 7
        vrp = VrpInstance(Graph(n, [[0, i] for i in range(1, n)]), (0,))
        sol = solve_vrp_forest(vrp)
        assert sol.cost == 2 * (n - 1)

    def test_fig1_depots(self, fig1):
        vrp = VrpInstance(fig1.graph, (0, 1))
        sol = solve_vrp_forest(vrp)
        assert sol.cost == 2 * (10 - 2)
        opt = exact_opt(vrp.to_instance()).cost
        assert sol.cost <= 2 * opt
        ok, why = validate_solution(vrp.to_instance(), sol)
        assert ok, why

    def test_forest_edge_count_and_nearest_depot(self):
        for inst in random_instances("vrp", 30, seed=19, n_max=10):
            vrp = VrpInstance.from_instance(inst)
            sol = solve_vrp_forest(vrp)
            assert sol.cost == 2 * (inst.graph.n - vrp.to_instance().k)
            ok, why = validate_solution(inst, sol)
            assert ok, why
            # every vertex sits in the walk of a nearest depot
            dists = {d: bfs_distances(inst.graph, d) for d in vrp.depots}
            for i, d in enumerate(vrp.depots):
                for v in sol.walks[i]:
                    assert dists[d][v] == min(dd[v] for dd in dists.values())

    def test_tie_goes_to_lowest_depot_index(self):
        vrp = VrpInstance(Graph(3, [[0, 1], [1, 2]]), (0, 2))
        sol = solve_vrp_forest(vrp)
        assert sol.walks[0] == (0, 1, 0)
        assert sol.walks[1] == (2,)


class TestCombiner:
    def test_all_depot_instances_match_forest(self):
        for inst in random_instances("vrp", 15, seed=37, n_max=9):
            sol, report = solve_combiner(inst)
            assert report.distance_sum == 0
            assert report.vrp_base_cost == report.cost_vrp_branch
            expected = 2 * (inst.graph.n - inst.k)
            assert report.cost_vrp_branch == expected
            assert sol.cost == expected  # both branches tie at the forest cost

    def test_path_graph_multipath_wins(self, path3):
        sol, report = solve_combiner(path3)
        assert report.winner == "multipath"
        assert sol.cost == 2
        assert report.cost_vrp_branch == 2 * 2 + 2  # doubled path plus the appended route

    def test_fig1_both_branches_valid(self, fig1):
        sol, report = solve_combiner(fig1)
        ok, why = validate_solution(fig1, sol)
        assert ok, why
        assert sol.cost == min(report.cost_multipath, report.cost_vrp_branch)
        assert report.distance_sum == distance_sum(fig1)

    def test_never_worse_than_derandomized(self):
        for inst in random_instances("multipath", 30, seed=53, n_max=10):
            sol, report = solve_combiner(inst)
            d_sol, _ = solve_derandomized(inst)
            assert sol.cost <= d_sol.cost
            ok, why = validate_solution(inst, sol)
            assert ok, why

    def test_duplicate_sources_collapse(self, fig1):
        inst = Instance(fig1.graph, ((0, 2), (0, 3)))
        sol, report = solve_combiner(inst)
        ok, why = validate_solution(inst, sol)
        assert ok, why
        # one depot tree from vertex 0 plus both connection routes
        d = bfs_distances(fig1.graph, 0)
        assert report.cost_vrp_branch == 2 * 9 + d[2] + d[3]
        assert report.vrp_base_cost == 2 * 9

    def test_injectable_solver(self, path3):
        calls = []

        def spy(vrp):
            calls.append(vrp.depots)
            return solve_vrp_forest(vrp)

        solve_combiner(path3, vrp_alg=spy)
        assert calls == [(0,)]
