import math

import numpy as np
import pytest

from dpnibble import (Graph, PartialColoring, from_list_assignment, keep_fn,
                      uncolor_fn)
from dpnibble.analysis import (classify_structure, exact_round_expectation,
                               round_stats, stats_summary_json, stats_to_csv,
                               verify_proper)
from dpnibble.errors import BudgetExceededError
from dpnibble.nibble import RoundParams

from conftest import classify_oracle, cycle_graph, path_graph, regular_cover, star_graph


class TestVerifyProper:
    def test_empty_coloring(self):
        cov = regular_cover(8, 3, 4, seed=1)
        ok, witness = verify_proper(cov, PartialColoring.blank(8))
        assert ok and witness is None

    def test_matched_pair_rejected_with_witness(self):
        g = Graph.from_edges(2, [(0, 1)])
        cov = from_list_assignment(g, [[0], [0]])
        phi = PartialColoring(np.array([cov.lists(0)[0], cov.lists(1)[0]]))
        ok, witness = verify_proper(cov, phi)
        assert not ok
        assert {witness.vertex_u, witness.vertex_v} == {0, 1}

    def test_unlisted_color_raises(self):
        cov = regular_cover(6, 3, 4, seed=2)
        phi = PartialColoring.blank(6)
        phi.assignment[0] = cov.lists(1)[0]
        with pytest.raises(ValueError, match="outside its list"):
            verify_proper(cov, phi)


class TestClassifyStructure:
    def test_star_anchor_has_no_second_neighborhood(self):
        rep = classify_structure(star_graph(5), anchor=0, d=5, t=1)
        assert rep.bad == () and rep.good == ()
        assert rep.sad == ()
        assert set(rep.happy) == set(range(1, 6))

    def test_threshold_arithmetic_small_case(self):
        # anchor 0 with neighbors 1..4; vertex 5 adjacent to three of them:
        # 3 >= 4^(2/3) ~ 2.52 makes it crowded at t=1
        edges = [(0, 1), (0, 2), (0, 3), (0, 4), (5, 1), (5, 2), (5, 3)]
        rep = classify_structure(Graph.from_edges(6, edges), anchor=0, d=4, t=1)
        assert rep.bad == (5,)
        assert rep.delta == pytest.approx(1 / 3)

    def test_partitions_are_exact(self):
        cov = regular_cover(14, 4, 5, seed=3).cover
        rep = classify_structure(cov, anchor=0, d=4, t=2)
        assert set(rep.bad) | set(rep.good) == set(rep.bad) ^ set(rep.good)
        nbrs = set(int(x) for x in cov.neighbors(0))
        assert set(rep.sad) | set(rep.happy) == nbrs
        assert not (set(rep.sad) & set(rep.happy))

    def test_matches_independent_recount(self):
        for seed in range(8):
            cov = regular_cover(16, 4, 4, seed=40 + seed).cover
            for anchor in (0, 5, 11):
                rep = classify_structure(cov, anchor=anchor, d=4, t=2)
                bad, sad = classify_oracle(cov, anchor, d=4, t=2)
                assert set(rep.bad) == bad
                assert set(rep.sad) == sad

    def test_reported_constants(self):
        rep = classify_structure(star_graph(3), anchor=0, d=3, t=2)
        assert rep.beta1 == pytest.approx(1 / 40)
        assert rep.beta2 == pytest.approx(1 / 30)
        assert rep.delta2 == pytest.approx(1 / 20)
        assert rep.tau == pytest.approx(4 / 18)
        assert rep.sad_bound == pytest.approx(3 ** (1 - 1 / 30))

    def test_anchor_degree_checked(self):
        with pytest.raises(ValueError, match="exceeds"):
            classify_structure(star_graph(5), anchor=0, d=3, t=1)


class TestRoundStats:
    def test_edgeless_cover_keeps_everything(self):
        cov = from_list_assignment(Graph.empty(4), [range(3)] * 4)
        p = RoundParams(eta=0.7, d=1, ell=3, beta=0.1)
        st = round_stats(cov, p, trials=50, seed=1)
        assert np.all(st.kept_mean == 3.0)
        assert np.all(st.kept_var == 0.0)

    def test_k2_matching_limit(self):
        g = Graph.from_edges(2, [(0, 1)])
        cov = from_list_assignment(g, [range(2)] * 2)
        p = RoundParams(eta=1.0, d=1, ell=2, beta=0.1)
        st = round_stats(cov, p, trials=20000, seed=2)
        se = math.sqrt(float(st.kept_var.max()) / st.trials)
        assert np.all(np.abs(st.kept_mean - 1.0) <= 3 * se + 1e-9)

    def test_anchor_identity_holds_samplewise(self):
        cov = regular_cover(12, 4, 5, seed=4)
        p = RoundParams(eta=0.5, d=4, ell=5, beta=0.05)
        st = round_stats(cov, p, trials=300, seed=3, anchor=7)
        assert np.array_equal(st.anchor_res, st.anchor_u - st.anchor_u_minus_k)
        assert st.anchor_u.size == 300

    def test_seeds_are_sequential(self):
        cov = regular_cover(10, 3, 4, seed=5)
        p = RoundParams(eta=0.5, d=3, ell=4, beta=0.05)
        one = round_stats(cov, p, trials=10, seed=100)
        two_a = round_stats(cov, p, trials=5, seed=100)
        two_b = round_stats(cov, p, trials=5, seed=105)
        merged = (two_a.kept_mean * 5 + two_b.kept_mean * 5) / 10
        assert np.allclose(one.kept_mean, merged)


class TestExactRoundExpectation:
    def test_single_vertex(self):
        cov = from_list_assignment(Graph.empty(1), [range(3)])
        p = RoundParams(eta=0.4, d=1, ell=3, beta=0.1)
        kept, res = exact_round_expectation(cov, p)
        assert kept[0] == pytest.approx(3.0)
        assert np.all(res == 0.0)

    def test_k2_perfect_matching_equals_closed_form(self):
        g = Graph.from_edges(2, [(0, 1)])
        cov = from_list_assignment(g, [range(2)] * 2)
        p = RoundParams(eta=1.0, d=1, ell=2, beta=0.1)
        kept, _ = exact_round_expectation(cov, p)
        assert kept == pytest.approx([1.0, 1.0], abs=1e-12)
        assert keep_fn(1, 2, 1.0) * 2 == pytest.approx(1.0)

    def test_closed_form_on_regular_instances(self):
        for n, d, ell, eta, seed in [(6, 2, 3, 0.5, 1), (4, 3, 4, 0.3, 2),
                                     (8, 2, 4, 0.8, 3)]:
            cov = regular_cover(n, d, ell, seed=seed)
            p = RoundParams(eta=eta, d=d, ell=ell, beta=0.05)
            kept, res = exact_round_expectation(cov, p)
            want = keep_fn(d, ell, eta) * ell
            assert np.max(np.abs(kept - want) / want) <= 1e-9
            bound = keep_fn(d, ell, eta) * uncolor_fn(d, ell, eta) * d + d / ell
            assert np.all(res <= bound + 1e-9)

    def test_cross_oracle_with_monte_carlo(self):
        base = path_graph(3)
        cov = from_list_assignment(base, [range(2)] * 3)
        p = RoundParams(eta=0.5, d=1, ell=2, beta=0.1)
        kept, res = exact_round_expectation(cov, p)
        st = round_stats(cov, p, trials=20000, seed=6)
        for v in range(3):
            se = math.sqrt(max(float(st.kept_var[v]), 1e-12) / st.trials)
            assert abs(st.kept_mean[v] - kept[v]) <= 4 * se + 1e-9
        for c in range(cov.num_colors):
            se = math.sqrt(max(float(st.res_var[c]), 1e-12) / st.trials)
            assert abs(st.res_mean[c] - res[c]) <= 4 * se + 1e-9

    def test_budget_guard(self):
        cov = regular_cover(12, 4, 6, seed=7)
        with pytest.raises(BudgetExceededError):
            exact_round_expectation(cov, RoundParams(eta=0.5, d=4, ell=6, beta=0.1),
                                    budget=1000)


class TestExports:
    def test_csv_embeds_config_and_is_deterministic(self):
        cov = regular_cover(6, 2, 3, seed=8)
        p = RoundParams(eta=0.5, d=2, ell=3, beta=0.05)
        st = round_stats(cov, p, trials=20, seed=9, anchor=1)
        cfg = {"seed": 9, "trials": 20}
        text = stats_to_csv(st, cfg)
        assert text.startswith("# {")
        assert '"seed": 9' in text.splitlines()[0]
        assert text == stats_to_csv(st, cfg)
        assert any(line.startswith("anchor,") for line in text.splitlines())

    def test_summary_reports_identity(self):
        cov = regular_cover(6, 2, 3, seed=8)
        p = RoundParams(eta=0.5, d=2, ell=3, beta=0.05)
        st = round_stats(cov, p, trials=25, seed=10, anchor=0)
        import json
        doc = json.loads(stats_summary_json(st, {"seed": 10}))
        assert doc["anchor"]["identity_holds"] is True
        assert doc["trials"] == 25
