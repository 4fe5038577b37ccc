"""Graph sampling, score generation, count aggregation, schedules, file I/O."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import scoregraph as sg
from scoregraph.errors import InfeasibleError


def test_minimum_edge_count_forces_pure_cycle():
    g = sg.sample_score_graph(3, 3, "cyclic-plus-random-edges",
                              np.random.default_rng(0))
    assert sorted(map(tuple, g.edges)) == [(0, 1), (1, 2), (2, 0)]


def test_complete_family_yields_all_ordered_pairs():
    n = 300
    g = sg.sample_score_graph(n, n * n - n, "complete")
    assert g.n_edges == 89700
    pairs = {tuple(e) for e in g.edges}
    assert len(pairs) == 89700
    assert all(i != j for i, j in pairs)


def test_sampling_deterministic_under_fixed_seed():
    a = sg.sample_score_graph(5, 7, "cyclic-plus-random-edges",
                              np.random.default_rng(42))
    b = sg.sample_score_graph(5, 7, "cyclic-plus-random-edges",
                              np.random.default_rng(42))
    assert np.array_equal(a.edges, b.edges)


def test_edge_count_range_is_enforced():
    with pytest.raises(ValueError):
        sg.sample_score_graph(5, 4, "cyclic-plus-random-edges")
    with pytest.raises(ValueError):
        sg.sample_score_graph(5, 21, "cyclic-plus-random-edges")
    with pytest.raises(ValueError):
        sg.sample_score_graph(1, 1, "cyclic-plus-random-edges")
    with pytest.raises(ValueError):
        sg.sample_score_graph(5, 12, "complete")   # complete means all pairs


def test_score_graph_rejects_malformed_edges():
    with pytest.raises(ValueError):
        sg.ScoreGraph(3, 2, np.array([(0, 0), (1, 2), (2, 1)]))   # self loop
    with pytest.raises(ValueError):
        sg.ScoreGraph(3, 2, np.array([(0, 1), (0, 1), (1, 0), (2, 0)]))  # dup
    with pytest.raises(ValueError):
        sg.ScoreGraph(3, 2, np.array([(1, 0), (0, 2), (2, 1)])[:2])  # no in-edge


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.data())
def test_sampled_graph_invariants(n, data):
    target = data.draw(st.integers(n, n * n - n))
    seed = data.draw(st.integers(0, 2**31))
    g = sg.sample_score_graph(n, target, "cyclic-plus-random-edges",
                              np.random.default_rng(seed))
    assert g.n_edges == target
    assert g.in_degrees().min() >= 1
    pairs = {tuple(e) for e in g.edges}
    assert len(pairs) == target and all(i != j for i, j in pairs)


def test_degenerate_prior_generates_deterministic_scores():
    m = sg.preparata_model()
    g = sg.sample_score_graph(10, 40, "cyclic-plus-random-edges",
                              np.random.default_rng(1))
    scored, states = sg.generate_scores(g, m, (), (0.0,), np.random.default_rng(1))
    assert np.all(states == 0)
    assert np.all(scored.scores == 0)   # sound evaluators report sound targets


def test_all_unsound_network_scores_are_coin_flips():
    m = sg.preparata_model()
    g = sg.sample_score_graph(60, 3000, "cyclic-plus-random-edges",
                              np.random.default_rng(2))
    scored, states = sg.generate_scores(g, m, (), (1.0,), np.random.default_rng(2))
    assert np.all(states == 1)
    frac = scored.scores.mean()
    # Binomial(3000, 1/2): keep 4 sigma of slack around 1/2
    assert abs(frac - 0.5) < 4 * np.sqrt(0.25 / 3000)


def test_generate_scores_rejects_infeasible_parameters():
    m = sg.preparata_model()
    g = sg.sample_score_graph(4, 6, "cyclic-plus-random-edges",
                              np.random.default_rng(0))
    with pytest.raises(InfeasibleError):
        sg.generate_scores(g, m, (), (1.5,), np.random.default_rng(0))


def test_conditional_score_histograms_match_model_pmf():
    """Empirical per-(evaluator, target) state-pair score frequencies on 1e5
    edges stay within 3 sigma of the model probabilities."""
    m = sg.social_ranking_model(3, 3)
    theta, gamma = (0.5,), (0.3,)
    g = sg.sample_score_graph(350, 100000, "cyclic-plus-random-edges",
                              np.random.default_rng(3))
    scored, states = sg.generate_scores(g, m, theta, gamma,
                                        np.random.default_rng(3))
    tensor = m.tensor(theta)
    ev, tg = states[scored.edges[:, 0]], states[scored.edges[:, 1]]
    for l in range(3):
        for mm in range(3):
            sel = (ev == l) & (tg == mm)
            n_lm = int(sel.sum())
            assert n_lm > 100
            for h in range(3):
                p = tensor[h, l, mm]
                emp = (scored.scores[sel] == h).mean()
                sigma = np.sqrt(p * (1 - p) / n_lm)
                assert abs(emp - p) <= 3 * sigma + 1e-12


def test_mutual_pair_counts_direct():
    # two agents scoring each other, distinct scores
    g = sg.ScoreGraph(2, 2, np.array([(0, 1), (1, 0)]), scores=np.array([0, 1]))
    c = sg.aggregate_counts(g)
    assert c.mutual[0, 0, 1] == 1          # gave score 0, received score 1
    assert c.mutual[1, 1, 0] == 1
    assert c.mutual.sum() == 2
    assert c.received_only.sum() == 0 and c.given_only.sum() == 0
    assert np.array_equal(c.received[0], [0, 1])
    assert np.array_equal(c.received[1], [1, 0])


def test_every_edge_counted_once_at_its_head():
    rng = np.random.default_rng(5)
    g = sg.sample_score_graph(9, 30, "cyclic-plus-random-edges", rng)
    scored, _ = sg.generate_scores(g, sg.reliability_model(4), (), (0.4,), rng)
    c = sg.aggregate_counts(scored)
    assert c.received.sum() == scored.n_edges
    assert np.array_equal(c.received.sum(axis=1), c.in_degree)
    assert np.array_equal(c.per_score_totals,
                          np.bincount(scored.scores, minlength=4))


def test_counts_match_naive_recount():
    rng = np.random.default_rng(7)
    g = sg.sample_score_graph(8, 20, "cyclic-plus-random-edges", rng)
    scored, _ = sg.generate_scores(g, sg.reliability_model(3), (), (0.35,), rng)
    c = sg.aggregate_counts(scored)
    n, r = 8, 3
    edges = [tuple(e) for e in scored.edges]
    scores = {e: int(h) for e, h in zip(edges, scored.scores)}
    received = np.zeros((n, r), dtype=int)
    mutual = np.zeros((n, r, r), dtype=int)
    received_only = np.zeros((n, r), dtype=int)
    given_only = np.zeros((n, r), dtype=int)
    for (i, j), h in scores.items():
        received[j, h] += 1
        if (j, i) in scores:
            mutual[j, scores[(j, i)], h] += 1
        else:
            received_only[j, h] += 1
            given_only[i, h] += 1
    assert np.array_equal(c.received, received)
    assert np.array_equal(c.mutual, mutual)
    assert np.array_equal(c.received_only, received_only)
    assert np.array_equal(c.given_only, given_only)
    c.validate()


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10), st.data())
def test_count_identities_hold_on_random_graphs(n, data):
    target = data.draw(st.integers(n, n * n - n))
    seed = data.draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    g = sg.sample_score_graph(n, target, "cyclic-plus-random-edges", rng)
    scored, _ = sg.generate_scores(g, sg.reliability_model(3), (), (0.3,), rng)
    c = sg.aggregate_counts(scored)
    c.validate()
    assert np.array_equal(c.received, c.received_only + c.mutual.sum(axis=1))


def test_aggregate_requires_scores():
    g = sg.sample_score_graph(4, 8, "cyclic-plus-random-edges",
                              np.random.default_rng(0))
    with pytest.raises(ValueError):
        sg.aggregate_counts(g)


class TestCommSchedules:
    def test_static_cycle_every_frame_connected(self):
        sched = sg.make_comm_schedule(4, "static-cycle")
        assert sched.satisfies_window_connectivity()
        for t in range(3):
            assert sorted(map(tuple, sched.frame(t))) == [(0, 1), (1, 2),
                                                          (2, 3), (3, 0)]

    def test_partition_frames_alone_disconnected_union_connected(self):
        sched = sg.make_comm_schedule(4, "periodic-edge-partition", 2,
                                      rng=np.random.default_rng(0))
        assert sched.satisfies_window_connectivity()
        for t in range(2):
            lone = sg.CommSchedule(4, (sched.frame(t),), 1)
            assert not lone.satisfies_window_connectivity()
        assert sum(len(sched.frame(t)) for t in range(2)) == 4

    def test_partition_q3_passes_window_check(self):
        sched = sg.make_comm_schedule(6, "periodic-edge-partition", 3,
                                      rng=np.random.default_rng(1))
        assert sched.satisfies_window_connectivity()

    def test_pushsum_matrix_column_stochastic(self):
        sched = sg.make_comm_schedule(5, "periodic-edge-partition", 2,
                                      rng=np.random.default_rng(2))
        for t in range(2):
            mat = sched.matrix(t)
            np.testing.assert_allclose(mat.sum(axis=0), 1.0, atol=1e-15)
            assert np.all(np.diag(mat) > 0)   # implicit self loops

    def test_two_agent_complete_matrix(self):
        mat = sg.pushsum_matrix(2, np.array([(0, 1), (1, 0)]))
        np.testing.assert_allclose(mat, [[0.5, 0.5], [0.5, 0.5]])

    def test_impossible_window_rejected(self):
        # splitting a 3-cycle into 5 frames leaves empty frames; the 5-window
        # union is still the full cycle, so this must succeed instead
        sched = sg.make_comm_schedule(3, "periodic-edge-partition", 3,
                                      rng=np.random.default_rng(0))
        assert sched.satisfies_window_connectivity()
        with pytest.raises(ValueError):
            sg.make_comm_schedule(3, "no-such-family")


class TestSerialization:
    def test_graph_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        g = sg.sample_score_graph(7, 18, "cyclic-plus-random-edges", rng)
        scored, states = sg.generate_scores(g, sg.reliability_model(5), (),
                                            (0.25,), rng)
        path = tmp_path / "graph.txt"
        sg.save_score_graph(scored, path)
        back = sg.load_score_graph(path)
        assert back.n_agents == 7 and back.n_scores == 5
        assert np.array_equal(back.edges, scored.edges)
        assert np.array_equal(back.scores, scored.scores)
        # second write is byte-identical
        path2 = tmp_path / "again.txt"
        sg.save_score_graph(back, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_graph_file_is_one_based(self, tmp_path):
        g = sg.ScoreGraph(2, 2, np.array([(0, 1), (1, 0)]),
                          scores=np.array([1, 0]))
        path = tmp_path / "g.txt"
        sg.save_score_graph(g, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "scoregraph 2 2 2"
        assert lines[1].split() == ["1", "2", "2"]
        assert lines[2].split() == ["2", "1", "1"]

    def test_states_round_trip(self, tmp_path):
        states = np.array([0, 2, 1, 1])
        path = tmp_path / "states.txt"
        sg.save_states(states, path)
        assert np.array_equal(sg.load_states(path), states)
        assert path.read_text().splitlines()[0] == "1 1"   # 1-based both columns

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("wrong 2 2 1\n1 2 1\n")
        with pytest.raises(ValueError):
            sg.load_score_graph(path)
