"""Single-hop Bayesian soft/MAP classification."""

import numpy as np
import pytest

import scoregraph as sg
from scoregraph.classifier import ClassifierOutput
from scoregraph.errors import DegenerateModelError, InfeasibleError

from oracles import posterior_brute_force

MODELS = [
    sg.preparata_model(),
    sg.reliability_model(5),
    sg.social_ranking_model(3, 3),
    sg.categorical_model(2, 2),
]


def _random_instance(model, rng, n_agents=6, n_edges=14):
    g = sg.sample_score_graph(n_agents, n_edges, "cyclic-plus-random-edges", rng)
    z = model.feasible.sample_interior(rng)
    theta, gamma = model.feasible.split(z)
    scored, states = sg.generate_scores(g, model, theta, gamma, rng)
    return scored, states, theta, gamma


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
def test_posterior_matches_joint_enumeration(model):
    rng = np.random.default_rng(31)
    for _ in range(5):
        scored, _, theta, gamma = _random_instance(model, rng)
        counts = sg.aggregate_counts(scored)
        out = sg.soft_classify(counts, model, theta, gamma)
        ref = posterior_brute_force(scored, model, theta, gamma)
        np.testing.assert_allclose(out.posterior, ref, atol=1e-10)


def test_ranking_instance_matches_enumeration():
    # three states, twelve edges: the smallest interesting joint model
    rng = np.random.default_rng(6)
    model = sg.social_ranking_model(3, 3)
    g = sg.sample_score_graph(6, 12, "cyclic-plus-random-edges", rng)
    scored, _ = sg.generate_scores(g, model, (0.5,), (0.3,), rng)
    counts = sg.aggregate_counts(scored)
    out = sg.soft_classify(counts, model, (0.5,), (0.3,))
    ref = posterior_brute_force(scored, model, (0.5,), (0.3,))
    np.testing.assert_allclose(out.posterior, ref, atol=1e-10)


def test_uninformative_scores_return_the_prior():
    # every table row uniform: observations carry no evidence
    model = sg.categorical_model(3, 4)
    theta = np.full(model.theta_dim, 0.25)
    gamma = np.array([0.5, 0.3, 0.2])
    rng = np.random.default_rng(8)
    g = sg.sample_score_graph(7, 20, "cyclic-plus-random-edges", rng)
    scored, _ = sg.generate_scores(g, model, theta, gamma, rng)
    out = sg.soft_classify(sg.aggregate_counts(scored), model, theta, gamma)
    np.testing.assert_allclose(out.posterior, np.tile(gamma, (7, 1)), atol=1e-12)


def test_certain_prior_dominates():
    model = sg.preparata_model()
    g = sg.ScoreGraph(3, 2, np.array([(0, 1), (1, 2), (2, 0)]),
                      scores=np.array([0, 0, 0]))
    out = sg.soft_classify(sg.aggregate_counts(g), model, (), (0.0,))
    np.testing.assert_array_equal(out.posterior, np.tile([1.0, 0.0], (3, 1)))
    assert np.all(out.labels == 0)


def test_impossible_observation_is_degenerate():
    # sound-only prior but a mismatch score was observed: no state explains it
    model = sg.preparata_model()
    g = sg.ScoreGraph(3, 2, np.array([(0, 1), (1, 2), (2, 0)]),
                      scores=np.array([1, 0, 0]))
    with pytest.raises(DegenerateModelError):
        sg.soft_classify(sg.aggregate_counts(g), model, (), (0.0,))


def test_undirected_graph_uses_only_mutual_factors():
    """With every reverse edge present, the one-way factors are empty and the
    posterior reduces to prior times the mutual-pair factor."""
    rng = np.random.default_rng(12)
    model = sg.reliability_model(3)
    n = 6
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    g = sg.ScoreGraph(n, 3, np.array(pairs))
    scored, _ = sg.generate_scores(g, model, (), (0.4,), rng)
    counts = sg.aggregate_counts(scored)
    assert counts.received_only.sum() == 0 and counts.given_only.sum() == 0

    out = sg.soft_classify(counts, model, (), (0.4,))
    tensor, prior = model.tensor(()), model.prior((0.4,))
    # direct reduction: v(l) = prior(l) * product over mutual pairs of
    # sum_m p(h_give|l,m) p(h_recv|m,l) prior(m)
    pair_table = np.einsum("hlm,kml,m->hkl", tensor, tensor, prior)
    ref = np.zeros((n, 2))
    for i in range(n):
        for l in range(2):
            v = prior[l]
            for h in range(3):
                for k in range(3):
                    if counts.mutual[i, h, k]:
                        v *= pair_table[h, k, l] ** counts.mutual[i, h, k]
            ref[i, l] = v
    ref /= ref.sum(axis=1, keepdims=True)
    np.testing.assert_allclose(out.posterior, ref, atol=1e-12)


def test_permutation_equivariance():
    rng = np.random.default_rng(21)
    model = sg.reliability_model(4)
    scored, _, theta, gamma = _random_instance(model, rng, n_agents=8, n_edges=24)
    perm = np.random.default_rng(2).permutation(8)
    relabeled = sg.ScoreGraph(8, 4, perm[scored.edges], scores=scored.scores)
    out = sg.soft_classify(sg.aggregate_counts(scored), model, theta, gamma)
    out_p = sg.soft_classify(sg.aggregate_counts(relabeled), model, theta, gamma)
    np.testing.assert_allclose(out_p.posterior[perm], out.posterior, atol=1e-12)
    np.testing.assert_array_equal(out_p.labels[perm], out.labels)


def _output_from_posterior(rows):
    rows = np.asarray(rows, dtype=np.float64)
    log_u = np.log(rows, out=np.full_like(rows, -np.inf), where=rows > 0)
    return ClassifierOutput(posterior=rows,
                            labels=np.argmax(rows, axis=1),
                            log_unnormalized=log_u,
                            log_normalizer=np.zeros(len(rows)))


def test_map_tie_break_takes_lowest_index():
    out = _output_from_posterior([
        [0.5, 0.25, 0.15, 0.1],
        [0.5, 0.5, 0.0, 0.0],
        [0.25, 0.25, 0.25, 0.25],
    ])
    np.testing.assert_array_equal(sg.map_classify(out), [0, 0, 0])


def test_map_invariant_to_rescaled_evidence():
    rng = np.random.default_rng(3)
    model = sg.preparata_model()
    scored, _, theta, gamma = _random_instance(model, rng)
    out = sg.soft_classify(sg.aggregate_counts(scored), model, theta, gamma)
    shifted = np.exp(out.log_unnormalized + 7.3)
    shifted /= shifted.sum(axis=1, keepdims=True)
    np.testing.assert_allclose(shifted, out.posterior, atol=1e-12)
    np.testing.assert_array_equal(np.argmax(shifted, axis=1), out.labels)


def test_misclassification_rate_examples():
    assert sg.misclassification_rate(np.array([1, 2, 2]), np.array([1, 2, 3])) \
        == pytest.approx(1 / 3)
    a = np.array([0, 1, 0, 1])
    assert sg.misclassification_rate(a, a) == 0.0
    assert sg.misclassification_rate(a, 1 - a) == 1.0
    with pytest.raises(ValueError):
        sg.misclassification_rate(np.array([0, 1]), np.array([0]))


def test_posterior_rows_normalized_and_nonnegative():
    rng = np.random.default_rng(14)
    for model in MODELS:
        scored, _, theta, gamma = _random_instance(model, rng)
        out = sg.soft_classify(sg.aggregate_counts(scored), model, theta, gamma)
        assert np.all(out.posterior >= 0)
        np.testing.assert_allclose(out.posterior.sum(axis=1), 1.0, atol=1e-12)
        assert out.n_agents == 6 and out.n_states == model.n_states


def test_score_alphabet_must_match():
    rng = np.random.default_rng(4)
    scored, _, _, _ = _random_instance(sg.reliability_model(3), rng)
    with pytest.raises(ValueError):
        sg.soft_classify(sg.aggregate_counts(scored), sg.reliability_model(5),
                         (), (0.3,))


def test_infeasible_estimate_rejected():
    rng = np.random.default_rng(4)
    scored, _, _, _ = _random_instance(sg.preparata_model(), rng)
    with pytest.raises(InfeasibleError):
        sg.soft_classify(sg.aggregate_counts(scored), sg.preparata_model(),
                         (), (-0.1,))


def test_soft_csv_round_trip(tmp_path):
    rng = np.random.default_rng(19)
    model = sg.social_ranking_model(3, 3)
    scored, _, theta, gamma = _random_instance(model, rng)
    out = sg.soft_classify(sg.aggregate_counts(scored), model, theta, gamma)
    path = tmp_path / "soft.csv"
    sg.write_soft_csv(out, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "agent,u_1,u_2,u_3,map_label"
    assert len(lines) == 1 + 6
    for i, line in enumerate(lines[1:]):
        cells = line.split(",")
        assert int(cells[0]) == i + 1                      # 1-based agents
        np.testing.assert_array_equal(
            np.array([float(c) for c in cells[1:4]]), out.posterior[i])
        assert int(cells[4]) == out.labels[i] + 1          # 1-based labels
