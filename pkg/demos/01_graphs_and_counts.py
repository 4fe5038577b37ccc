"""
Score graphs, sampling, and neighborhood counts
===============================================

A score graph is a directed graph where edge (i, j) means agent i
evaluated agent j and assigned a score.  This walks through sampling
topologies, generating scores from a model, and the count summaries
every other component consumes.
"""

import numpy as np

import scoregraph as sg

rng = np.random.default_rng(7)

# the sampler interpolates between a single directed cycle (n = N) and
# the complete directed graph (n = N^2 - N); every agent always keeps
# at least one incoming edge
g_cycle = sg.sample_score_graph(8, 8, "cyclic-plus-random-edges", rng)
g_mid = sg.sample_score_graph(8, 30, "cyclic-plus-random-edges", rng)
g_full = sg.sample_score_graph(8, 56, "complete", rng)
for g in (g_cycle, g_mid, g_full):
    print(f"N={g.n_agents}  edges={g.n_edges}  "
          f"min in-degree={np.bincount(g.edges[:, 1], minlength=8).min()}")

# draw hidden states and scores from a graded reliability model
model = sg.reliability_model(5)
scored, states = sg.generate_scores(g_mid, model, (), (0.3,), rng)
print("\nhidden states:", states)
print("first five scored edges:")
for (i, j), h in list(zip(scored.edges, scored.scores))[:5]:
    print(f"  {i} scored {j} with {h}")

# counts: everything the classifier and estimators need, per agent
counts = sg.aggregate_counts(scored)
print("\nreceived[agent, score] row for agent 0:", counts.received[0])
print("in-degrees:", counts.in_degree)
print("network score histogram phi:", np.round(counts.phi, 3))

# mutual pairs are counted jointly: mutual[i, h, k] is how many agents j
# exist with i -> j scored h and j -> i scored k
pair_total = counts.mutual.sum()
print(f"mutual pair observations: {int(pair_total)}")
assert np.array_equal(counts.received,
                      counts.received_only + counts.mutual.sum(axis=1))

# graphs and states round-trip through a plain text format
sg.save_score_graph(scored, "/tmp/demo_graph.txt")
sg.save_states(states, "/tmp/demo_states.txt")
again = sg.load_score_graph("/tmp/demo_graph.txt")
print("\nround trip equal:",
      np.array_equal(again.edges, scored.edges)
      and np.array_equal(again.scores, scored.scores))
