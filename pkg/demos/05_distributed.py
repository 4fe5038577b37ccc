"""
Fully distributed estimation over a communication schedule
==========================================================

Agents never share raw scores.  Push-sum consensus spreads the score
histogram while each agent takes local projected-gradient steps; with a
window-connected schedule every agent converges to the centralized
fully relaxed estimate.
"""

import numpy as np

import scoregraph as sg

rng = np.random.default_rng(19)
model = sg.preparata_model()
g = sg.sample_score_graph(15, 70, "cyclic-plus-random-edges", rng)
scored, _ = sg.generate_scores(g, model, (), (0.3,), rng)
counts = sg.aggregate_counts(scored)
star = sg.fr_binary_closed_form(counts.phi[1])
print(f"centralized target gamma = {star:.8f}")

# a static schedule reuses the score graph's own edges every round
static = sg.CommSchedule(15, (scored.edges,), 1)
run = sg.run_distributed(counts, model, static, alpha=0.02, n_rounds=2000,
                         record_every=200)
print("\nstatic schedule:")
for k, t in enumerate(run.times):
    err = np.abs(run.z_traj[k][:, 0] - star).max()
    print(f"  round {int(t):5d}: max |gamma_i - target| = {err:.2e}")
print(f"final spread across agents: {run.spread():.2e}")

# a periodic edge partition activates one slice of the cycle per round;
# only the union over a window is connected, consensus still goes through
part = sg.make_comm_schedule(15, "periodic-edge-partition", 3,
                             rng=np.random.default_rng(20))
run_p = sg.run_distributed(counts, model, part, alpha=0.02, n_rounds=2000,
                           record_every=2000)
err = np.abs(run_p.final_z[:, 0] - star).max()
print(f"\npartition schedule (Q=3), 2000 rounds: max error {err:.2e}")

# every agent ends at a stationary point of the relaxed cost
resid = max(sg.stationarity_residual(model, run_p.final_z[i], counts.phi,
                                     run_p.alpha) for i in range(15))
print(f"worst stationarity residual: {resid:.2e}")

sg.write_trajectory_csv(run, "/tmp/demo_trajectory.csv")
print("wrote /tmp/demo_trajectory.csv")
