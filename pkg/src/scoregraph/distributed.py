"""Synchronous simulation of the distributed fully-relaxed estimator.

Each agent keeps push-sum accumulators (xi, eta) whose ratio phi_i tracks the
network-wide score distribution, plus a local parameter iterate z_i.  A round
applies one ratio-consensus exchange over the active communication frame and
one projected-gradient step of the phi-weighted fully-relaxed cost on every
agent.  With a window-connected schedule the phi_i converge geometrically to
the true empirical distribution and the iterates approach stationary points
of the fully-relaxed problem.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .estimators import fr_gradient, fr_problem, lipschitz_stepsize
from .graph import CommSchedule, NeighborCounts, ScoreGraph, aggregate_counts, pushsum_matrix
from .models import ModelSpec

__all__ = [
    "DistributedState",
    "DistributedRun",
    "initial_state",
    "push_sum_round",
    "local_gradient_step",
    "run_distributed",
    "stationarity_residual",
    "write_trajectory_csv",
]


@dataclass
class DistributedState:
    """Per-agent push-sum accumulators and parameter iterates.

    xi[i, h] starts at agent i's received count of score h and eta[i] at its
    in-degree, so phi = xi / eta starts at the local score histogram and the
    column totals (sum_i xi, sum_i eta) are conserved by every round.
    """

    xi: np.ndarray
    eta: np.ndarray
    z: np.ndarray

    @property
    def n_agents(self) -> int:
        return self.eta.shape[0]

    @property
    def phi(self) -> np.ndarray:
        return self.xi / self.eta[:, None]


def initial_state(counts: NeighborCounts, model: ModelSpec, start=None) -> DistributedState:
    """Build the round-0 state: local histograms and a feasible iterate per agent."""
    n = counts.n_agents
    feas = model.feasible
    if start is None:
        z = np.tile(feas.centroid(), (n, 1))
    else:
        start = np.asarray(start, dtype=np.float64)
        z = np.tile(start, (n, 1)) if start.ndim == 1 else start.copy()
        if z.shape != (n, feas.dim):
            raise ValueError(f"start must have shape ({n}, {feas.dim})")
        for i in range(n):
            if not feas.contains(z[i]):
                raise InfeasibleError(f"start for agent {i} is outside the feasible set")
    return DistributedState(
        xi=counts.received.astype(np.float64),
        eta=counts.in_degree.astype(np.float64),
        z=z,
    )


def push_sum_round(state: DistributedState, frame) -> DistributedState:
    """One synchronous ratio-consensus exchange over a frame's edges.

    Every agent splits its xi and eta mass equally over its frame
    out-neighbors plus itself; column totals are conserved exactly up to
    floating error, and eta stays positive.
    """
    mat = pushsum_matrix(state.n_agents, frame)
    return DistributedState(xi=mat @ state.xi, eta=mat @ state.eta, z=state.z)


def local_gradient_step(z, phi, model: ModelSpec, alpha: float) -> np.ndarray:
    """One agent's projected-gradient step on the phi-weighted relaxed cost."""
    theta, gamma = model.feasible.split(z)
    grad = fr_gradient(phi, model, theta, gamma)
    return model.feasible.project(np.asarray(z, dtype=np.float64) - alpha * grad)


def _step_all(z: np.ndarray, phi: np.ndarray, model: ModelSpec, alpha: float) -> np.ndarray:
    out = np.empty_like(z)
    for i in range(z.shape[0]):
        out[i] = local_gradient_step(z[i], phi[i], model, alpha)
    return out


@dataclass(frozen=True)
class DistributedRun:
    """Recorded trajectories of a distributed run.

    times[k] is the round index of snapshot k; phi_traj[k] and z_traj[k] are
    the (N, R) ratio estimates and (N, dim) iterates at that round.  state is
    the final full state including accumulators.
    """

    times: np.ndarray
    phi_traj: np.ndarray
    z_traj: np.ndarray
    state: DistributedState
    alpha: float
    n_rounds: int
    model_name: str
    theta_dim: int

    @property
    def final_z(self) -> np.ndarray:
        return self.state.z

    def spread(self) -> float:
        """Largest max-norm disagreement between two agents' final iterates."""
        z = self.state.z
        diff = np.abs(z[:, None, :] - z[None, :, :]).max(axis=2)
        return float(diff.max())


def run_distributed(data, model: ModelSpec, schedule: CommSchedule, alpha=None,
                    n_rounds: int = 1000, start=None,
                    gradient_uses_updated_phi: bool = False,
                    record_every: int = 1, rng=0) -> DistributedRun:
    """Simulate n_rounds synchronous rounds of consensus + local gradient steps.

    Parameters
    ----------
    data : ScoreGraph or NeighborCounts
        Scored graph (aggregated internally) or precomputed counts.
    schedule : CommSchedule
        Window-connected communication schedule; frame t drives round t.
    alpha : float, optional
        Stepsize; None uses the sampled-curvature heuristic on the
        fully-relaxed problem at the true phi (deterministic under `rng`).
    gradient_uses_updated_phi : bool
        Default False steps with the pre-round phi_i(t); True runs the
        consensus exchange first and steps with phi_i(t+1).
    record_every : int
        Snapshot stride; round 0 and the final round are always recorded.
    """
    counts = aggregate_counts(data) if isinstance(data, ScoreGraph) else data
    if schedule.n_agents != counts.n_agents:
        raise ValueError("schedule and counts disagree on the number of agents")
    if counts.n_scores != model.n_scores:
        raise ValueError("counts and model disagree on the score alphabet")
    if alpha is None:
        alpha = lipschitz_stepsize(fr_problem(counts, model), rng=rng)
    state = initial_state(counts, model, start)
    xi, eta, z = state.xi, state.eta, state.z
    phi = xi / eta[:, None]
    times = [0]
    phi_traj = [phi.copy()]
    z_traj = [z.copy()]
    for t in range(n_rounds):
        mat = schedule.matrix(t)
        if gradient_uses_updated_phi:
            xi, eta = mat @ xi, mat @ eta
            phi = xi / eta[:, None]
            z = _step_all(z, phi, model, alpha)
        else:
            z = _step_all(z, phi, model, alpha)
            xi, eta = mat @ xi, mat @ eta
            phi = xi / eta[:, None]
        if (t + 1) % record_every == 0 or t + 1 == n_rounds:
            times.append(t + 1)
            phi_traj.append(phi.copy())
            z_traj.append(z.copy())
    return DistributedRun(
        times=np.asarray(times, dtype=np.int64),
        phi_traj=np.asarray(phi_traj),
        z_traj=np.asarray(z_traj),
        state=DistributedState(xi=xi, eta=eta, z=z),
        alpha=float(alpha),
        n_rounds=n_rounds,
        model_name=model.name,
        theta_dim=model.feasible.theta_dim,
    )


def stationarity_residual(model: ModelSpec, z, phi, alpha: float) -> float:
    """Fixed-point residual ||z - P[z - alpha * grad(phi' g)(z)]|| of one iterate."""
    z = np.asarray(z, dtype=np.float64)
    return float(np.linalg.norm(z - local_gradient_step(z, phi, model, alpha)))


def write_trajectory_csv(run: DistributedRun, path, meta_path=None) -> None:
    """Write `t, agent, phi_1..phi_R, theta..., gamma...` rows plus a metadata sidecar."""
    n_scores = run.phi_traj.shape[2]
    dim = run.z_traj.shape[2]
    cols = ["t", "agent"]
    cols += [f"phi_{h + 1}" for h in range(n_scores)]
    cols += [f"theta_{k + 1}" for k in range(run.theta_dim)]
    cols += [f"gamma_{k + 1}" for k in range(dim - run.theta_dim)]
    lines = [",".join(cols)]
    for k, t in enumerate(run.times):
        for i in range(run.phi_traj.shape[1]):
            cells = [str(int(t)), str(i + 1)]
            cells += [repr(float(x)) for x in run.phi_traj[k, i]]
            cells += [repr(float(x)) for x in run.z_traj[k, i]]
            lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = {
        "alpha": run.alpha,
        "n_rounds": int(run.n_rounds),
        "model": run.model_name,
        "n_agents": int(run.phi_traj.shape[1]),
        "n_scores": int(n_scores),
        "z_dim": int(dim),
        "snapshots": [int(t) for t in run.times],
    }
    if meta_path is None:
        meta_path = str(path) + ".meta.json"
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
