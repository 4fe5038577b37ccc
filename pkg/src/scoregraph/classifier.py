"""Exact single-hop Bayesian classification of agent states.

Each agent's posterior over its own state is computed from the scores on its
incident edges only.  Conditioned on the agent's state, distinct neighbors
are independent, so the unnormalized posterior factors into one term per
neighbor class:

    v_i(l) = prior(l) * mutual_i(l) * received_only_i(l) * given_only_i(l)

where each factor marginalizes the unknown neighbor state against the prior.
A mutual neighbor couples the given and received scores through the shared
neighbor state; one-directional neighbors contribute a single score each.
All products are evaluated as sums of logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._logdomain import counted_log_factor
from .errors import DegenerateModelError
from .graph import NeighborCounts
from .models import ModelSpec

__all__ = [
    "ClassifierOutput",
    "soft_classify",
    "map_classify",
    "misclassification_rate",
    "write_soft_csv",
]


@dataclass(frozen=True)
class ClassifierOutput:
    """Soft and hard classification results for all agents.

    posterior[i, l] is the normalized posterior probability that agent i is
    in state l; labels[i] is its argmax with lowest-index tie break.  The
    unnormalized factors are kept in log domain: exp(log_unnormalized) may
    underflow for large neighborhoods, exp(log_normalizer) likewise.
    """

    posterior: np.ndarray
    labels: np.ndarray
    log_unnormalized: np.ndarray
    log_normalizer: np.ndarray

    @property
    def n_agents(self) -> int:
        return self.posterior.shape[0]

    @property
    def n_states(self) -> int:
        return self.posterior.shape[1]

    @property
    def unnormalized(self) -> np.ndarray:
        return np.exp(self.log_unnormalized)

    @property
    def normalizer(self) -> np.ndarray:
        return np.exp(self.log_normalizer)


def soft_classify(counts: NeighborCounts, model: ModelSpec, theta, gamma,
                  validate: bool = True) -> ClassifierOutput:
    """Compute every agent's exact single-hop posterior and MAP label.

    Parameters
    ----------
    counts : NeighborCounts
        Aggregated score histograms of a fully scored graph.
    model : ModelSpec
    theta, gamma
        Feasible model parameters (typically estimates, or true values for
        an oracle benchmark).

    Raises
    ------
    DegenerateModelError
        If some agent's unnormalized posterior vanishes for every state.
    """
    if validate:
        model.require_feasible(theta, gamma)
    if counts.n_scores != model.n_scores:
        raise ValueError("counts and model disagree on the score alphabet")
    tensor = model.tensor(theta, validate=False)
    prior = model.prior(gamma, validate=False)

    with np.errstate(divide="ignore"):
        log_prior = np.log(prior)
        # received score h from a neighbor of unknown state, self state l
        m_in = np.einsum("hml,m->hl", tensor, prior)
        # gave score h to a neighbor of unknown state, self state l
        m_out = np.einsum("hlm,m->hl", tensor, prior)
        # mutual neighbor: gave h, received k, neighbor state marginalized
        k_pair = np.einsum("hlm,kml,m->hkl", tensor, tensor, prior)
        log_m_in = np.log(m_in)
        log_m_out = np.log(m_out)
        log_k_pair = np.log(k_pair)

    log_v = (
        log_prior[None, :]
        + counted_log_factor(counts.received_only, log_m_in)
        + counted_log_factor(counts.given_only, log_m_out)
        + counted_log_factor(counts.mutual, log_k_pair)
    )
    log_z = logsumexp(log_v, axis=1)
    if np.any(np.isneginf(log_z)):
        bad = int(np.flatnonzero(np.isneginf(log_z))[0])
        raise DegenerateModelError(
            f"agent {bad}: every state has zero posterior probability")
    posterior = np.exp(log_v - log_z[:, None])
    labels = np.argmax(posterior, axis=1)
    return ClassifierOutput(
        posterior=posterior,
        labels=labels,
        log_unnormalized=log_v,
        log_normalizer=log_z,
    )


def map_classify(output: ClassifierOutput) -> np.ndarray:
    """Hard labels from a soft output: argmax with lowest-index tie break."""
    return np.argmax(output.posterior, axis=1)


def misclassification_rate(labels, true_states) -> float:
    """Fraction of agents whose label disagrees with the true state."""
    labels = np.asarray(labels)
    true_states = np.asarray(true_states)
    if labels.shape != true_states.shape:
        raise ValueError("labels and true_states must have equal length")
    return float(np.mean(labels != true_states))


def write_soft_csv(output: ClassifierOutput, path) -> None:
    """Write `agent, u_1..u_C, map_label` rows (1-based ids and labels)."""
    cols = ",".join(f"u_{l + 1}" for l in range(output.n_states))
    lines = [f"agent,{cols},map_label"]
    for i in range(output.n_agents):
        u = ",".join(repr(float(x)) for x in output.posterior[i])
        lines.append(f"{i + 1},{u},{int(output.labels[i]) + 1}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
