"""Directed score graphs, neighbor count aggregation, and communication schedules.

A score graph is a directed graph on N agents where an edge (i, j) means
"agent i evaluated agent j" and carries a score index h in {0..R-1}.  All
indices (agents, scores, states) are 0-based inside the package; the
plain-text serialization format is 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "ScoreGraph",
    "NeighborCounts",
    "CommSchedule",
    "sample_score_graph",
    "generate_scores",
    "aggregate_counts",
    "make_comm_schedule",
    "pushsum_matrix",
    "save_score_graph",
    "load_score_graph",
    "save_states",
    "load_states",
]


def as_rng(seed):
    """Coerce None, an int seed, a seed list, or a Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScoreGraph:
    """Immutable directed graph with an optional score index per edge.

    Parameters
    ----------
    n_agents : int
        Number of agents N (>= 2).
    n_scores : int
        Size R of the score alphabet (>= 2).
    edges : ndarray of shape (n, 2)
        Ordered pairs (evaluator, target), 0-based, no self loops, no
        duplicates.  Stored sorted lexicographically.
    scores : ndarray of shape (n,), optional
        Score index in {0..R-1} for each edge, aligned with `edges`.
        None for a graph whose scores have not been generated yet.
    """

    n_agents: int
    n_scores: int
    edges: np.ndarray
    scores: np.ndarray | None = None

    def __post_init__(self):
        if self.n_agents < 2:
            raise ValueError("a score graph needs at least 2 agents")
        if self.n_scores < 2:
            raise ValueError("score alphabet size must be >= 2")
        edges = np.asarray(self.edges, dtype=np.int64)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError("edges must have shape (n, 2)")
        if edges.shape[0] == 0:
            raise ValueError("a score graph needs at least one edge")
        if edges.min() < 0 or edges.max() >= self.n_agents:
            raise ValueError("edge endpoints out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self loops are not allowed")
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        keys = edges[:, 0] * self.n_agents + edges[:, 1]
        if np.any(np.diff(keys) == 0):
            raise ValueError("duplicate edges are not allowed")
        if np.bincount(edges[:, 1], minlength=self.n_agents).min() < 1:
            raise ValueError("every agent needs at least one incoming edge")
        object.__setattr__(self, "edges", _freeze(edges))
        if self.scores is not None:
            scores = np.asarray(self.scores, dtype=np.int64)
            if scores.shape != (edges.shape[0],):
                raise ValueError("scores must align with edges")
            if scores.min() < 0 or scores.max() >= self.n_scores:
                raise ValueError("score index out of range")
            object.__setattr__(self, "scores", _freeze(scores[order]))

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def has_scores(self) -> bool:
        return self.scores is not None

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 1], minlength=self.n_agents)

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.n_agents)

    def with_scores(self, scores) -> "ScoreGraph":
        """Return a copy of this graph carrying the given per-edge scores."""
        return ScoreGraph(self.n_agents, self.n_scores, self.edges, scores)


@dataclass(frozen=True)
class NeighborCounts:
    """Per-agent score histograms over the single-hop neighborhoods.

    For agent i, a neighbor j falls in exactly one of three classes:
    mutual (both (i,j) and (j,i) edges exist), received-only ((j,i) only),
    or given-only ((i,j) only).

    Fields
    ------
    received : (N, R) int array
        received[i, h] counts in-neighbors that scored i with h.
    mutual : (N, R, R) int array
        mutual[i, h, k] counts mutual neighbors j where i gave score h to j
        and received score k from j.
    received_only : (N, R) int array
        Histogram of scores received from non-mutual in-neighbors.
    given_only : (N, R) int array
        Histogram of scores given to non-mutual out-neighbors.
    in_degree : (N,) int array
        Number of incoming edges per agent.
    """

    received: np.ndarray
    mutual: np.ndarray
    received_only: np.ndarray
    given_only: np.ndarray
    in_degree: np.ndarray

    @property
    def n_agents(self) -> int:
        return self.received.shape[0]

    @property
    def n_scores(self) -> int:
        return self.received.shape[1]

    @property
    def n_edges(self) -> int:
        return int(self.received.sum())

    @property
    def per_score_totals(self) -> np.ndarray:
        """Network-wide received histogram, one total per score index."""
        return self.received.sum(axis=0)

    @property
    def phi(self) -> np.ndarray:
        """Empirical score distribution: per_score_totals / n_edges."""
        return self.per_score_totals / self.n_edges

    def validate(self) -> None:
        """Check internal consistency identities; raise AssertionError on failure."""
        assert np.array_equal(self.received.sum(axis=1), self.in_degree)
        # received = received_only + mutual summed over the given-score axis
        recombined = self.received_only + self.mutual.sum(axis=1)
        assert np.array_equal(recombined, self.received)
        # every non-mutual edge shows up once as given-only and once as received-only
        assert self.given_only.sum() == self.received_only.sum()
        # network-wide mutual histogram is symmetric in (given, received)
        total_mutual = self.mutual.sum(axis=0)
        assert np.array_equal(total_mutual, total_mutual.T)


def sample_score_graph(n_agents: int, edge_count_target: int, topology="cyclic-plus-random-edges",
                       rng=None) -> ScoreGraph:
    """Sample a score-graph topology (without scores).

    Parameters
    ----------
    n_agents : int
        Number of agents N >= 2.
    edge_count_target : int
        Exact number of directed edges, in [N, N^2 - N].
    topology : str or iterable
        "cyclic-plus-random-edges" starts from the directed N-cycle (which
        guarantees every agent one incoming edge) and adds uniformly random
        distinct extra edges; "complete" requires edge_count_target equal to
        N^2 - N; any other value is interpreted as an explicit edge list.
    rng : None, int, sequence, or numpy Generator
        Randomness source; fixed seeds give identical graphs.
    """
    if n_agents < 2:
        raise ValueError("n_agents must be >= 2")
    max_edges = n_agents * (n_agents - 1)
    if not n_agents <= edge_count_target <= max_edges:
        raise ValueError(
            f"edge_count_target must lie in [{n_agents}, {max_edges}]")
    if isinstance(topology, str):
        if topology == "complete":
            if edge_count_target != max_edges:
                raise ValueError("complete topology fixes edge count at N^2 - N")
            i, j = np.divmod(np.arange(n_agents * n_agents), n_agents)
            edges = np.column_stack([i, j])[i != j]
        elif topology == "cyclic-plus-random-edges":
            rng = as_rng(rng)
            idx = np.arange(n_agents)
            cycle = np.column_stack([idx, (idx + 1) % n_agents])
            extra = edge_count_target - n_agents
            if extra == 0:
                edges = cycle
            else:
                i, j = np.divmod(np.arange(n_agents * n_agents), n_agents)
                candidates = np.column_stack([i, j])
                keep = (i != j) & (j != (i + 1) % n_agents)
                candidates = candidates[keep]
                pick = rng.choice(candidates.shape[0], size=extra, replace=False)
                edges = np.vstack([cycle, candidates[pick]])
        else:
            raise ValueError(f"unknown topology family: {topology!r}")
    else:
        edges = np.asarray(list(topology), dtype=np.int64)
        if edges.shape[0] != edge_count_target:
            raise ValueError("explicit edge list does not match edge_count_target")
    # R is unknown until scores exist; use the minimum legal alphabet as a
    # placeholder that generate_scores replaces with the model's R.
    return ScoreGraph(n_agents, 2, edges)


def generate_scores(graph: ScoreGraph, model, theta, gamma, rng=None):
    """Draw hidden states and edge scores from a model.

    States are i.i.d. from the model prior; each edge score is drawn from the
    conditional score distribution given the evaluator and target states.
    Edges are processed in the graph's canonical (sorted) order from a single
    random stream, so a fixed seed fully determines the output.

    Returns
    -------
    (ScoreGraph, ndarray)
        The graph with scores attached (and n_scores set to the model's R),
        and the length-N array of true state indices.
    """
    rng = as_rng(rng)
    model.require_feasible(theta, gamma)
    prior = model.prior(gamma, validate=False)
    tensor = model.tensor(theta, validate=False)
    states = rng.choice(model.n_states, size=graph.n_agents, p=prior)
    probs = tensor[:, states[graph.edges[:, 0]], states[graph.edges[:, 1]]].T
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(graph.n_edges)
    scores = (u[:, None] >= cdf).sum(axis=1)
    scores = np.minimum(scores, model.n_scores - 1)  # guard cdf rounding
    scored = ScoreGraph(graph.n_agents, model.n_scores, graph.edges, scores)
    return scored, states


def aggregate_counts(graph: ScoreGraph) -> NeighborCounts:
    """Aggregate the per-agent histograms every estimator and the classifier use."""
    if not graph.has_scores:
        raise ValueError("graph has no scores; generate or load them first")
    n, big = graph.n_agents, graph.n_scores
    e, h = graph.edges, graph.scores
    keys = e[:, 0] * n + e[:, 1]          # sorted by construction
    rkeys = e[:, 1] * n + e[:, 0]
    pos = np.searchsorted(keys, rkeys)
    pos_clipped = np.minimum(pos, len(keys) - 1)
    has_rev = keys[pos_clipped] == rkeys

    received = np.zeros((n, big), dtype=np.int64)
    mutual = np.zeros((n, big, big), dtype=np.int64)
    received_only = np.zeros((n, big), dtype=np.int64)
    given_only = np.zeros((n, big), dtype=np.int64)

    np.add.at(received, (e[:, 1], h), 1)
    m = has_rev
    np.add.at(mutual, (e[m, 0], h[m], h[pos_clipped[m]]), 1)
    np.add.at(received_only, (e[~m, 1], h[~m]), 1)
    np.add.at(given_only, (e[~m, 0], h[~m]), 1)

    return NeighborCounts(
        received=_freeze(received),
        mutual=_freeze(mutual),
        received_only=_freeze(received_only),
        given_only=_freeze(given_only),
        in_degree=_freeze(received.sum(axis=1)),
    )


def pushsum_matrix(n_agents: int, frame: np.ndarray) -> np.ndarray:
    """Column-stochastic mixing matrix of one frame, with implicit self loops.

    Column j spreads mass 1/d_j to j itself and to every out-neighbor of j in
    the frame, where d_j counts the self loop plus frame out-edges.
    """
    out = np.zeros((n_agents, n_agents), dtype=bool)
    if len(frame):
        frame = np.asarray(frame, dtype=np.int64)
        out[frame[:, 0], frame[:, 1]] = True
    np.fill_diagonal(out, False)
    d = 1 + out.sum(axis=1)
    mat = out.T.astype(np.float64)
    np.fill_diagonal(mat, 1.0)
    return mat / d[None, :]


@dataclass(frozen=True)
class CommSchedule:
    """Periodic time-varying communication graph.

    frames[t % len(frames)] is the edge set active at round t.  Self loops
    are implicit: they are never stored but always count toward out-degrees
    and always deliver.  The schedule must satisfy the window-connectivity
    condition: the union of any Q consecutive frames is strongly connected.
    """

    n_agents: int
    frames: tuple
    window: int
    matrices: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        frames = tuple(
            _freeze(np.asarray(f, dtype=np.int64).reshape(-1, 2)) for f in self.frames)
        object.__setattr__(self, "frames", frames)
        mats = tuple(_freeze(pushsum_matrix(self.n_agents, f)) for f in frames)
        object.__setattr__(self, "matrices", mats)

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    def frame(self, t: int) -> np.ndarray:
        return self.frames[t % self.n_frames]

    def matrix(self, t: int) -> np.ndarray:
        return self.matrices[t % self.n_frames]

    def out_degrees(self, t: int) -> np.ndarray:
        f = self.frame(t)
        d = np.ones(self.n_agents, dtype=np.int64)
        if len(f):
            d += np.bincount(f[:, 0], minlength=self.n_agents)
        return d

    def satisfies_window_connectivity(self) -> bool:
        """Check that every Q-round window union is strongly connected."""
        p = self.n_frames
        for start in range(p):
            adj = np.eye(self.n_agents, dtype=bool)
            for k in range(self.window):
                f = self.frames[(start + k) % p]
                if len(f):
                    adj[f[:, 0], f[:, 1]] = True
            ncomp, _ = connected_components(
                csr_matrix(adj), directed=True, connection="strong")
            if ncomp != 1:
                return False
        return True


def make_comm_schedule(n_agents: int, family: str, window: int = 1, rng=0) -> CommSchedule:
    """Build one of the stock schedule families and verify window connectivity.

    Families
    --------
    "static-complete" : one frame with every ordered pair.
    "static-cycle"    : one frame with the directed N-cycle.
    "periodic-edge-partition" : the N-cycle's edges dealt (after an rng
        shuffle) round-robin into `window` frames; no single frame is
        strongly connected for window > 1, but each window-union is the
        full cycle.

    The default rng seed is fixed so repeated calls build the same schedule.
    """
    if n_agents < 2:
        raise ValueError("n_agents must be >= 2")
    idx = np.arange(n_agents)
    cycle = np.column_stack([idx, (idx + 1) % n_agents])
    if family == "static-complete":
        i, j = np.divmod(np.arange(n_agents * n_agents), n_agents)
        frames = [np.column_stack([i, j])[i != j]]
    elif family == "static-cycle":
        frames = [cycle]
    elif family == "periodic-edge-partition":
        rng = as_rng(rng)
        order = rng.permutation(n_agents)
        shuffled = cycle[order]
        frames = [shuffled[k::window] for k in range(window)]
    else:
        raise ValueError(f"unknown schedule family: {family!r}")
    schedule = CommSchedule(n_agents, tuple(frames), window)
    if not schedule.satisfies_window_connectivity():
        raise ValueError(
            f"family {family!r} with window {window} violates window connectivity")
    return schedule


def save_score_graph(graph: ScoreGraph, path) -> None:
    """Write the 1-based edge-list format: header `scoregraph N R n`, lines `i j h`."""
    if not graph.has_scores:
        raise ValueError("only scored graphs are serializable")
    lines = [f"scoregraph {graph.n_agents} {graph.n_scores} {graph.n_edges}"]
    for (i, j), h in zip(graph.edges, graph.scores):
        lines.append(f"{i + 1} {j + 1} {h + 1}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_score_graph(path) -> ScoreGraph:
    """Read the edge-list format written by save_score_graph."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "scoregraph":
            raise ValueError("not a score graph file")
        n_agents, n_scores, n_edges = (int(x) for x in header[1:])
        rows = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    if rows.shape != (n_edges, 3):
        raise ValueError("edge count does not match header")
    return ScoreGraph(n_agents, n_scores, rows[:, :2] - 1, rows[:, 2] - 1)


def save_states(states, path) -> None:
    """Write states as 1-based `i x_index` lines."""
    states = np.asarray(states, dtype=np.int64)
    with open(path, "w") as fh:
        for i, x in enumerate(states):
            fh.write(f"{i + 1} {x + 1}\n")


def load_states(path) -> np.ndarray:
    rows = np.loadtxt(path, dtype=np.int64, ndmin=2)
    states = np.full(rows.shape[0], -1, dtype=np.int64)
    states[rows[:, 0] - 1] = rows[:, 1] - 1
    if states.min() < 0:
        raise ValueError("missing agent ids in states file")
    return states
