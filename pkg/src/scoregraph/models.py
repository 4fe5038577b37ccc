"""Parametrized score models.

A model couples a conditional score distribution with a state prior:

    tensor(theta)[h, l, m] = P(score h | evaluator state l, target state m)
    prior(gamma)[l]        = P(state l)

together with analytic gradients and a compact convex feasible set for the
stacked parameter vector z = [theta, gamma].  The evaluator state is always
the first state axis of the tensor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError

__all__ = [
    "Box",
    "Simplex",
    "BlockSet",
    "FeasibleSet",
    "ModelSpec",
    "ModelGradients",
    "project_simplex",
    "preparata_model",
    "reliability_model",
    "social_ranking_model",
    "categorical_model",
    "eval_tensor",
    "eval_prior",
    "eval_gradients",
]

FEAS_TOL = 1e-9


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of a vector onto the probability simplex."""
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    cond = u - css / ind > 0
    rho = ind[cond][-1]
    tau = css[cond][-1] / rho
    return np.maximum(v - tau, 0.0)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box constraint on a contiguous slice of parameters."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=np.float64))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=np.float64))
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("box bounds must satisfy lo < hi elementwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    def project(self, v):
        return np.clip(v, self.lo, self.hi)

    def contains(self, v, tol=FEAS_TOL) -> bool:
        return bool(np.all(v >= self.lo - tol) and np.all(v <= self.hi + tol))

    def centroid(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def sample_interior(self, rng, margin=0.05) -> np.ndarray:
        w = self.hi - self.lo
        return rng.uniform(self.lo + margin * w, self.hi - margin * w)


@dataclass(frozen=True)
class Simplex:
    """Probability-simplex constraint on a contiguous slice of parameters."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("simplex dimension must be >= 1")

    def project(self, v):
        return project_simplex(v)

    def contains(self, v, tol=FEAS_TOL) -> bool:
        return bool(np.all(v >= -tol) and abs(float(np.sum(v)) - 1.0) <= tol)

    def centroid(self) -> np.ndarray:
        return np.full(self.dim, 1.0 / self.dim)

    def sample_interior(self, rng, margin=0.05) -> np.ndarray:
        raw = rng.dirichlet(np.ones(self.dim))
        return (1.0 - margin) * raw + margin * self.centroid()


@dataclass(frozen=True)
class BlockSet:
    """A product of box/simplex blocks over one flat parameter vector."""

    blocks: tuple

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def _slices(self):
        start = 0
        for b in self.blocks:
            yield slice(start, start + b.dim), b
            start += b.dim

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        out = np.empty_like(v)
        for sl, b in self._slices():
            out[sl] = b.project(v[sl])
        return out

    def contains(self, v, tol=FEAS_TOL) -> bool:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dim,):
            return False
        return all(b.contains(v[sl], tol) for sl, b in self._slices())

    def centroid(self) -> np.ndarray:
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([b.centroid() for b in self.blocks])

    def sample_interior(self, rng, margin=0.05) -> np.ndarray:
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([b.sample_interior(rng, margin) for b in self.blocks])

    def box_dims(self) -> np.ndarray:
        """Flat indices that belong to box (not simplex) blocks."""
        idx = []
        for sl, b in self._slices():
            if isinstance(b, Box):
                idx.extend(range(sl.start, sl.stop))
        return np.asarray(idx, dtype=np.int64)


@dataclass(frozen=True)
class FeasibleSet:
    """Feasible set for the stacked vector z = [theta, gamma]."""

    theta: BlockSet
    gamma: BlockSet

    @property
    def theta_dim(self) -> int:
        return self.theta.dim

    @property
    def gamma_dim(self) -> int:
        return self.gamma.dim

    @property
    def dim(self) -> int:
        return self.theta.dim + self.gamma.dim

    def split(self, z):
        z = np.asarray(z, dtype=np.float64)
        return z[: self.theta.dim], z[self.theta.dim:]

    def join(self, theta, gamma) -> np.ndarray:
        return np.concatenate([
            np.atleast_1d(np.asarray(theta, dtype=np.float64)).ravel(),
            np.atleast_1d(np.asarray(gamma, dtype=np.float64)).ravel(),
        ])

    def project(self, z) -> np.ndarray:
        t, g = self.split(z)
        return np.concatenate([self.theta.project(t), self.gamma.project(g)])

    def contains(self, z, tol=FEAS_TOL) -> bool:
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.dim,):
            return False
        t, g = self.split(z)
        return self.theta.contains(t, tol) and self.gamma.contains(g, tol)

    def centroid(self) -> np.ndarray:
        return np.concatenate([self.theta.centroid(), self.gamma.centroid()])

    def sample_interior(self, rng, margin=0.05) -> np.ndarray:
        return np.concatenate([
            self.theta.sample_interior(rng, margin),
            self.gamma.sample_interior(rng, margin),
        ])


@dataclass(frozen=True)
class ModelGradients:
    """Analytic partials of the score tensor and the prior.

    d_tensor[k, h, l, m] = d tensor[h, l, m] / d theta_k
    d_prior[k, l]        = d prior[l] / d gamma_k

    Both tables sum to zero over their probability axis because the
    normalization is identically one.
    """

    d_tensor: np.ndarray
    d_prior: np.ndarray


@dataclass(frozen=True)
class ModelSpec:
    """A concrete score model: dimensions, value maps, callables, feasible set."""

    name: str
    n_states: int
    n_scores: int
    state_values: np.ndarray
    score_values: np.ndarray
    feasible: FeasibleSet
    label_swap_symmetric: bool
    tensor_fn: callable = field(repr=False, compare=False)
    prior_fn: callable = field(repr=False, compare=False)
    tensor_grad_fn: callable = field(repr=False, compare=False)
    prior_grad_fn: callable = field(repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "state_values",
                           np.asarray(self.state_values, dtype=np.float64))
        object.__setattr__(self, "score_values",
                           np.asarray(self.score_values, dtype=np.float64))

    @property
    def theta_dim(self) -> int:
        return self.feasible.theta_dim

    @property
    def gamma_dim(self) -> int:
        return self.feasible.gamma_dim

    def _theta(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64)).ravel()
        if theta.shape != (self.theta_dim,):
            raise InfeasibleError(
                f"{self.name}: theta must have {self.theta_dim} components")
        return theta

    def _gamma(self, gamma) -> np.ndarray:
        gamma = np.atleast_1d(np.asarray(gamma, dtype=np.float64)).ravel()
        if gamma.shape != (self.gamma_dim,):
            raise InfeasibleError(
                f"{self.name}: gamma must have {self.gamma_dim} components")
        return gamma

    def require_feasible(self, theta, gamma, tol=FEAS_TOL) -> None:
        theta, gamma = self._theta(theta), self._gamma(gamma)
        if not self.feasible.theta.contains(theta, tol):
            raise InfeasibleError(f"{self.name}: theta {theta} is infeasible")
        if not self.feasible.gamma.contains(gamma, tol):
            raise InfeasibleError(f"{self.name}: gamma {gamma} is infeasible")

    def tensor(self, theta, validate: bool = True) -> np.ndarray:
        theta = self._theta(theta)
        if validate and not self.feasible.theta.contains(theta):
            raise InfeasibleError(f"{self.name}: theta {theta} is infeasible")
        return self.tensor_fn(theta)

    def prior(self, gamma, validate: bool = True) -> np.ndarray:
        gamma = self._gamma(gamma)
        if validate and not self.feasible.gamma.contains(gamma):
            raise InfeasibleError(f"{self.name}: gamma {gamma} is infeasible")
        return self.prior_fn(gamma)

    def tensor_grad(self, theta) -> np.ndarray:
        return self.tensor_grad_fn(self._theta(theta))

    def prior_grad(self, gamma) -> np.ndarray:
        return self.prior_grad_fn(self._gamma(gamma))


def eval_tensor(model: ModelSpec, theta, validate: bool = True) -> np.ndarray:
    """Evaluate the (R, C, C) conditional score table at theta."""
    return model.tensor(theta, validate=validate)


def eval_prior(model: ModelSpec, gamma, validate: bool = True) -> np.ndarray:
    """Evaluate the length-C state prior at gamma."""
    return model.prior(gamma, validate=validate)


def eval_gradients(model: ModelSpec, theta, gamma) -> ModelGradients:
    """Evaluate analytic parameter gradients of tensor and prior."""
    return ModelGradients(model.tensor_grad(theta), model.prior_grad(gamma))


def _bernoulli_prior(gamma):
    g = float(gamma[0])
    return np.array([1.0 - g, g])


def _bernoulli_prior_grad(gamma):
    return np.array([[-1.0, 1.0]])


def preparata_model() -> ModelSpec:
    """Binary states, binary scores; the probabilistic mutual-test model.

    A state-0 (healthy) evaluator reports the target's state exactly; a
    state-1 (faulty) evaluator reports uniformly at random.  No theta; gamma
    is the scalar fault probability in [0, 1].
    """
    tensor = np.empty((2, 2, 2))
    tensor[:, 0, 0] = (1.0, 0.0)
    tensor[:, 0, 1] = (0.0, 1.0)
    tensor[:, 1, 0] = (0.5, 0.5)
    tensor[:, 1, 1] = (0.5, 0.5)
    tensor.setflags(write=False)
    empty_grad = np.zeros((0, 2, 2, 2))
    return ModelSpec(
        name="preparata",
        n_states=2,
        n_scores=2,
        state_values=np.array([0.0, 1.0]),
        score_values=np.array([0.0, 1.0]),
        feasible=FeasibleSet(
            theta=BlockSet(()),
            gamma=BlockSet((Box(np.array([0.0]), np.array([1.0])),)),
        ),
        label_swap_symmetric=False,
        tensor_fn=lambda theta: tensor,
        prior_fn=_bernoulli_prior,
        tensor_grad_fn=lambda theta: empty_grad,
        prior_grad_fn=_bernoulli_prior_grad,
    )


def reliability_model(n_scores: int) -> ModelSpec:
    """Binary states, R graded scores 0..R-1.

    A state-0 evaluator scores the target on a linear ramp (low scores for
    state-0 targets, high for state-1); a state-1 evaluator scores uniformly.
    Collapses to the binary mutual-test model at R = 2.
    """
    if n_scores < 2:
        raise ValueError("reliability model needs n_scores >= 2")
    big = n_scores
    r = np.arange(big, dtype=np.float64)
    ramp = r / r[-1]
    tensor = np.empty((big, 2, 2))
    tensor[:, 0, 0] = (2.0 / big) * (1.0 - ramp)
    tensor[:, 0, 1] = (2.0 / big) * ramp
    tensor[:, 1, 0] = 1.0 / big
    tensor[:, 1, 1] = 1.0 / big
    tensor.setflags(write=False)
    empty_grad = np.zeros((0, big, 2, 2))
    return ModelSpec(
        name="reliability",
        n_states=2,
        n_scores=big,
        state_values=np.array([0.0, 1.0]),
        score_values=r,
        feasible=FeasibleSet(
            theta=BlockSet(()),
            gamma=BlockSet((Box(np.array([0.0]), np.array([1.0])),)),
        ),
        label_swap_symmetric=False,
        tensor_fn=lambda theta: tensor,
        prior_fn=_bernoulli_prior,
        tensor_grad_fn=lambda theta: empty_grad,
        prior_grad_fn=_bernoulli_prior_grad,
    )


def _binomial_prior(n_states: int):
    coef = np.array([math.comb(n_states - 1, l) for l in range(n_states)],
                    dtype=np.float64)
    top = n_states - 1

    def prior(gamma):
        g = float(gamma[0])
        l = np.arange(n_states)
        return coef * g ** l * (1.0 - g) ** (top - l)

    def prior_grad(gamma):
        g = float(gamma[0])
        out = np.zeros(n_states)
        for l in range(n_states):
            t1 = l * g ** (l - 1) * (1.0 - g) ** (top - l) if l > 0 else 0.0
            t2 = (top - l) * g ** l * (1.0 - g) ** (top - l - 1) if l < top else 0.0
            out[l] = coef[l] * (t1 - t2)
        return out[None, :]

    return prior, prior_grad


THETA_BOX = (0.05, 10.0)


def social_ranking_model(n_states: int, n_scores: int, distance=None) -> ModelSpec:
    """Graded states 1..C and scores 1..R with a dispersion-controlled kernel.

    The score likelihood concentrates around scores whose normalized
    shortfall (r_C - r_h)/r_R matches the normalized state distance
    d(c_l, c_m)/c_C; theta > 0 is the dispersion (small theta = sharp).
    The prior on the state index is Binomial(C-1, gamma).

    `distance` is a callable d(a, b) on state values or a precomputed C-by-C
    matrix; default |a - b|.  It must be nonnegative with d(a, b) = 0 exactly
    when a = b.
    """
    if n_states < 2 or n_scores < 2:
        raise ValueError("social ranking model needs n_states, n_scores >= 2")
    c_vals = np.arange(1, n_states + 1, dtype=np.float64)
    r_vals = np.arange(1, n_scores + 1, dtype=np.float64)
    if distance is None:
        distance = lambda a, b: abs(a - b)
    if callable(distance):
        dmat = np.array([[float(distance(a, b)) for b in c_vals] for a in c_vals])
    else:
        dmat = np.asarray(distance, dtype=np.float64)
        if dmat.shape != (n_states, n_states):
            raise ValueError("distance matrix must be C by C")
    if np.any(dmat < 0):
        raise ValueError("distance must be nonnegative")
    if np.any(np.diag(dmat) != 0) or np.any((dmat == 0) & ~np.eye(n_states, dtype=bool)):
        raise ValueError("distance must vanish exactly on equal states")
    # offsets[h, l, m]: how far score h sits from the score suggested by the
    # state distance of the pair (l, m)
    shortfall = (r_vals[-1] - r_vals) / r_vals[-1]
    offsets = shortfall[:, None, None] - (dmat / c_vals[-1])[None, :, :]
    # the gamma -> 1 - gamma relabeling symmetry needs a reversal-invariant distance
    swap_ok = bool(np.allclose(dmat, dmat[::-1, ::-1].T) and np.allclose(dmat, dmat.T))

    def tensor(theta):
        t = float(theta[0])
        w = np.exp(-((offsets / t) ** 2))
        return w / w.sum(axis=0, keepdims=True)

    def tensor_grad(theta):
        t = float(theta[0])
        p = tensor(theta)
        a2 = offsets ** 2
        mean_a2 = (p * a2).sum(axis=0, keepdims=True)
        return ((2.0 / t ** 3) * p * (a2 - mean_a2))[None, ...]

    prior, prior_grad = _binomial_prior(n_states)
    return ModelSpec(
        name="social-ranking",
        n_states=n_states,
        n_scores=n_scores,
        state_values=c_vals,
        score_values=r_vals,
        feasible=FeasibleSet(
            theta=BlockSet((Box(np.array([THETA_BOX[0]]), np.array([THETA_BOX[1]])),)),
            gamma=BlockSet((Box(np.array([0.0]), np.array([1.0])),)),
        ),
        label_swap_symmetric=swap_ok,
        tensor_fn=tensor,
        prior_fn=prior,
        tensor_grad_fn=tensor_grad,
        prior_grad_fn=prior_grad,
    )


def categorical_model(n_states: int, n_scores: int) -> ModelSpec:
    """Fully free tables: theta holds all R*C^2 score masses, gamma all C prior masses.

    theta is laid out as C*C blocks of length R, block (l, m) at flat offset
    (l*C + m)*R, each constrained to the probability simplex; gamma is one
    C-simplex.  Gradients are constant indicator tables.
    """
    if n_states < 2 or n_scores < 2:
        raise ValueError("categorical model needs n_states, n_scores >= 2")
    big_c, big_r = n_states, n_scores
    tdim = big_r * big_c * big_c

    def tensor(theta):
        return theta.reshape(big_c, big_c, big_r).transpose(2, 0, 1)

    d_tensor = np.zeros((tdim, big_r, big_c, big_c))
    for l in range(big_c):
        for m in range(big_c):
            for h in range(big_r):
                d_tensor[(l * big_c + m) * big_r + h, h, l, m] = 1.0
    d_tensor.setflags(write=False)
    d_prior = np.eye(big_c)
    d_prior.setflags(write=False)
    return ModelSpec(
        name="categorical",
        n_states=big_c,
        n_scores=big_r,
        state_values=np.arange(1, big_c + 1, dtype=np.float64),
        score_values=np.arange(1, big_r + 1, dtype=np.float64),
        feasible=FeasibleSet(
            theta=BlockSet(tuple(Simplex(big_r) for _ in range(big_c * big_c))),
            gamma=BlockSet((Simplex(big_c),)),
        ),
        label_swap_symmetric=False,
        tensor_fn=tensor,
        prior_fn=lambda gamma: np.array(gamma, dtype=np.float64),
        tensor_grad_fn=lambda theta: d_tensor,
        prior_grad_fn=lambda gamma: d_prior,
    )
