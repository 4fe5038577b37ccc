"""Monte Carlo harness: edge-count sweeps, RMSE and misclassification tables.

A sweep samples, for each edge count n in a list and each trial, a fresh
graph and score realization, runs the configured estimators, classifies every
agent both with each estimate and with the true parameters (the "oracle"
benchmark), and aggregates per-parameter RMSE and per-classifier
misclassification rates.  Everything is deterministic given the master seed:
trial k at sweep point p draws from an independent stream keyed by
(master_seed, p, k).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .classifier import ClassifierOutput, misclassification_rate, soft_classify, write_soft_csv
from .distributed import run_distributed, write_trajectory_csv
from .estimators import (EstimateResult, SolverConfig, estimate, exact_problem,
                         fr_problem, nr_problem, write_trace_csv)
from .graph import (aggregate_counts, as_rng, generate_scores, make_comm_schedule,
                    sample_score_graph, save_score_graph, save_states)
from .models import (ModelSpec, categorical_model, preparata_model,
                     reliability_model, social_ranking_model)

__all__ = [
    "ExperimentConfig",
    "SweepPoint",
    "SweepResult",
    "SingleRunResult",
    "CheckResult",
    "build_model",
    "parse_config_file",
    "run_sweep",
    "run_social_ranking_suite",
    "run_single",
    "emit_outputs",
    "emit_single_outputs",
    "read_rmse_csv",
    "read_misclass_csv",
    "run_invariant_checks",
]

KNOWN_ESTIMATORS = ("NR", "FR", "FR-distributed", "exact", "oracle")
FULL_SCALE_AGENTS = 300
FULL_SCALE_TRIALS = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one sweep needs; flat enough for a key-value config file."""

    model: str = "reliability"
    n_states: int | None = None
    n_scores: int | None = None
    theta: tuple = ()
    gamma: tuple = (0.3,)
    n_agents: int = 50
    sweep: tuple | None = None
    trials: int = 100
    estimators: tuple = ("NR", "FR")
    comm_family: str = "static-complete"
    comm_window: int = 1
    solver_alpha: float | None = None
    solver_rounds: int = 2000
    solver_tol: float = 1e-8
    solver_max_iters: int = 5000
    solver_grid_points: int = 33
    master_seed: int = 0
    out_dir: str | None = None
    full_scale: bool = False

    def resolved(self) -> "ExperimentConfig":
        """Apply the full-scale switch and the automatic sweep rule."""
        cfg = self
        if cfg.full_scale:
            cfg = replace(cfg, n_agents=FULL_SCALE_AGENTS, trials=FULL_SCALE_TRIALS,
                          full_scale=False)
        if cfg.sweep is None:
            n = cfg.n_agents
            cfg = replace(cfg, sweep=(n, 10 * n, n * (n - 1)))
        return cfg

    def validate(self) -> None:
        cfg = self.resolved()
        if cfg.trials < 1:
            raise ValueError("trials must be >= 1")
        n, max_edges = cfg.n_agents, cfg.n_agents * (cfg.n_agents - 1)
        for v in cfg.sweep:
            if not n <= v <= max_edges:
                raise ValueError(f"sweep value {v} outside [{n}, {max_edges}]")
        for est in cfg.estimators:
            if est not in KNOWN_ESTIMATORS:
                raise ValueError(f"unknown estimator {est!r}")
        if "exact" in cfg.estimators and cfg.n_agents > 12:
            raise ValueError("exact estimator is limited to 12 agents")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            alpha=self.solver_alpha,
            max_iters=self.solver_max_iters,
            tol=self.solver_tol,
            grid_points=self.solver_grid_points,
            seed=self.master_seed,
        )


def build_model(config: ExperimentConfig) -> ModelSpec:
    """Instantiate the configured model with its conventional defaults."""
    name = config.model
    if name == "preparata":
        return preparata_model()
    if name == "reliability":
        return reliability_model(config.n_scores or 5)
    if name == "social-ranking":
        return social_ranking_model(config.n_states or 3, config.n_scores or 3)
    if name == "categorical":
        return categorical_model(config.n_states or 2, config.n_scores or 2)
    raise ValueError(f"unknown model {name!r}")


def _true_params(config: ExperimentConfig, model: ModelSpec):
    theta = np.asarray(config.theta, dtype=np.float64)
    if theta.size == 0 and model.theta_dim:
        theta = model.feasible.theta.centroid()
        if model.name == "social-ranking":
            theta = np.array([0.5])
    gamma = np.asarray(config.gamma, dtype=np.float64)
    if gamma.size == 0 or (model.gamma_dim > 1 and gamma.size == 1):
        gamma = model.feasible.gamma.centroid()
    model.require_feasible(theta, gamma)
    return theta, gamma


def _param_names(model: ModelSpec) -> tuple:
    names = []
    if model.theta_dim == 1:
        names.append("theta")
    else:
        names += [f"theta_{k + 1}" for k in range(model.theta_dim)]
    if model.gamma_dim == 1:
        names.append("gamma")
    else:
        names += [f"gamma_{k + 1}" for k in range(model.gamma_dim)]
    return tuple(names)


def _squared_errors(model: ModelSpec, theta_hat, gamma_hat, theta_true, gamma_true):
    errs = []
    for k in range(model.theta_dim):
        errs.append((float(theta_hat[k]) - float(theta_true[k])) ** 2)
    if model.label_swap_symmetric and model.gamma_dim == 1:
        g, gt = float(gamma_hat[0]), float(gamma_true[0])
        errs.append(min(abs(g - gt), abs(g - (1.0 - gt))) ** 2)
    else:
        for k in range(model.gamma_dim):
            errs.append((float(gamma_hat[k]) - float(gamma_true[k])) ** 2)
    return errs


def _canonical_gamma(model: ModelSpec, z: np.ndarray) -> np.ndarray:
    """Apply the label-swap canonical branch to a raw iterate."""
    if model.label_swap_symmetric and model.gamma_dim == 1:
        g = z[model.theta_dim]
        if g > 0.5:
            z = z.copy()
            z[model.theta_dim] = 1.0 - g
    return z


def _run_estimator(name, model, graph, counts, config, schedule):
    """Return (theta_hat, gamma_hat, extras dict) for one estimator on one trial."""
    solver = config.solver_config()
    if name == "NR":
        res = estimate(nr_problem(counts, model), solver)
        return res.theta, res.gamma, {}
    if name == "FR":
        res = estimate(fr_problem(counts, model), solver)
        return res.theta, res.gamma, {}
    if name == "exact":
        res = estimate(exact_problem(graph, model),
                       replace(solver, grid_points=21))
        return res.theta, res.gamma, {}
    if name == "FR-distributed":
        run = run_distributed(
            counts, model, schedule,
            alpha=config.solver_alpha,
            n_rounds=config.solver_rounds,
            record_every=max(1, config.solver_rounds),
            rng=config.master_seed,
        )
        z = _canonical_gamma(model, run.final_z[0])
        theta, gamma = model.feasible.split(z)
        return theta, gamma, {"spread": run.spread()}
    raise ValueError(f"unknown estimator {name!r}")


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated results at one edge count."""

    n_edges: int
    trials: int
    rmse: dict
    misclass: dict
    spread: dict
    wall_clock: float


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    model_name: str
    param_names: tuple
    estimator_names: tuple
    classifier_names: tuple
    points: tuple
    wall_clock: float


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Run the full Monte Carlo sweep described by the config."""
    config.validate()
    cfg = config.resolved()
    model = build_model(cfg)
    theta_true, gamma_true = _true_params(cfg, model)
    names = _param_names(model)
    schedule = None
    if "FR-distributed" in cfg.estimators:
        schedule = make_comm_schedule(
            cfg.n_agents, cfg.comm_family, cfg.comm_window,
            rng=np.random.default_rng([cfg.master_seed, 0xC0FFEE]))
    fitted = tuple(est for est in cfg.estimators if est != "oracle")
    points = []
    t_start = time.perf_counter()
    for n_edges in cfg.sweep:
        p_start = time.perf_counter()
        sq_errors = {est: [] for est in fitted}
        mis = {est: [] for est in fitted}
        mis["oracle"] = []
        spreads = {est: [] for est in fitted if est == "FR-distributed"}
        for trial in range(cfg.trials):
            rng = np.random.default_rng([cfg.master_seed, n_edges, trial])
            graph = sample_score_graph(cfg.n_agents, n_edges,
                                       "cyclic-plus-random-edges", rng)
            scored, states = generate_scores(graph, model, theta_true, gamma_true, rng)
            counts = aggregate_counts(scored)
            oracle_out = soft_classify(counts, model, theta_true, gamma_true)
            mis["oracle"].append(misclassification_rate(oracle_out.labels, states))
            for est in fitted:
                theta_hat, gamma_hat, extras = _run_estimator(
                    est, model, scored, counts, cfg, schedule)
                sq_errors[est].append(
                    _squared_errors(model, theta_hat, gamma_hat, theta_true, gamma_true))
                est_out = soft_classify(counts, model, theta_hat, gamma_hat)
                mis[est].append(misclassification_rate(est_out.labels, states))
                if "spread" in extras:
                    spreads[est].append(extras["spread"])
        rmse = {
            est: dict(zip(names, np.sqrt(np.mean(np.asarray(sq_errors[est]), axis=0))))
            for est in fitted
        }
        points.append(SweepPoint(
            n_edges=n_edges,
            trials=cfg.trials,
            rmse=rmse,
            misclass={k: float(np.mean(v)) for k, v in mis.items()},
            spread={k: float(np.max(v)) for k, v in spreads.items() if v},
            wall_clock=time.perf_counter() - p_start,
        ))
    return SweepResult(
        config=cfg,
        model_name=model.name,
        param_names=names,
        estimator_names=fitted,
        classifier_names=("oracle", *fitted),
        points=tuple(points),
        wall_clock=time.perf_counter() - t_start,
    )


def run_social_ranking_suite(config: ExperimentConfig) -> SweepResult:
    """Sweep wrapper for the graded-state model with joint (theta, gamma) RMSE."""
    cfg = config.resolved()
    if cfg.model != "social-ranking":
        raise ValueError("run_social_ranking_suite requires model = social-ranking")
    model = build_model(cfg)
    if model.n_states != 3 or model.n_scores != 3:
        raise ValueError("the social ranking suite is defined for C = 3, R = 3")
    return run_sweep(cfg)


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_outputs(result: SweepResult, out_dir) -> dict:
    """Write rmse.csv, misclass.csv, and a meta.json sidecar; return the paths.

    CSV numerics round-trip exactly (shortest-repr floats); only the sidecar
    carries timestamps, so identical runs produce byte-identical CSVs.
    """
    os.makedirs(out_dir, exist_ok=True)
    rmse_path = os.path.join(out_dir, "rmse.csv")
    lines = ["n,estimator,param,rmse"]
    for point in result.points:
        for est in result.estimator_names:
            for name in result.param_names:
                lines.append(f"{point.n_edges},{est},{name},{_fmt(point.rmse[est][name])}")
    with open(rmse_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    mis_path = os.path.join(out_dir, "misclass.csv")
    lines = ["n,classifier,rate"]
    for point in result.points:
        for cls in result.classifier_names:
            lines.append(f"{point.n_edges},{cls},{_fmt(point.misclass[cls])}")
    with open(mis_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    meta_path = os.path.join(out_dir, "meta.json")
    meta = {
        "package": "scoregraph",
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "wall_clock_seconds": result.wall_clock,
        "config": asdict(result.config),
        "model": result.model_name,
        "points": [
            {"n": p.n_edges, "trials": p.trials, "wall_clock_seconds": p.wall_clock,
             "spread": p.spread}
            for p in result.points
        ],
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return {"rmse": rmse_path, "misclass": mis_path, "meta": meta_path}


def read_rmse_csv(path) -> dict:
    """Parse rmse.csv back into {(n, estimator, param): rmse}."""
    out = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "n,estimator,param,rmse":
            raise ValueError("not an rmse.csv file")
        for line in fh:
            n, est, name, value = line.strip().split(",")
            out[(int(n), est, name)] = float(value)
    return out


def read_misclass_csv(path) -> dict:
    """Parse misclass.csv back into {(n, classifier): rate}."""
    out = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "n,classifier,rate":
            raise ValueError("not a misclass.csv file")
        for line in fh:
            n, cls, value = line.strip().split(",")
            out[(int(n), cls)] = float(value)
    return out


@dataclass(frozen=True)
class SingleRunResult:
    """One fully exported instance: data, estimates, classifier outputs, traces."""

    config: ExperimentConfig
    model_name: str
    param_names: tuple
    graph: object
    states: np.ndarray
    estimates: dict
    outputs: dict
    traces: dict
    distributed_run: object | None


def run_single(config: ExperimentConfig) -> SingleRunResult:
    """Run a single instance at the first sweep point with full exports."""
    config.validate()
    cfg = config.resolved()
    model = build_model(cfg)
    theta_true, gamma_true = _true_params(cfg, model)
    rng = np.random.default_rng([cfg.master_seed, cfg.sweep[0], 0])
    graph = sample_score_graph(cfg.n_agents, cfg.sweep[0],
                               "cyclic-plus-random-edges", rng)
    scored, states = generate_scores(graph, model, theta_true, gamma_true, rng)
    counts = aggregate_counts(scored)
    estimates = {"oracle": (theta_true, gamma_true)}
    outputs = {"oracle": soft_classify(counts, model, theta_true, gamma_true)}
    traces = {}
    distributed_run = None
    solver = replace(cfg.solver_config(), record_trace=True)
    for est in cfg.estimators:
        if est == "oracle":
            continue
        if est == "FR-distributed":
            schedule = make_comm_schedule(
                cfg.n_agents, cfg.comm_family, cfg.comm_window,
                rng=np.random.default_rng([cfg.master_seed, 0xC0FFEE]))
            distributed_run = run_distributed(
                counts, model, schedule, alpha=cfg.solver_alpha,
                n_rounds=cfg.solver_rounds, rng=cfg.master_seed)
            z = _canonical_gamma(model, distributed_run.final_z[0])
            theta_hat, gamma_hat = model.feasible.split(z)
        else:
            problem = {"NR": lambda: nr_problem(counts, model),
                       "FR": lambda: fr_problem(counts, model),
                       "exact": lambda: exact_problem(scored, model)}[est]()
            res = estimate(problem, solver)
            theta_hat, gamma_hat = res.theta, res.gamma
            traces[est] = res.solve
        estimates[est] = (theta_hat, gamma_hat)
        outputs[est] = soft_classify(counts, model, theta_hat, gamma_hat)
    return SingleRunResult(
        config=cfg,
        model_name=model.name,
        param_names=_param_names(model),
        graph=scored,
        states=states,
        estimates=estimates,
        outputs=outputs,
        traces=traces,
        distributed_run=distributed_run,
    )


def emit_single_outputs(result: SingleRunResult, out_dir) -> dict:
    """Write graph/states files, per-classifier soft CSVs, solver traces, estimates."""
    os.makedirs(out_dir, exist_ok=True)
    model = build_model(result.config)
    paths = {}
    graph_path = os.path.join(out_dir, "graph.txt")
    save_score_graph(result.graph, graph_path)
    paths["graph"] = graph_path
    states_path = os.path.join(out_dir, "states.txt")
    save_states(result.states, states_path)
    paths["states"] = states_path
    for name, output in result.outputs.items():
        p = os.path.join(out_dir, f"soft_{name}.csv")
        write_soft_csv(output, p)
        paths[f"soft_{name}"] = p
    for name, solve in result.traces.items():
        p = os.path.join(out_dir, f"trace_{name}.csv")
        write_trace_csv(solve, model, p)
        paths[f"trace_{name}"] = p
    if result.distributed_run is not None:
        p = os.path.join(out_dir, "trajectory.csv")
        write_trajectory_csv(result.distributed_run, p)
        paths["trajectory"] = p
    est_path = os.path.join(out_dir, "estimates.csv")
    lines = ["estimator,param,value"]
    for name, (theta_hat, gamma_hat) in result.estimates.items():
        values = list(theta_hat) + list(gamma_hat)
        for pname, v in zip(result.param_names, values):
            lines.append(f"{name},{pname},{_fmt(v)}")
    with open(est_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    paths["estimates"] = est_path
    meta_path = os.path.join(out_dir, "meta.json")
    with open(meta_path, "w") as fh:
        json.dump({
            "package": "scoregraph",
            "version": __version__,
            "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "config": asdict(result.config),
            "model": result.model_name,
            "misclassification": {
                name: misclassification_rate(out.labels, result.states)
                for name, out in result.outputs.items()
            },
        }, fh, indent=2)
        fh.write("\n")
    paths["meta"] = meta_path
    return paths


_CONFIG_KEYS = {
    "model": ("model", str),
    "C": ("n_states", int),
    "R": ("n_scores", int),
    "theta": ("theta", "floats"),
    "gamma": ("gamma", "floats"),
    "N": ("n_agents", int),
    "sweep": ("sweep", "ints"),
    "trials": ("trials", int),
    "estimators": ("estimators", "strs"),
    "comm.family": ("comm_family", str),
    "comm.Q": ("comm_window", int),
    "solver.alpha": ("solver_alpha", float),
    "solver.T": ("solver_rounds", int),
    "solver.tol": ("solver_tol", float),
    "solver.max_iters": ("solver_max_iters", int),
    "solver.grid_points": ("solver_grid_points", int),
    "seed": ("master_seed", int),
    "out": ("out_dir", str),
}


def parse_config_file(path) -> ExperimentConfig:
    """Parse the flat key-value config format.

    One `key = value` per line; `#` starts a comment; lists are
    comma-separated.  Keys: model, C, R, theta, gamma, N, sweep, trials,
    estimators, comm.family, comm.Q, solver.alpha, solver.T, solver.tol,
    solver.max_iters, solver.grid_points, seed, out.
    """
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected `key = value`")
            key, _, text = line.partition("=")
            key, text = key.strip(), text.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            field_name, kind = _CONFIG_KEYS[key]
            if kind == "floats":
                value = tuple(float(x) for x in text.split(","))
            elif kind == "ints":
                value = tuple(int(x) for x in text.split(","))
            elif kind == "strs":
                value = tuple(x.strip() for x in text.split(","))
            else:
                value = kind(text)
            values[field_name] = value
    return ExperimentConfig(**values)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _check(name, fn) -> CheckResult:
    try:
        fn()
        return CheckResult(name, True)
    except Exception as exc:  # report, do not crash the suite
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")


def run_invariant_checks(seed: int = 0) -> list:
    """Fast self-contained invariant suite backing the `check` CLI command."""
    from .distributed import initial_state, push_sum_round
    from .estimators import (fr_binary_closed_form, fr_objective, nr_objective)

    checks = []

    def counts_identities():
        rng = np.random.default_rng([seed, 1])
        model = reliability_model(3)
        graph = sample_score_graph(12, 40, "cyclic-plus-random-edges", rng)
        scored, _ = generate_scores(graph, model, (), (0.4,), rng)
        counts = aggregate_counts(scored)
        counts.validate()
        assert counts.n_edges == scored.n_edges
        assert np.all(np.abs(counts.phi.sum() - 1.0) < 1e-12)

    checks.append(_check("counts-identities", counts_identities))

    def schedule_connectivity():
        for family, window in (("static-complete", 1), ("static-cycle", 1),
                               ("periodic-edge-partition", 3)):
            sched = make_comm_schedule(8, family, window,
                                       rng=np.random.default_rng([seed, 2]))
            assert sched.satisfies_window_connectivity()

    checks.append(_check("schedule-window-connectivity", schedule_connectivity))

    def pushsum_conservation():
        rng = np.random.default_rng([seed, 3])
        model = reliability_model(4)
        graph = sample_score_graph(12, 40, "cyclic-plus-random-edges", rng)
        scored, _ = generate_scores(graph, model, (), (0.3,), rng)
        counts = aggregate_counts(scored)
        sched = make_comm_schedule(12, "periodic-edge-partition", 3,
                                   rng=np.random.default_rng([seed, 4]))
        state = initial_state(counts, model)
        target_xi = state.xi.sum(axis=0)
        target_eta = state.eta.sum()
        for t in range(600):
            state = push_sum_round(state, sched.frame(t))
            assert np.all(np.abs(state.xi.sum(axis=0) - target_xi) <= 1e-9 * target_xi)
            assert abs(state.eta.sum() - target_eta) <= 1e-9 * target_eta
        final_err = np.abs(state.phi - counts.phi[None, :]).max()
        assert final_err < 1e-6, f"phi error {final_err}"

    checks.append(_check("push-sum-conservation", pushsum_conservation))

    def model_normalization():
        rng = np.random.default_rng([seed, 5])
        for model in (preparata_model(), reliability_model(5),
                      social_ranking_model(3, 3), categorical_model(2, 3)):
            for _ in range(50):
                z = model.feasible.sample_interior(rng)
                theta, gamma = model.feasible.split(z)
                tensor = model.tensor(theta)
                prior = model.prior(gamma)
                assert np.all(np.abs(tensor.sum(axis=0) - 1.0) < 1e-12)
                assert abs(prior.sum() - 1.0) < 1e-12
                assert tensor.min() >= 0 and prior.min() >= 0

    checks.append(_check("model-normalization", model_normalization))

    def closed_form_matches_grid():
        grid = np.linspace(0.0, 1.0, 4001)
        for phi2 in (0.1, 0.3, 0.45, 0.52, 0.6, 0.9):
            model = preparata_model()
            phi = np.array([1.0 - phi2, phi2])
            values = np.array([fr_objective(phi, model, (), (g,)) for g in grid])
            best = values.min()
            got = fr_objective(phi, model, (), (fr_binary_closed_form(phi2),))
            assert got <= best + 1e-9, f"phi2={phi2}: {got} vs grid {best}"

    checks.append(_check("closed-form-matches-grid", closed_form_matches_grid))

    def label_swap_objective():
        rng = np.random.default_rng([seed, 6])
        model = social_ranking_model(3, 3)
        graph = sample_score_graph(15, 60, "cyclic-plus-random-edges", rng)
        scored, _ = generate_scores(graph, model, (0.5,), (0.3,), rng)
        counts = aggregate_counts(scored)
        for th, g in ((0.5, 0.3), (1.1, 0.7), (0.2, 0.5)):
            a = nr_objective(counts, model, (th,), (g,))
            b = nr_objective(counts, model, (th,), (1.0 - g,))
            assert abs(a - b) < 1e-9
            a = fr_objective(counts.phi, model, (th,), (g,))
            b = fr_objective(counts.phi, model, (th,), (1.0 - g,))
            assert abs(a - b) < 1e-9

    checks.append(_check("label-swap-objective", label_swap_objective))

    def determinism():
        import tempfile
        cfg = ExperimentConfig(model="reliability", n_scores=3, gamma=(0.3,),
                               n_agents=10, sweep=(10, 40), trials=2,
                               estimators=("FR",), master_seed=seed,
                               solver_max_iters=500)
        with tempfile.TemporaryDirectory() as tmp:
            d1, d2 = os.path.join(tmp, "a"), os.path.join(tmp, "b")
            p1 = emit_outputs(run_sweep(cfg), d1)
            p2 = emit_outputs(run_sweep(cfg), d2)
            for key in ("rmse", "misclass"):
                with open(p1[key], "rb") as f1, open(p2[key], "rb") as f2:
                    assert f1.read() == f2.read(), f"{key} differs between runs"

    checks.append(_check("determinism", determinism))

    return checks
