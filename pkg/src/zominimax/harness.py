"""Experiment configuration, execution, and result persistence.

A YAML config describes one experiment: the problem instance, the solver
mode with its tolerance(s) and constant overrides, and run controls
(repetitions, master seed, trace thinning, output paths).  ``run_experiment``
executes every (eps, repetition) cell, measures stationarity along the trace,
and writes one CSV trace per cell plus a JSON summary.

Reproducibility contract: every output byte is determined by (config, master
seed), except the ``wall_time_s`` fields of the summary.  Repetition r of
eps-cell i draws from ``SeedSequence([master_seed, i, r])``.
"""

import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError
from .geometry import constraint_set_from_config
from .problems import MinimaxProblem, StochasticWrapper, make_quadratic, make_trig
from .solvers import SOLVER_FUNCS, DerivedParams, Overrides, derive_params
from .stationarity import iterations_to_target, measure_trace
from .verify import run_bound_suite

OUTPUT_DIR_ENV = "ZOMINIMAX_OUTPUT_DIR"

TRACE_COLUMNS = "iter,grad_g_sq,samples_x,samples_y,raw_evals,x_norm,y_norm"

_REQUIRED = object()


def _get(section: dict, key: str, where: str, typ, default=_REQUIRED):
    if key not in section or section[key] is None:
        if default is _REQUIRED:
            raise ConfigError(f"{where}.{key} is required")
        return default
    val = section[key]
    try:
        if typ is int:
            if isinstance(val, float) and not val.is_integer():
                raise ValueError
            return int(val)
        if typ is float:
            return float(val)
        if typ is str:
            return str(val)
        if typ is dict:
            if not isinstance(val, dict):
                raise ValueError
            return val
        if typ is list:
            if not isinstance(val, (list, tuple)):
                raise ValueError
            return list(val)
    except (TypeError, ValueError):
        pass
    raise ConfigError(f"{where}.{key} must be a {typ.__name__}, got {val!r}")


@dataclass
class ProblemConfig:
    family: str
    d1: int
    d2: int
    tau: float
    kappa: float
    set_cfg: dict
    matrix_seed: int = 0
    b_frac: float = 1.0
    spectrum_lo: float = 1.0
    sigma1: float = 0.0
    sigma2: float = 0.0

    @staticmethod
    def from_dict(section: dict) -> "ProblemConfig":
        family = _get(section, "family", "problem", str).lower()
        if family not in ("quadratic", "trig"):
            raise ConfigError(
                f"problem.family must be 'quadratic' or 'trig', got {family!r}"
            )
        cfg = ProblemConfig(
            family=family,
            d1=_get(section, "d1", "problem", int),
            d2=_get(section, "d2", "problem", int),
            tau=_get(section, "tau", "problem", float),
            kappa=_get(section, "kappa", "problem", float),
            set_cfg=_get(section, "set", "problem", dict, {"kind": "ball", "radius": 1.0}),
            matrix_seed=_get(section, "matrix_seed", "problem", int, 0),
            b_frac=_get(section, "b_frac", "problem", float, 1.0),
            spectrum_lo=_get(section, "spectrum_lo", "problem", float, 1.0),
            sigma1=_get(section, "sigma1", "problem", float, 0.0),
            sigma2=_get(section, "sigma2", "problem", float, 0.0),
        )
        if cfg.d1 < 1 or cfg.d2 < 1:
            raise ConfigError("problem.d1 and problem.d2 must be positive")
        if cfg.tau <= 0:
            raise ConfigError("problem.tau must be positive")
        if cfg.kappa < 1:
            raise ConfigError("problem.kappa must be >= 1")
        if cfg.sigma1 < 0 or cfg.sigma2 < 0:
            raise ConfigError("problem.sigma1/sigma2 must be nonnegative")
        return cfg

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "d1": self.d1,
            "d2": self.d2,
            "tau": self.tau,
            "kappa": self.kappa,
            "set": self.set_cfg,
            "matrix_seed": self.matrix_seed,
            "b_frac": self.b_frac,
            "spectrum_lo": self.spectrum_lo,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
        }


@dataclass
class SolverSection:
    mode: str
    eps_values: list[float]
    overrides: Overrides = field(default_factory=Overrides)

    @staticmethod
    def from_dict(section: dict) -> "SolverSection":
        mode = _get(section, "mode", "solver", str).lower()
        raw_eps = section.get("eps")
        if raw_eps is None:
            raise ConfigError("solver.eps is required")
        eps_values = [float(e) for e in (raw_eps if isinstance(raw_eps, (list, tuple)) else [raw_eps])]
        for e in eps_values:
            if not 0.0 < e < 1.0:
                raise ConfigError(f"solver.eps values must lie in (0, 1), got {e}")
        ov_raw = _get(section, "overrides", "solver", dict, {})
        known = {"c_s", "c_mu", "c_t", "eta1"}
        unknown = set(ov_raw) - known
        if unknown:
            raise ConfigError(f"solver.overrides has unknown keys {sorted(unknown)}")
        overrides = Overrides(
            c_s=float(ov_raw.get("c_s", 1.0)),
            c_mu=float(ov_raw.get("c_mu", 1.0)),
            c_t=float(ov_raw.get("c_t", 1.0)),
            eta1=None if ov_raw.get("eta1") is None else float(ov_raw["eta1"]),
        )
        return SolverSection(mode=mode, eps_values=eps_values, overrides=overrides)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "eps": self.eps_values,
            "overrides": self.overrides.to_dict(),
        }


@dataclass
class RunSection:
    repetitions: int = 1
    master_seed: int = 0
    stride: int | None = None
    output_dir: str = "out"
    x0: list[float] | None = None
    y0: list[float] | None = None
    x0_scale: float = 1.0
    mc_samples: int = 1_000_000
    mus: list[float] = field(default_factory=lambda: [1e-3, 1e-2])
    verify_eps: float = 0.5
    point_seed: int = 1

    @staticmethod
    def from_dict(section: dict) -> "RunSection":
        cfg = RunSection(
            repetitions=_get(section, "repetitions", "run", int, 1),
            master_seed=_get(section, "master_seed", "run", int, 0),
            stride=_get(section, "stride", "run", int, 0) or None,
            output_dir=_get(section, "output_dir", "run", str, "out"),
            x0=_get(section, "x0", "run", list, None),
            y0=_get(section, "y0", "run", list, None),
            x0_scale=_get(section, "x0_scale", "run", float, 1.0),
            mc_samples=_get(section, "mc_samples", "run", int, 1_000_000),
            mus=_get(section, "mus", "run", list, [1e-3, 1e-2]),
            verify_eps=_get(section, "verify_eps", "run", float, 0.5),
            point_seed=_get(section, "point_seed", "run", int, 1),
        )
        if cfg.repetitions < 1:
            raise ConfigError("run.repetitions must be >= 1")
        if cfg.stride is not None and cfg.stride < 1:
            raise ConfigError("run.stride must be >= 1")
        if cfg.mc_samples < 1:
            raise ConfigError("run.mc_samples must be >= 1")
        return cfg

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "stride": self.stride,
            "output_dir": self.output_dir,
            "x0": self.x0,
            "y0": self.y0,
            "x0_scale": self.x0_scale,
            "mc_samples": self.mc_samples,
            "mus": self.mus,
            "verify_eps": self.verify_eps,
            "point_seed": self.point_seed,
        }


@dataclass
class ExperimentConfig:
    problem: ProblemConfig
    solver: SolverSection
    run: RunSection

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        unknown = set(raw) - {"problem", "solver", "run"}
        if unknown:
            raise ConfigError(f"config has unknown top-level keys {sorted(unknown)}")
        if "problem" not in raw:
            raise ConfigError("problem section is required")
        if "solver" not in raw:
            raise ConfigError("solver section is required")
        return ExperimentConfig(
            problem=ProblemConfig.from_dict(raw["problem"]),
            solver=SolverSection.from_dict(raw["solver"]),
            run=RunSection.from_dict(raw.get("run") or {}),
        )

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.to_dict(),
            "solver": self.solver.to_dict(),
            "run": self.run.to_dict(),
        }


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from None
    return ExperimentConfig.from_dict(raw)


def _set_from_config(set_cfg: dict, d2: int):
    try:
        return constraint_set_from_config(set_cfg, d2)
    except ValueError as exc:
        raise ConfigError(f"problem.set: {exc}") from None


def build_problem(pcfg: ProblemConfig) -> MinimaxProblem:
    set_y = _set_from_config(pcfg.set_cfg, pcfg.d2)
    maker = make_quadratic if pcfg.family == "quadratic" else make_trig
    kwargs = dict(
        d1=pcfg.d1,
        d2=pcfg.d2,
        tau=pcfg.tau,
        kappa=pcfg.kappa,
        set_y=set_y,
        seed=pcfg.matrix_seed,
        b_frac=pcfg.b_frac,
    )
    if pcfg.family == "quadratic":
        kwargs["spectrum_lo"] = pcfg.spectrum_lo
    return maker(**kwargs)


def resolve_output_dir(config: ExperimentConfig) -> str:
    return os.environ.get(OUTPUT_DIR_ENV) or config.run.output_dir


def _start_point(config: ExperimentConfig, problem: MinimaxProblem):
    rcfg = config.run
    if rcfg.x0 is not None:
        x0 = np.asarray(rcfg.x0, dtype=np.float64)
        if x0.shape != (problem.d1,):
            raise ConfigError(f"run.x0 must have length {problem.d1}")
    else:
        x0 = rcfg.x0_scale * np.ones(problem.d1)
    if rcfg.y0 is not None:
        y0 = np.asarray(rcfg.y0, dtype=np.float64)
        if y0.shape != (problem.d2,):
            raise ConfigError(f"run.y0 must have length {problem.d2}")
        if not problem.set_y.contains(y0):
            raise ConfigError("run.y0 is not feasible for the configured set")
    else:
        y0 = problem.set_y.project(np.zeros(problem.d2))
    return x0, y0


def _thin_indices(n_rows: int, stride: int | None) -> np.ndarray:
    if stride is None:
        stride = max(1, (n_rows - 1) // 1000)
    idx = np.arange(0, n_rows, stride)
    if idx[-1] != n_rows - 1:
        idx = np.append(idx, n_rows - 1)
    return idx


def write_trace_csv(path: str, trace, stride: int | None) -> None:
    """Thinned CSV with the fixed column schema; bytes are reproducible."""
    idx = _thin_indices(trace.xs.shape[0], stride)
    x_norms = np.linalg.norm(trace.xs[idx], axis=1)
    y_norms = np.linalg.norm(trace.ys[idx], axis=1)
    with open(path, "w", newline="\n") as fh:
        fh.write(TRACE_COLUMNS + "\n")
        for row, s in enumerate(idx):
            fh.write(
                f"{s},{float(trace.grad_g_sq[s])!r},{trace.samples_x[s]},"
                f"{trace.samples_y[s]},{trace.raw_evals[s]},"
                f"{float(x_norms[row])!r},{float(y_norms[row])!r}\n"
            )


def run_experiment(config: ExperimentConfig, write_files: bool = True) -> dict:
    """Execute every (eps, repetition) cell and persist traces + summary.

    Returns the summary dict; also writes ``trace_eps{i}_rep{r}.csv`` files
    and ``summary.json`` under the output directory unless ``write_files``
    is False.
    """
    problem = build_problem(config.problem)
    stochastic = config.solver.mode in ("sgda", "sgdmsa")
    target_problem = (
        StochasticWrapper(problem, config.problem.sigma1, config.problem.sigma2)
        if stochastic
        else problem
    )
    x0, y0 = _start_point(config, problem)
    solver_fn = SOLVER_FUNCS.get(config.solver.mode)
    if solver_fn is None:
        raise ConfigError(f"solver.mode must be one of {sorted(SOLVER_FUNCS)}")

    out_dir = resolve_output_dir(config)
    if write_files:
        os.makedirs(out_dir, exist_ok=True)

    rows = []
    trace_files = []
    for i_eps, eps in enumerate(config.solver.eps_values):
        params = derive_params(
            config.solver.mode,
            ell=problem.ell,
            tau=problem.tau,
            d1=problem.d1,
            d2=problem.d2,
            eps=eps,
            sigma1=config.problem.sigma1,
            sigma2=config.problem.sigma2,
            diameter=problem.set_y.diameter(),
            overrides=config.solver.overrides,
        )
        for rep in range(config.run.repetitions):
            seed_key = [config.run.master_seed, i_eps, rep]
            rng = np.random.default_rng(np.random.SeedSequence(seed_key))
            t0 = time.perf_counter()
            trace = solver_fn(target_problem, params, x0, y0, rng, seed=seed_key)
            wall = time.perf_counter() - t0
            measure_trace(target_problem, trace)
            hit = iterations_to_target(trace, eps)
            row = {
                "eps": eps,
                "rep": rep,
                "seed_key": seed_key,
                "min_grad_g_sq": float(np.min(trace.grad_g_sq)),
                "iterations_to_target": hit,
                "samples_to_target": (
                    int(trace.samples_x[hit] + trace.samples_y[hit])
                    if hit is not None
                    else None
                ),
                "iterations": trace.n_iterations,
                "total_samples": int(trace.counter.total_samples),
                "raw_evals": int(trace.counter.raw_evals),
                "wall_time_s": wall,
            }
            rows.append(row)
            if write_files:
                fname = f"trace_eps{i_eps}_rep{rep}.csv"
                write_trace_csv(os.path.join(out_dir, fname), trace, config.run.stride)
                trace_files.append(fname)

    summary = {
        "config": config.to_dict(),
        "derived_params": derive_params(
            config.solver.mode,
            ell=problem.ell,
            tau=problem.tau,
            d1=problem.d1,
            d2=problem.d2,
            eps=config.solver.eps_values[0],
            sigma1=config.problem.sigma1,
            sigma2=config.problem.sigma2,
            diameter=problem.set_y.diameter(),
            overrides=config.solver.overrides,
        ).to_dict(),
        "ell": problem.ell,
        "rows": rows,
        "trace_files": trace_files,
    }
    if write_files:
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return summary


def verify_estimators(config: ExperimentConfig, write_files: bool = True) -> dict:
    """Run the estimator bound suite on both fixtures at the config's shape."""
    set_y = _set_from_config(config.problem.set_cfg, config.problem.d2)
    common = dict(
        d1=config.problem.d1,
        d2=config.problem.d2,
        tau=config.problem.tau,
        kappa=config.problem.kappa,
        set_y=set_y,
        seed=config.problem.matrix_seed,
        b_frac=config.problem.b_frac,
    )
    problems = {
        "quadratic": make_quadratic(spectrum_lo=config.problem.spectrum_lo, **common),
        "trig": make_trig(**common),
    }
    report = run_bound_suite(
        problems,
        mus=config.run.mus,
        n_samples=config.run.mc_samples,
        master_seed=config.run.master_seed,
        point_seed=config.run.point_seed,
        sigma1=config.problem.sigma1,
        sigma2=config.problem.sigma2,
        eps=config.run.verify_eps,
    )
    report["config"] = config.to_dict()
    if write_files:
        out_dir = resolve_output_dir(config)
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "estimator_report.json"), "w") as fh:
            json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def print_params(
    mode: str,
    *,
    ell: float,
    tau: float,
    d1: int,
    d2: int,
    eps: float,
    sigma1: float = 0.0,
    sigma2: float = 0.0,
    diameter: float = math.inf,
    overrides: Overrides | None = None,
) -> str:
    """Human-readable resolved parameters, one formula per line."""
    params = derive_params(
        mode,
        ell=ell,
        tau=tau,
        d1=d1,
        d2=d2,
        eps=eps,
        sigma1=sigma1,
        sigma2=sigma2,
        diameter=diameter,
        overrides=overrides,
    )
    return params.describe()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and math.isinf(obj):
        return "unbounded"
    return obj
