"""The four zeroth-order minimax solvers and their parameter derivations.

Descent-ascent (``gda``/``sgda``) performs one simultaneous Jacobi update per
iteration: both gradient estimates are formed at the pre-update pair.  The
multi-step variants (``gdmsa``/``sgdmsa``) run ``T`` projected ascent steps on
the y-block, warm-started from the previous iterate, and then take one x-step
against the refreshed y.  Stochastic variants swap the deterministic
mini-batch estimators for the noise-coupled ones with epsilon-dependent batch
sizes.

Step sizes and batch sizes follow the analysis exactly; quantities the theory
fixes only up to a constant (iteration counts, smoothing radii, inner loop
length) carry explicit multipliers defaulting to 1 and overridable per run.
The resolved values are echoed into every trace.

Each run splits its generator into one substream per estimator role (x and
y), so the x-draws do not depend on how many y-steps ran between them.  That
makes the structural relations exact: at matched seeds, a zero-noise
stochastic run reproduces its deterministic analog bit-for-bit, and the
multi-step solver at T=1 differs from single-step descent-ascent only through
the x-step's evaluation point.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DivergenceError
from .problems import MinimaxProblem, OracleCounter, StochasticWrapper
from .smoothing import (
    estimate_gx,
    estimate_gx_stochastic,
    estimate_gy,
    estimate_gy_stochastic,
)

MODES = ("gda", "gdmsa", "sgda", "sgdmsa")

#: abort when an x-iterate norm exceeds this; the analyzed parameter regimes
#: cannot reach it, but user overrides can.
DIVERGENCE_LIMIT = 1e8


def _ceil_int(v: float) -> int:
    # guard against float roundoff pushing an exact integer over the ceiling
    return int(math.ceil(v * (1.0 - 1e-12)))


@dataclass(frozen=True)
class Overrides:
    """Multipliers for the order-constants plus a direct x-step override."""

    c_s: float = 1.0
    c_mu: float = 1.0
    c_t: float = 1.0
    eta1: float | None = None

    def to_dict(self) -> dict:
        return {"c_s": self.c_s, "c_mu": self.c_mu, "c_t": self.c_t, "eta1": self.eta1}


@dataclass(frozen=True)
class DerivedParams:
    mode: str
    eta1: float
    eta2: float
    S: int
    T: int | None
    mu1: float
    mu2: float
    q1: int | None
    q2: int | None
    m1: int | None
    m2: int | None
    kappa: float
    lg: float
    eps: float
    overrides: Overrides = field(default_factory=Overrides)
    formulas: tuple = ()

    def describe(self) -> str:
        lines = [f"mode   : {self.mode}"]
        for name, formula in self.formulas:
            value = getattr(self, name)
            lines.append(f"{name:<7}: {value!r}  = {formula}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "eta1": self.eta1,
            "eta2": self.eta2,
            "S": self.S,
            "T": self.T,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "q1": self.q1,
            "q2": self.q2,
            "m1": self.m1,
            "m2": self.m2,
            "kappa": self.kappa,
            "lg": self.lg,
            "eps": self.eps,
            "overrides": self.overrides.to_dict(),
        }


def derive_params(
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
) -> DerivedParams:
    """Resolve all run parameters from the problem constants and tolerance.

    Exact formulas are used where the analysis pins them (step sizes, batch
    sizes); order-level quantities take the stated rates with multipliers
    ``c_s``, ``c_mu``, ``c_t`` (default 1).  ``overrides.eta1`` replaces the
    x-step formula outright, for practical runs.
    """
    mode = mode.lower()
    if mode not in MODES:
        raise ConfigError(f"solver.mode must be one of {MODES}, got {mode!r}")
    if not 0.0 < eps < 1.0:
        raise ConfigError(f"solver.eps must lie in (0, 1), got {eps}")
    if ell <= 0 or tau <= 0 or tau > ell:
        raise ConfigError(f"need 0 < tau <= ell, got tau={tau}, ell={ell}")
    if d1 < 1 or d2 < 1:
        raise ConfigError("dimensions must be positive")
    ov = overrides or Overrides()
    kappa = ell / tau
    lg = ell * (1.0 + kappa)
    eta2 = 1.0 / (6.0 * ell)
    multi_step = mode in ("gdmsa", "sgdmsa")
    stochastic = mode in ("sgda", "sgdmsa")

    if multi_step and not math.isfinite(diameter):
        raise ConfigError(
            f"{mode} requires a bounded feasible set for y "
            "(finite diameter); only gda/sgda admit the whole space"
        )

    formulas = []
    if multi_step:
        eta1 = 1.0 / (12.0 * lg)
        formulas.append(("eta1", "1/(12*Lg), Lg = ell*(1+kappa)"))
        S = _ceil_int(ov.c_s * kappa / eps**2)
        formulas.append(("S", f"ceil(c_s * kappa / eps^2), c_s={ov.c_s}"))
        T = _ceil_int(ov.c_t * kappa * math.log(1.0 / eps))
        formulas.append(("T", f"ceil(c_t * kappa * ln(1/eps)), c_t={ov.c_t}"))
        mu1 = ov.c_mu * eps * d1**-1.5
        formulas.append(("mu1", f"c_mu * eps * d1^(-3/2), c_mu={ov.c_mu}"))
        mu2 = ov.c_mu * eps * kappa**-0.5 * d2**-1.5
        formulas.append(
            ("mu2", f"c_mu * eps * kappa^(-1/2) * d2^(-3/2), c_mu={ov.c_mu}")
        )
    else:
        eta1 = 1.0 / (4.0 * 12.0**4 * kappa**2 * (kappa + 1.0) ** 2 * (ell + 1.0))
        formulas.append(("eta1", "1/(4*12^4*kappa^2*(kappa+1)^2*(ell+1))"))
        S = _ceil_int(ov.c_s * kappa**5 / eps**2)
        formulas.append(("S", f"ceil(c_s * kappa^5 / eps^2), c_s={ov.c_s}"))
        T = None
        mu1 = ov.c_mu * eps * d1**-1.5 * kappa**-2
        formulas.append(("mu1", f"c_mu * eps * d1^(-3/2) * kappa^(-2), c_mu={ov.c_mu}"))
        mu2 = ov.c_mu * eps * d2**-1.5 * kappa**-2
        formulas.append(("mu2", f"c_mu * eps * d2^(-3/2) * kappa^(-2), c_mu={ov.c_mu}"))
    formulas.insert(1, ("eta2", "1/(6*ell)"))

    if ov.eta1 is not None:
        eta1 = float(ov.eta1)
        formulas[0] = ("eta1", "override")

    if stochastic:
        q1 = q2 = None
        m1 = _ceil_int(4.0 * (d1 + 6) * (sigma1**2 + 1.0) / eps**2)
        m2 = _ceil_int(4.0 * (d2 + 6) * (sigma2**2 + 1.0) / eps**2)
        formulas.append(("m1", "ceil(4*(d1+6)*(sigma1^2+1)/eps^2)"))
        formulas.append(("m2", "ceil(4*(d2+6)*(sigma2^2+1)/eps^2)"))
    else:
        q1 = 2 * (d1 + 6)
        q2 = 2 * (d2 + 6)
        m1 = m2 = None
        formulas.append(("q1", "2*(d1+6)"))
        formulas.append(("q2", "2*(d2+6)"))

    return DerivedParams(
        mode=mode,
        eta1=eta1,
        eta2=eta2,
        S=S,
        T=T,
        mu1=mu1,
        mu2=mu2,
        q1=q1,
        q2=q2,
        m1=m1,
        m2=m2,
        kappa=kappa,
        lg=lg,
        eps=eps,
        overrides=ov,
        formulas=tuple(formulas),
    )


@dataclass
class RunTrace:
    """Full per-iteration record of a solver run.

    Arrays have length ``S + 1``: row 0 is the initial pair, row s the state
    after s updates.  Counter columns are cumulative.  ``grad_g_sq`` is
    filled by the stationarity module, not by the solver.
    """

    mode: str
    params: DerivedParams
    seed: object
    xs: np.ndarray
    ys: np.ndarray
    samples_x: np.ndarray
    samples_y: np.ndarray
    raw_evals: np.ndarray
    counter: OracleCounter
    grad_g_sq: np.ndarray | None = None

    @property
    def n_iterations(self) -> int:
        return self.xs.shape[0] - 1

    def iterates(self):
        for s in range(self.xs.shape[0]):
            yield s, self.xs[s], self.ys[s]


class _TraceRecorder:
    def __init__(self, mode, params, seed, S, d1, d2, x0, y0, counter):
        self.mode = mode
        self.params = params
        self.seed = seed
        self.counter = counter
        self.xs = np.empty((S + 1, d1))
        self.ys = np.empty((S + 1, d2))
        self.samples_x = np.zeros(S + 1, dtype=np.int64)
        self.samples_y = np.zeros(S + 1, dtype=np.int64)
        self.raw_evals = np.zeros(S + 1, dtype=np.int64)
        self.xs[0] = x0
        self.ys[0] = y0

    def record(self, s, x, y):
        self.xs[s] = x
        self.ys[s] = y
        self.samples_x[s] = self.counter.samples_x
        self.samples_y[s] = self.counter.samples_y
        self.raw_evals[s] = self.counter.raw_evals

    def finish(self) -> RunTrace:
        return RunTrace(
            mode=self.mode,
            params=self.params,
            seed=self.seed,
            xs=self.xs,
            ys=self.ys,
            samples_x=self.samples_x,
            samples_y=self.samples_y,
            raw_evals=self.raw_evals,
            counter=self.counter,
        )


def _check_start(problem, params, mode, x0, y0):
    if params.mode != mode:
        raise ConfigError(
            f"params were derived for mode {params.mode!r}, solver is {mode!r}"
        )
    x0 = np.asarray(x0, dtype=np.float64).copy()
    y0 = np.asarray(y0, dtype=np.float64).copy()
    if x0.shape != (problem.d1,) or y0.shape != (problem.d2,):
        raise ValueError("start point dimensions do not match the problem")
    if not (np.all(np.isfinite(x0)) and np.all(np.isfinite(y0))):
        raise ValueError("start point must be finite")
    if not problem.set_y.contains(y0):
        raise ValueError("y0 is not feasible")
    return x0, y0


def _guard_x(x: np.ndarray, s: int) -> None:
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"non-finite x-iterate at iteration {s}", iteration=s)
    if float(np.linalg.norm(x)) > DIVERGENCE_LIMIT:
        raise DivergenceError(
            f"divergence guard tripped at iteration {s} (||x|| > {DIVERGENCE_LIMIT:g})",
            iteration=s,
        )


def run_zo_gda(
    problem: MinimaxProblem,
    params: DerivedParams,
    x0,
    y0,
    rng: np.random.Generator,
    seed=None,
) -> RunTrace:
    """Single-step descent-ascent with deterministic mini-batch estimators."""
    x, y = _check_start(problem, params, "gda", x0, y0)
    counter = OracleCounter()
    rec = _TraceRecorder("gda", params, seed, params.S, problem.d1, problem.d2, x, y, counter)
    proj = problem.set_y.project
    rng_x, rng_y = rng.spawn(2)
    for s in range(1, params.S + 1):
        gx = estimate_gx(problem, x, y, params.mu1, params.q1, rng_x, counter)
        hy = estimate_gy(problem, x, y, params.mu2, params.q2, rng_y, counter)
        x = x - params.eta1 * gx.vector
        y = proj(y + params.eta2 * hy.vector)
        _guard_x(x, s)
        rec.record(s, x, y)
    return rec.finish()


def run_zo_sgda(
    wrapper: StochasticWrapper,
    params: DerivedParams,
    x0,
    y0,
    rng: np.random.Generator,
    seed=None,
) -> RunTrace:
    """Single-step descent-ascent against the noisy oracle."""
    if not isinstance(wrapper, StochasticWrapper):
        raise ConfigError("sgda requires a StochasticWrapper")
    x, y = _check_start(wrapper, params, "sgda", x0, y0)
    counter = OracleCounter()
    rec = _TraceRecorder("sgda", params, seed, params.S, wrapper.d1, wrapper.d2, x, y, counter)
    proj = wrapper.set_y.project
    rng_x, rng_y = rng.spawn(2)
    for s in range(1, params.S + 1):
        gx = estimate_gx_stochastic(wrapper, x, y, params.mu1, params.m1, rng_x, counter)
        hy = estimate_gy_stochastic(wrapper, x, y, params.mu2, params.m2, rng_y, counter)
        x = x - params.eta1 * gx.vector
        y = proj(y + params.eta2 * hy.vector)
        _guard_x(x, s)
        rec.record(s, x, y)
    return rec.finish()


def zo_inner_ascent(
    problem: MinimaxProblem,
    x,
    y0,
    *,
    steps: int,
    eta2: float,
    mu2: float,
    q2: int,
    rng: np.random.Generator,
    counter: OracleCounter,
    keep_path: bool = False,
):
    """Projected zeroth-order ascent on y at fixed x (the inner loop).

    Returns the final y, or the full (steps+1, d2) path when ``keep_path``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y0, dtype=np.float64).copy()
    proj = problem.set_y.project
    path = np.empty((steps + 1, problem.d2)) if keep_path else None
    if keep_path:
        path[0] = y
    for t in range(1, steps + 1):
        hy = estimate_gy(problem, x, y, mu2, q2, rng, counter)
        y = proj(y + eta2 * hy.vector)
        if keep_path:
            path[t] = y
    return path if keep_path else y


def zo_inner_ascent_stochastic(
    wrapper: StochasticWrapper,
    x,
    y0,
    *,
    steps: int,
    eta2: float,
    mu2: float,
    m2: int,
    rng: np.random.Generator,
    counter: OracleCounter,
    keep_path: bool = False,
):
    """Stochastic counterpart of :func:`zo_inner_ascent`."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y0, dtype=np.float64).copy()
    proj = wrapper.set_y.project
    path = np.empty((steps + 1, wrapper.d2)) if keep_path else None
    if keep_path:
        path[0] = y
    for t in range(1, steps + 1):
        hy = estimate_gy_stochastic(wrapper, x, y, mu2, m2, rng, counter)
        y = proj(y + eta2 * hy.vector)
        if keep_path:
            path[t] = y
    return path if keep_path else y


def run_zo_gdmsa(
    problem: MinimaxProblem,
    params: DerivedParams,
    x0,
    y0,
    rng: np.random.Generator,
    seed=None,
) -> RunTrace:
    """Multi-step ascent then one descent step per outer iteration."""
    x, y = _check_start(problem, params, "gdmsa", x0, y0)
    if not problem.set_y.is_bounded:
        raise ConfigError("gdmsa requires a bounded feasible set for y")
    counter = OracleCounter()
    rec = _TraceRecorder("gdmsa", params, seed, params.S, problem.d1, problem.d2, x, y, counter)
    rng_x, rng_y = rng.spawn(2)
    for s in range(1, params.S + 1):
        y = zo_inner_ascent(
            problem,
            x,
            y,
            steps=params.T,
            eta2=params.eta2,
            mu2=params.mu2,
            q2=params.q2,
            rng=rng_y,
            counter=counter,
        )
        gx = estimate_gx(problem, x, y, params.mu1, params.q1, rng_x, counter)
        x = x - params.eta1 * gx.vector
        _guard_x(x, s)
        rec.record(s, x, y)
    return rec.finish()


def run_zo_sgdmsa(
    wrapper: StochasticWrapper,
    params: DerivedParams,
    x0,
    y0,
    rng: np.random.Generator,
    seed=None,
) -> RunTrace:
    """Stochastic multi-step ascent variant."""
    if not isinstance(wrapper, StochasticWrapper):
        raise ConfigError("sgdmsa requires a StochasticWrapper")
    x, y = _check_start(wrapper, params, "sgdmsa", x0, y0)
    if not wrapper.set_y.is_bounded:
        raise ConfigError("sgdmsa requires a bounded feasible set for y")
    counter = OracleCounter()
    rec = _TraceRecorder("sgdmsa", params, seed, params.S, wrapper.d1, wrapper.d2, x, y, counter)
    rng_x, rng_y = rng.spawn(2)
    for s in range(1, params.S + 1):
        y = zo_inner_ascent_stochastic(
            wrapper,
            x,
            y,
            steps=params.T,
            eta2=params.eta2,
            mu2=params.mu2,
            m2=params.m2,
            rng=rng_y,
            counter=counter,
        )
        gx = estimate_gx_stochastic(wrapper, x, y, params.mu1, params.m1, rng_x, counter)
        x = x - params.eta1 * gx.vector
        _guard_x(x, s)
        rec.record(s, x, y)
    return rec.finish()


SOLVER_FUNCS = {
    "gda": run_zo_gda,
    "gdmsa": run_zo_gdmsa,
    "sgda": run_zo_sgda,
    "sgdmsa": run_zo_sgdmsa,
}
