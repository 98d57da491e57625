"""Stationarity measurement and stationary-pair recovery.

Measurement of ``||grad g(x)||^2`` is a *verification* facility: it uses the
fixtures' analytic inner maximizer (or, for cross-validation, a first-order
inner solve) and is never charged to the zeroth-order oracle counters.  Pair
recovery, by contrast, is an algorithmic operation priced in oracle samples:
it runs the zeroth-order inner ascent at the candidate point until the
y-gradient is small or a fixed sample budget is spent.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InnerSolveError
from .problems import MinimaxProblem, OracleCounter, StochasticWrapper
from .solvers import RunTrace, _ceil_int, zo_inner_ascent, zo_inner_ascent_stochastic

#: relative residual target of the first-order inner solve
INNER_SOLVE_RTOL = 1e-10
INNER_SOLVE_MAX_ITERS = 10**6


@dataclass
class StationarityReport:
    """Single-realization stationarity measurements at a point."""

    grad_g_sq: float
    method: str
    inner_iters_used: int = 0
    x_bar: np.ndarray | None = None
    y_bar: np.ndarray | None = None
    grad_fx_sq: float | None = None
    grad_fy_sq: float | None = None
    budget_exhausted: bool = False
    samples_charged: int = 0

    def to_dict(self) -> dict:
        out = {
            "grad_g_sq": self.grad_g_sq,
            "method": self.method,
            "inner_iters_used": self.inner_iters_used,
            "label": "realization",
        }
        if self.y_bar is not None:
            out.update(
                {
                    "grad_fx_sq": self.grad_fx_sq,
                    "grad_fy_sq": self.grad_fy_sq,
                    "budget_exhausted": self.budget_exhausted,
                    "samples_charged": self.samples_charged,
                }
            )
        return out


def _unwrap(problem) -> MinimaxProblem:
    return problem.base if isinstance(problem, StochasticWrapper) else problem


def solve_inner_max(problem: MinimaxProblem, x, y0=None):
    """First-order projected ascent on the true y-gradient (verification only).

    Iterates ``y <- proj(y + grad_y f / ell)`` to relative residual 1e-10.
    Returns ``(y, iterations)``; raises after 1e6 iterations, which signals a
    misconfigured strong-concavity constant.
    """
    x = np.asarray(x, dtype=np.float64)
    y = (
        problem.set_y.project(np.zeros(problem.d2))
        if y0 is None
        else problem.set_y.project(np.asarray(y0, dtype=np.float64))
    )
    step = 1.0 / problem.ell
    proj = problem.set_y.project
    for it in range(1, INNER_SOLVE_MAX_ITERS + 1):
        y_next = proj(y + step * problem.grad_y(x, y))
        if np.linalg.norm(y_next - y) <= INNER_SOLVE_RTOL * max(1.0, float(np.linalg.norm(y))):
            return y_next, it
        y = y_next
    raise InnerSolveError(
        f"inner maximization did not reach residual {INNER_SOLVE_RTOL} "
        f"within {INNER_SOLVE_MAX_ITERS} iterations"
    )


def measure_grad_g(problem, x, method: str = "analytic") -> StationarityReport:
    """Measure ``||grad g(x)||^2`` via the Danskin composition.

    ``method='analytic'`` uses the fixture's closed-form maximizer;
    ``method='inner-solve'`` solves the inner maximization with first-order
    ascent instead (used to cross-validate the closed forms).  Neither path
    touches the zeroth-order counters.
    """
    prob = _unwrap(problem)
    x = np.asarray(x, dtype=np.float64)
    if method == "analytic":
        grad = prob.grad_g(x)
        iters = 0
    elif method == "inner-solve":
        y_sol, iters = solve_inner_max(prob, x)
        grad = prob.grad_x(x, y_sol)
    else:
        raise ValueError(f"unknown measurement method {method!r}")
    return StationarityReport(
        grad_g_sq=float(grad @ grad), method=method, inner_iters_used=iters
    )


def measure_trace(problem, trace: RunTrace) -> np.ndarray:
    """Fill ``trace.grad_g_sq`` with analytic measurements at every iterate."""
    prob = _unwrap(problem)
    G = prob.grad_g_many(trace.xs)
    trace.grad_g_sq = np.einsum("ij,ij->i", G, G)
    return trace.grad_g_sq


def iterations_to_target(trace: RunTrace, eps: float) -> int | None:
    """First iteration index whose measured ``||grad g||^2`` is <= eps^2."""
    if trace.grad_g_sq is None:
        raise ValueError("trace has no stationarity measurements yet")
    hits = np.flatnonzero(trace.grad_g_sq <= eps * eps)
    return int(hits[0]) if hits.size else None


def recover_pair(
    problem,
    x_bar,
    y,
    eps: float,
    mode: str = "deterministic",
    rng: np.random.Generator | None = None,
    counter: OracleCounter | None = None,
    c_budget: float = 1.0,
) -> StationarityReport:
    """Refine y at a near-stationary x until the pair is near-stationary.

    Runs the zeroth-order projected inner ascent from ``y`` with the
    multi-step-ascent inner parameters, charging the sample counter, within a
    fixed budget of ``ceil(c_budget * kappa * d2 * ln(1/eps))`` samples
    (deterministic) or ``ceil(c_budget * d2 / eps^2)`` samples (stochastic).
    Ascent stops early once the measured y-gradient satisfies the target; an
    exhausted budget yields ``budget_exhausted=True`` rather than an error
    (the underlying guarantee is in expectation).
    """
    prob = _unwrap(problem)
    counter = counter if counter is not None else OracleCounter()
    rng = rng if rng is not None else np.random.default_rng()
    x_bar = np.asarray(x_bar, dtype=np.float64)
    y = prob.set_y.project(np.asarray(y, dtype=np.float64))
    kappa = prob.kappa
    eta2 = 1.0 / (6.0 * prob.ell)
    mu2 = eps * kappa**-0.5 * prob.d2**-1.5
    target = eps * eps

    if mode == "deterministic":
        batch = 2 * (prob.d2 + 6)
        budget = _ceil_int(c_budget * kappa * prob.d2 * math.log(1.0 / eps))
        step_fn = lambda yy: zo_inner_ascent(
            prob, x_bar, yy, steps=1, eta2=eta2, mu2=mu2, q2=batch, rng=rng, counter=counter
        )
    elif mode == "stochastic":
        if not isinstance(problem, StochasticWrapper):
            raise ValueError("stochastic pair recovery needs a StochasticWrapper")
        batch = _ceil_int(4.0 * (prob.d2 + 6) * (problem.sigma2**2 + 1.0) / eps**2)
        budget = _ceil_int(c_budget * prob.d2 / eps**2)
        step_fn = lambda yy: zo_inner_ascent_stochastic(
            problem, x_bar, yy, steps=1, eta2=eta2, mu2=mu2, m2=batch, rng=rng, counter=counter
        )
    else:
        raise ValueError(f"mode must be 'deterministic' or 'stochastic', got {mode!r}")

    max_steps = max(1, math.ceil(budget / batch))
    samples_before = counter.samples_y

    def fy_sq(yy):
        gy = prob.grad_y(x_bar, yy)
        return float(gy @ gy)

    iters = 0
    exhausted = False
    if fy_sq(y) > target:
        for _ in range(max_steps):
            y = step_fn(y)
            iters += 1
            if fy_sq(y) <= target:
                break
        else:
            exhausted = fy_sq(y) > target

    gx = prob.grad_x(x_bar, y)
    gg = prob.grad_g(x_bar)
    return StationarityReport(
        grad_g_sq=float(gg @ gg),
        method="analytic",
        inner_iters_used=iters,
        x_bar=x_bar,
        y_bar=y,
        grad_fx_sq=float(gx @ gx),
        grad_fy_sq=fy_sq(y),
        budget_exhausted=exhausted,
        samples_charged=counter.samples_y - samples_before,
    )
