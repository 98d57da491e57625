"""Gaussian-smoothing two-point gradient estimators.

The single-sample estimator for the x-block is
``(f(x + mu1 u, y) - f(x, y)) / mu1 * u`` with ``u`` standard normal; its
expectation is the gradient of the smoothed objective
``f_mu1(x, y) = E f(x + mu1 u, y)``.  Mini-batches average independent
directions.  The stochastic variants evaluate the *noisy* oracle at both
points of each sample with that sample's own noise realization.

Within a deterministic batch the base value f(x, y) is computed once and
shared (the estimator value is unchanged, raw evaluations halve).  In the
stochastic case each sample's base evaluation carries its own noise, so
nothing is shared and every sample costs two evaluations.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError
from .problems import MinimaxProblem, OracleCounter, StochasticWrapper


@dataclass(frozen=True)
class GradientEstimate:
    vector: np.ndarray
    samples_used: int


@dataclass(frozen=True)
class SmoothingConfig:
    """Smoothing radii and batch sizes; stochastic fields optional."""

    mu1: float
    mu2: float
    q1: int
    q2: int
    m1: int | None = None
    m2: int | None = None

    def __post_init__(self):
        if not (self.mu1 > 0 and self.mu2 > 0):
            raise ValueError("smoothing radii must be positive")
        if self.q1 < 1 or self.q2 < 1:
            raise ValueError("mini-batch sizes must be >= 1")


def _check_batch(mu: float, n: int) -> None:
    if not mu > 0:
        raise ValueError(f"smoothing radius must be positive, got {mu}")
    if n < 1:
        raise ValueError(f"batch size must be >= 1, got {n}")


def _require_finite(vals: np.ndarray, base: float, where: str) -> None:
    if not np.isfinite(base):
        raise EvaluationError(f"non-finite base evaluation in {where}")
    if not np.all(np.isfinite(vals)):
        idx = int(np.argmax(~np.isfinite(vals)))
        raise EvaluationError(
            f"non-finite evaluation in {where} at sample {idx}", point=idx
        )


def estimate_gx(
    problem: MinimaxProblem,
    x,
    y,
    mu1: float,
    q1: int,
    rng: np.random.Generator,
    counter: OracleCounter,
) -> GradientEstimate:
    """Mini-batch estimate of the x-gradient from 2-point evaluations."""
    _check_batch(mu1, q1)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    U = rng.standard_normal((q1, problem.d1))
    base = problem.value(x, y)
    vals = problem.value_batch_x(x + mu1 * U, y)
    _require_finite(vals, base, "estimate_gx")
    est = ((vals - base) / (mu1 * q1)) @ U
    counter.add_x(q1, q1 + 1)
    return GradientEstimate(est, q1)


def estimate_gy(
    problem: MinimaxProblem,
    x,
    y,
    mu2: float,
    q2: int,
    rng: np.random.Generator,
    counter: OracleCounter,
) -> GradientEstimate:
    """Mini-batch estimate of the y-gradient from 2-point evaluations."""
    _check_batch(mu2, q2)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    U = rng.standard_normal((q2, problem.d2))
    base = problem.value(x, y)
    vals = problem.value_batch_y(x, y + mu2 * U)
    _require_finite(vals, base, "estimate_gy")
    est = ((vals - base) / (mu2 * q2)) @ U
    counter.add_y(q2, q2 + 1)
    return GradientEstimate(est, q2)


def estimate_gx_stochastic(
    wrapper: StochasticWrapper,
    x,
    y,
    mu1: float,
    m1: int,
    rng: np.random.Generator,
    counter: OracleCounter,
) -> GradientEstimate:
    """Stochastic mini-batch x-gradient estimate.

    Each sample i draws a fresh (u_i, xi_i) pair and uses the *same* xi_i at
    both of its evaluation points.  The y-block noise term <xi_y, y> is
    identical at the two points of every sample and cancels in the
    difference, so it is never materialized here.
    """
    _check_batch(mu1, m1)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    base_prob = wrapper.base
    U = rng.standard_normal((m1, base_prob.d1))
    f0 = base_prob.value(x, y)
    f_pert = base_prob.value_batch_x(x + mu1 * U, y)
    _require_finite(f_pert, f0, "estimate_gx_stochastic")
    Xi = wrapper.draw_xi_x(rng, m1)
    if Xi is None:
        diffs = f_pert - f0
    else:
        shift = Xi @ x
        F_pert = f_pert + shift + mu1 * np.einsum("ij,ij->i", Xi, U)
        F_base = f0 + shift
        diffs = F_pert - F_base
    est = (diffs / (mu1 * m1)) @ U
    counter.add_x(m1, 2 * m1)
    return GradientEstimate(est, m1)


def estimate_gy_stochastic(
    wrapper: StochasticWrapper,
    x,
    y,
    mu2: float,
    m2: int,
    rng: np.random.Generator,
    counter: OracleCounter,
) -> GradientEstimate:
    """Stochastic mini-batch y-gradient estimate (mirror of the x-block)."""
    _check_batch(mu2, m2)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    base_prob = wrapper.base
    U = rng.standard_normal((m2, base_prob.d2))
    f0 = base_prob.value(x, y)
    f_pert = base_prob.value_batch_y(x, y + mu2 * U)
    _require_finite(f_pert, f0, "estimate_gy_stochastic")
    Xi = wrapper.draw_xi_y(rng, m2)
    if Xi is None:
        diffs = f_pert - f0
    else:
        shift = Xi @ y
        F_pert = f_pert + shift + mu2 * np.einsum("ij,ij->i", Xi, U)
        F_base = f0 + shift
        diffs = F_pert - F_base
    est = (diffs / (mu2 * m2)) @ U
    counter.add_y(m2, 2 * m2)
    return GradientEstimate(est, m2)


def _delegated(problem, method: str, *args):
    try:
        return getattr(problem, method)(*args)
    except NotImplementedError:
        raise ValueError(
            f"problem family {problem.family!r} has no closed-form {method}"
        ) from None


def smoothed_value_x(problem: MinimaxProblem, x, y, mu1: float) -> float:
    """Exact value of the x-smoothed objective (fixture closed forms)."""
    return _delegated(problem, "smoothed_value_x", np.asarray(x, float), np.asarray(y, float), mu1)


def smoothed_value_y(problem: MinimaxProblem, x, y, mu2: float) -> float:
    """Exact value of the y-smoothed objective."""
    return _delegated(problem, "smoothed_value_y", np.asarray(x, float), np.asarray(y, float), mu2)


def smoothed_grad_x(problem: MinimaxProblem, x, y, mu1: float) -> np.ndarray:
    """Exact x-gradient of the x-smoothed objective."""
    return _delegated(problem, "smoothed_grad_x", np.asarray(x, float), np.asarray(y, float), mu1)


def smoothed_grad_y(problem: MinimaxProblem, x, y, mu2: float) -> np.ndarray:
    """Exact y-gradient of the y-smoothed objective."""
    return _delegated(problem, "smoothed_grad_y", np.asarray(x, float), np.asarray(y, float), mu2)
