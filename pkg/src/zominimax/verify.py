"""Monte Carlo verification of the estimator moment and bias bounds.

Each check compares an empirical quantity against its closed-form bound and
reports an (empirical, bound, pass) triple:

* ``unbiasedness_zmax``            -- max per-coordinate z-score of the sample
  mean of the single-sample estimator against the analytic smoothed gradient;
* ``bias_sq_vs_bound``             -- exact squared smoothing bias vs
  ``(mu^2/4) ell^2 (d+3)^3``;
* ``value_gap_vs_bound``           -- exact |f_mu - f| vs ``(mu^2/2) ell d``;
* ``second_moment_single``         -- E||G||^2 vs
  ``2(d+4)||grad f||^2 + mu^2 ell^2 (d+6)^3 / 2``;
* ``second_moment_minibatch_q``    -- at batch 2(d+6), E||G_batch||^2 vs
  ``3||grad f||^2 + mu^2 ell^2 (d+6)^3``;

and, against the noisy oracle (prefix ``stoch_``), the single-sample bound
with the noise variance added and the epsilon-sized mini-batch bound
``3||grad f||^2 + rho(eps, mu)``.

The whole suite is vectorized over the sample axis; the per-sample arithmetic
is the estimator formula itself, so the Monte Carlo measures exactly what the
solvers consume while the bounds come from the independent closed forms.
"""

import numpy as np

from ._backend import backend_name
from .problems import MinimaxProblem, StochasticWrapper

UNBIASEDNESS_Z_THRESHOLD = 4.0


def _block_quantities(problem: MinimaxProblem, block: str, x, y):
    if block == "x":
        d = problem.d1
        grad = problem.grad_x(x, y)
        batch_values = lambda U, mu: problem.value_batch_x(x + mu * U, y)
        smoothed_grad = problem.smoothed_grad_x
        smoothed_value = problem.smoothed_value_x
    elif block == "y":
        d = problem.d2
        grad = problem.grad_y(x, y)
        batch_values = lambda U, mu: problem.value_batch_y(x, y + mu * U)
        smoothed_grad = problem.smoothed_grad_y
        smoothed_value = problem.smoothed_value_y
    else:
        raise ValueError(f"block must be 'x' or 'y', got {block!r}")
    return d, grad, batch_values, smoothed_grad, smoothed_value


def _mc_moments(coeff, U, batch_sizes):
    """Sample-mean vector, per-coordinate SEs, and batched second moments.

    ``coeff`` holds the two-point difference quotients, so sample i's
    estimate is ``coeff[i] * U[i]``.
    """
    n = coeff.shape[0]
    mean_vec = (coeff @ U) / n
    sq = coeff * coeff
    var_vec = np.einsum("i,ij->j", sq, U * U) / n - mean_vec**2
    se_vec = np.sqrt(var_vec / n)
    second_single = float(np.mean(sq * np.einsum("ij,ij->i", U, U)))
    batched = {}
    for b in batch_sizes:
        nb = n // b
        if nb == 0:
            raise ValueError(f"batch size {b} exceeds sample budget {n}")
        est = np.einsum("ij,ijk->ik", coeff[: nb * b].reshape(nb, b), U[: nb * b].reshape(nb, b, -1)) / b
        batched[b] = float(np.mean(np.einsum("ij,ij->i", est, est)))
    return mean_vec, se_vec, second_single, batched


def _rho(eps, mu, ell, d):
    # residual term of the stochastic epsilon-sized mini-batch bound
    return (
        eps**2 / 2.0
        + mu**2 * ell**2 * (d + 3) ** 3 / 2.0
        + mu**2 * ell**2 * (d + 6) ** 2 * eps**2 / 8.0
    )


def check_block(
    problem: MinimaxProblem,
    block: str,
    x,
    y,
    mu: float,
    n_samples: int,
    seed_seq: np.random.SeedSequence,
    sigma: float = 0.0,
    wrapper: StochasticWrapper | None = None,
    eps: float = 0.5,
) -> list[dict]:
    """Run every bound check for one (fixture, block, mu) cell."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    d, grad, batch_values, smoothed_grad, smoothed_value = _block_quantities(
        problem, block, x, y
    )
    ell = problem.ell
    grad_sq = float(grad @ grad)
    q = 2 * (d + 6)

    checks = []

    def add(name, empirical, bound, extra=None):
        row = {
            "check": name,
            "empirical": float(empirical),
            "bound": float(bound),
            "pass": bool(empirical <= bound),
        }
        if extra:
            row.update(extra)
        checks.append(row)

    # exact closed-form comparisons (no sampling involved)
    bias = smoothed_grad(x, y, mu) - grad
    add("bias_sq_vs_bound", float(bias @ bias), mu**2 / 4.0 * ell**2 * (d + 3) ** 3)
    gap = abs(smoothed_value(x, y, mu) - problem.value(x, y))
    add("value_gap_vs_bound", gap, mu**2 / 2.0 * ell * d)

    # deterministic-oracle Monte Carlo
    rng = np.random.default_rng(seed_seq)
    U = rng.standard_normal((n_samples, d))
    coeff = (batch_values(U, mu) - problem.value(x, y)) / mu
    target = smoothed_grad(x, y, mu)
    mean_vec, se_vec, second_single, batched = _mc_moments(coeff, U, [q])
    zmax = float(np.max(np.abs(mean_vec - target) / se_vec))
    add("unbiasedness_zmax", zmax, UNBIASEDNESS_Z_THRESHOLD)
    add(
        "second_moment_single",
        second_single,
        2.0 * (d + 4) * grad_sq + mu**2 * ell**2 * (d + 6) ** 3 / 2.0,
    )
    add(
        "second_moment_minibatch_q",
        batched[q],
        3.0 * grad_sq + mu**2 * ell**2 * (d + 6) ** 3,
        extra={"batch": q},
    )

    # noisy-oracle Monte Carlo: same directions (matched child seed), fresh
    # noise stream appended after them
    if wrapper is not None:
        rng_s = np.random.default_rng(seed_seq)
        U_s = rng_s.standard_normal((n_samples, d))
        coeff_s = (batch_values(U_s, mu) - problem.value(x, y)) / mu
        if sigma > 0:
            scale = sigma / np.sqrt(d)
            Xi = scale * rng_s.standard_normal((n_samples, d))
            coeff_s = coeff_s + np.einsum("ij,ij->i", Xi, U_s)
        m = int(np.ceil(4.0 * (d + 6) * (sigma**2 + 1.0) / eps**2 * (1 - 1e-12)))
        mean_s, se_s, second_single_s, batched_s = _mc_moments(coeff_s, U_s, [m])
        zmax_s = float(np.max(np.abs(mean_s - target) / se_s))
        add("stoch_unbiasedness_zmax", zmax_s, UNBIASEDNESS_Z_THRESHOLD)
        add(
            "stoch_second_moment_single",
            second_single_s,
            mu**2 * ell**2 * (d + 6) ** 3 / 2.0 + 2.0 * (grad_sq + sigma**2) * (d + 4),
        )
        add(
            "stoch_second_moment_minibatch_M",
            batched_s[m],
            3.0 * grad_sq + _rho(eps, mu, ell, d),
            extra={"batch": m},
        )

    return checks


def run_bound_suite(
    problems: dict[str, MinimaxProblem],
    mus,
    n_samples: int,
    master_seed: int,
    point_seed: int = 1,
    sigma1: float = 0.0,
    sigma2: float = 0.0,
    eps: float = 0.5,
) -> dict:
    """Full bound suite over fixtures x blocks x smoothing radii.

    Evaluation points are drawn once from ``point_seed`` (y projected to the
    feasible set); Monte Carlo streams are children of ``master_seed``.
    """
    results = []
    all_pass = True
    for fam_idx, (family, problem) in enumerate(sorted(problems.items())):
        point_rng = np.random.default_rng(point_seed)
        x = 0.8 * point_rng.standard_normal(problem.d1)
        y = problem.set_y.project(0.5 * point_rng.standard_normal(problem.d2))
        wrapper = StochasticWrapper(problem, sigma1=sigma1, sigma2=sigma2)
        for block_idx, block in enumerate(("x", "y")):
            sigma = sigma1 if block == "x" else sigma2
            for mu_idx, mu in enumerate(mus):
                child = np.random.SeedSequence(
                    [master_seed, fam_idx, block_idx, mu_idx]
                )
                rows = check_block(
                    problem,
                    block,
                    x,
                    y,
                    float(mu),
                    n_samples,
                    child,
                    sigma=sigma,
                    wrapper=wrapper,
                    eps=eps,
                )
                for row in rows:
                    row.update({"family": family, "block": block, "mu": float(mu)})
                    all_pass = all_pass and row["pass"]
                results.extend(rows)
    return {
        "backend": backend_name(),
        "n_samples": int(n_samples),
        "eps": float(eps),
        "sigma1": float(sigma1),
        "sigma2": float(sigma2),
        "all_pass": all_pass,
        "results": results,
    }
