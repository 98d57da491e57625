"""Synthetic minimax fixtures with analytic inner maximizers.

Both fixtures share the shape ``f(x, y) = phi(x) + x.T B y - (tau/2)||y||^2``:
the y-block is a *spherical* concave quadratic, so the constrained maximizer
``y*(x)`` is the Euclidean projection of the unconstrained one ``B.T x / tau``
onto the feasible set (exact for balls, boxes and the whole space).  That
closed form is what makes every verification quantity - ``y*``, the envelope
gradient, smoothed values - analytically available.

``QuadraticSaddle`` uses ``phi(x) = 0.5 x.T A x`` (convex or indefinite in x);
``TrigSaddle`` uses ``phi(x) = sum_i a_i cos(x_i)`` and is the nonconvex
fixture.  ``StochasticWrapper`` adds additive linear observation noise whose
gradient-variance matches its nominal level exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EvaluationError
from .geometry import Box, ConstraintSet, EuclideanBall, WholeSpace


@dataclass
class OracleCounter:
    """Per-run tally of oracle usage.

    ``samples_x`` / ``samples_y`` count gradient-estimator samples (one
    Gaussian direction with its paired evaluations is one unit, the unit the
    complexity formulas are stated in).  ``raw_evals`` counts individual
    function evaluations, with the shared base value of a deterministic
    mini-batch counted once.
    """

    samples_x: int = 0
    samples_y: int = 0
    raw_evals: int = 0

    def add_x(self, samples: int, raw: int) -> None:
        self.samples_x += int(samples)
        self.raw_evals += int(raw)

    def add_y(self, samples: int, raw: int) -> None:
        self.samples_y += int(samples)
        self.raw_evals += int(raw)

    @property
    def total_samples(self) -> int:
        return self.samples_x + self.samples_y

    def snapshot(self) -> tuple[int, int, int]:
        return (self.samples_x, self.samples_y, self.raw_evals)


def _spectral_norm(M: np.ndarray) -> float:
    if M.size == 0 or not M.any():
        return 0.0
    return float(np.linalg.norm(M, 2))


class MinimaxProblem:
    """Base class for the spherical-y saddle fixtures."""

    family = "abstract"

    def __init__(self, B, tau: float, set_y: ConstraintSet):
        self.B = np.asarray(B, dtype=np.float64)
        if self.B.ndim != 2:
            raise ValueError("B must be a d1 x d2 matrix")
        self.tau = float(tau)
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        self.d1, self.d2 = self.B.shape
        if set_y.dim != self.d2:
            raise ValueError(
                f"constraint set dimension {set_y.dim} != d2 {self.d2}"
            )
        self.set_y = set_y

    # subclass surface -------------------------------------------------
    def phi(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def dphi(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dphi_many(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _phi_batch(self, P: np.ndarray, by: np.ndarray, tail: float) -> np.ndarray:
        """Kernel dispatch for f evaluated at rows of P with fixed y terms."""
        raise NotImplementedError

    @property
    def ell(self) -> float:
        raise NotImplementedError

    # shared structure ---------------------------------------------------
    @property
    def kappa(self) -> float:
        return self.ell / self.tau

    def value(self, x, y) -> float:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        return self.phi(x) + float(x @ (self.B @ y)) - 0.5 * self.tau * float(y @ y)

    def value_batch_x(self, P: np.ndarray, y: np.ndarray) -> np.ndarray:
        """f(p_i, y) for each row p_i of P, via the active kernel backend."""
        by = self.B @ y
        tail = 0.5 * self.tau * float(y @ y)
        return self._phi_batch(np.ascontiguousarray(P), by, tail)

    def value_batch_y(self, x: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """f(x, q_i) for each row q_i of Q."""
        return _kernels.sph_values_y(
            self.phi(x), self.B.T @ x, self.tau, np.ascontiguousarray(Q)
        )

    def grad_x(self, x, y) -> np.ndarray:
        return self.dphi(np.asarray(x, float)) + self.B @ np.asarray(y, float)

    def grad_y(self, x, y) -> np.ndarray:
        return self.B.T @ np.asarray(x, float) - self.tau * np.asarray(y, float)

    def y_star(self, x) -> np.ndarray:
        # spherical y-quadratic: constrained argmax = projection of B'x/tau
        return self.set_y.project(self.B.T @ np.asarray(x, float) / self.tau)

    def y_star_many(self, X: np.ndarray) -> np.ndarray:
        Yhat = X @ self.B / self.tau
        return project_rows(self.set_y, Yhat)

    def g_value(self, x) -> float:
        return self.value(x, self.y_star(x))

    def grad_g(self, x) -> np.ndarray:
        """Envelope gradient via the Danskin composition."""
        return self.grad_x(x, self.y_star(x))

    def grad_g_many(self, X: np.ndarray) -> np.ndarray:
        return self.dphi_many(X) + self.y_star_many(X) @ self.B.T

    # smoothing references ------------------------------------------------
    def smoothed_value_y(self, x, y, mu2: float) -> float:
        # E||y + mu u||^2 = ||y||^2 + mu^2 d2, and only the spherical tail is hit
        return self.value(x, y) - 0.5 * self.tau * mu2 * mu2 * self.d2

    def smoothed_grad_y(self, x, y, mu2: float) -> np.ndarray:
        # smoothing a spherical quadratic leaves its gradient exact
        return self.grad_y(x, y)

    def smoothed_value_x(self, x, y, mu1: float) -> float:
        raise NotImplementedError

    def smoothed_grad_x(self, x, y, mu1: float) -> np.ndarray:
        raise NotImplementedError


def project_rows(set_y: ConstraintSet, Y: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean projection (vectorized per set kind)."""
    if isinstance(set_y, WholeSpace):
        return Y.copy()
    if isinstance(set_y, Box):
        return np.clip(Y, set_y.lower, set_y.upper)
    if isinstance(set_y, EuclideanBall):
        diff = Y - set_y.center
        norms = np.linalg.norm(diff, axis=1)
        scale = np.ones_like(norms)
        outside = norms > set_y.radius
        scale[outside] = set_y.radius / norms[outside]
        return set_y.center + diff * scale[:, None]
    return np.array([set_y.project(row) for row in Y])


class QuadraticSaddle(MinimaxProblem):
    """f(x, y) = 0.5 x'Ax + x'By - (tau/2)||y||^2 with symmetric A."""

    family = "quadratic"

    def __init__(self, A, B, tau: float, set_y: ConstraintSet):
        super().__init__(B, tau, set_y)
        self.A = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
        if self.A.shape != (self.d1, self.d1):
            raise ValueError("A must be d1 x d1")
        if not np.allclose(self.A, self.A.T, atol=1e-12):
            raise ValueError("A must be symmetric")
        # conservative joint gradient-Lipschitz constant from the block
        # Hessian [[A, B], [B', -tau I]]; never re-estimated downstream
        self._ell = max(_spectral_norm(self.A), self.tau) + _spectral_norm(self.B)

    @property
    def ell(self) -> float:
        return self._ell

    def phi(self, x):
        return 0.5 * float(x @ (self.A @ x))

    def dphi(self, x):
        return self.A @ x

    def dphi_many(self, X):
        return X @ self.A

    def _phi_batch(self, P, by, tail):
        return _kernels.quad_values_x(self.A, by, tail, P)

    def smoothed_value_x(self, x, y, mu1):
        # E[0.5 (x+mu u)'A(x+mu u)] adds (mu^2/2) tr(A); the rest is linear in x
        return self.value(x, y) + 0.5 * mu1 * mu1 * float(np.trace(self.A))

    def smoothed_grad_x(self, x, y, mu1):
        return self.grad_x(x, y)


class TrigSaddle(MinimaxProblem):
    """f(x, y) = sum_i a_i cos(x_i) + x'By - (tau/2)||y||^2, nonconvex in x."""

    family = "trig"

    def __init__(self, a, B, tau: float, set_y: ConstraintSet):
        super().__init__(B, tau, set_y)
        self.a = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
        if self.a.shape != (self.d1,):
            raise ValueError("amplitudes must have length d1")
        if not np.all(self.a > 0):
            raise ValueError("amplitudes must be positive")
        self._ell = max(float(np.max(self.a)), self.tau) + _spectral_norm(self.B)

    @property
    def ell(self) -> float:
        return self._ell

    def phi(self, x):
        return float(self.a @ np.cos(x))

    def dphi(self, x):
        return -self.a * np.sin(x)

    def dphi_many(self, X):
        return -np.sin(X) * self.a

    def _phi_batch(self, P, by, tail):
        return _kernels.trig_values_x(self.a, by, tail, P)

    def smoothed_value_x(self, x, y, mu1):
        # E cos(x + mu u) = exp(-mu^2/2) cos(x): Gaussian characteristic function
        damp = float(np.exp(-0.5 * mu1 * mu1))
        return (
            damp * self.phi(x)
            + float(x @ (self.B @ y))
            - 0.5 * self.tau * float(y @ y)
        )

    def smoothed_grad_x(self, x, y, mu1):
        damp = float(np.exp(-0.5 * mu1 * mu1))
        return damp * self.dphi(x) + self.B @ y


@dataclass
class StochasticWrapper:
    """Additive linear noise: F(x, y, xi) = f(x, y) + xi_x.x + xi_y.y.

    ``xi_x ~ N(0, (sigma1^2/d1) I)`` and ``xi_y ~ N(0, (sigma2^2/d2) I)``, so
    the gradient-noise second moments equal sigma1^2 / sigma2^2 exactly.
    Zero-variance blocks draw nothing, which keeps seed streams aligned with
    the deterministic paths in the degenerate case.
    """

    base: MinimaxProblem
    sigma1: float = 0.0
    sigma2: float = 0.0
    noise_scale_x: float = field(init=False)
    noise_scale_y: float = field(init=False)

    def __post_init__(self):
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise ValueError("noise levels must be nonnegative")
        self.noise_scale_x = self.sigma1 / np.sqrt(self.base.d1)
        self.noise_scale_y = self.sigma2 / np.sqrt(self.base.d2)

    @property
    def d1(self):
        return self.base.d1

    @property
    def d2(self):
        return self.base.d2

    @property
    def ell(self):
        return self.base.ell

    @property
    def tau(self):
        return self.base.tau

    @property
    def kappa(self):
        return self.base.kappa

    @property
    def set_y(self):
        return self.base.set_y

    def draw_xi_x(self, rng: np.random.Generator, n: int) -> np.ndarray | None:
        if self.sigma1 == 0:
            return None
        return self.noise_scale_x * rng.standard_normal((n, self.base.d1))

    def draw_xi_y(self, rng: np.random.Generator, n: int) -> np.ndarray | None:
        if self.sigma2 == 0:
            return None
        return self.noise_scale_y * rng.standard_normal((n, self.base.d2))


# -- spec-level operation surface -------------------------------------------

def eval_problem(problem: MinimaxProblem, x, y, counter: OracleCounter) -> float:
    """One charged evaluation of f(x, y); y need not be feasible."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise EvaluationError("non-finite input to objective", point=(x, y))
    counter.raw_evals += 1
    return problem.value(x, y)


def eval_stochastic(
    wrapper: StochasticWrapper, x, y, rng: np.random.Generator, counter: OracleCounter
) -> float:
    """One charged draw of F(x, y, xi)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise EvaluationError("non-finite input to objective", point=(x, y))
    val = wrapper.base.value(x, y)
    if wrapper.sigma1 > 0:
        val += float(
            (wrapper.noise_scale_x * rng.standard_normal(wrapper.d1)) @ x
        )
    if wrapper.sigma2 > 0:
        val += float(
            (wrapper.noise_scale_y * rng.standard_normal(wrapper.d2)) @ y
        )
    counter.raw_evals += 1
    return val


def analytic_y_star(problem: MinimaxProblem, x) -> np.ndarray:
    """Exact maximizer of f(x, .) over the feasible set."""
    return problem.y_star(x)


def analytic_grad_g(problem: MinimaxProblem, x) -> np.ndarray:
    """Exact gradient of g(x) = max_y f(x, y)."""
    return problem.grad_g(x)


# -- seeded instance generators ---------------------------------------------

def _scaled_gaussian_matrix(rng, d1, d2, target_norm):
    if target_norm == 0:
        return np.zeros((d1, d2))
    M = rng.standard_normal((d1, d2))
    return M * (target_norm / _spectral_norm(M))


def make_quadratic(
    d1: int,
    d2: int,
    tau: float,
    kappa: float,
    set_y: ConstraintSet | None = None,
    seed: int = 0,
    b_frac: float = 1.0,
    spectrum_lo: float = 1.0,
) -> QuadraticSaddle:
    """Seeded quadratic instance with condition number exactly ``kappa``.

    The joint Lipschitz budget ``ell = kappa * tau`` is split as
    ``||B||_2 = b_frac * (ell - tau)`` and ``||A||_2 = ell - ||B||_2`` (so
    ``max(||A||, tau) + ||B|| = ell`` holds with equality).  A is positive
    definite with eigenvalues log-spaced over
    ``[spectrum_lo * ||A||_2, ||A||_2]`` in a random orientation; matrices
    are standard-normal draws from ``seed`` rescaled to their exact spectral
    norms, so instances are bit-reproducible.
    """
    if not 0.0 <= b_frac <= 1.0:
        raise ValueError("b_frac must lie in [0, 1]")
    if not 0.0 < spectrum_lo <= 1.0:
        raise ValueError("spectrum_lo must lie in (0, 1]")
    if kappa < 1.0:
        raise ValueError("kappa must be >= 1")
    if set_y is None:
        set_y = EuclideanBall(np.zeros(d2), 1.0)
    rng = np.random.default_rng(seed)
    ell = kappa * tau
    b_norm = b_frac * (ell - tau)
    a_top = ell - b_norm
    lams = np.geomspace(spectrum_lo * a_top, a_top, d1)
    Q, _ = np.linalg.qr(rng.standard_normal((d1, d1)))
    A = Q @ np.diag(lams) @ Q.T
    A = 0.5 * (A + A.T)
    # rescale so the top eigenvalue is exactly a_top despite roundoff
    A *= a_top / _spectral_norm(A)
    A = 0.5 * (A + A.T)
    B = _scaled_gaussian_matrix(rng, d1, d2, b_norm)
    return QuadraticSaddle(A, B, tau, set_y)


def make_trig(
    d1: int,
    d2: int,
    tau: float,
    kappa: float,
    set_y: ConstraintSet | None = None,
    seed: int = 0,
    b_frac: float = 1.0,
) -> TrigSaddle:
    """Seeded nonconvex instance with condition number exactly ``kappa``.

    Amplitudes are uniform on [0.5, 1] rescaled so the largest equals
    ``ell - ||B||_2``; the coupling matrix carries ``b_frac * (ell - tau)``
    of the Lipschitz budget.
    """
    if not 0.0 <= b_frac <= 1.0:
        raise ValueError("b_frac must lie in [0, 1]")
    if kappa < 1.0:
        raise ValueError("kappa must be >= 1")
    if set_y is None:
        set_y = EuclideanBall(np.zeros(d2), 1.0)
    rng = np.random.default_rng(seed)
    ell = kappa * tau
    b_norm = b_frac * (ell - tau)
    amp_top = ell - b_norm
    a = rng.uniform(0.5, 1.0, size=d1)
    a *= amp_top / np.max(a)
    B = _scaled_gaussian_matrix(rng, d1, d2, b_norm)
    return TrigSaddle(a, B, tau, set_y)
