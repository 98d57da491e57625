"""Convex feasible regions for the ascent variable.

Three set families cover what the solvers and fixtures need: a Euclidean
ball (closed-form maximizers for the fixtures), an axis-aligned box, and the
whole space (allowed by the single-step descent-ascent family only).  Each
set supports Euclidean projection, membership testing and diameter.
"""

import math

import numpy as np

#: absolute tolerance for boundary membership checks; well above double
#: roundoff, well below any smoothing radius or step size in use.
MEMBERSHIP_TOL = 1e-10


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    return arr


class ConstraintSet:
    """Base class; concrete sets define `project`, `diameter`, `contains`."""

    dim: int

    def _check_dim(self, p: np.ndarray) -> np.ndarray:
        p = _as_vector(p, "point")
        if p.shape[0] != self.dim:
            raise ValueError(
                f"point has dimension {p.shape[0]}, set has dimension {self.dim}"
            )
        return p

    def project(self, p) -> np.ndarray:
        raise NotImplementedError

    def diameter(self) -> float:
        """Euclidean diameter; ``math.inf`` when the set is unbounded."""
        raise NotImplementedError

    def contains(self, p, tol: float = MEMBERSHIP_TOL) -> bool:
        raise NotImplementedError

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.diameter())


class EuclideanBall(ConstraintSet):
    def __init__(self, center, radius: float):
        self.center = _as_vector(center, "center")
        self.radius = float(radius)
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {radius}")
        self.dim = self.center.shape[0]

    def project(self, p) -> np.ndarray:
        p = self._check_dim(p)
        diff = p - self.center
        norm = np.linalg.norm(diff)
        if norm <= self.radius:
            return p.copy()
        return self.center + diff * (self.radius / norm)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, p, tol: float = MEMBERSHIP_TOL) -> bool:
        p = self._check_dim(p)
        return bool(np.linalg.norm(p - self.center) <= self.radius + tol)

    def __repr__(self):
        return f"EuclideanBall(dim={self.dim}, radius={self.radius})"


class Box(ConstraintSet):
    def __init__(self, lower, upper):
        self.lower = _as_vector(lower, "lower")
        self.upper = _as_vector(upper, "upper")
        if self.lower.shape != self.upper.shape:
            raise ValueError("box bounds must have matching shapes")
        if not np.all(self.lower <= self.upper):
            raise ValueError("box requires lower <= upper componentwise")
        self.dim = self.lower.shape[0]

    def project(self, p) -> np.ndarray:
        p = self._check_dim(p)
        return np.clip(p, self.lower, self.upper)

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, p, tol: float = MEMBERSHIP_TOL) -> bool:
        p = self._check_dim(p)
        return bool(
            np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol)
        )

    def __repr__(self):
        return f"Box(dim={self.dim})"


class WholeSpace(ConstraintSet):
    def __init__(self, dim: int):
        if int(dim) <= 0:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.dim = int(dim)

    def project(self, p) -> np.ndarray:
        return self._check_dim(p).copy()

    def diameter(self) -> float:
        return math.inf

    def contains(self, p, tol: float = MEMBERSHIP_TOL) -> bool:
        self._check_dim(p)
        return True

    def __repr__(self):
        return f"WholeSpace(dim={self.dim})"


def constraint_set_from_config(cfg: dict, dim: int) -> ConstraintSet:
    """Build a set from a harness config mapping.

    Accepted forms::

        {kind: ball, radius: 1.0, center: [..]}   # center defaults to 0
        {kind: box, lower: [..], upper: [..]}
        {kind: box, half_width: 0.5}              # symmetric box around 0
        {kind: whole}
    """
    kind = str(cfg.get("kind", "")).lower()
    if kind == "ball":
        if "radius" not in cfg:
            raise ValueError("set.radius is required for kind 'ball'")
        center = cfg.get("center")
        if center is None:
            center = np.zeros(dim)
        return EuclideanBall(center, float(cfg["radius"]))
    if kind == "box":
        if "half_width" in cfg:
            hw = float(cfg["half_width"])
            return Box(np.full(dim, -hw), np.full(dim, hw))
        if "lower" not in cfg or "upper" not in cfg:
            raise ValueError(
                "set of kind 'box' needs lower/upper or half_width"
            )
        return Box(cfg["lower"], cfg["upper"])
    if kind == "whole":
        return WholeSpace(dim)
    raise ValueError(f"set.kind must be ball, box or whole, got {kind!r}")
