"""Points of R^d and the two Hilbert-space facts used by the convergence proofs.

Points are plain 1-D ``float64`` numpy arrays. ``as_point`` is the single
gate that enforces the invariants (finite entries, fixed dimension).
"""
from __future__ import annotations

import numpy as np


class DimensionError(ValueError):
    """Raised when two points (or a point and a set) disagree on dimension."""


def as_point(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    p = np.array(x, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has non-finite coordinates")
    if dim is not None and p.size != dim:
        raise DimensionError(f"{name} has dimension {p.size}, expected {dim}")
    return p


def check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if np.shape(x)[-1] != np.shape(y)[-1]:
        raise DimensionError(f"dimension mismatch: {np.shape(x)[-1]} vs {np.shape(y)[-1]}")


def inner(x, y) -> float:
    x, y = as_point(x), as_point(y)
    check_same_dim(x, y)
    return float(np.dot(x, y))


def norm(x) -> float:
    x = as_point(x)
    return float(np.sqrt(np.dot(x, x)))


def combine(t: float, x, y) -> np.ndarray:
    """Convex combination ``t*x + (1-t)*y``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"combination weight must lie in [0, 1], got {t}")
    x, y = as_point(x), as_point(y)
    check_same_dim(x, y)
    return t * x + (1.0 - t) * y


def check_identity_convex(t: float, x, y) -> float:
    """Signed residual of ||tx+(1-t)y||^2 = t||x||^2 + (1-t)||y||^2 - t(1-t)||x-y||^2.

    Both sides are evaluated independently, so the return value is pure
    rounding noise when the identity holds.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    x, y = as_point(x), as_point(y)
    check_same_dim(x, y)
    z = t * x + (1.0 - t) * y
    lhs = np.dot(z, z)
    diff = x - y
    rhs = t * np.dot(x, x) + (1.0 - t) * np.dot(y, y) - t * (1.0 - t) * np.dot(diff, diff)
    return float(lhs - rhs)


def check_inequality_cross(x, y) -> float:
    """LHS - RHS of ||x+y||^2 <= ||x||^2 + 2<y, x+y>; never positive beyond rounding."""
    x, y = as_point(x), as_point(y)
    check_same_dim(x, y)
    s = x + y
    return float(np.dot(s, s) - (np.dot(x, x) + 2.0 * np.dot(y, s)))
