"""Closed convex sets with closed-form metric projections.

Every set projects single points of shape ``(d,)`` and batches of shape
``(n, d)``. Samplers draw points *from* the set and take an explicit
``numpy.random.Generator`` so that certification runs are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .space import DimensionError, as_point

# Codes shared with the compiled kernels (see _kernels.pyx).
WHOLE, BOX, BALL, HALFSPACE = 0, 1, 2, 3

DEFAULT_EXTENT = 5.0


class SamplerUnavailable(ValueError):
    """The set is unbounded and no sampling extent was given."""


def _check_batch(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != dim:
        raise DimensionError(f"point has dimension {x.shape[-1]}, set has dimension {dim}")
    return x


class ConvexSet:
    kind: int
    dim: int

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x) -> np.ndarray | float:
        raise NotImplementedError

    def contains(self, x, tol: float = 0.0) -> bool:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        d = self.distance(x)
        return bool(np.all(d <= tol))

    def sample(self, rng: np.random.Generator, n: int, extent: float | None = None) -> np.ndarray:
        raise NotImplementedError

    def native(self) -> tuple[int, np.ndarray]:
        """(kind code, flat parameter vector) for the compiled kernels."""
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    def same_as(self, other: "ConvexSet") -> bool:
        if self.kind != other.kind or self.dim != other.dim:
            return False
        return bool(np.array_equal(self.native()[1], other.native()[1]))


@dataclass(frozen=True, eq=False)
class WholeSpace(ConvexSet):
    dim: int

    kind = WHOLE

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    def project(self, x):
        return np.array(_check_batch(x, self.dim), dtype=np.float64)

    def distance(self, x):
        x = _check_batch(x, self.dim)
        return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0

    def sample(self, rng, n, extent=None):
        if extent is None:
            raise SamplerUnavailable("the whole space has no bounded sampler; pass an explicit extent")
        return rng.uniform(-extent, extent, size=(n, self.dim))

    def native(self):
        return WHOLE, np.zeros(0)

    def to_spec(self):
        return {"kind": "whole", "dim": self.dim}


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lower: np.ndarray
    upper: np.ndarray

    kind = BOX

    def __post_init__(self):
        lo = as_point(self.lower, name="lower")
        hi = as_point(self.upper, dim=lo.size, name="upper")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.size

    def project(self, x):
        return np.clip(_check_batch(x, self.dim), self.lower, self.upper)

    def distance(self, x):
        x = _check_batch(x, self.dim)
        return np.linalg.norm(x - np.clip(x, self.lower, self.upper), axis=-1)

    def sample(self, rng, n, extent=None):
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))

    def native(self):
        return BOX, np.concatenate([self.lower, self.upper])

    def to_spec(self):
        return {"kind": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    kind = BALL

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, name="center"))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size

    def project(self, x):
        x = _check_batch(x, self.dim)
        v = x - self.center
        r = np.linalg.norm(v, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(r > self.radius, self.radius / r, 1.0)
        return self.center + v * scale

    def distance(self, x):
        x = _check_batch(x, self.dim)
        return np.maximum(0.0, np.linalg.norm(x - self.center, axis=-1) - self.radius)

    def sample(self, rng, n, extent=None):
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * rng.uniform(size=(n, 1)) ** (1.0 / self.dim)
        return self.center + r * g

    def native(self):
        return BALL, np.concatenate([self.center, [self.radius]])

    def to_spec(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """The set {x : <normal, x> <= offset}."""

    normal: np.ndarray
    offset: float

    kind = HALFSPACE

    def __post_init__(self):
        a = as_point(self.normal, name="normal")
        if not np.dot(a, a) > 0:
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.size

    def _excess(self, x):
        return (x @ self.normal - self.offset) / np.dot(self.normal, self.normal)

    def project(self, x):
        x = _check_batch(x, self.dim)
        step = np.maximum(0.0, self._excess(x))
        return x - np.multiply.outer(step, self.normal)

    def distance(self, x):
        x = _check_batch(x, self.dim)
        return np.maximum(0.0, x @ self.normal - self.offset) / np.linalg.norm(self.normal)

    def sample(self, rng, n, extent=None):
        # cube around the boundary point nearest the origin, infeasible half reflected back
        extent = DEFAULT_EXTENT if extent is None else extent
        base = self.offset * self.normal / np.dot(self.normal, self.normal)
        y = base + rng.uniform(-extent, extent, size=(n, self.dim))
        step = np.maximum(0.0, self._excess(y))
        return y - 2.0 * np.multiply.outer(step, self.normal)

    def native(self):
        return HALFSPACE, np.concatenate([self.normal, [self.offset]])

    def to_spec(self):
        return {"kind": "halfspace", "normal": self.normal.tolist(), "offset": self.offset}


def contains(s: ConvexSet, x, tol: float = 0.0) -> bool:
    return s.contains(x, tol)


def project(s: ConvexSet, x) -> np.ndarray:
    return s.project(x)


def projection_characterization_check(
    s: ConvexSet, x, n_samples: int, rng: np.random.Generator | int | None = 0,
    extent: float | None = None,
) -> float:
    """Max over sampled y in ``s`` of <x - Px, y - Px>; nonpositive up to rounding."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(rng)
    x = as_point(x, dim=s.dim)
    z = s.project(x)
    y = s.sample(rng, n_samples, extent)
    return float(np.max((y - z) @ (x - z)))


def set_from_spec(spec: dict, dim: int | None = None) -> ConvexSet:
    kind = spec.get("kind")
    params = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "whole":
        d = params.pop("dim", dim)
        s = WholeSpace(int(d))
    elif kind == "box":
        s = Box(params.pop("lower"), params.pop("upper"))
    elif kind == "ball":
        s = Ball(params.pop("center"), float(params.pop("radius")))
    elif kind == "halfspace":
        s = Halfspace(params.pop("normal"), float(params.pop("offset")))
    else:
        raise ValueError(f"unknown set kind {kind!r}")
    if params:
        raise ValueError(f"unknown keys for {kind} set: {sorted(params)}")
    if dim is not None and s.dim != dim:
        raise DimensionError(f"{kind} set has dimension {s.dim}, expected {dim}")
    return s


def intersect(a: ConvexSet, b: ConvexSet) -> ConvexSet | None:
    """Closed-form intersection when it is again one of the set types.

    Returns ``None`` for an empty intersection and raises
    ``NotImplementedError`` when the intersection has no closed-form
    projection (for example ball with box).
    """
    if a.dim != b.dim:
        raise DimensionError("sets live in different dimensions")
    if a.kind == WHOLE:
        return b
    if b.kind == WHOLE:
        return a
    if a.same_as(b):
        return a
    if a.kind == BOX and b.kind == BOX:
        lo = np.maximum(a.lower, b.lower)
        hi = np.minimum(a.upper, b.upper)
        if np.any(lo > hi):
            return None
        return Box(lo, hi)
    raise NotImplementedError(f"no closed-form intersection for {type(a).__name__} and {type(b).__name__}")


def intersects(a: ConvexSet, b: ConvexSet) -> bool | None:
    """Exact nonemptiness test for pairs where it is decidable in closed form; else None."""
    try:
        return intersect(a, b) is not None
    except NotImplementedError:
        pass
    pair = {a.kind, b.kind}
    first = {BALL: 0, BOX: 1, HALFSPACE: 2}
    a, b = sorted((a, b), key=lambda s: first[s.kind])
    if pair == {BALL}:
        return bool(np.linalg.norm(a.center - b.center) <= a.radius + b.radius)
    if a.kind == BALL:
        return bool(b.distance(a.center) <= a.radius)
    if a.kind == BOX and b.kind == HALFSPACE:
        lowest = np.sum(np.where(b.normal > 0, a.lower, a.upper) * b.normal)
        return bool(lowest <= b.offset)
    if pair == {HALFSPACE}:
        # disjoint only when the normals are antiparallel and the offsets separate
        na, nb = np.linalg.norm(a.normal), np.linalg.norm(b.normal)
        if np.isclose(np.dot(a.normal, b.normal), -na * nb, rtol=0, atol=1e-14 * na * nb):
            return bool(a.offset / na + b.offset / nb >= 0)
        return True
    return None
