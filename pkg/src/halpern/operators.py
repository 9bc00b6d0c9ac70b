"""Self-maps of a convex domain and the averaged-type transform.

An ``Operator`` wraps a vectorized callable (rows of an ``(n, d)`` array are
mapped independently) together with its domain, the class it is claimed to
belong to, and its fixed-point set when that is known exactly. Operators
built from the factories below also carry a ``native`` description that the
compiled kernels can evaluate without calling back into Python.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import sets
from .sets import Ball, Box, ConvexSet
from .space import DimensionError, as_point

# Operator codes for the compiled kernels. Codes 0..3 coincide with the set
# codes: "project onto a set of that kind" (WHOLE => identity).
AFFINE = 4


class OperatorClass(str, enum.Enum):
    NONEXPANSIVE = "nonexpansive"
    NONSPREADING = "nonspreading"
    QUASI_NONEXPANSIVE = "quasi_nonexpansive"
    GENERIC = "generic"


@dataclass(frozen=True)
class NativeSpec:
    kind: int
    params: np.ndarray
    post_kind: int = sets.WHOLE
    post_params: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weight: float = 1.0


@dataclass(frozen=True, eq=False)
class Operator:
    fn: Callable[[np.ndarray], np.ndarray]
    domain: ConvexSet
    claimed_class: OperatorClass = OperatorClass.GENERIC
    known_fix: ConvexSet | None = None
    name: str = "operator"
    vectorized: bool = True
    native: NativeSpec | None = None

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, x):
        return self.apply(x)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise DimensionError(f"{self.name} acts on dimension {self.dim}, got {x.shape[-1]}")
        if x.ndim == 1 or self.vectorized:
            return self.fn(x)
        return np.stack([self.fn(row) for row in x])

    def native_spec(self) -> NativeSpec | None:
        return self.native


@dataclass(frozen=True, eq=False)
class AveragedOperator:
    """``(1 - delta) I + delta * base``; same fixed points as ``base``."""

    base: Operator | "AveragedOperator"
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def domain(self):
        return self.base.domain

    @property
    def dim(self):
        return self.base.dim

    @property
    def known_fix(self):
        return self.base.known_fix

    @property
    def claimed_class(self):
        return self.base.claimed_class

    @property
    def name(self):
        return f"averaged({self.base.name}, {self.delta:g})"

    def __call__(self, x):
        return self.apply(x)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (1.0 - self.delta) * x + self.delta * self.base.apply(x)

    def native_spec(self) -> NativeSpec | None:
        inner = self.base.native_spec()
        if inner is None:
            return None
        return NativeSpec(inner.kind, inner.params, inner.post_kind, inner.post_params,
                          inner.weight * self.delta)


def decompose(op) -> tuple[Operator, float]:
    """Split an operator into (plain base operator, averaging weight).

    Nested averaging collapses: averaging with d1 then d2 is averaging with d1*d2.
    """
    weight = 1.0
    while isinstance(op, AveragedOperator):
        weight *= op.delta
        op = op.base
    return op, weight


def _check_inside(inner: ConvexSet, outer: ConvexSet, what: str, n: int = 256) -> None:
    try:
        pts = inner.sample(np.random.default_rng(0), n)
    except sets.SamplerUnavailable:
        if outer.kind != sets.WHOLE:
            raise ValueError(f"{what} is unbounded but the domain is not the whole space")
        return
    if not outer.contains(pts, 1e-9):
        raise ValueError(f"{what} is not contained in the operator domain")


def make_projection_operator(target: ConvexSet, domain: ConvexSet) -> Operator:
    if target.dim != domain.dim:
        raise DimensionError("projection target and domain differ in dimension")
    _check_inside(target, domain, "projection target")
    kind, params = target.native()
    return Operator(
        fn=target.project,
        domain=domain,
        claimed_class=OperatorClass.NONSPREADING,
        known_fix=target,
        name=f"projection({type(target).__name__.lower()})",
        native=NativeSpec(kind, params),
    )


def identity_operator(domain: ConvexSet) -> Operator:
    return Operator(
        fn=lambda x: np.array(x, dtype=np.float64),
        domain=domain,
        claimed_class=OperatorClass.NONSPREADING,
        known_fix=domain,
        name="identity",
        native=NativeSpec(sets.WHOLE, np.zeros(0)),
    )


def make_affine_operator(matrix, shift, domain: ConvexSet, known_fix: ConvexSet | None = None,
                         claimed_class: OperatorClass = OperatorClass.GENERIC,
                         name: str = "affine") -> Operator:
    """x -> P_domain(M x + c). The post-projection keeps the map a self-map."""
    M = np.array(matrix, dtype=np.float64)
    d = domain.dim
    if M.shape != (d, d):
        raise DimensionError(f"matrix has shape {M.shape}, expected {(d, d)}")
    c = as_point(shift, dim=d, name="shift")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")

    def fn(x):
        return domain.project(x @ M.T + c)

    post_kind, post_params = domain.native()
    return Operator(
        fn=fn,
        domain=domain,
        claimed_class=claimed_class,
        known_fix=known_fix,
        name=name,
        native=NativeSpec(AFFINE, np.concatenate([M.ravel(), c]), post_kind, post_params),
    )


def rotation_matrix(angle: float, dim: int) -> np.ndarray:
    if dim % 2:
        raise ValueError(f"rotation needs an even dimension (2x2 blocks), got {dim}")
    c, s = np.cos(angle), np.sin(angle)
    return np.kron(np.eye(dim // 2), np.array([[c, -s], [s, c]]))


def make_rotation_operator(angle: float, domain: Ball) -> Operator:
    """Block rotation by ``angle`` on a ball centered at the origin; Fix = {0}."""
    if not isinstance(domain, Ball) or np.any(domain.center != 0):
        raise ValueError("rotation domain must be a ball centered at the origin")
    d = domain.dim
    origin = Box(np.zeros(d), np.zeros(d))
    return make_affine_operator(rotation_matrix(angle, d), np.zeros(d), domain,
                                known_fix=origin, claimed_class=OperatorClass.NONEXPANSIVE,
                                name=f"rotation({angle:g})")


def averaged(base, delta: float) -> AveragedOperator:
    return AveragedOperator(base, delta)


def blend(aT, aS, beta: float, x) -> np.ndarray:
    """beta * aT(x) + (1 - beta) * aS(x)."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if aT.dim != aS.dim:
        raise DimensionError("operators act on different dimensions")
    return beta * aT.apply(x) + (1.0 - beta) * aS.apply(x)


def operator_from_spec(spec: dict, domain: ConvexSet) -> Operator:
    kind = spec.get("kind")
    params = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "identity":
        op = identity_operator(domain)
    elif kind == "projection":
        op = make_projection_operator(sets.set_from_spec(params.pop("set"), domain.dim), domain)
    elif kind == "rotation":
        op = make_rotation_operator(float(params.pop("angle")), domain)
    elif kind == "affine":
        fix = params.pop("known_fix", None)
        fix = sets.set_from_spec(fix, domain.dim) if fix is not None else None
        op = make_affine_operator(params.pop("matrix"), params.pop("shift"), domain, known_fix=fix)
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    if params:
        raise ValueError(f"unknown keys for {kind} operator: {sorted(params)}")
    return op
