"""Parameter sequences (alpha_n, beta_n) with symbolically known asymptotics.

Each family knows which hypotheses of the convergence theorems it provably
satisfies; these are returned by ``tags()`` and decided from the family and
its parameters alone, never by looking at numbers. Indexing is 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TENDS_TO_ZERO = "tends_to_zero"                      # lim a_n = 0
SUM_DIVERGES = "sum_diverges"                        # sum a_n = inf
SUMMABLE = "summable"                                # sum a_n < inf
COMPLEMENT_SUMMABLE = "complement_summable"          # sum (1 - a_n) < inf
LIMINF_PRODUCT_POSITIVE = "liminf_product_positive"  # liminf a_n (1 - a_n) > 0
UNVERIFIED = "unverified"

CASE_REQUIREMENT = {
    "i": COMPLEMENT_SUMMABLE,
    "ii": SUMMABLE,
    "iii": LIMINF_PRODUCT_POSITIVE,
}


class CaseRejected(ValueError):
    pass


class Schedule:
    family: str = ""

    def values(self, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value_at(self, n: int) -> float:
        if n < 1:
            raise ValueError(f"schedules are 1-based, got n={n}")
        return float(self.values(np.array([n]))[0])

    def first(self, count: int) -> np.ndarray:
        """Values for n = 1..count."""
        return self.values(np.arange(1, count + 1))

    def tags(self) -> frozenset[str]:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Power(Schedule):
    """n^(-theta), theta in (0, 1)."""

    theta: float
    family = "power"

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in the open interval (0, 1), got {self.theta}")

    def values(self, n):
        return np.asarray(n, dtype=np.float64) ** (-self.theta)

    def tags(self):
        return frozenset({TENDS_TO_ZERO, SUM_DIVERGES})

    def to_spec(self):
        return {"family": self.family, "theta": self.theta}


@dataclass(frozen=True)
class Harmonic(Schedule):
    """min(1, c / (n + a))."""

    c: float = 1.0
    a: float = 0.0
    family = "harmonic"

    def __post_init__(self):
        if not self.c > 0 or not self.a >= 0:
            raise ValueError(f"harmonic schedule needs c > 0 and a >= 0, got c={self.c}, a={self.a}")

    def values(self, n):
        return np.minimum(1.0, self.c / (np.asarray(n, dtype=np.float64) + self.a))

    def tags(self):
        return frozenset({TENDS_TO_ZERO, SUM_DIVERGES})

    def to_spec(self):
        return {"family": self.family, "c": self.c, "a": self.a}


@dataclass(frozen=True)
class Constant(Schedule):
    v: float
    family = "constant"

    def __post_init__(self):
        if not 0.0 <= self.v <= 1.0:
            raise ValueError(f"constant schedule value must lie in [0, 1], got {self.v}")

    def values(self, n):
        return np.full(np.shape(n), float(self.v))

    def tags(self):
        if self.v == 0.0:
            return frozenset({SUMMABLE})
        if self.v == 1.0:
            return frozenset({COMPLEMENT_SUMMABLE})
        return frozenset({LIMINF_PRODUCT_POSITIVE})

    def to_spec(self):
        return {"family": self.family, "v": self.v}


@dataclass(frozen=True)
class InversePower(Schedule):
    """(n + 1)^(-p), p > 1."""

    p: float
    family = "inverse_power"

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"inverse_power needs p > 1, got {self.p}")

    def values(self, n):
        return (np.asarray(n, dtype=np.float64) + 1.0) ** (-self.p)

    def tags(self):
        return frozenset({SUMMABLE, TENDS_TO_ZERO})

    def to_spec(self):
        return {"family": self.family, "p": self.p}


@dataclass(frozen=True)
class OneMinusInversePower(Schedule):
    """1 - (n + 1)^(-p), p > 1."""

    p: float
    family = "one_minus_inverse_power"

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"one_minus_inverse_power needs p > 1, got {self.p}")

    def values(self, n):
        return 1.0 - (np.asarray(n, dtype=np.float64) + 1.0) ** (-self.p)

    def tags(self):
        return frozenset({COMPLEMENT_SUMMABLE})

    def to_spec(self):
        return {"family": self.family, "p": self.p}


@dataclass(frozen=True, eq=False)
class Explicit(Schedule):
    """A user-supplied finite sequence. Its asymptotics are unknown."""

    seq: tuple[float, ...]
    family = "explicit"

    def __post_init__(self):
        arr = np.asarray(self.seq, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0 or np.any((arr < 0) | (arr > 1)) or not np.all(np.isfinite(arr)):
            raise ValueError("explicit schedule needs a non-empty list of values in [0, 1]")
        object.__setattr__(self, "seq", tuple(float(v) for v in arr))

    def __eq__(self, other):
        return isinstance(other, Explicit) and self.seq == other.seq

    def values(self, n):
        n = np.asarray(n)
        if np.any(n > len(self.seq)):
            raise IndexError(f"explicit schedule has only {len(self.seq)} values")
        return np.asarray(self.seq)[n - 1]

    def tags(self):
        return frozenset({UNVERIFIED})

    def to_spec(self):
        return {"family": self.family, "values": list(self.seq)}


_FAMILIES = {
    "power": (Power, ("theta",)),
    "harmonic": (Harmonic, ("c", "a")),
    "constant": (Constant, ("v",)),
    "inverse_power": (InversePower, ("p",)),
    "one_minus_inverse_power": (OneMinusInversePower, ("p",)),
}


def schedule_from_spec(spec: dict) -> Schedule:
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "explicit":
        values = spec.pop("values")
        if spec:
            raise ValueError(f"unknown keys for explicit schedule: {sorted(spec)}")
        return Explicit(tuple(float(v) for v in values))
    if family not in _FAMILIES:
        raise ValueError(f"unknown schedule family {family!r}")
    cls, names = _FAMILIES[family]
    unknown = set(spec) - set(names)
    if unknown:
        raise ValueError(f"unknown keys for {family} schedule: {sorted(unknown)}")
    return cls(**{k: float(v) for k, v in spec.items()})


def check_case(alpha: Schedule, beta: Schedule, case: str) -> str | None:
    """Reason the pair fails the hypotheses of the given case, or None if it passes."""
    if case not in CASE_REQUIREMENT:
        raise ValueError(f"case must be one of {sorted(CASE_REQUIREMENT)}, got {case!r}")
    a_tags = alpha.tags()
    for tag in (TENDS_TO_ZERO, SUM_DIVERGES):
        if tag not in a_tags:
            return f"alpha lacks {tag}"
    need = CASE_REQUIREMENT[case]
    if need not in beta.tags():
        return f"beta lacks {need} (required by case {case})"
    return None


def validate_case(alpha: Schedule, beta: Schedule, case: str) -> None:
    reason = check_case(alpha, beta, case)
    if reason is not None:
        raise CaseRejected(reason)


def check_alpha(alpha: Schedule) -> str | None:
    tags = alpha.tags()
    for tag in (TENDS_TO_ZERO, SUM_DIVERGES):
        if tag not in tags:
            return f"alpha lacks {tag}"
    return None
