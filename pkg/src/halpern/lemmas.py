"""Finite-data forms of Xu's recursion lemma and Mainge's index construction.

Both lemmas are asymptotic; on finite data ``xu_check`` verifies the
recursion and reports a tail trend, and ``mainge_indices`` computes the
index sequence m_k exactly. All indices are 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ScalarSeq:
    values: np.ndarray
    name: str = "seq"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValueError(f"{self.name}: need a non-empty finite sequence")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


def _vals(s, name):
    if isinstance(s, ScalarSeq):
        return s.values
    return ScalarSeq(s, name).values


@dataclass
class XuReport:
    recursion_holds: bool
    worst_index: int
    max_violation: float
    first_failure: int | None
    tail_max_of_a: float


def xu_check(a, alpha, sigma, gamma, rtol: float = 1e-12, tail_fraction: float = 0.1) -> XuReport:
    """Check a_{n+1} <= (1 - alpha_n) a_n + alpha_n sigma_n + gamma_n for every n.

    ``a`` holds a_1..a_{m+1} and the coefficient sequences hold n = 1..m
    (``a`` may also have the same length, in which case the last
    coefficients are unused). Tolerance is ``rtol * (1 + |a_n| + |sigma_n| + gamma_n + a_{n+1})``.
    """
    a, alpha = _vals(a, "a"), _vals(alpha, "alpha")
    sigma, gamma = _vals(sigma, "sigma"), _vals(gamma, "gamma")
    if not (alpha.size == sigma.size == gamma.size):
        raise ValueError("alpha, sigma and gamma must have equal lengths")
    if a.size not in (alpha.size, alpha.size + 1):
        raise ValueError("a must be as long as the coefficient sequences or one longer")
    if np.any(a < 0):
        raise ValueError("a must be nonnegative")
    if np.any(gamma < 0):
        raise ValueError("gamma must be nonnegative")
    if np.any((alpha < 0) | (alpha > 1)):
        raise ValueError("alpha must lie in [0, 1]")
    m = a.size - 1
    an, anext = a[:m], a[1:]
    al, sg, gm = alpha[:m], sigma[:m], gamma[:m]
    viol = anext - ((1 - al) * an + al * sg + gm)
    scale = 1 + an + np.abs(sg) + gm + anext
    rel = viol / scale
    bad = np.flatnonzero(rel > rtol)
    tail = a[int(np.floor(a.size * (1 - tail_fraction))):]
    if m == 0:
        return XuReport(True, 1, 0.0, None, float(np.max(tail)))
    worst = int(np.argmax(rel))
    return XuReport(
        recursion_holds=bad.size == 0,
        worst_index=worst + 1,
        max_violation=float(viol[worst]),
        first_failure=int(bad[0]) + 1 if bad.size else None,
        tail_max_of_a=float(np.max(tail)),
    )


def mainge_indices(gamma, k_start: int = 1) -> list[int | None]:
    """m_k = largest n in {1..k} with gamma_n < gamma_{n+1}, for k = k_start..len-1.

    Entries are ``None`` while no increase has occurred yet.
    """
    g = _vals(gamma, "gamma")
    if k_start < 1:
        raise ValueError("k is 1-based")
    out: list[int | None] = []
    last = None
    for k in range(1, g.size):
        if g[k - 1] < g[k]:
            last = k
        if k >= k_start:
            out.append(last)
    return out


def trace_column(trace, column: str, square: bool = False) -> ScalarSeq:
    """Pull a recorded column from an IterationTrace as a ScalarSeq."""
    v = np.asarray(getattr(trace, column), dtype=np.float64)
    if np.any(np.isnan(v)):
        raise ValueError(f"trace column {column} has missing entries")
    return ScalarSeq(v * v if square else v, column)
