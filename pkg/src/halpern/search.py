"""Randomized search for maps that are nonspreading but not nonexpansive.

Candidates are two-piece affine maps of an interval into itself,

    T(x) = clip(s1 x + c1)  for x <= t,   clip(s2 x + c2)  for x > t,

with slopes drawn from {0} and [-1, 1]. A candidate is kept only when the
nonspreading certifier finds no violation at ``n_pairs`` pairs and the
nonexpansive certifier does find one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import DEFAULT_TOL, certify_nonexpansive, certify_nonspreading
from .operators import Operator, OperatorClass
from .sets import Box


@dataclass(frozen=True)
class PiecewiseCandidate:
    length: float
    threshold: float
    slopes: tuple[float, float]
    shifts: tuple[float, float]

    def operator(self) -> Operator:
        t, (s1, s2), (c1, c2), L = self.threshold, self.slopes, self.shifts, self.length

        def fn(x):
            y = np.where(x <= t, s1 * x + c1, s2 * x + c2)
            return np.clip(y, 0.0, L)

        return Operator(fn=fn, domain=Box([0.0], [L]), claimed_class=OperatorClass.GENERIC,
                        name=f"piecewise(t={t:.3g})")


def _draw(rng, length):
    slopes = tuple(0.0 if rng.random() < 0.5 else float(rng.uniform(-1, 1)) for _ in range(2))
    shifts = tuple(float(rng.uniform(0, length)) for _ in range(2))
    return PiecewiseCandidate(length, float(rng.uniform(0, length)), slopes, shifts)


def search_nonspreading_not_nonexpansive(n_candidates: int = 200, seed: int = 0,
                                         n_pairs: int = 10**5, length: float = 3.0,
                                         tol: float = DEFAULT_TOL, screen_pairs: int = 2000):
    """Return the candidates that survive both checks, with their reports.

    A cheap screen at ``screen_pairs`` discards obvious failures before the
    full ``n_pairs`` certification.
    """
    rng = np.random.default_rng(seed)
    kept = []
    for i in range(n_candidates):
        cand = _draw(rng, length)
        T = cand.operator()
        d_rep, _, _ = certify_nonspreading(T, screen_pairs, seed=[seed, i, 0])
        if not d_rep.passed(tol):
            continue
        ne = certify_nonexpansive(T, screen_pairs, seed=[seed, i, 1])
        if ne.passed(tol):
            continue
        d_rep, c_rep, gap = certify_nonspreading(T, n_pairs, seed=[seed, i, 2])
        if d_rep.passed(tol) and c_rep.passed(tol):
            kept.append((cand, d_rep, ne))
    return kept
