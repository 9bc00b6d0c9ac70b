"""Sampling certifiers for the operator-class inequalities.

Each certifier draws seeded samples, evaluates LHS - RHS of one inequality
per sample and reports the worst case. A report with
``scaled_violation <= tol`` means no violation was found among the samples;
it is evidence, not proof. Violations are compared against the scale of the
quantities involved (``1 + sum of squared norms`` for quadratic inequalities,
``1 + sum of norms`` for the nonexpansive one) because floating-point
expansion errors grow with that scale.

Samples are always generated up front in the calling thread from the seed,
so sharding the evaluation over ``workers`` threads cannot change a report.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .operators import AveragedOperator
from .sets import ConvexSet

DEFAULT_TOL = 1e-10
# pairs whose displacement difference is this small relative to scale are
# excluded from the firmly-type ratio
_DENOM_FLOOR = 1e-8


class MissingFixedSet(ValueError):
    """The certifier needs the operator's exact fixed-point set."""


@dataclass
class CertificateReport:
    inequality_id: str
    samples_tested: int
    max_violation: float
    worst_pair: tuple[np.ndarray, np.ndarray]
    scaled_violation: float
    estimated_coefficient: float | None = None
    applicable: bool = True

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        if not self.applicable:
            return True
        if self.estimated_coefficient is not None:
            return self.estimated_coefficient > 0
        return self.scaled_violation <= tol

    @property
    def coefficient_bounded_away(self) -> bool | None:
        if not self.applicable or self.estimated_coefficient is None:
            return None
        return self.estimated_coefficient > _DENOM_FLOOR


def _sq(v):
    return np.einsum("ij,ij->i", v, v)


def _dot(a, b):
    return np.einsum("ij,ij->i", a, b)


def _rng(seed):
    return np.random.default_rng(seed)


def _sampler(region: ConvexSet, extent):
    return lambda rng, n: region.sample(rng, n, extent)


def _map_shards(fn, arrays, workers: int):
    """Apply ``fn`` to row-aligned shards of ``arrays`` and concatenate."""
    n = arrays[0].shape[0]
    if workers <= 1 or n < 2 * workers:
        return fn(*arrays)
    bounds = np.linspace(0, n, workers + 1).astype(int)
    shards = [tuple(a[lo:hi] for a in arrays) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda s: fn(*s), shards))
    return tuple(np.concatenate(p) for p in zip(*parts))


def _report(inequality_id, viol, scale, X, Y, **extra) -> CertificateReport:
    i = int(np.argmax(viol))
    return CertificateReport(
        inequality_id=inequality_id,
        samples_tested=int(viol.size),
        max_violation=float(viol[i]),
        worst_pair=(X[i].copy(), Y[i].copy()),
        scaled_violation=float(np.max(viol / scale)),
        **extra,
    )


def _pairs(T, n, seed, region, extent):
    if n < 1:
        raise ValueError("need at least one sample")
    region = T.domain if region is None else region
    rng = _rng(seed)
    X = region.sample(rng, n, extent)
    Y = region.sample(rng, n, extent)
    return X, Y


def _fixed_pairs(T, n, seed, region, extent):
    if T.known_fix is None:
        raise MissingFixedSet(f"{T.name} has no known fixed-point set")
    region = T.domain if region is None else region
    rng = _rng(seed)
    X = region.sample(rng, n, extent)
    P = T.known_fix.sample(rng, n, extent)
    return X, P


def certify_nonexpansive(T, n_pairs: int, seed=0, *, region=None, extent=None, workers=1):
    """||Tx - Ty|| <= ||x - y||."""
    X, Y = _pairs(T, n_pairs, seed, region, extent)

    def body(X, Y):
        TX, TY = T.apply(X), T.apply(Y)
        viol = np.linalg.norm(TX - TY, axis=1) - np.linalg.norm(X - Y, axis=1)
        scale = 1 + sum(np.linalg.norm(v, axis=1) for v in (X, Y, TX, TY))
        return viol, scale

    viol, scale = _map_shards(body, (X, Y), workers)
    return _report("nonexpansive", viol, scale, X, Y)


def _quadratic_scale(*vs):
    return 1 + sum(_sq(v) for v in vs)


def certify_nonspreading(T, n_pairs: int, seed=0, *, region=None, extent=None, workers=1):
    """Both forms of nonspreading, plus the largest per-pair gap between them.

    definition:       2||Tx-Ty||^2 <= ||Tx-y||^2 + ||x-Ty||^2
    characterization: ||Tx-Ty||^2 <= ||x-y||^2 + 2<x-Tx, y-Ty>

    The two violation amounts are the same polynomial in inner products, so
    the returned gap (scaled like the violations) is rounding noise.
    """
    X, Y = _pairs(T, n_pairs, seed, region, extent)

    def body(X, Y):
        TX, TY = T.apply(X), T.apply(Y)
        d_def = 2 * _sq(TX - TY) - _sq(TX - Y) - _sq(X - TY)
        d_char = _sq(TX - TY) - _sq(X - Y) - 2 * _dot(X - TX, Y - TY)
        return d_def, d_char, _quadratic_scale(X, Y, TX, TY)

    d_def, d_char, scale = _map_shards(body, (X, Y), workers)
    gap = float(np.max(np.abs(d_def - d_char) / scale))
    return (_report("nonspreading.definition", d_def, scale, X, Y),
            _report("nonspreading.characterization", d_char, scale, X, Y),
            gap)


def certify_quasi_nonexpansive(T, n_points: int, seed=0, *, region=None, extent=None, workers=1):
    """||Tx - p|| <= ||x - p|| for p in the known fixed-point set."""
    X, P = _fixed_pairs(T, n_points, seed, region, extent)

    def body(X, P):
        TX = T.apply(X)
        viol = np.linalg.norm(TX - P, axis=1) - np.linalg.norm(X - P, axis=1)
        scale = 1 + sum(np.linalg.norm(v, axis=1) for v in (X, P, TX))
        return viol, scale

    viol, scale = _map_shards(body, (X, P), workers)
    return _report("quasi_nonexpansive", viol, scale, X, P)


def certify_inverse_strongly_monotone(T, n_pairs: int, seed=0, *, region=None, extent=None,
                                      workers=1):
    """1/2 ||(I-T)x - (I-T)y||^2 <= <x - y, (I-T)x - (I-T)y>."""
    X, Y = _pairs(T, n_pairs, seed, region, extent)

    def body(X, Y):
        TX, TY = T.apply(X), T.apply(Y)
        e = (X - TX) - (Y - TY)
        viol = 0.5 * _sq(e) - _dot(X - Y, e)
        return viol, _quadratic_scale(X, Y, TX, TY)

    viol, scale = _map_shards(body, (X, Y), workers)
    return _report("inverse_strongly_monotone", viol, scale, X, Y)


def certify_ImS_inequality(S, n_pairs: int, seed=0, *, region=None, extent=None, workers=1):
    """||(I-S)x - (I-S)y||^2 <= <x-y, (I-S)x-(I-S)y> + 1/2 (||x-Sx||^2 + ||y-Sy||^2)."""
    X, Y = _pairs(S, n_pairs, seed, region, extent)

    def body(X, Y):
        SX, SY = S.apply(X), S.apply(Y)
        dx, dy = X - SX, Y - SY
        e = dx - dy
        viol = _sq(e) - _dot(X - Y, e) - 0.5 * (_sq(dx) + _sq(dy))
        return viol, _quadratic_scale(X, Y, SX, SY)

    viol, scale = _map_shards(body, (X, Y), workers)
    return _report("I-S_inequality", viol, scale, X, Y)


def certify_quasi_firmly(aS: AveragedOperator, n_points: int, seed=0, *, region=None,
                         extent=None, workers=1):
    """Check the averaged map against both of its quasi-firmly inequalities.

    Returns ``(fixed_point_report, two_point_report)``:

    * ||A x - p||^2 <= ||x - p||^2 - (1 - delta) ||x - A x||^2 for p in Fix
    * ||A x - A y||^2 <= ||x - y||^2 + (2/delta) <x - A x, y - A y>
      - (1 - delta) ||(x - A x) - (y - A y)||^2
    """
    if not isinstance(aS, AveragedOperator):
        raise TypeError("certify_quasi_firmly expects an AveragedOperator")
    delta = aS.delta
    X, P = _fixed_pairs(aS, n_points, seed, region, extent)

    def fixed(X, P):
        AX = aS.apply(X)
        viol = _sq(AX - P) - _sq(X - P) + (1 - delta) * _sq(X - AX)
        return viol, _quadratic_scale(X, P, AX)

    viol, scale = _map_shards(fixed, (X, P), workers)
    rep_a = _report(f"quasi_firmly[delta={delta:g}].fixed_point", viol, scale, X, P)

    X, Y = _pairs(aS, n_points, None if seed is None else [seed, 1], region, extent)

    def two_point(X, Y):
        AX, AY = aS.apply(X), aS.apply(Y)
        dx, dy = X - AX, Y - AY
        viol = (_sq(AX - AY) - _sq(X - Y) - (2 / delta) * _dot(dx, dy)
                + (1 - delta) * _sq(dx - dy))
        # the 2/delta cross term inflates rounding by 1/delta
        return viol, _quadratic_scale(X, Y, AX, AY) / delta

    viol, scale = _map_shards(two_point, (X, Y), workers)
    rep_b = _report(f"quasi_firmly[delta={delta:g}].two_point", viol, scale, X, Y)
    return rep_a, rep_b


def estimate_firmly_coefficient(T, n_pairs: int, seed=0, *, region=None, extent=None,
                                workers=1):
    """Infimum over sampled pairs of (||x-y||^2 - ||Tx-Ty||^2) / ||(x-Tx) - (y-Ty)||^2.

    Pairs with a (relatively) vanishing denominator are skipped; when every
    pair is skipped the report is marked not applicable.
    """
    X, Y = _pairs(T, n_pairs, seed, region, extent)

    def body(X, Y):
        TX, TY = T.apply(X), T.apply(Y)
        num = _sq(X - Y) - _sq(TX - TY)
        den = _sq((X - TX) - (Y - TY))
        return num, den, _quadratic_scale(X, Y, TX, TY)

    num, den, scale = _map_shards(body, (X, Y), workers)
    ok = den > _DENOM_FLOOR * scale
    if not np.any(ok):
        return _report("firmly_type", -num, scale, X, Y, applicable=False)
    ratio = np.where(ok, num / np.where(ok, den, 1.0), math.inf)
    k = float(np.min(ratio))
    viol = np.where(ok, k * den - num, -num)
    return _report("firmly_type", viol, scale, X, Y, estimated_coefficient=k)
