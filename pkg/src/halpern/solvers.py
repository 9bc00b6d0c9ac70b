"""Anchored (Halpern-type) fixed-point schemes and the Browder path.

Every explicit scheme here is an instance of one recursion,

    x_{n+1} = c0_n u + c1_n x_n + c2_n T x_n + c3_n S x_n,

with scheme-specific coefficients computed up front from the schedules.
Averaged operators are folded into the coefficients, so the loop evaluates
each base operator exactly once per iteration. The loop itself runs in the
compiled extension when every operator has a native description and in
numpy otherwise.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from . import _backend, sets
from .operators import decompose
from .schedules import Power, Schedule, check_alpha, check_case
from .space import as_point
from .trace import CONVERGED, MAX_ITERS, IterationTrace

log = logging.getLogger(__name__)

MEMBERSHIP_TOL = 1e-9
ESCAPE_TOL = 1e-6
MIN_T = 1e-4
MAX_INNER_STEPS = 10**7
CASES = ("i", "ii", "iii")


class DomainEscape(RuntimeError):
    """An iterate left the operator domain: one of the maps is not a self-map."""


@dataclass(frozen=True)
class SolverConfig:
    anchor: np.ndarray | None
    start: np.ndarray
    alpha: Schedule
    beta: Schedule | None = None
    delta: float = 0.5
    delta_S: float | None = None
    max_iters: int = 1000
    stop_residual: float = 0.0   # 0 disables the residual stop
    trace_stride: int = 1
    allow_unverified: bool = False
    backend: str | None = None   # None: best available, "python" or "cython" to force

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be >= 1")
        if self.stop_residual < 0:
            raise ValueError("stop_residual must be >= 0")
        for name in ("delta", "delta_S"):
            v = getattr(self, name)
            if v is not None and not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        object.__setattr__(self, "start", as_point(self.start, name="start"))
        if self.anchor is not None:
            object.__setattr__(self, "anchor", as_point(self.anchor, dim=self.start.size,
                                                        name="anchor"))


def _check_points(cfg: SolverConfig, domain, need_anchor=True):
    if cfg.start.size != domain.dim:
        raise ValueError(f"start has dimension {cfg.start.size}, domain has {domain.dim}")
    if not domain.contains(cfg.start, MEMBERSHIP_TOL):
        raise ValueError("start point lies outside the operator domain")
    if need_anchor:
        if cfg.anchor is None:
            raise ValueError("this scheme needs an anchor point")
        if not domain.contains(cfg.anchor, MEMBERSHIP_TOL):
            raise ValueError("anchor lies outside the operator domain")


def _fold(c1, c_op, weight):
    """Split c_op * ((1-w) x + w T x) into the identity and T coefficients."""
    return c1 + c_op * (1.0 - weight), c_op * weight


def _execute(Tb, Sb, coeffs, cfg, domain, stop_mode, alpha_vals, beta_vals,
             scale_T, scale_S, target, meta) -> IterationTrace:
    u = cfg.anchor if cfg.anchor is not None else np.zeros(cfg.start.size)
    c0, c1, c2, c3 = (np.ascontiguousarray(c, dtype=np.float64) for c in coeffs)
    rows_n, rows_x, res_t, res_s, status, last_n = _backend.run_recursion(
        cfg.start, u, Tb, Sb, c0, c1, c2, c3, domain, ESCAPE_TOL, stop_mode,
        cfg.stop_residual, cfg.trace_stride, backend=cfg.backend)
    if status == _backend.ESCAPED:
        raise DomainEscape(f"iterate x_{last_n} left the domain by more than {ESCAPE_TOL:g}")
    idx = rows_n - 1
    if target is not None:
        dist = np.linalg.norm(rows_x - target, axis=1)
    else:
        dist = np.full(rows_n.size, np.nan)
    return IterationTrace(
        n=rows_n,
        x=rows_x,
        residual_T=res_t * scale_T,
        residual_S=res_s * scale_S,
        dist_to_target=dist,
        alpha_n=alpha_vals[idx],
        beta_n=beta_vals[idx] if beta_vals is not None else np.full(rows_n.size, np.nan),
        status=CONVERGED if status == _backend.CONVERGED else MAX_ITERS,
        target=target,
        meta=meta,
    )


def _fix_target(op, u):
    fix = op.known_fix
    if fix is None or u is None:
        return None
    return fix.project(u)


def browder_path(T, u, t_values=(1e-1, 1e-2, 1e-3), inner_tol: float = 1e-10,
                 backend: str | None = None) -> list[tuple[float, np.ndarray]]:
    """Points z_t = t u + (1 - t) T z_t along a decreasing list of t.

    Each z_t is the fixed point of a (1 - t)-contraction, found by plain
    iteration warm-started from the previous z (the first from u) and
    stopped once a step is at most ``inner_tol * t`` long.
    """
    if inner_tol <= 0:
        raise ValueError("inner_tol must be positive")
    ts = [float(t) for t in t_values]
    if not ts:
        raise ValueError("t_values is empty")
    for t in ts:
        if not MIN_T < t < 1:
            raise ValueError(f"t must lie in ({MIN_T:g}, 1), got {t}")
    if any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_values must be strictly decreasing")
    u = as_point(u, dim=T.dim, name="anchor")
    if not T.domain.contains(u, MEMBERSHIP_TOL):
        raise ValueError("anchor lies outside the operator domain")
    out = []
    z = u.copy()
    for t in ts:
        z, steps = _backend.browder_solve(z, u, T, t, inner_tol * t, MAX_INNER_STEPS,
                                          backend=backend)
        if steps < 0:
            raise RuntimeError(f"inner iteration for t={t:g} exceeded {MAX_INNER_STEPS} steps")
        out.append((t, z.copy()))
    return out


def _require_alpha(cfg):
    reason = check_alpha(cfg.alpha)
    if reason is not None and not cfg.allow_unverified:
        raise ValueError(f"{reason}; set allow_unverified to run anyway")


def halpern_classic(T, cfg: SolverConfig) -> IterationTrace:
    """x_{n+1} = alpha_n u + (1 - alpha_n) T x_n."""
    _require_alpha(cfg)
    _check_points(cfg, T.domain)
    Tb, w = decompose(T)
    a = cfg.alpha.first(cfg.max_iters)
    c1, c2 = _fold(np.zeros_like(a), 1.0 - a, w)
    return _execute(Tb, None, (a, c1, c2, np.zeros_like(a)), cfg, T.domain, _backend.STOP_T,
                    a, None, w, 1.0, _fix_target(T, cfg.anchor), {"scheme": "halpern"})


def halpern_theta(T, theta: float, cfg: SolverConfig) -> IterationTrace:
    """Halpern iteration with alpha_n = n^(-theta)."""
    return halpern_classic(T, dataclasses.replace(cfg, alpha=Power(theta)))


def halpern_segmented(T, lam: float, cfg: SolverConfig) -> IterationTrace:
    """x_{n+1} = alpha_n u + (1 - alpha_n)(lam x_n + (1 - lam) T x_n)."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    _require_alpha(cfg)
    _check_points(cfg, T.domain)
    Tb, w = decompose(T)
    a = cfg.alpha.first(cfg.max_iters)
    c1, c2 = _fold((1.0 - a) * lam, (1.0 - a) * (1.0 - lam), w)
    return _execute(Tb, None, (a, c1, c2, np.zeros_like(a)), cfg, T.domain, _backend.STOP_T,
                    a, None, w, 1.0, _fix_target(T, cfg.anchor), {"scheme": "segmented"})


def predicted_limit(case: str, T, S, u) -> np.ndarray | None:
    """Projection of the anchor onto the fixed-point set the case converges to."""
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    u = as_point(u, name="anchor")
    if case == "i":
        fix = T.known_fix
    elif case == "ii":
        fix = S.known_fix
    else:
        if T.known_fix is None or S.known_fix is None:
            log.info("no predicted limit: a fixed-point set is unknown")
            return None
        try:
            fix = sets.intersect(T.known_fix, S.known_fix)
        except NotImplementedError as exc:
            log.info("no predicted limit: %s", exc)
            return None
        if fix is None:
            log.info("no predicted limit: the fixed-point sets do not meet")
            return None
    if fix is None:
        log.info("no predicted limit: fixed-point set unknown")
        return None
    return fix.project(u)


def main_scheme(T, S, cfg: SolverConfig, case: str) -> IterationTrace:
    """x_{n+1} = alpha_n u + (1 - alpha_n)[beta_n A_T x_n + (1 - beta_n) A_S x_n].

    A_T and A_S average T and S with ``cfg.delta`` (``cfg.delta_S`` for S if
    set). The stopping residual is that of T (case i), S (case ii) or the
    larger of both (case iii).
    """
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    if cfg.beta is None:
        raise ValueError("main scheme needs a beta schedule")
    reason = check_case(cfg.alpha, cfg.beta, case)
    if reason is not None and not cfg.allow_unverified:
        raise ValueError(f"{reason}; set allow_unverified to run anyway")
    if not T.domain.same_as(S.domain):
        raise ValueError("T and S must share the same domain")
    if case == "iii" and T.known_fix is not None and S.known_fix is not None:
        if sets.intersects(T.known_fix, S.known_fix) is False:
            raise ValueError("Fix(T) and Fix(S) do not intersect")
    _check_points(cfg, T.domain)
    Tb, wT = decompose(T)
    Sb, wS = decompose(S)
    dT = cfg.delta
    dS = cfg.delta if cfg.delta_S is None else cfg.delta_S
    a = cfg.alpha.first(cfg.max_iters)
    b = cfg.beta.first(cfg.max_iters)
    cT = (1.0 - a) * b
    cS = (1.0 - a) * (1.0 - b)
    c1 = cT * (1.0 - wT * dT) + cS * (1.0 - wS * dS)
    stop = {"i": _backend.STOP_T, "ii": _backend.STOP_S, "iii": _backend.STOP_MAX}[case]
    target = predicted_limit(case, T, S, cfg.anchor)
    return _execute(Tb, Sb, (a, c1, cT * (wT * dT), cS * (wS * dS)), cfg, T.domain, stop, a, b,
                    wT, wS, target, {"scheme": "main", "case": case})


def moudafi_scheme(T, S, cfg: SolverConfig) -> IterationTrace:
    """x_{n+1} = (1 - alpha_n) x_n + alpha_n [beta_n S x_n + (1 - beta_n) T x_n].

    No anchor and no predicted limit: only some common fixed point is reached.
    """
    if cfg.beta is None:
        raise ValueError("this scheme needs a beta schedule")
    if not T.domain.same_as(S.domain):
        raise ValueError("T and S must share the same domain")
    _check_points(cfg, T.domain, need_anchor=False)
    Tb, wT = decompose(T)
    Sb, wS = decompose(S)
    a = cfg.alpha.first(cfg.max_iters)
    b = cfg.beta.first(cfg.max_iters)
    c1, c2 = _fold(1.0 - a, a * (1.0 - b), wT)
    c1, c3 = _fold(c1, a * b, wS)
    return _execute(Tb, Sb, (np.zeros_like(a), c1, c2, c3), cfg, T.domain, _backend.STOP_MAX,
                    a, b, wT, wS, None, {"scheme": "moudafi"})
