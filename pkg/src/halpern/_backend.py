"""Select the compiled kernels when they are importable.

Set ``HALPERN_PURE_PYTHON=1`` to force the numpy fallback (used by the
benchmark and by the backend-equivalence tests).
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback

try:
    if os.environ.get("HALPERN_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels
except ImportError:
    _kernels = None

BACKEND = "cython" if _kernels is not None else "python"

STOP_T, STOP_S, STOP_MAX = _fallback.STOP_T, _fallback.STOP_S, _fallback.STOP_MAX
ESCAPED, CONVERGED, MAX_ITERS = _fallback.ESCAPED, _fallback.CONVERGED, _fallback.MAX_ITERS

_EMPTY = np.zeros(0)


def available() -> bool:
    return _kernels is not None


def _use_native(backend, *specs) -> bool:
    if backend == "python":
        return False
    ok = _kernels is not None and all(s is not None for s in specs)
    if backend == "cython" and not ok:
        raise RuntimeError("compiled backend requested but unavailable for these operators")
    return ok


def run_recursion(x1, u, T, S, c0, c1, c2, c3, domain, escape_tol, stop_mode,
                  stop_residual, stride, backend: str | None = None):
    """Dispatch the anchored recursion. ``T``/``S`` are plain (non-averaged) operators."""
    t_spec = T.native_spec()
    s_spec = S.native_spec() if S is not None else None
    native = _use_native(backend, t_spec, *(() if S is None else (s_spec,)))
    if native:
        dom_kind, dom_par = domain.native()
        s_args = ((s_spec.kind, s_spec.params, s_spec.post_kind, s_spec.post_params)
                  if S is not None else (-1, _EMPTY, 0, _EMPTY))
        return _kernels.run_recursion(
            x1, u, t_spec.kind, t_spec.params, t_spec.post_kind, t_spec.post_params, *s_args,
            c0, c1, c2, c3, dom_kind, dom_par, float(escape_tol), int(stop_mode),
            float(stop_residual), int(stride))
    return _fallback.run_recursion(x1, u, T.apply, None if S is None else S.apply, c0, c1, c2,
                                   c3, domain, escape_tol, stop_mode, stop_residual, stride)


def browder_solve(z0, u, A, t, tol, max_steps, backend: str | None = None):
    """Fixed point of z -> t u + (1 - t) A z; ``A`` may be averaged."""
    spec = A.native_spec()
    if _use_native(backend, spec):
        return _kernels.browder_solve(z0, u, spec.kind, spec.params, spec.post_kind,
                                      spec.post_params, float(spec.weight), float(t), float(tol),
                                      int(max_steps))
    return _fallback.browder_solve(z0, u, A.apply, t, tol, max_steps)
