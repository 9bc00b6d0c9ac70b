"""Experiment configuration files (YAML).

One file describes one experiment. Unknown keys are rejected, and errors
name the offending field together with its line in the file.

Example::

    scheme: main
    case: iii
    dimension: 2
    domain: {kind: whole}
    T: {kind: projection, set: {kind: box, lower: [0, 0], upper: [1, 1]}}
    S: {kind: projection, set: {kind: box, lower: [0.5, 0.5], upper: [1.5, 1.5]}}
    anchor: [2, 2]
    start: [-1, -1]
    alpha: {family: harmonic, c: 1, a: 1}
    beta: {family: constant, v: 0.5}
    delta: 0.5
    max_iters: 20000
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field

import yaml

from . import operators, schedules, sets
from .solvers import CASES, MIN_T, SolverConfig

SCHEMES = ("browder", "halpern", "halpern_theta", "segmented", "main", "moudafi")
CHECKS = ("nonexpansive", "nonspreading", "quasi_nonexpansive", "inverse_strongly_monotone",
          "ImS", "quasi_firmly", "firmly_coefficient")

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class ConfigError(ValueError):
    def __init__(self, field_path: str, message: str, line: int | None = None):
        self.field_path = field_path
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}field '{field_path}': {message}")


@dataclass(frozen=True)
class CertifySpec:
    operator: str = "T"
    checks: tuple[str, ...] = CHECKS
    samples: int = 10000
    deltas: tuple[float, ...] = (0.1, 0.5, 0.9)
    tolerance: float = 1e-10
    extent: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str | None
    dimension: int
    T: dict
    domain: dict = field(default_factory=lambda: {"kind": "whole"})
    S: dict | None = None
    case: str | None = None
    anchor: tuple[float, ...] | None = None
    start: tuple[float, ...] | None = None
    alpha: dict | None = None
    beta: dict | None = None
    delta: float = 0.5
    delta_S: float | None = None
    lam: float | None = None
    theta: float | None = None
    max_iters: int = 1000
    stop_residual: float = 0.0
    trace_stride: int = 1
    seed: int = 0
    override: bool = False
    output: str | None = None
    t_values: tuple[float, ...] = (0.1, 0.01, 0.001)
    inner_tol: float = 1e-10
    certify: CertifySpec | None = None

    # ---- building library objects -------------------------------------------------
    def build_domain(self) -> sets.ConvexSet:
        return sets.set_from_spec(dict(self.domain), self.dimension)

    def build_operator(self, which: str):
        spec = self.T if which == "T" else self.S
        if spec is None:
            raise ConfigError(which, "operator not configured")
        return operators.operator_from_spec(_thaw(spec), self.build_domain())

    def solver_config(self, backend: str | None = None) -> SolverConfig:
        alpha = schedules.schedule_from_spec(_thaw(self.alpha)) if self.alpha else None
        if alpha is None:
            if self.scheme == "halpern_theta":
                alpha = schedules.Power(self.theta)
            else:
                raise ConfigError("alpha", "missing schedule")
        beta = schedules.schedule_from_spec(_thaw(self.beta)) if self.beta else None
        return SolverConfig(anchor=self.anchor, start=self.start, alpha=alpha, beta=beta,
                            delta=self.delta, delta_S=self.delta_S, max_iters=self.max_iters,
                            stop_residual=self.stop_residual, trace_stride=self.trace_stride,
                            allow_unverified=self.override, backend=backend)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            key = "lambda" if f.name == "lam" else f.name
            if isinstance(v, CertifySpec):
                v = {k: (list(x) if isinstance(x, tuple) else x)
                     for k, x in dataclasses.asdict(v).items()}
            out[key] = _thaw(v)
        return out

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)


def _thaw(v):
    """Frozen nested tuples back to plain lists/dicts."""
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    if isinstance(v, dict):
        return {k: _thaw(x) for k, x in v.items()}
    return v


def _freeze(v):
    """Lists to tuples, numeric strings to floats; keeps dataclass equality meaningful."""
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, dict):
        return {k: _freeze(x) for k, x in v.items()}
    if isinstance(v, str) and _NUMBER.match(v):
        return float(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return float(v)
    return v


# ---- parsing ---------------------------------------------------------------------

def _line_index(node, prefix="", out=None) -> dict[str, int]:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}.{k.value}" if prefix else str(k.value)
            out[path] = k.start_mark.line + 1
            _line_index(v, path, out)
    return out


class _Reader:
    def __init__(self, data: dict, lines: dict[str, int]):
        self.data = data
        self.lines = lines
        self.used: set[str] = set()

    def fail(self, key, msg):
        raise ConfigError(key, msg, self._line(key))

    def _line(self, key):
        while key:
            if key in self.lines:
                return self.lines[key]
            key = key.rpartition(".")[0]
        return None

    def get(self, key, default=None, required=False):
        self.used.add(key)
        if key not in self.data or self.data[key] is None:
            if required:
                self.fail(key, "required field is missing")
            return default
        return self.data[key]

    def number(self, key, default=None, required=False, integer=False):
        v = self.get(key, default, required)
        if v is None:
            return None
        if isinstance(v, bool):
            self.fail(key, "expected a number")
        try:
            f = float(v)
        except (TypeError, ValueError):
            self.fail(key, f"expected a number, got {v!r}")
        if integer:
            if f != int(f):
                self.fail(key, f"expected an integer, got {v!r}")
            return int(f)
        return f

    def vector(self, key, dim, required=False):
        v = self.get(key, None, required)
        if v is None:
            return None
        if not isinstance(v, list) or len(v) != dim:
            self.fail(key, f"expected a list of {dim} numbers")
        try:
            return tuple(float(x) for x in v)
        except (TypeError, ValueError):
            self.fail(key, "expected numeric entries")

    def table(self, key, required=False):
        v = self.get(key, None, required)
        if v is None:
            return None
        if not isinstance(v, dict):
            self.fail(key, "expected a mapping")
        return _freeze(v)


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError("<file>", f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                          mark.line + 1 if mark is not None else None) from None
    if not isinstance(data, dict):
        raise ConfigError("<file>", "top level must be a mapping")
    data.update(overrides or {})
    r = _Reader(data, _line_index(node) if node is not None else {})

    scheme = r.get("scheme", required=data.get("certify") is None)
    if scheme is not None and scheme not in SCHEMES:
        r.fail("scheme", f"must be one of {SCHEMES}")
    d = r.number("dimension", required=True, integer=True)
    if d < 1:
        r.fail("dimension", "must be >= 1")
    case = r.get("case")
    if case is not None:
        case = str(case)
        if case not in CASES:
            r.fail("case", f"must be one of {CASES}")
    if scheme == "main" and case is None:
        r.fail("case", "scheme 'main' needs a case (i, ii or iii)")

    certify = None
    craw = r.get("certify")
    if craw is not None:
        certify = _parse_certify(r, craw)

    t_values = r.get("t_values")
    if t_values is not None:
        try:
            t_values = tuple(float(t) for t in t_values)
        except (TypeError, ValueError):
            r.fail("t_values", "expected a list of numbers")
        for t in t_values:
            if not MIN_T < t < 1:
                r.fail("t_values", f"each t must lie in ({MIN_T:g}, 1), got {t}")
        if not t_values or any(b >= a for a, b in zip(t_values, t_values[1:])):
            r.fail("t_values", "expected a non-empty, strictly decreasing list")

    cfg = ExperimentConfig(
        scheme=scheme,
        dimension=d,
        T=r.table("T", required=True),
        domain=r.table("domain") or {"kind": "whole"},
        S=r.table("S"),
        case=case,
        anchor=r.vector("anchor", d),
        start=r.vector("start", d),
        alpha=r.table("alpha"),
        beta=r.table("beta"),
        delta=r.number("delta", 0.5),
        delta_S=r.number("delta_S"),
        lam=r.number("lambda"),
        theta=r.number("theta"),
        max_iters=r.number("max_iters", 1000, integer=True),
        stop_residual=r.number("stop_residual", 0.0),
        trace_stride=r.number("trace_stride", 1, integer=True),
        seed=r.number("seed", 0, integer=True),
        override=bool(r.get("override", False)),
        output=r.get("output"),
        t_values=t_values if t_values is not None else (0.1, 0.01, 0.001),
        inner_tol=r.number("inner_tol", 1e-10),
        certify=certify,
    )
    unknown = sorted(set(data) - r.used)
    if unknown:
        r.fail(unknown[0], "unknown key")
    _validate(cfg, r)
    return cfg


def _parse_certify(r: _Reader, raw) -> CertifySpec:
    if not isinstance(raw, dict):
        r.fail("certify", "expected a mapping")
    allowed = {f.name for f in dataclasses.fields(CertifySpec)}
    for k in raw:
        if k not in allowed:
            r.fail(f"certify.{k}", "unknown key")
    checks = raw.get("checks", "all")
    if checks == "all" or checks is None:
        checks = CHECKS
    if isinstance(checks, str):
        checks = [checks]
    for c in checks:
        if c not in CHECKS:
            r.fail("certify.checks", f"unknown certifier {c!r}; choose from {CHECKS}")
    op = raw.get("operator", "T")
    if op not in ("T", "S"):
        r.fail("certify.operator", "must be T or S")
    try:
        spec = CertifySpec(
            operator=op,
            checks=tuple(checks),
            samples=int(float(raw.get("samples", 10000))),
            deltas=tuple(float(x) for x in raw.get("deltas", (0.1, 0.5, 0.9))),
            tolerance=float(raw.get("tolerance", 1e-10)),
            extent=None if raw.get("extent") is None else float(raw["extent"]),
        )
    except (TypeError, ValueError) as exc:
        r.fail("certify", str(exc))
    if spec.samples < 1:
        r.fail("certify.samples", "must be >= 1")
    return spec


def _validate(cfg: ExperimentConfig, r: _Reader) -> None:
    """Build every described object once so bad parameters surface at load time."""
    try:
        cfg.build_domain()
    except (ValueError, KeyError, TypeError) as exc:
        r.fail("domain", str(exc))
    for which in ("T", "S"):
        if getattr(cfg, which) is None:
            continue
        try:
            cfg.build_operator(which)
        except (ValueError, KeyError, TypeError) as exc:
            r.fail(which, str(exc))
    for which in ("alpha", "beta"):
        spec = getattr(cfg, which)
        if spec is not None:
            try:
                schedules.schedule_from_spec(_thaw(spec))
            except (ValueError, KeyError, TypeError) as exc:
                r.fail(which, str(exc))
    if cfg.scheme in ("main", "moudafi") and cfg.S is None:
        r.fail("S", f"scheme '{cfg.scheme}' needs a second operator")
    if cfg.scheme in ("main", "moudafi") and cfg.beta is None:
        r.fail("beta", f"scheme '{cfg.scheme}' needs a beta schedule")
    if cfg.scheme == "halpern_theta":
        if cfg.theta is None or not 0 < cfg.theta < 1:
            r.fail("theta", "halpern_theta needs theta in the open interval (0, 1)")
    if cfg.scheme == "segmented" and (cfg.lam is None or not 0 < cfg.lam < 1):
        r.fail("lambda", "segmented scheme needs lambda in (0, 1)")
    if cfg.scheme in ("halpern", "segmented", "main") and cfg.alpha is None:
        r.fail("alpha", f"scheme '{cfg.scheme}' needs an alpha schedule")
    if cfg.scheme == "moudafi" and cfg.alpha is None:
        r.fail("alpha", "scheme 'moudafi' needs an alpha schedule")
    if cfg.scheme not in (None, "moudafi") and cfg.anchor is None:
        r.fail("anchor", "missing anchor point")
    if cfg.scheme not in (None, "browder") and cfg.start is None:
        r.fail("start", "missing start point")
    for key in ("delta", "delta_S"):
        v = getattr(cfg, key)
        if v is not None and not 0 < v < 1:
            r.fail(key, "must lie in (0, 1)")
    if cfg.max_iters < 1:
        r.fail("max_iters", "must be >= 1")
    if cfg.trace_stride < 1:
        r.fail("trace_stride", "must be >= 1")
    if cfg.stop_residual < 0:
        r.fail("stop_residual", "must be >= 0")
    if cfg.inner_tol <= 0:
        r.fail("inner_tol", "must be positive")
    if cfg.scheme == "main" and cfg.alpha is not None and cfg.beta is not None:
        reason = schedules.check_case(schedules.schedule_from_spec(_thaw(cfg.alpha)),
                                      schedules.schedule_from_spec(_thaw(cfg.beta)), cfg.case)
        if reason is not None and not cfg.override:
            r.fail("alpha" if reason.startswith("alpha") else "beta",
                   f"rejected: {reason} (set override: true to run anyway)")


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read(), overrides)
