"""Command-line front end: ``halpern run|certify|path --config FILE``.

Exit codes: 0 success, 1 certification failure or runtime error,
2 invalid configuration.
"""
from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import certify as cert
from . import solvers
from .config import ConfigError, ExperimentConfig, load_config
from .operators import averaged
from .trace import fmt

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _load(args) -> ExperimentConfig:
    overrides = {"seed": args.seed} if args.seed is not None else None
    return load_config(args.config, overrides)


def run_experiment(cfg: ExperimentConfig, backend: str | None = None):
    if cfg.scheme == "browder":
        raise ConfigError("scheme", "browder paths are computed by the 'path' subcommand")
    T = cfg.build_operator("T")
    scfg = cfg.solver_config(backend)
    if cfg.scheme == "halpern":
        return solvers.halpern_classic(T, scfg)
    if cfg.scheme == "halpern_theta":
        return solvers.halpern_theta(T, cfg.theta, scfg)
    if cfg.scheme == "segmented":
        return solvers.halpern_segmented(T, cfg.lam, scfg)
    S = cfg.build_operator("S")
    if cfg.scheme == "main":
        return solvers.main_scheme(T, S, scfg, cfg.case)
    return solvers.moudafi_scheme(T, S, scfg)


def cmd_run(args) -> int:
    cfg = _load(args)
    if args.print_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK
    trace = run_experiment(cfg)
    out = args.out or cfg.output or "trace.csv"
    trace.to_csv(out)
    print(trace.summary())
    return EXIT_OK


def certify_rows(cfg: ExperimentConfig, workers: int = 1) -> list[dict]:
    spec = cfg.certify
    if spec is None:
        raise ConfigError("certify", "missing certify section")
    T = cfg.build_operator(spec.operator)
    kw = dict(seed=cfg.seed, extent=spec.extent, workers=workers)
    n = spec.samples
    tol = spec.tolerance
    rows = []

    def add(rep: cert.CertificateReport, note=""):
        if not rep.applicable:
            result = "not applicable"
        else:
            result = "pass" if rep.passed(tol) else "fail"
        rows.append({"inequality_id": rep.inequality_id, "samples": rep.samples_tested,
                     "max_violation": rep.max_violation, "scaled_violation": rep.scaled_violation,
                     "result": result, "estimated_coefficient": rep.estimated_coefficient,
                     "worst_x": rep.worst_pair[0], "worst_y": rep.worst_pair[1], "note": note})

    def skip(name, why):
        rows.append({"inequality_id": name, "samples": 0, "max_violation": None,
                     "scaled_violation": None, "result": f"skipped: {why}",
                     "estimated_coefficient": None, "worst_x": None, "worst_y": None,
                     "note": ""})

    for check in spec.checks:
        if check == "nonexpansive":
            add(cert.certify_nonexpansive(T, n, **kw))
        elif check == "nonspreading":
            d, c, gap = cert.certify_nonspreading(T, n, **kw)
            ok_gap = gap <= tol
            note = f"equivalence_gap={fmt(gap)}"
            add(d, note)
            add(c, note)
            if not ok_gap:
                rows[-1]["result"] = "fail"
        elif check == "quasi_nonexpansive":
            if T.known_fix is None:
                skip("quasi_nonexpansive", "missing fixed set")
            else:
                add(cert.certify_quasi_nonexpansive(T, n, **kw))
        elif check == "inverse_strongly_monotone":
            add(cert.certify_inverse_strongly_monotone(T, n, **kw))
        elif check == "ImS":
            add(cert.certify_ImS_inequality(T, n, **kw))
        elif check == "quasi_firmly":
            for delta in spec.deltas:
                if T.known_fix is None:
                    skip(f"quasi_firmly[delta={delta:g}]", "missing fixed set")
                    continue
                a, b = cert.certify_quasi_firmly(averaged(T, delta), n, **kw)
                add(a)
                add(b)
        elif check == "firmly_coefficient":
            add(cert.estimate_firmly_coefficient(T, n, **kw))
    return rows


def _vec(v):
    return "" if v is None else " ".join(fmt(x) for x in np.ravel(v))


def write_report(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    cols = ["inequality_id", "samples", "max_violation", "scaled_violation", "result",
            "estimated_coefficient", "worst_x", "worst_y", "note"]
    w.writerow(cols)
    for r in rows:
        w.writerow([r["inequality_id"], r["samples"],
                    "" if r["max_violation"] is None else fmt(r["max_violation"]),
                    "" if r["scaled_violation"] is None else fmt(r["scaled_violation"]),
                    r["result"],
                    "" if r["estimated_coefficient"] is None else fmt(r["estimated_coefficient"]),
                    _vec(r["worst_x"]), _vec(r["worst_y"]), r["note"]])


def cmd_certify(args) -> int:
    cfg = _load(args)
    if args.print_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK
    rows = certify_rows(cfg, workers=max(1, args.workers))
    out = args.out or cfg.output or "certify.csv"
    with open(out, "w", newline="") as fh:
        write_report(rows, fh)
    write_report(rows, sys.stdout)
    return EXIT_FAIL if any(r["result"] == "fail" for r in rows) else EXIT_OK


def path_rows(cfg: ExperimentConfig):
    T = cfg.build_operator("T")
    if cfg.anchor is None:
        raise ConfigError("anchor", "missing anchor point")
    u = np.asarray(cfg.anchor)
    path = solvers.browder_path(T, u, cfg.t_values, cfg.inner_tol)
    target = T.known_fix.project(u) if T.known_fix is not None else None
    rows = []
    for t, z in path:
        dist = float(np.linalg.norm(z - target)) if target is not None else None
        rows.append((t, z, dist))
    return rows


def cmd_path(args) -> int:
    cfg = _load(args)
    if args.print_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK
    rows = path_rows(cfg)
    out = args.out or cfg.output or "path.csv"
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"z_{i}" for i in range(cfg.dimension)] + ["dist_to_fix"])
        for t, z, dist in rows:
            w.writerow([fmt(t)] + [fmt(v) for v in z] + ["" if dist is None else fmt(dist)])
    for t, z, dist in rows:
        print(f"t={fmt(t)} norm_z={fmt(np.linalg.norm(z))}"
              + ("" if dist is None else f" dist_to_fix={fmt(dist)}"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="halpern", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("run", cmd_run, "run an iterative scheme and write its trace CSV"),
        ("certify", cmd_certify, "run the sampling certifiers on an operator"),
        ("path", cmd_path, "compute points on the Browder path"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True, help="experiment YAML file")
        sp.add_argument("--out", help="output CSV path (overrides the config)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--print-config", action="store_true",
                        help="print the normalized config and exit")
        if name == "certify":
            sp.add_argument("--workers", type=int, default=1,
                            help="threads to shard certifier samples over")
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
