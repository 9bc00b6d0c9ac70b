import csv
import io
import math
from pathlib import Path

import numpy as np
import pytest
import yaml

from halpern.cli import main
from halpern.config import ConfigError, parse_config
from halpern.trace import read_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

MAIN = """\
scheme: main
case: iii
dimension: 2
T: {kind: projection, set: {kind: box, lower: [0, 0], upper: [1, 1]}}
S: {kind: projection, set: {kind: box, lower: [0.5, 0.5], upper: [1.5, 1.5]}}
anchor: [2, 2]
start: [-1, -1]
alpha: {family: harmonic, c: 1, a: 1}
beta: {family: constant, v: 0.5}
max_iters: 500
"""


def _write(tmp_path, text, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def _report(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.yaml")))
def test_print_config_round_trip(name, capsys):
    assert main(["run", "--config", str(CONFIGS / name), "--print-config"]) == 0
    echoed = capsys.readouterr().out
    original = parse_config((CONFIGS / name).read_text())
    assert parse_config(echoed) == original


def test_run_writes_identical_csv(tmp_path, capsys):
    cfg = _write(tmp_path, MAIN)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(b), "--seed", "0"]) == 0
    assert a.read_bytes() == b.read_bytes()
    out = capsys.readouterr().out
    assert "status=max_iters_reached" in out and "dist_to_target=" in out


def test_identity_config_distance(tmp_path):
    out = tmp_path / "id.csv"
    assert main(["run", "--config", str(CONFIGS / "halpern_identity.yaml"),
                 "--out", str(out)]) == 0
    cols = read_csv(out)
    n = cols["n"][-1]
    assert n == 1000
    want = math.sqrt(1 + 4 + 9 + 16) / n
    assert abs(cols["dist_to_target"][-1] - want) <= 1e-12 * want


def test_case_rejection_exit_code(tmp_path, capsys):
    bad = MAIN.replace("{family: harmonic, c: 1, a: 1}", "{family: inverse_power, p: 2}")
    cfg = _write(tmp_path, bad)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    err = capsys.readouterr().err
    assert "alpha lacks sum_diverges" in err and "line 8" in err
    ok = _write(tmp_path, bad + "override: true\n", "ok.yaml")
    assert main(["run", "--config", str(ok), "--out", str(tmp_path / "y.csv")]) == 0


@pytest.mark.parametrize("edit, field", [
    (lambda t: t + "bogus: 1\n", "bogus"),
    (lambda t: t.replace("case: iii", "case: iv"), "case"),
    (lambda t: t.replace("anchor: [2, 2]", "anchor: [2, 2, 2]"), "anchor"),
    (lambda t: t.replace("c: 1, a: 1", "c: 1, a: 1, q: 3"), "alpha"),
    (lambda t: t.replace("kind: box, lower: [0, 0]", "kind: cube, lower: [0, 0]"), "T"),
    (lambda t: t.replace("max_iters: 500", "max_iters: 0"), "max_iters"),
    (lambda t: t.replace("scheme: main", "scheme: gradient"), "scheme"),
])
def test_config_errors_name_the_field(edit, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(edit(MAIN))
    assert exc.value.field_path == field
    assert exc.value.line is not None


def test_yaml_syntax_error(tmp_path, capsys):
    cfg = _write(tmp_path, "scheme: [main\n")
    assert main(["run", "--config", str(cfg)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2


def test_certify_projection_all_pass(tmp_path, capsys):
    out = tmp_path / "rep.csv"
    assert main(["certify", "--config", str(CONFIGS / "certify_projection.yaml"),
                 "--out", str(out), "--workers", "3"]) == 0
    rows = _report(out)
    assert {r["result"] for r in rows} == {"pass"}
    assert len(rows) == 1 + 2 + 1 + 1 + 1 + 6 + 1
    # sharding does not change the report
    single = tmp_path / "rep1.csv"
    main(["certify", "--config", str(CONFIGS / "certify_projection.yaml"), "--out", str(single)])
    assert single.read_bytes() == out.read_bytes()


def test_certify_expansive_fails(tmp_path, capsys):
    out = tmp_path / "rep.csv"
    assert main(["certify", "--config", str(CONFIGS / "certify_expansive.yaml"),
                 "--out", str(out)]) == 1
    (row,) = _report(out)
    assert row["result"] == "fail" and float(row["max_violation"]) > 0.1
    x = np.array(row["worst_x"].split(), dtype=float)
    y = np.array(row["worst_y"].split(), dtype=float)
    assert np.linalg.norm(2 * x - 2 * y) > np.linalg.norm(x - y)


def test_certify_identity_and_missing_fix(tmp_path, capsys):
    text = yaml.safe_dump({
        "dimension": 2, "domain": {"kind": "box", "lower": [-1, -1], "upper": [1, 1]},
        "T": {"kind": "identity"},
        "certify": {"checks": ["firmly_coefficient"], "samples": 500}})
    out = tmp_path / "id.csv"
    assert main(["certify", "--config", str(_write(tmp_path, text)), "--out", str(out)]) == 0
    assert _report(out)[0]["result"] == "not applicable"
    text = yaml.safe_dump({
        "dimension": 2, "domain": {"kind": "ball", "center": [0, 0], "radius": 1},
        "T": {"kind": "affine", "matrix": [[0.5, 0], [0, 0.5]], "shift": [0, 0]},
        "certify": {"checks": ["quasi_nonexpansive", "quasi_firmly", "nonexpansive"],
                    "samples": 500}})
    assert main(["certify", "--config", str(_write(tmp_path, text, "m.yaml")),
                 "--out", str(out)]) == 0
    results = [r["result"] for r in _report(out)]
    assert results[0] == "skipped: missing fixed set"
    assert results[1:4] == ["skipped: missing fixed set"] * 3
    assert results[-1] == "pass"


def test_path_rotation(tmp_path, capsys):
    out = tmp_path / "path.csv"
    assert main(["path", "--config", str(CONFIGS / "path_rotation.yaml"),
                 "--out", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["t", "z_0", "z_1", "dist_to_fix"]
    for r in rows[1:]:
        t = float(r[0])
        norm = math.hypot(float(r[1]), float(r[2]))
        assert abs(norm - t / math.sqrt(1 + (1 - t) ** 2)) <= 1e-9
        assert float(r[3]) == pytest.approx(norm, abs=1e-15)


@pytest.mark.parametrize("kind", ["identity", "projection"])
def test_path_fixed_anchor(tmp_path, kind, capsys):
    T = {"kind": kind} if kind == "identity" else {
        "kind": "projection", "set": {"kind": "box", "lower": [0, 0], "upper": [1, 1]}}
    text = yaml.safe_dump({"scheme": "browder", "dimension": 2, "T": T, "anchor": [0.25, 0.5]})
    out = tmp_path / "p.csv"
    assert main(["path", "--config", str(_write(tmp_path, text)), "--out", str(out)]) == 0
    for r in list(csv.reader(io.StringIO(out.read_text())))[1:]:
        assert abs(float(r[1]) - 0.25) <= 1e-15 and abs(float(r[2]) - 0.5) <= 1e-15


@pytest.mark.parametrize("t", ["[0.1, 0.00001]", "[1.0]", "[0.1, 0.2]"])
def test_path_bad_t(tmp_path, t, capsys):
    text = f"scheme: browder\ndimension: 1\nT: {{kind: identity}}\nanchor: [0]\nt_values: {t}\n"
    assert main(["path", "--config", str(_write(tmp_path, text)), "--out",
                 str(tmp_path / "p.csv")]) == 2
