import csv
import json
from pathlib import Path

import numpy as np
import pytest

from isocloak.cli import (
    RunManifest,
    config_document,
    config_fingerprint,
    main,
    parse_config,
    run,
)
from isocloak.errors import ConfigError
from isocloak.radial import Mode, vacuum_dtn

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"
CLOAK = DATA / "cloak_n4.json"
VACUUM = DATA / "vacuum.json"


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(path):
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


# -- configuration -----------------------------------------------------------------


def test_minimal_config_gets_defaults():
    cfg = parse_config('{"schema_version":1,"rho":0.25,"delta":0.05,"n":32}')
    assert (cfg.omega, cfg.l_max, cfg.tol) == (1.0, 20, 1e-10)
    assert cfg.inner_shell == "computed-pushforward"
    assert cfg.n == 32 and cfg.delta == 0.05


def test_full_config():
    doc = {
        "schema_version": 1, "omega": 1.3, "rho": 0.1, "delta": 0.0, "n": 0,
        "inner_shell_mode": "paper-literal", "l_max": 12, "tol": 1e-9,
        "object": [{"r_outer": 0.2, "eps": [5, 0], "mu": [1, 0]},
                   {"r_outer": 0.5, "eps": [2, 3], "mu": [1, 0]}],
        "weights": "uniform",
    }
    cfg = parse_config(json.dumps(doc))
    assert cfg.object.shells[1].eps == 2 + 3j
    assert cfg.inner_shell == "paper-literal" and cfg.weights == "uniform"
    assert config_document(cfg)["object"][1]["eps"] == [2.0, 3.0]


def test_every_problem_is_reported():
    doc = {"schema_version": 2, "rho": 0.7, "delta": -1, "n": 1.5, "l_max": 99,
           "object": [{"r_outer": 0.6, "eps": [5, 0], "mu": [1, 0]}], "extra": True}
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(doc))
    text = "\n".join(info.value.problems)
    for field in ("schema_version", "rho", "delta", "n=", "l_max", "object[0].r_outer", "extra"):
        assert field in text
    assert "0 < rho < 1/2" in text
    assert len(info.value.problems) == 7


@pytest.mark.parametrize(
    "doc, needle",
    [
        ({"schema_version": 1, "rho": 0.25, "delta": -0.01, "n": 0}, "delta"),
        ({"schema_version": 1, "rho": 0.0, "delta": 0.0, "n": 0}, "rho"),
        ({"schema_version": 1, "rho": 0.25, "delta": 0.0}, "n: required"),
        ({"schema_version": 1, "rho": 0.25, "delta": 0, "n": 0,
          "object": [{"r_outer": 0.3, "eps": 2.0}]}, "end at r = 1/2"),
        ({"schema_version": 1, "rho": 0.25, "delta": 0, "n": 0,
          "object": [{"r_outer": 0.5, "eps": [1, -1]}]}, "Im(eps)"),
        ({"schema_version": 1, "rho": 0.25, "delta": 0, "n": 0,
          "inner_shell_mode": "other"}, "inner_shell_mode"),
    ],
)
def test_rejections(doc, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(doc))
    assert needle in str(info.value)


def test_malformed_json():
    with pytest.raises(ConfigError):
        parse_config("{not json")
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


def test_fingerprint_is_reproducible():
    a = parse_config(CLOAK.read_text())
    b = parse_config(CLOAK.read_text())
    assert config_fingerprint(a) == config_fingerprint(b)
    assert config_fingerprint(a) != config_fingerprint(a.with_(delta=0.1))
    assert len(config_fingerprint(a)) == 64


# -- commands ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "command, config, golden",
    [
        ("params", CLOAK, "params_cloak_n4.csv"),
        ("stack", CLOAK, "stack_cloak_n4.json"),
        ("dtn", VACUUM, "dtn_vacuum.json"),
    ],
)
def test_golden_outputs(tmp_path, command, config, golden):
    out = tmp_path / golden
    for _ in range(2):
        code = main([command, "--config", str(config), "--out", str(out), "--sequential"])
        assert code == 0
        assert out.read_bytes() == (GOLDEN / golden).read_bytes()


def test_vacuum_dtn_file_equals_closed_forms(tmp_path):
    out = tmp_path / "dtn.json"
    assert main(["dtn", "--config", str(VACUUM), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1
    assert doc["config_fingerprint"] == config_fingerprint(parse_config(VACUUM.read_text()))
    modes = doc["spectrum"]["modes"]
    assert len(modes) == 40
    for m in modes:
        z = complex(m["zeta_re"], m["zeta_im"])
        assert z == pytest.approx(vacuum_dtn(Mode(m["pol"], m["l"])), rel=1e-9)


def test_params_grid(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["params", "--config", str(CLOAK), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# schema_version=1\n# config_fingerprint=")
    rows = read_csv(out)
    r = np.array([float(x["r"]) for x in rows])
    assert len(rows) == 600 + 3  # three boundaries sampled from both sides
    assert r.min() > 0 and r.max() == 3.0 and np.all(np.diff(r) >= 0)
    sides = {(float(x["r"]), x["side"]): x for x in rows if x["side"]}
    assert set(sides) == {(b, s) for b in (0.5, 1.0, 2.0) for s in "-+"}
    # the deliberate jumps show up at r = 1 (radial) and r = 2 (tangential)
    assert float(sides[(1.0, "-")]["gamma_radial"]) == pytest.approx(0.25)
    assert float(sides[(1.0, "+")]["gamma_radial"]) == pytest.approx(1 / 28)
    assert float(sides[(2.0, "-")]["gamma_tangential"]) == pytest.approx(1.75)
    assert float(sides[(2.0, "+")]["gamma_tangential"]) == 1.0


def test_stack_command(tmp_path):
    out = tmp_path / "s.json"
    assert main(["stack", "--config", str(CLOAK), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    shells = doc["stack"]["shells"]
    laminate = [s for s in shells if s["r_inner"] >= 1.0 and s["r_outer"] <= 2.0]
    assert len(laminate) == 8
    assert any(s["r_inner"] == 0.5 and s["r_outer"] == 1.0 for s in shells)
    assert shells[0]["r_inner"] == 0.0
    assert "config_fingerprint" in doc


def test_stack_needs_layers(tmp_path):
    cfg = write_config(tmp_path, {"schema_version": 1, "rho": 0.25, "delta": 0.0, "n": 0})
    assert main(["stack", "--config", cfg]) == 1


def test_cell_verify(capsys):
    assert main(["cell-verify"]) == 0
    out = capsys.readouterr().out
    rows = [l.split() for l in out.splitlines() if l and not l.startswith("#")][1:]
    assert [int(r[0]) for r in rows] == [128, 256, 512, 1024, 2048, 4096]
    assert all(float(r[2]) >= 1.9 for r in rows[1:])
    assert "config_fingerprint=" in out


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", str(CLOAK), "--vary", "n", "--values", "32,8,16",
                 "--out", str(out), "--sequential"])
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["param", "value", "distance_sup", "distance_l2", "worst_pol",
                             "worst_l", "runtime_s"]
    assert [int(r["value"]) for r in rows] == [8, 16, 32]
    d = [float(r["distance_sup"]) for r in rows]
    assert d[0] > d[1] > d[2]


def test_sweep_json(tmp_path):
    out = tmp_path / "sweep.json"
    code = main(["sweep", "--config", str(CLOAK), "--vary", "delta", "--values",
                 "0.1,0.05,0.025", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1 and len(doc["rows"]) == 3
    assert [r["value"] for r in doc["rows"]] == [0.025, 0.05, 0.1]


def test_sweep_rho_against_vacuum(tmp_path):
    cfg = write_config(tmp_path, {"schema_version": 1, "rho": 0.2, "delta": 0.0, "n": 0})
    out = tmp_path / "rho.csv"
    assert main(["sweep", "--config", cfg, "--vary", "rho", "--values", "0.2,0.1,0.05",
                 "--out", str(out), "--sequential"]) == 0
    d = [float(r["distance_sup"]) for r in read_csv(out)]
    assert d[0] < d[1] < d[2]  # rows sorted by rho ascending


def test_sweep_trend_violation_exit_code(tmp_path, capsys):
    # at omega = 2 the coarsest stacks sit near a resonance: d(n=2) > d(n=1)
    cfg = write_config(tmp_path, {"schema_version": 1, "rho": 0.25, "delta": 0.05, "n": 1,
                                  "omega": 2.0})
    out = tmp_path / "s.csv"
    code = main(["sweep", "--config", cfg, "--vary", "n", "--values", "1,2,3",
                 "--out", str(out), "--sequential"])
    assert code == 2
    assert "trend violation at n=2" in capsys.readouterr().err
    assert len(read_csv(out)) == 3


def test_sweep_solver_error_exit_code(tmp_path):
    cfg = write_config(tmp_path, {"schema_version": 1, "rho": 0.25, "delta": 0.05, "n": 4,
                                  "omega": 4.493409457909064 / 3})
    assert main(["sweep", "--config", cfg, "--vary", "n", "--values", "4,8",
                 "--sequential"]) == 3


def test_inner_shell_override(tmp_path, capsys):
    assert main(["dtn", "--config", str(CLOAK), "--inner-shell", "reciprocal"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["inner_shell_mode"] == "paper-literal"


def test_usage_errors(tmp_path):
    assert main(["dtn"]) == 1
    assert main(["sweep", "--config", str(CLOAK)]) == 1
    assert main(["dtn", "--config", str(tmp_path / "missing.json")]) == 1
    assert main(["dtn", "--config", str(CLOAK), "--out", "/nonexistent/dir/x.json"]) == 1
    assert main(["bogus"]) == 1


def test_run_with_manifest(tmp_path):
    out = tmp_path / "d.json"
    m = RunManifest(config_path=str(VACUUM), output_path=str(out), sequential=True)
    assert run("dtn", m) == 0
    assert json.loads(out.read_text())["spectrum"]["omega"] == 1.0
