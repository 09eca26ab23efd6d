import json

import numpy as np
import pytest

from minkflow.cli import main


def run(argv):
    return main(argv)


class TestSelfsimCommand:
    def test_expansion_branch(self, tmp_path):
        out = tmp_path / "run"
        code = run(["selfsim", "--a", "0", "--b", "1", "--init", "0,-0.5",
                    "--s-max", "8", "--out", str(out)])
        assert code == 0
        for name in ("trajectory.csv", "curve.csv", "classification.json",
                     "events.json"):
            assert (out / name).exists()
        rep = json.loads((out / "classification.json").read_text())
        assert rep["crosses_xi"] and rep["crosses_eta"]
        assert rep["ends"]["forward"]["curvature_limit"] == "zero"
        assert rep["ends"]["backward"]["curvature_limit"] == "zero"
        header = (out / "trajectory.csv").read_text().splitlines()[0]
        assert header == "s,tau,nu,theta,k,l"
        events = json.loads((out / "events.json").read_text())
        assert set(events) == {"blowups", "crossings", "inflections"}

    def test_determinism(self, tmp_path):
        args = ["selfsim", "--a", "0", "--b", "-1", "--init", "0,1",
                "--s-max", "10"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        for name in ("trajectory.csv", "curve.csv", "classification.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestEvolveCommand:
    def test_catalog_initial(self, tmp_path):
        out = tmp_path / "ev"
        code = run(["evolve", "hyperbola-expander", "--t0", "0.5",
                    "--t1", "0.7", "--dx", "0.02", "--window", "-2", "2",
                    "--snapshots", "3", "--out", str(out)])
        assert code == 0
        snaps = sorted(out.glob("snapshot_*.csv"))
        assert len(snaps) == 3
        first = snaps[0].read_text().splitlines()
        assert first[0].startswith("# t=")
        assert first[1] == "node,value"
        svg = (out / "evolve.svg").read_text()
        assert svg.count("<polyline") == 3
        assert "config-hash=" in svg

    def test_expression_initial(self, tmp_path):
        out = tmp_path / "ev"
        code = run(["evolve", "expr:0.3*x", "--t1", "0.01", "--dx", "0.05",
                    "--window", "-1", "1", "--snapshots", "2",
                    "--out", str(out)])
        assert code == 0
        data = np.genfromtxt(out / "snapshot_001.csv", delimiter=",",
                             skip_header=2)
        assert np.max(np.abs(data[:, 1] - 0.3 * data[:, 0])) < 1e-10

    def test_expression_outside_basis(self, tmp_path):
        code = run(["evolve", "expr:zeta(x)", "--t1", "0.1",
                    "--out", str(tmp_path)])
        assert code == 2

    def test_stability_violation_exit(self, tmp_path):
        code = run(["evolve", "hyperbola-expander", "--t0", "0.5",
                    "--t1", "0.6", "--dx", "0.02", "--dt", "0.01",
                    "--out", str(tmp_path)])
        assert code == 3

    def test_svg_determinism(self, tmp_path):
        args = ["evolve", "translator-y", "--t1", "0.05", "--dx", "0.05",
                "--window", "-1", "1", "--snapshots", "2"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert (a / "evolve.svg").read_bytes() == (b / "evolve.svg").read_bytes()


class TestCatalogCommand:
    def test_list(self, capsys):
        assert run(["catalog", "list"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 16

    def test_show(self, capsys):
        assert run(["catalog", "show", "translator-y"]) == 0
        info = json.loads(capsys.readouterr().out)
        assert info["kind"] == "graph_y"
        assert info["curvature_profile"] == "cosh(theta)"

    def test_unknown_name_exit_code(self, capsys):
        assert run(["catalog", "show", "nope"]) == 4

    def test_lengths(self, tmp_path, capsys):
        out = tmp_path / "len"
        code = run(["catalog", "lengths", "translator-y", "--points", "5",
                    "--out", str(out)])
        assert code == 0
        capsys.readouterr()
        rows = (out / "lengths.csv").read_text().splitlines()
        assert rows[0] == "series,name,t,length"
        assert len(rows) == 6
        lengths = [float(r.split(",")[-1]) for r in rows[1:]]
        assert np.max(np.abs(np.array(lengths) - np.pi)) < 1e-6


class TestVerifyCommand:
    def test_subset(self, tmp_path, capsys):
        out = tmp_path / "v"
        code = run(["verify", "--names",
                    "translator-y,euclid-reaper,interp-tan",
                    "--out", str(out)])
        assert code == 0
        payload = json.loads((out / "verify.json").read_text())
        assert [p["name"] for p in payload] == [
            "translator-y", "euclid-reaper", "interp-tan"]
        assert all(p["passed"] for p in payload)

    def test_jobs_flag(self, tmp_path, capsys):
        code = run(["verify", "--names", "translator-y,translator-x",
                    "--jobs", "2", "--out", str(tmp_path / "v")])
        assert code == 0


class TestInvariantCommand:
    def test_make_and_check(self, tmp_path, capsys):
        out = tmp_path / "inv"
        assert run(["invariant", "make", "--kind", "hyperbola",
                    "--params", '{"radius": 1.0}', "--span", "-4", "4",
                    "--out", str(out)]) == 0
        assert (out / "invariant-hyperbola.csv").exists()
        capsys.readouterr()
        assert run(["invariant", "check", "--kind", "hyperbola",
                    "--params", '{"radius": 1.0}', "--span", "-4", "4",
                    "--out", str(out)]) == 0
        payload = json.loads((out / "invariance.json").read_text())
        assert payload["passed"] and payload["deviation"] < 1e-8


def test_plot_command(tmp_path, capsys):
    out = tmp_path / "run"
    assert run(["selfsim", "--a", "0", "--b", "1", "--init", "0,-1",
                "--s-max", "2", "--out", str(out)]) == 0
    target = tmp_path / "curve.svg"
    assert run(["plot", str(out / "curve.csv"),
                "--out-file", str(target)]) == 0
    text = target.read_text()
    assert text.startswith("<?xml")
    assert text.count("<polyline") == 1


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"a": 0.0, "b": 1.0, "init": "0,-1",
                               "s_max": 2.0, "out": str(tmp_path / "o")}))
    assert run(["--config", str(cfg), "classify",
                "--a", "9", "--b", "9"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["ends"]["forward"]["curvature_limit"] == "finite"


def test_verify_all_cli(tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "--all", "--out", str(out)]) == 0
    payload = json.loads((out / "verify.json").read_text())
    assert len(payload) == 16 and all(p["passed"] for p in payload)


def test_evolve_wave_over_period(tmp_path):
    out = tmp_path / "wave"
    code = main(["evolve", "wave-sinsin", "--t0", "0.3", "--t1", "0.5",
                 "--dx", "0.02", "--window", "-3.14159", "3.14159",
                 "--snapshots", "3", "--out", str(out)])
    assert code == 0
    svg = (out / "evolve.svg").read_text()
    assert svg.count("<polyline") == 3


def test_lengths_all_series(tmp_path, capsys):
    out = tmp_path / "lens"
    assert main(["catalog", "lengths", "--all", "--points", "4",
                 "--out", str(out)]) == 0
    rows = (out / "lengths.csv").read_text().splitlines()
    series = {r.split(",")[0] for r in rows[1:]}
    assert series == set("ABCDEF")
