import json

import pytest

from fractal_remez import acceptance, cli


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_run_remez_report_schema(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "remez", "set": "cantor:1/3", "depth": 7, "seed": 1,
        "params": {"k": 3, "q": "inf", "r": "inf"},
    })
    out = tmp_path / "out"
    assert cli.main(["run", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    res = report["result"]
    for key in ("bound_bg", "bound_simple", "empirical_ratio", "lam"):
        assert key in res
    assert res["bound_bg"] > 0
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("experiment_id,n,k,s,lambda,q,r,bound_bg")
    assert len(summary) == 2


def test_run_deterministic_bytes(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "remez", "set": "cantor:1/3", "depth": 7, "seed": 9,
        "params": {"k": 2},
    })
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", cfg, "--out", str(out1)]) == 0
    assert cli.main(["run", cfg, "--out", str(out2)]) == 0
    for name in ("report.json", "summary.csv", "bound_bg_vs_lambda.dat"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_run_unknown_set_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "remez", "set": "cantorr:1/3"})
    assert cli.main(["run", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "cantorr:1/3" in capsys.readouterr().err


def test_run_schema_violation_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "frobnicate"})
    assert cli.main(["run", cfg, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "config error" in err


def test_run_covering_experiment(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "covering", "seed": 4,
        "params": {"num_atoms": 20, "H": 0.25, "s": 1.0, "grid_n": 40},
    })
    out = tmp_path / "cov"
    assert cli.main(["run", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["result"]["num_violations"] == 0
    assert (out / "ball_radii.dat").exists()


def test_run_extension_experiment(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "extension", "set": "cube:1", "depth": 7, "seed": 2,
        "params": {"function": "abs", "k": 2, "omega": "power:1",
                   "grid_nodes": 33, "center_budget": 48},
    })
    out = tmp_path / "ext"
    assert cli.main(["run", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["result"]["operator_norm_proxy"] > 0
    assert (out / "field.csv").exists()
    lines = (out / "field.dat").read_text().splitlines()
    assert lines[0].startswith("#")
    x, y = lines[1].split()
    float(x), float(y)


def test_list_commands():
    assert cli.main(["list-sets"]) == 0
    assert cli.main(["list-majorants"]) == 0


def test_unknown_suite_exits_2(capsys):
    assert cli.main(["suite", "bogus"]) == 2


def test_suite_failure_names_criterion(monkeypatch, capsys):
    def broken():
        return acceptance.CriterionResult(99, "intentionally_broken",
                                          {"value": 1.0},
                                          "value <= 0", False)

    def quick():
        return acceptance.CriterionResult(98, "quick_pass", {"value": 0.0},
                                          "always", True)

    monkeypatch.setattr(acceptance, "CRITERIA", [quick, broken])
    assert cli.main(["suite", "acceptance"]) == 1
    out = capsys.readouterr().out
    assert "intentionally_broken" in out
    assert "FAIL" in out and "PASS" in out


def test_suite_all_pass_exit_zero(monkeypatch):
    def quick():
        return acceptance.CriterionResult(97, "quick", {"v": 0.0}, "always",
                                          True)

    monkeypatch.setattr(acceptance, "CRITERIA", [quick])
    assert cli.main(["suite", "acceptance"]) == 0
