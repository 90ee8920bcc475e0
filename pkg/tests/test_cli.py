"""Command-line behavior: artifacts, manifests, exit codes, overrides."""

import math

import numpy as np
import pytest

from mfsde import cli
from mfsde.solver import read_solution_csv

SIM_CFG = """\
[model]
name = linear

[noise]
rate = 2

[grid]
steps = 32

[seed]
root = 3
"""


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_simulate_artifacts_and_manifest_stability(tmp_path):
    cfg = _write(tmp_path, "run.ini", SIM_CFG)
    d1, d2 = tmp_path / "d1", tmp_path / "d2"
    assert cli.main(["simulate", "--config", cfg, "--out", str(d1)]) == 0
    assert cli.main(["simulate", "--config", cfg, "--out", str(d2)]) == 0
    names = ["config.echo.ini", "wiener.csv", "fbm.csv", "jumps.csv",
             "solution.csv", "manifest.txt"]
    for name in names:
        assert (d1 / name).is_file()
        # artifacts carry no output-directory traces, so a rerun into a
        # different directory is byte-identical
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    manifest = (d1 / "manifest.txt").read_text()
    assert manifest.splitlines()[0] == "mfsde run manifest"
    assert "command: simulate" in manifest
    for name in names[:-1]:
        assert f"{name} sha256=" in manifest


def test_simulate_zero_model_writes_constant_solution(tmp_path):
    cfg = _write(tmp_path, "run.ini", "[model]\nname = zero\nx0 = 1.5\n"
                                      "[grid]\nsteps = 16\n")
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    _, values, _ = read_solution_csv(out / "solution.csv")
    assert np.all(values == 1.5)


def test_config_errors_exit_2(tmp_path, capsys):
    bad = _write(tmp_path, "bad.ini", "[frac]\nalpha = 0.6\n")
    assert cli.main(["simulate", "--config", bad,
                     "--out", str(tmp_path / "x")]) == 2
    assert "error:" in capsys.readouterr().err
    assert cli.main(["simulate", "--config", str(tmp_path / "missing.ini"),
                     "--out", str(tmp_path / "x")]) == 2


def test_verify_kernel_passes(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["verify", "kernel", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "kernel: PASS" in stdout and "overall: PASS" in stdout
    summary = (out / "kernel_summary.txt").read_text()
    assert summary.rstrip().endswith("result: PASS")
    assert (out / "kernel_data.csv").is_file()
    assert "command: verify kernel --kappa-scale 1" in (out / "manifest.txt").read_text()


SELFSIM_CFG = """\
[noise]
hurst = 0.75

[grid]
steps = 256

[frac]
alpha = 0.3

[mc]
replicas = 200

[seed]
root = 5
"""


def test_verify_selfsim_and_its_control(tmp_path, capsys):
    cfg = _write(tmp_path, "run.ini", SELFSIM_CFG)
    assert cli.main(["verify", "selfsim", "--config", cfg,
                     "--out", str(tmp_path / "ok")]) == 0
    # the same seeds with a doubled exponent must be rejected, proving the
    # comparison has the power to notice a wrong scaling
    assert cli.main(["verify", "selfsim", "--config", cfg, "--kappa-scale", "2",
                     "--out", str(tmp_path / "ctl")]) == 1
    stdout = capsys.readouterr().out
    assert "selfsim: FAIL" in stdout
    summary = (tmp_path / "ctl" / "selfsim_summary.txt").read_text()
    assert "control" in summary and "result: FAIL" in summary


def test_verify_all_on_zero_model(tmp_path, capsys):
    cfg = _write(tmp_path, "run.ini",
                 "[model]\nname = zero\n[grid]\nsteps = 64\n"
                 "[mc]\nreplicas = 120\n")
    out = tmp_path / "out"
    assert cli.main(["verify", "all", "--config", cfg, "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    for suite in cli.SUITES:
        assert f"{suite}: PASS" in stdout
        assert (out / f"{suite}_summary.txt").is_file()
        assert (out / f"{suite}_data.csv").is_file()
    # below the tail sample-size floor the moments suite says so
    assert "tail: skipped" in (out / "moments_summary.txt").read_text()
    assert not (out / "moments_tail.csv").exists()


def test_verify_jumps_unit_scale(tmp_path):
    cfg = _write(tmp_path, "run.ini",
                 "[model]\nname = additive\n[noise]\nrate = 2\n"
                 "[grid]\nsteps = 32\n[mc]\nreplicas = 2000\n")
    out = tmp_path / "out"
    assert cli.main(["verify", "jumps", "--config", cfg, "--out", str(out)]) == 0
    summary = (out / "jumps_summary.txt").read_text()
    assert f"exact: {math.exp(2.0):.6g}" in summary


def test_convergence_additive_is_exact(tmp_path, capsys):
    cfg = _write(tmp_path, "run.ini",
                 "[model]\nname = additive\n[grid]\nsteps = 64\n"
                 "[mc]\nreplicas = 20\n")
    out = tmp_path / "out"
    assert cli.main(["convergence", "--config", cfg, "--out", str(out)]) == 0
    assert "convergence: PASS" in capsys.readouterr().out
    summary = (out / "convergence_summary.txt").read_text()
    assert "exact for this model" in summary
    assert "command: convergence --refinements 3" in (out / "manifest.txt").read_text()
    # four levels: base grid plus three refinements
    assert len((out / "convergence_data.csv").read_text().strip().splitlines()) == 5


def test_convergence_validation_exits_2(tmp_path, capsys):
    out = str(tmp_path / "out")
    cfg = _write(tmp_path, "run.ini", "[model]\nname = additive\n")
    assert cli.main(["convergence", "--config", cfg, "--refinements", "2",
                     "--out", out]) == 2
    nolemma = _write(tmp_path, "run2.ini", "[model]\nname = linear\n")
    assert cli.main(["convergence", "--config", nolemma, "--out", out]) == 2
    assert "no closed-form oracle" in capsys.readouterr().err


def test_seed_override(tmp_path):
    cfg = _write(tmp_path, "run.ini", SIM_CFG)
    base, other = tmp_path / "base", tmp_path / "other"
    assert cli.main(["simulate", "--config", cfg, "--out", str(base)]) == 0
    assert cli.main(["simulate", "--config", cfg, "--seed", "123",
                     "--out", str(other)]) == 0
    assert (base / "wiener.csv").read_bytes() != (other / "wiener.csv").read_bytes()
    assert "root = 123" in (other / "config.echo.ini").read_text()
    assert cli.main(["simulate", "--config", cfg, "--seed", "-1",
                     "--out", str(tmp_path / "x")]) == 2


def test_config_echo_excludes_output_directory(tmp_path):
    cfg = _write(tmp_path, "run.ini", SIM_CFG + "\n[output]\ndirectory = somewhere\n")
    d1, d2 = tmp_path / "e1", tmp_path / "e2"
    assert cli.main(["simulate", "--config", cfg, "--out", str(d1)]) == 0
    assert cli.main(["simulate", "--config", cfg, "--out", str(d2)]) == 0
    echo = (d1 / "config.echo.ini").read_text()
    assert echo == (d2 / "config.echo.ini").read_text()
    assert "somewhere" not in echo and "[output]" not in echo
