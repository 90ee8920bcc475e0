"""Command-line front end: simulate, verify <suite>, convergence.

Every run writes its artifacts plus a manifest into one directory.  The
manifest records the effective command and a sha256 per artifact, and the
config echo (output location excluded) pins every other input, so
rerunning the recorded command against the echo reproduces each file bit
for bit.  Exit codes: 0 success / all suites PASS, 1 run or suite
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import (
    estimate_moments,
    simulate_ensemble,
    tail_diagnostic,
    verify_jump_product_moment,
    verify_kernel_estimates,
    verify_pathwise_lemma,
    verify_self_similarity,
)
from .config import RunConfig, load_config, parse_config, serialize_config
from .errors import BlowUpError, ParameterError
from .noise import CSV_FLOAT_FMT, REPLICA_STREAM_BASE, GridSpec, SamplePath, gen_driving_triple
from .solver import euler_paths, solve_with_jumps

SUITES = ("kernel", "lemma", "selfsim", "moments", "jumps")
KERNEL_LAMBDAS = (1.0, 10.0, 100.0, 1000.0)
SELFSIM_INTERVALS = ((0.0, 0.25), (0.5, 1.0))
TAIL_MIN_REPLICAS = 1000
MONOTONE_FRACTION = 0.9


# ---------------------------------------------------------------------------
# output plumbing


def _write_text(out: Path, name: str, text: str, artifacts: list) -> None:
    (out / name).write_text(text, encoding="utf-8")
    artifacts.append(name)


def _write_csv(out: Path, name: str, header: str, rows, artifacts: list) -> None:
    _write_text(out, name, header + "\n" + "\n".join(rows) + "\n", artifacts)


def _write_manifest(out: Path, command: str, artifacts: list) -> None:
    lines = ["mfsde run manifest", f"command: {command}", "artifacts:"]
    for name in sorted(artifacts):
        digest = hashlib.sha256((out / name).read_bytes()).hexdigest()
        lines.append(f"{name} sha256={digest}")
    (out / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _echo_config(cfg: RunConfig, out: Path, artifacts: list) -> None:
    _write_text(out, "config.echo.ini", serialize_config(cfg, include_output=False),
                artifacts)


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    coeffs = cfg.build_coeffs()
    artifacts: list = []
    _echo_config(cfg, out, artifacts)
    wiener, fbm, train = gen_driving_triple(cfg.grid, cfg.hurst, cfg.rate,
                                            cfg.marks, cfg.seed())
    wiener.to_csv(str(out / "wiener.csv"))
    fbm.to_csv(str(out / "fbm.csv"))
    train.to_csv(str(out / "jumps.csv"))
    artifacts += ["wiener.csv", "fbm.csv", "jumps.csv"]
    status = 0
    try:
        sol = solve_with_jumps(coeffs, cfg.x0, wiener, fbm, train)
    except BlowUpError as err:
        print(f"simulate: solve failed: {err}", file=sys.stderr)
        status = 1
    else:
        sol.to_csv(str(out / "solution.csv"))
        artifacts.append("solution.csv")
        print(f"simulate: wrote solution with {sol.train.count} jumps to {out}")
    _write_manifest(out, "simulate", artifacts)
    return status


# ---------------------------------------------------------------------------
# verify


def _run_kernel(cfg: RunConfig):
    return verify_kernel_estimates(cfg.frac.alpha, KERNEL_LAMBDAS,
                                   thresholds=cfg.thresholds)


def _run_lemma(cfg: RunConfig):
    # the growth bound concerns the continuous part, so the ensemble is
    # simulated without jumps whatever the configured rate
    ens = simulate_ensemble(cfg.build_coeffs(), cfg.x0, cfg.grid, cfg.frac,
                            cfg.seed(), cfg.replicas, rate=0.0)
    return verify_pathwise_lemma(ens, thresholds=cfg.thresholds)


def _run_selfsim(cfg: RunConfig, kappa_scale: float):
    return verify_self_similarity(cfg.hurst, cfg.frac.alpha, SELFSIM_INTERVALS,
                                  cfg.replicas, cfg.seed(), steps=cfg.grid.steps,
                                  kappa_scale=kappa_scale,
                                  thresholds=cfg.thresholds)


def _run_moments(cfg: RunConfig):
    ens = simulate_ensemble(cfg.build_coeffs(), cfg.x0, cfg.grid, cfg.frac,
                            cfg.seed(), cfg.replicas, rate=cfg.rate,
                            marks=cfg.marks)
    table = estimate_moments(ens, cfg.p_list, cfg.thresholds)
    tail = None
    if ens.size >= TAIL_MIN_REPLICAS:
        tail = tail_diagnostic(ens, max(cfg.p_list), cfg.thresholds)
    return table, tail


def _run_jumps(cfg: RunConfig):
    coeffs = cfg.build_coeffs()
    gain = lambda y: 1.0 + np.asarray(coeffs.jump_gain(y), dtype=float)
    return verify_jump_product_moment(cfg.rate, cfg.marks, gain,
                                      cfg.jump_power, cfg.grid.horizon,
                                      cfg.replicas, cfg.seed(),
                                      thresholds=cfg.thresholds)


def cmd_verify(cfg: RunConfig, suite: str, kappa_scale: float, out: Path) -> int:
    selected = SUITES if suite == "all" else (suite,)
    artifacts: list = []
    _echo_config(cfg, out, artifacts)
    all_passed = True
    for name in selected:
        if name == "kernel":
            report = _run_kernel(cfg)
        elif name == "lemma":
            report = _run_lemma(cfg)
        elif name == "selfsim":
            report = _run_selfsim(cfg, kappa_scale)
        elif name == "jumps":
            report = _run_jumps(cfg)
        else:
            table, tail = _run_moments(cfg)
            summary = table.lines()
            if tail is None:
                summary.append(f"tail: skipped (needs >= {TAIL_MIN_REPLICAS} replicas)")
            else:
                summary += tail.lines()
                _write_csv(out, "moments_tail.csv", tail.CSV_HEADER,
                           tail.csv_rows(), artifacts)
            _write_text(out, "moments_summary.txt", "\n".join(summary) + "\n",
                        artifacts)
            _write_csv(out, "moments_data.csv", table.CSV_HEADER,
                       table.csv_rows(), artifacts)
            passed = table.passed and (tail is None or tail.passed)
            all_passed &= passed
            print(f"moments: {'PASS' if passed else 'FAIL'}")
            continue
        _write_text(out, f"{name}_summary.txt", "\n".join(report.lines()) + "\n",
                    artifacts)
        _write_csv(out, f"{name}_data.csv", report.CSV_HEADER,
                   report.csv_rows(), artifacts)
        all_passed &= report.passed
        print(f"{name}: {'PASS' if report.passed else 'FAIL'}")
    command = f"verify {suite} --kappa-scale {CSV_FLOAT_FMT % kappa_scale}"
    _write_manifest(out, command, artifacts)
    print(f"overall: {'PASS' if all_passed else 'FAIL'}")
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# convergence


_ORACLES = {
    "zero": lambda cfg, w_t, z_t, mark_sum: cfg.x0,
    "additive": lambda cfg, w_t, z_t, mark_sum: cfg.x0 + z_t + mark_sum,
    "pure_jump": lambda cfg, w_t, z_t, mark_sum: cfg.x0 + mark_sum,
    # fallbacks mirror the mixed_geometric_model builder defaults
    "mixed_geometric": lambda cfg, w_t, z_t, mark_sum: cfg.x0 * math.exp(
        cfg.model_params.get("sigma_w", 0.25) * w_t
        - 0.5 * cfg.model_params.get("sigma_w", 0.25) ** 2 * cfg.grid.horizon
        + cfg.model_params.get("sigma_h", 0.75) * z_t),
}


@dataclass(frozen=True)
class ConvergenceReport:
    """Terminal error against a closed form across dyadic refinements."""

    model: str
    sample_size: int
    levels: tuple          # steps per level, coarse to fine
    mean_errors: tuple     # mean relative terminal error per level
    monotone_fraction: float
    fitted_rate: float | None
    exact: bool

    CSV_HEADER = "steps,mean_rel_error"

    @property
    def passed(self) -> bool:
        return self.exact or self.monotone_fraction >= MONOTONE_FRACTION

    def lines(self) -> list:
        out = ["suite: convergence",
               f"model: {self.model}",
               f"seeds: {self.sample_size}",
               "levels: " + " ".join(str(n) for n in self.levels),
               "mean relative errors: " + " ".join(format(e, ".6g")
                                                   for e in self.mean_errors)]
        if self.exact:
            out.append("scheme is exact for this model (errors at rounding level)")
        else:
            out.append(f"fitted rate: {format(self.fitted_rate, '.4g')}")
        out.append(f"seeds with strictly decreasing error: "
                   f"{format(self.monotone_fraction, '.6g')}"
                   f" (required >= {MONOTONE_FRACTION} unless exact)")
        if not self.exact and any(b >= a for a, b in zip(self.mean_errors,
                                                         self.mean_errors[1:])):
            out.append("FLAG: mean error sequence is not monotone")
        out.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return out

    def csv_rows(self) -> list:
        return [",".join(["%d" % n, CSV_FLOAT_FMT % e])
                for n, e in zip(self.levels, self.mean_errors)]


def run_convergence(cfg: RunConfig, refinements: int) -> ConvergenceReport:
    """Solve on dyadically refined grids and compare terminal values.

    All levels of one seed subsample the same finest-grid drivers, so the
    closed form is evaluated once per seed from the shared terminal
    driver values.
    """
    if refinements < 3:
        raise ParameterError(f"refinements must be >= 3, got {refinements}")
    oracle = _ORACLES.get(cfg.model_name)
    if oracle is None:
        known = ", ".join(sorted(_ORACLES))
        raise ParameterError(
            f"no closed-form oracle for model {cfg.model_name!r}; known: {known}")
    if cfg.model_name == "mixed_geometric" and cfg.rate > 0:
        raise ParameterError("the mixed_geometric closed form needs rate = 0")
    coeffs = cfg.build_coeffs()
    seed = cfg.seed()
    levels = [cfg.grid.steps * 2 ** j for j in range(refinements + 1)]
    fine = GridSpec(cfg.grid.horizon, levels[-1])
    m = cfg.replicas

    errors = np.empty((m, len(levels)))
    if cfg.rate == 0.0:
        w_fine = np.empty((m, fine.steps + 1))
        z_fine = np.empty((m, fine.steps + 1))
        oracles = np.empty(m)
        for s in range(m):
            wiener, fbm, _ = gen_driving_triple(fine, cfg.hurst, 0.0, cfg.marks,
                                                seed.child(REPLICA_STREAM_BASE + s))
            w_fine[s] = wiener.values
            z_fine[s] = fbm.values
            oracles[s] = oracle(cfg, wiener.values[-1], fbm.values[-1], 0.0)
        for j, steps in enumerate(levels):
            stride = levels[-1] // steps
            grid_j = GridSpec(cfg.grid.horizon, steps)
            states = euler_paths(coeffs, cfg.x0, grid_j,
                                 w_fine[:, ::stride], z_fine[:, ::stride])
            errors[:, j] = np.abs(states[:, -1] - oracles) / np.maximum(
                np.abs(oracles), 1e-12)
    else:
        for s in range(m):
            wiener, fbm, train = gen_driving_triple(fine, cfg.hurst, cfg.rate,
                                                    cfg.marks,
                                                    seed.child(REPLICA_STREAM_BASE + s))
            mark_sum = float(train.marks.sum()) if train.count else 0.0
            target = oracle(cfg, wiener.values[-1], fbm.values[-1], mark_sum)
            for j, steps in enumerate(levels):
                stride = levels[-1] // steps
                grid_j = GridSpec(cfg.grid.horizon, steps)
                sol = solve_with_jumps(coeffs, cfg.x0,
                                       SamplePath(grid_j, wiener.values[::stride]),
                                       SamplePath(grid_j, fbm.values[::stride]),
                                       train)
                errors[s, j] = abs(sol.terminal - target) / max(abs(target), 1e-12)

    mean_errors = errors.mean(axis=0)
    exact = bool(mean_errors.max() <= 1e-12)
    if exact:
        rate = None
        monotone = 1.0
    else:
        slope = np.polyfit(np.log2(levels), np.log2(np.maximum(mean_errors, 1e-300)), 1)[0]
        rate = -float(slope)
        monotone = float(np.mean(np.all(np.diff(errors, axis=1) < 0.0, axis=1)))
    return ConvergenceReport(cfg.model_name, m, tuple(levels),
                             tuple(float(e) for e in mean_errors),
                             monotone, rate, exact)


def cmd_convergence(cfg: RunConfig, refinements: int, out: Path) -> int:
    report = run_convergence(cfg, refinements)
    artifacts: list = []
    _echo_config(cfg, out, artifacts)
    _write_text(out, "convergence_summary.txt", "\n".join(report.lines()) + "\n",
                artifacts)
    _write_csv(out, "convergence_data.csv", report.CSV_HEADER,
               report.csv_rows(), artifacts)
    _write_manifest(out, f"convergence --refinements {refinements}", artifacts)
    print(f"convergence: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# entry point


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="INI config file (defaults apply if omitted)")
    sub.add_argument("--seed", type=int, help="override the seed root")
    sub.add_argument("--out", help="override the output directory")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mfsde",
        description="Simulate and statistically verify a mixed-noise jump SDE solver.")
    commands = parser.add_subparsers(dest="command", required=True)
    _add_common(commands.add_parser("simulate", help="one run, CSVs plus manifest"))
    p_verify = commands.add_parser("verify", help="run verification suites")
    p_verify.add_argument("suite", choices=SUITES + ("all",))
    p_verify.add_argument("--kappa-scale", type=float, default=1.0,
                          help="scale the self-similarity exponent (control runs)")
    _add_common(p_verify)
    p_conv = commands.add_parser("convergence", help="dyadic refinement study")
    p_conv.add_argument("--refinements", type=int, default=3)
    _add_common(p_conv)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config) if args.config else parse_config("")
        if args.seed is not None:
            if args.seed < 0:
                raise ParameterError("--seed must be nonnegative")
            cfg = dataclasses.replace(cfg, seed_root=args.seed)
        if args.out:
            cfg = dataclasses.replace(cfg, out_dir=args.out)
    except (ParameterError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, args.kappa_scale, out)
        return cmd_convergence(cfg, args.refinements, out)
    except ParameterError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
