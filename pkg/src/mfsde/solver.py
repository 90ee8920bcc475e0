"""Coefficient models, the mixed Euler solver, and the jump-restart build.

The scheme is explicit Euler with forward increments for both the Wiener
and the rough driver; forward increments are the consistent choice because
the rough integral is a forward-sum limit.  Jumps restart the solve: the
path is advanced segment by segment between jump times, the drivers are
shifted to each segment's origin, and the jump map is applied at the
boundary.  Everything is deterministic given the drivers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BlowUpError, GridMismatchError, ParameterError
from .noise import CSV_FLOAT_FMT, GridSpec, JumpTrain, SamplePath, Seed

__all__ = [
    "BLOWUP_LIMIT",
    "CoefficientSet",
    "SamplingBox",
    "AssumptionCheck",
    "AssumptionReport",
    "check_assumptions",
    "SegmentProblem",
    "solve_segment",
    "euler_paths",
    "SegmentInfo",
    "SolutionPath",
    "solve_with_jumps",
    "read_solution_csv",
    "ito_integral_path",
    "pathwise_bound_rhs",
]

# abort threshold for the state; protects moment experiments from overflow
BLOWUP_LIMIT = 1e12

_DEFAULT_KAPPA = 0.4


@dataclass(frozen=True)
class CoefficientSet:
    """Equation coefficients plus their declared regularity constants.

    a, b, c, dc_dx take (t, x) and must broadcast over numpy arrays in x;
    q takes (t, x, y) and must broadcast over x and y; jump_gain is the
    dominating function g with |q(t,x,y)| <= g(y)(1+|x|).

    The constants are declarations, not guarantees: check_assumptions
    samples the quotients and reports which hold on a given box.
    growth bounds |a|+|b|+|c| against 1+|x| and |dc_dx| directly;
    lipschitz bounds the x-increments of a, b, dc_dx; time_holder and
    beta bound the t-increments of a, b, c, dc_dx; b_bound bounds |b|.
    """

    a: Callable
    b: Callable
    c: Callable
    dc_dx: Callable
    q: Callable
    growth: float
    lipschitz: float
    time_holder: float
    beta: float
    b_bound: float
    jump_gain: Callable
    jump_gain_desc: str = ""
    name: str = ""


# ---------------------------------------------------------------------------
# assumption checking


@dataclass(frozen=True)
class SamplingBox:
    """Rectangular (t, x, y) region the assumption quotients are sampled on."""

    t: tuple = (0.0, 1.0)
    x: tuple = (-5.0, 5.0)
    y: tuple = (-3.0, 3.0)

    def __post_init__(self):
        for name, (lo, hi) in (("t", self.t), ("x", self.x), ("y", self.y)):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ParameterError(f"box range {name} must be finite with lo < hi")


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    observed: float
    declared: float
    passed: bool
    witness: tuple

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        pt = ", ".join(f"{v:.4g}" for v in self.witness)
        return (f"{tag} {self.name}: observed {self.observed:.6g} "
                f"vs declared {self.declared:.6g} at ({pt})")


@dataclass(frozen=True)
class AssumptionReport:
    model: str
    box: SamplingBox
    samples: int
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list:
        return [c.line() for c in self.checks]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _max_with_witness(values, *coords):
    i = int(np.argmax(values))
    return float(np.asarray(values).reshape(-1)[i]), tuple(
        float(np.asarray(c).reshape(-1)[i]) for c in coords
    )


def check_assumptions(coeffs: CoefficientSet, box: SamplingBox = SamplingBox(),
                      samples: int = 4000, seed=0) -> AssumptionReport:
    """Empirically bound each assumption quotient on random box samples.

    A check passes when the observed maximum is at most the declared
    constant times (1 + 1e-6); each entry records the witness point of
    its maximum.  Violations are report entries, never exceptions.
    """
    if samples < 2:
        raise ParameterError("samples must be at least 2")
    rng = (seed if isinstance(seed, Seed) else Seed(int(seed))).generator()
    slack = 1.0 + 1e-6

    def ok(observed, declared):
        return bool(observed <= declared * slack) or math.isinf(declared)

    t = rng.uniform(*box.t, samples)
    x = rng.uniform(*box.x, samples)
    x2 = rng.uniform(*box.x, samples)
    s = rng.uniform(*box.t, samples)
    y = rng.uniform(*box.y, samples)
    asep = np.abs(x - x2) > 1e-9
    tsep = np.abs(t - s) > 1e-9

    av, bv, cv = coeffs.a(t, x), coeffs.b(t, x), coeffs.c(t, x)
    dcv = coeffs.dc_dx(t, x)
    checks = []

    quot = (np.abs(av) + np.abs(bv) + np.abs(cv)) / (1.0 + np.abs(x))
    obs, wit = _max_with_witness(quot + 0.0 * x, t, x)
    checks.append(AssumptionCheck("growth", obs, coeffs.growth, ok(obs, coeffs.growth), wit))

    obs, wit = _max_with_witness(np.abs(dcv) + 0.0 * x, t, x)
    checks.append(AssumptionCheck("dc_dx-bound", obs, coeffs.growth,
                                  ok(obs, coeffs.growth), wit))

    num = (np.abs(coeffs.a(t, x2) - av) + np.abs(coeffs.b(t, x2) - bv)
           + np.abs(coeffs.dc_dx(t, x2) - dcv)) + 0.0 * x
    quot = np.where(asep, num / np.abs(x - x2), 0.0)
    obs, wit = _max_with_witness(quot, t, x, x2)
    checks.append(AssumptionCheck("x-lipschitz", obs, coeffs.lipschitz,
                                  ok(obs, coeffs.lipschitz), wit))

    num = (np.abs(coeffs.a(s, x) - av) + np.abs(coeffs.b(s, x) - bv)
           + np.abs(coeffs.c(s, x) - cv)
           + np.abs(coeffs.dc_dx(s, x) - dcv)) + 0.0 * x
    quot = np.where(tsep, num / np.abs(t - s) ** coeffs.beta, 0.0)
    obs, wit = _max_with_witness(quot, t, s, x)
    checks.append(AssumptionCheck("t-holder", obs, coeffs.time_holder,
                                  ok(obs, coeffs.time_holder), wit))

    obs, wit = _max_with_witness(np.abs(bv) + 0.0 * x, t, x)
    checks.append(AssumptionCheck("b-bound", obs, coeffs.b_bound,
                                  ok(obs, coeffs.b_bound), wit))

    qv = np.abs(coeffs.q(t, x, y)) + 0.0 * x
    denom = coeffs.jump_gain(y) * (1.0 + np.abs(x))
    with np.errstate(divide="ignore", invalid="ignore"):
        quot = np.where(qv == 0.0, 0.0, qv / denom)
    obs, wit = _max_with_witness(quot, t, x, y)
    checks.append(AssumptionCheck("jump-gain", obs, 1.0, ok(obs, 1.0), wit))

    return AssumptionReport(model=coeffs.name or "<anonymous>", box=box,
                            samples=samples, checks=tuple(checks))


# ---------------------------------------------------------------------------
# segment solving


@dataclass(frozen=True)
class SegmentProblem:
    """One between-jumps subproblem: clock offset, start value, drivers.

    The drivers are segment-local (both start at 0 at the segment origin);
    the offset only enters the coefficients' time argument.
    """

    offset: float
    initial: float
    wiener: SamplePath
    frac: SamplePath

    def __post_init__(self):
        if self.wiener.grid != self.frac.grid:
            raise GridMismatchError("segment drivers must share one grid")
        if self.wiener.values[0] != 0.0 or self.frac.values[0] != 0.0:
            raise ParameterError("segment drivers must start at 0")
        if self.offset < 0.0:
            raise ParameterError("offset must be nonnegative")


def _euler_core(offset: float, x0, ts: np.ndarray, w_vals: np.ndarray,
                z_vals: np.ndarray, coeffs: CoefficientSet) -> np.ndarray:
    """Forward Euler over the nodes ts (segment clock, starting at 0).

    x0 may be a scalar or a batch vector; w_vals/z_vals then have shape
    (n+1,) or (batch, n+1).  Returns values with a trailing node axis.
    """
    dts = np.diff(ts)
    dw = np.diff(w_vals, axis=-1)
    dz = np.diff(z_vals, axis=-1)
    x = np.asarray(x0, dtype=float).copy()
    out = np.empty(np.broadcast_shapes(x.shape, dw.shape[:-1]) + (len(ts),))
    out[..., 0] = x
    for i in range(len(dts)):
        t = offset + ts[i]
        x = (x + coeffs.a(t, x) * dts[i] + coeffs.b(t, x) * dw[..., i]
             + coeffs.c(t, x) * dz[..., i])
        bad = ~np.isfinite(x) | (np.abs(x) > BLOWUP_LIMIT)
        if np.any(bad):
            state = float(np.atleast_1d(x)[np.argmax(np.atleast_1d(bad))])
            raise BlowUpError(step=i + 1, time=offset + ts[i + 1], state=state)
        out[..., i + 1] = x
    return out


def solve_segment(p: SegmentProblem, coeffs: CoefficientSet) -> SamplePath:
    """Solve one jump-free segment on its drivers' grid."""
    ts = p.wiener.grid.times
    vals = _euler_core(p.offset, p.initial, ts, p.wiener.values,
                       p.frac.values, coeffs)
    return SamplePath(p.wiener.grid, vals, kind="continuous")


def euler_paths(coeffs: CoefficientSet, x0, grid: GridSpec,
                wiener_values: np.ndarray, frac_values: np.ndarray,
                offset: float = 0.0) -> np.ndarray:
    """Batched jump-free solve: driver value arrays of shape (m, n+1) give
    an (m, n+1) state array in one pass.  Used by the ensemble experiments."""
    w = np.asarray(wiener_values, dtype=float)
    z = np.asarray(frac_values, dtype=float)
    if w.shape != z.shape or w.shape[-1] != grid.steps + 1:
        raise GridMismatchError("driver arrays must share shape (..., steps+1)")
    return _euler_core(offset, x0, grid.times, w, z, coeffs)


# ---------------------------------------------------------------------------
# jump-restart construction


@dataclass(frozen=True)
class SegmentInfo:
    """Diagnostics for one between-jumps segment."""

    start: float
    end: float
    nodes: int
    kappa: float
    holder_quotient: float


def _holder_quotient(ts: np.ndarray, vals: np.ndarray, kappa: float) -> float:
    """Max discrete Holder quotient over dyadic lags."""
    n = len(ts) - 1
    best = 0.0
    lag = 1
    while lag <= n:
        dv = np.abs(vals[lag:] - vals[:-lag])
        dt = ts[lag:] - ts[:-lag]
        q = float(np.max(dv / dt ** kappa)) if dv.size else 0.0
        if q > best:
            best = q
        lag *= 2
    return best


def _segment_nodes(length: float, dt: float) -> np.ndarray:
    """Local nodes for one segment: the usual spacing, plus a short final
    step when the segment length is not a whole number of steps."""
    if length <= 0.0:
        return np.zeros(1)
    k = int(math.floor(length / dt + 1e-9))
    if k >= 1 and length - k * dt <= 1e-9 * dt:
        return np.linspace(0.0, length, k + 1)
    return np.concatenate([dt * np.arange(k + 1), [length]])


class _DriverSampler:
    """Reads a master path at arbitrary times; exact at its own nodes."""

    def __init__(self, path: SamplePath):
        self.times = path.grid.times
        self.values = path.values
        self.dt = path.grid.dt
        self.steps = path.grid.steps

    def at(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.clip(np.rint(t / self.dt).astype(int), 0, self.steps)
        out = self.values[k]
        off = np.abs(t - self.times[k]) > 1e-9 * self.dt
        if np.any(off):
            out = out.copy()
            out[off] = np.interp(t[off], self.times, self.values)
        return out


@dataclass
class SolutionPath:
    """Cadlag solution on the union of the grid and the jump times.

    Jump times appear twice in `times`: first the left limit (flag 1),
    then the post-jump value (flag 0).  Per-segment data is kept for
    cadlag resampling and Holder diagnostics.
    """

    times: np.ndarray
    values: np.ndarray
    left_flags: np.ndarray
    train: JumpTrain
    grid: GridSpec
    segments: list
    segment_data: list = field(repr=False, default_factory=list)

    @property
    def terminal(self) -> float:
        return float(self.values[-1])

    def jump_rows(self) -> np.ndarray:
        return np.nonzero(self.left_flags == 1)[0]

    def resample(self, grid: GridSpec | None = None) -> SamplePath:
        """Right-continuous values at the nodes of a uniform grid."""
        grid = grid or self.grid
        starts = np.array([s0 for s0, _, _ in self.segment_data])
        out = np.empty(grid.steps + 1)
        for i, t in enumerate(grid.times):
            j = max(int(np.searchsorted(starts, t, side="right")) - 1, 0)
            s0, ts, vals = self.segment_data[j]
            local = min(max(t - s0, 0.0), ts[-1])
            out[i] = np.interp(local, ts, vals)
        return SamplePath(grid, out, kind="cadlag")

    def holder_constants(self, kappa: float | None = None) -> list:
        """Per-segment discrete Holder quotients at the given order."""
        if kappa is None:
            kappa = self.segments[0].kappa if self.segments else _DEFAULT_KAPPA
        return [_holder_quotient(ts, vals, kappa)
                for _, ts, vals in self.segment_data]

    def to_csv(self, file) -> None:
        data = np.column_stack([self.times, self.values,
                                self.left_flags.astype(float)])
        np.savetxt(file, data, fmt=[CSV_FLOAT_FMT, CSV_FLOAT_FMT, "%d"],
                   delimiter=",", header="t,value,left_limit_flag", comments="")


def read_solution_csv(file) -> tuple:
    """Read back a SolutionPath CSV as (times, values, left_flags)."""
    data = np.loadtxt(file, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1], data[:, 2].astype(int)


def solve_with_jumps(coeffs: CoefficientSet, x0: float, W: SamplePath,
                     BH: SamplePath, jumps: JumpTrain,
                     kappa: float = _DEFAULT_KAPPA) -> SolutionPath:
    """Advance the equation through its jumps by restarted segment solves.

    Between jump times the mixed Euler scheme runs on the usual spacing
    started at the previous jump (drivers shifted to the segment origin,
    linearly interpolated at off-grid jump times); at each jump time the
    jump map is applied to the left limit.  Output is cadlag with stored
    left limits.
    """
    if W.grid != BH.grid:
        raise GridMismatchError("drivers must share one grid")
    grid = W.grid
    t_end = float(grid.times[-1])
    if jumps.count and jumps.times[-1] > t_end * (1 + 1e-12):
        raise ParameterError("jump train extends beyond the driver horizon")
    w_s = _DriverSampler(W)
    z_s = _DriverSampler(BH)

    taus = list(jumps.times)
    marks = list(jumps.marks)
    starts = [0.0] + taus
    ends = taus + [t_end]

    rows_t, rows_v, rows_f = [], [], []
    seg_infos, seg_data = [], []
    x = float(x0)
    for j, (s0, s1) in enumerate(zip(starts, ends)):
        ts = _segment_nodes(s1 - s0, grid.dt)
        abs_nodes = s0 + ts
        w_loc = w_s.at(abs_nodes)
        z_loc = z_s.at(abs_nodes)
        vals = _euler_core(s0, x, ts, w_loc - w_loc[0], z_loc - z_loc[0], coeffs)
        has_jump_after = j < len(taus)
        flags = np.zeros(len(ts), dtype=int)
        if has_jump_after:
            flags[-1] = 1
        rows_t.append(abs_nodes)
        rows_v.append(vals)
        rows_f.append(flags)
        seg_infos.append(SegmentInfo(start=s0, end=s1, nodes=len(ts), kappa=kappa,
                                     holder_quotient=_holder_quotient(ts, vals, kappa)))
        seg_data.append((s0, ts, vals))
        x = float(vals[-1])
        if has_jump_after:
            x = x + float(coeffs.q(s1, x, marks[j]))
            if not math.isfinite(x) or abs(x) > BLOWUP_LIMIT:
                raise BlowUpError(step=-1, time=s1, state=x)
    return SolutionPath(
        times=np.concatenate(rows_t),
        values=np.concatenate(rows_v),
        left_flags=np.concatenate(rows_f),
        train=jumps,
        grid=grid,
        segments=seg_infos,
        segment_data=seg_data,
    )


# ---------------------------------------------------------------------------
# helpers used by the bound experiments


def ito_integral_path(b_values, W: SamplePath) -> SamplePath:
    """Running forward sums of b against the Wiener increments.

    b_values holds the integrand at the grid nodes, as a SamplePath or a
    bare array (left-endpoint values are used, so an adapted integrand
    stays adapted).
    """
    bv = np.asarray(getattr(b_values, "values", b_values), dtype=float)
    if bv.shape != W.values.shape:
        raise GridMismatchError("integrand and Wiener path must share the grid")
    vals = np.concatenate([[0.0], np.cumsum(bv[:-1] * np.diff(W.values))])
    return SamplePath(W.grid, vals, kind="continuous")


def pathwise_bound_rhs(Lambda: float, Jb: float, alpha: float, K: float) -> float:
    """Right-hand side K*exp(K*Lambda^(1/(1-alpha)))*(1+Jb) of the pathwise
    sup-norm bound; K is always fitted or caller-supplied, never derived."""
    if Lambda < 1.0:
        raise ParameterError("Lambda must be >= 1 (it is floored at 1)")
    if Jb < 0.0:
        raise ParameterError("Jb must be nonnegative")
    if K <= 0.0:
        raise ParameterError("K must be positive")
    if not 0.0 < alpha < 1.0:
        raise ParameterError("alpha must lie in (0, 1)")
    expo = K * Lambda ** (1.0 / (1.0 - alpha))
    if expo > 700.0:
        return float("inf")
    return K * math.exp(expo) * (1.0 + Jb)
