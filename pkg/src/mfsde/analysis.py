"""Statistical verification suites for the mixed-noise jump solver.

Each verifier draws a reproducible Monte Carlo sample and reduces it to a
small typed report carrying a `passed` flag, `lines()` with a key: value
summary, and `csv_rows()` for archival.  The mathematical statements being
probed are qualitative (moment finiteness, a pathwise growth bound,
distributional scaling of a roughness norm), so every numeric cutoff lives
in `Thresholds` as an explicit measurement convention, not a derived
constant.

Replica r of any ensemble draws its drivers from substream
REPLICA_STREAM_BASE + r of the root seed; reports are therefore pure
functions of their stated inputs and rerun bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

from .errors import BlowUpError, ParameterError
from .noise import (
    CSV_FLOAT_FMT,
    REPLICA_STREAM_BASE,
    FracParams,
    GridSpec,
    MarkLaw,
    SamplePath,
    Seed,
    TwoPointMarks,
    gen_driving_triple,
    gen_fbm,
    gen_jump_train,
)
from .norms import NormParams, capital_lambda, evaluate_norms, norm_0_interval, norm_inf
from .solver import (
    CoefficientSet,
    SolutionPath,
    ito_integral_path,
    pathwise_bound_rhs,
    solve_with_jumps,
)


@dataclass(frozen=True)
class Thresholds:
    """PASS cutoffs shared by the verification suites."""

    se_multiplier: float = 4.0            # Monte Carlo vs closed form
    stability_se_multiplier: float = 3.0  # half ensemble vs full ensemble
    holdout_pass_fraction: float = 0.95
    ks_pvalue_min: float = 0.01
    ratio_slack: float = 1e-3             # quadrature inequality tolerance


DEFAULT_THRESHOLDS = Thresholds()


def _num(x: float) -> str:
    return format(float(x), ".6g")


def _batch_se(x: np.ndarray) -> float:
    """Standard error of the mean by sqrt(n) batch means.

    Batching in replica order is deliberate: replicas are independent, so
    the split is arbitrary, and a fixed rule keeps reruns bit-identical.
    """
    m = x.size
    if m < 4:
        return 0.0
    nb = max(int(round(math.sqrt(m))), 2)
    bounds = np.linspace(0, m, nb + 1).astype(int)
    means = np.array([x[a:b].mean() for a, b in zip(bounds[:-1], bounds[1:])])
    return float(means.std(ddof=1) / math.sqrt(nb))


# ---------------------------------------------------------------------------
# ensembles


@dataclass(frozen=True)
class Ensemble:
    """Replicated solves plus everything needed to regenerate them.

    Replicas whose solve blew up are kept out of `paths` and recorded in
    `excluded` as (replica index, reason); `replica_ids` aligns the kept
    paths with their driver substreams.
    """

    coeffs: CoefficientSet
    x0: float
    grid: GridSpec
    frac: FracParams
    rate: float
    marks: MarkLaw
    seed: Seed
    dependence: str
    kappa: float | None
    replica_ids: tuple
    paths: tuple
    excluded: tuple
    norm_reports: tuple | None = None

    @property
    def size(self) -> int:
        return len(self.paths)

    @property
    def requested(self) -> int:
        return len(self.paths) + len(self.excluded)

    def drivers(self, replica: int):
        """Regenerate (wiener, fbm, jumps) for one replica, bit for bit."""
        child = self.seed.child(REPLICA_STREAM_BASE + replica)
        return gen_driving_triple(self.grid, self.frac.hurst, self.rate,
                                  self.marks, child, self.dependence)

    def sup_values(self) -> np.ndarray:
        """sup over nodes of |X| per kept path; left limits included."""
        return np.array([float(np.max(np.abs(p.values))) for p in self.paths])


def _grid_restriction(path: SolutionPath, grid: GridSpec) -> SamplePath:
    if path.train.count == 0:
        return SamplePath(grid, path.values)
    return path.resample(grid)


def simulate_ensemble(coeffs: CoefficientSet, x0: float, grid: GridSpec,
                      frac: FracParams, seed: Seed, replicas: int,
                      rate: float = 0.0, marks: MarkLaw | None = None,
                      kappa: float | None = None,
                      dependence: str = "independent",
                      norm_params: NormParams | None = None) -> Ensemble:
    """Solve `replicas` independent copies of the equation.

    Blown-up replicas are excluded and counted rather than fatal; the
    moment suite flags any nonzero exclusion rate.  When `norm_params` is
    given, a NormReport is evaluated per kept path on its grid
    restriction (exact nodes for jump-free paths, right-continuous
    resampling otherwise).  Norm evaluation is quadratic in the node
    count, so leave it off for large ensembles.
    """
    if replicas < 1:
        raise ParameterError(f"replicas must be >= 1, got {replicas}")
    if marks is None:
        if rate > 0.0:
            raise ParameterError("a mark law is required when rate > 0")
        marks = TwoPointMarks()
    ids, paths, excluded, reports = [], [], [], []
    for r in range(replicas):
        child = seed.child(REPLICA_STREAM_BASE + r)
        wiener, fbm, train = gen_driving_triple(grid, frac.hurst, rate,
                                                marks, child, dependence)
        try:
            if kappa is None:
                sol = solve_with_jumps(coeffs, x0, wiener, fbm, train)
            else:
                sol = solve_with_jumps(coeffs, x0, wiener, fbm, train,
                                       kappa=kappa)
        except BlowUpError as err:
            excluded.append((r, str(err)))
            continue
        ids.append(r)
        paths.append(sol)
        if norm_params is not None:
            restriction = _grid_restriction(sol, grid)
            reports.append(evaluate_norms(restriction, norm_params,
                                          path_id=f"replica{r}"))
    return Ensemble(coeffs, x0, grid, frac, rate, marks, seed, dependence,
                    kappa, tuple(ids), tuple(paths), tuple(excluded),
                    tuple(reports) if norm_params is not None else None)


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class MomentRow:
    power: float
    value: float
    std_error: float
    half_value: float
    half_std_error: float
    stable: bool


@dataclass(frozen=True)
class MomentTable:
    """Empirical moments of sup|X| with a half-vs-full stability check.

    Instability or a nonzero exclusion rate fails the table: both are the
    signatures of mass escaping to infinity that the finiteness claim
    rules out.
    """

    rows: tuple
    sample_size: int
    excluded: int
    multiplier: float

    CSV_HEADER = "p,moment,std_error,half_moment,half_std_error,stable"

    @property
    def exclusion_rate(self) -> float:
        total = self.sample_size + self.excluded
        return self.excluded / total if total else 0.0

    @property
    def stable(self) -> bool:
        return all(row.stable for row in self.rows)

    @property
    def passed(self) -> bool:
        return self.stable and self.excluded == 0

    def lines(self) -> list:
        out = ["suite: moments",
               f"replicas kept: {self.sample_size}",
               f"replicas excluded: {self.excluded}"]
        if self.excluded:
            out.append(f"WARNING: nonzero exclusion rate {self.exclusion_rate:.3g}"
                       " (blow-ups removed from the sample)")
        for row in self.rows:
            out.append(
                f"p={_num(row.power)}: {_num(row.value)} +- {_num(row.std_error)}"
                f" | half {_num(row.half_value)} +- {_num(row.half_std_error)}"
                f" | stable {'yes' if row.stable else 'NO'}")
        out.append(f"stability multiplier: {_num(self.multiplier)}")
        out.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return out

    def csv_rows(self) -> list:
        fmt = CSV_FLOAT_FMT
        return [",".join([fmt % row.power, fmt % row.value, fmt % row.std_error,
                          fmt % row.half_value, fmt % row.half_std_error,
                          "%d" % row.stable]) for row in self.rows]


def estimate_moments(ens: Ensemble, p_list, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> MomentTable:
    """Empirical E[sup|X|^p] with batch-means errors and stability check.

    The half ensemble must agree with the full one within
    `stability_se_multiplier` combined standard errors for every p; a
    drifting mean between the two is how an almost-surely-finite-looking
    sample reveals an infinite moment.
    """
    if ens.size < 100:
        raise ParameterError(f"moment estimation needs >= 100 kept replicas, got {ens.size}")
    sups = ens.sup_values()
    half = sups[:sups.size // 2]
    rows = []
    for p in p_list:
        p = float(p)
        if not (p > 0 and math.isfinite(p)):
            raise ParameterError(f"moment orders must be positive and finite, got {p}")
        full_vals = sups ** p
        half_vals = half ** p
        value, err = float(full_vals.mean()), _batch_se(full_vals)
        hvalue, herr = float(half_vals.mean()), _batch_se(half_vals)
        combined = math.hypot(err, herr)
        stable = abs(hvalue - value) <= thresholds.stability_se_multiplier * combined
        rows.append(MomentRow(p, value, err, hvalue, herr, stable))
    return MomentTable(tuple(rows), ens.size, len(ens.excluded),
                       thresholds.stability_se_multiplier)


@dataclass(frozen=True)
class TailReport:
    """Log-log tail slope of the sup|X| survival function.

    A fitted slope above p_max + 1 is the empirical signature that
    moments up to order p_max converge; a degenerate sample has an
    infinitely steep tail and is trivially supported.
    """

    p_max: float
    slope: float
    supported: bool
    sample_size: int
    tail_count: int
    tail_values: tuple
    tail_survival: tuple

    CSV_HEADER = "sup_value,survival"

    @property
    def passed(self) -> bool:
        return self.supported

    def lines(self) -> list:
        return ["suite: tail",
                f"replicas: {self.sample_size}",
                f"tail points: {self.tail_count}",
                f"fitted tail slope: {_num(self.slope)}",
                f"required slope: > {_num(self.p_max + 1.0)}",
                f"result: {'PASS' if self.passed else 'FAIL'}"]

    def csv_rows(self) -> list:
        return [",".join([CSV_FLOAT_FMT % v, CSV_FLOAT_FMT % s])
                for v, s in zip(self.tail_values, self.tail_survival)]


def tail_diagnostic(ens: Ensemble, p_max: float,
                    thresholds: Thresholds = DEFAULT_THRESHOLDS) -> TailReport:
    """Fit the survival-function slope over the top decile of sup|X|."""
    if ens.size < 1000:
        raise ParameterError(f"tail diagnostic needs >= 1000 kept replicas, got {ens.size}")
    sups = np.sort(ens.sup_values())
    m = sups.size
    k = max(m // 10, 20)
    xs = sups[m - k:]
    surv = (m - np.arange(m - k, m)) / m   # P(sup >= x), never zero
    span = xs[-1] - xs[0]
    if span <= 1e-12 * max(1.0, abs(xs[-1])):
        # degenerate sample: vertical tail
        return TailReport(float(p_max), math.inf, True, m, k,
                          tuple(xs), tuple(surv))
    keep = xs > 0
    slope_fit = np.polyfit(np.log(xs[keep]), np.log(surv[keep]), 1)[0]
    slope = -float(slope_fit)
    return TailReport(float(p_max), slope, slope > p_max + 1.0, m, k,
                      tuple(xs), tuple(surv))


# ---------------------------------------------------------------------------
# pathwise growth bound


@dataclass(frozen=True)
class LemmaReport:
    """Holdout validation of the exponential pathwise growth bound.

    K is fitted as the smallest constant making the bound an equality on
    each training path (principal Lambert W branch) and then maxed over
    the training half; the holdout half must satisfy the bound at the
    fitted K on at least `holdout_pass_fraction` of its paths.
    """

    alpha: float
    sample_size: int
    train_size: int
    fitted_k: float
    k_envelope: tuple
    holdout_rate: float
    threshold: float
    replica_ids: tuple
    lhs: tuple
    lam: tuple
    ito_norm: tuple
    k_min: tuple
    satisfied: tuple

    CSV_HEADER = "replica,lhs,capital_lambda,ito_norm,k_min,satisfied"

    @property
    def passed(self) -> bool:
        return self.holdout_rate >= self.threshold

    def lines(self) -> list:
        return ["suite: pathwise-bound",
                f"alpha: {_num(self.alpha)}",
                f"paths: {self.sample_size} (train {self.train_size},"
                f" holdout {self.sample_size - self.train_size})",
                f"fitted K: {_num(self.fitted_k)}",
                f"holdout satisfaction: {_num(self.holdout_rate)}",
                f"required fraction: {_num(self.threshold)}",
                f"result: {'PASS' if self.passed else 'FAIL'}"]

    def csv_rows(self) -> list:
        fmt = CSV_FLOAT_FMT
        return [",".join(["%d" % rid, fmt % a, fmt % b, fmt % c, fmt % d,
                          "%d" % s])
                for rid, a, b, c, d, s in zip(self.replica_ids, self.lhs,
                                              self.lam, self.ito_norm,
                                              self.k_min, self.satisfied)]


def _minimal_k(lhs: float, lam_pow: float, jb: float) -> float:
    # smallest K with K*exp(K*lam_pow)*(1+jb) = lhs, via W0
    ratio = lhs / (1.0 + jb)
    if ratio <= 0.0:
        return 0.0
    return float(special.lambertw(ratio * lam_pow).real / lam_pow)


def verify_pathwise_lemma(ens: Ensemble, alpha: float | None = None,
                          train_fraction: float = 0.5,
                          thresholds: Thresholds = DEFAULT_THRESHOLDS) -> LemmaReport:
    """Fit-and-holdout check of sup-norm growth against the driver norm.

    Per path: lhs is the solution's combined sup and increment-kernel
    norm, Lambda the (floored) roughness norm of the rough driver, and
    ito_norm the same combined norm of the accumulated Wiener integral
    of b along the path.
    """
    if any(p.train.count for p in ens.paths):
        raise ParameterError("pathwise bound suite needs a jump-free ensemble")
    if ens.size < 4:
        raise ParameterError(f"need at least 4 paths to split, got {ens.size}")
    if not 0.0 < train_fraction < 1.0:
        raise ParameterError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    alpha = ens.frac.alpha if alpha is None else float(alpha)
    horizon = ens.grid.horizon
    times = ens.grid.times
    lam_pow_exp = 1.0 / (1.0 - alpha)

    lhs, lam, jb, kmin = [], [], [], []
    for rid, path in zip(ens.replica_ids, ens.paths):
        wiener, fbm, _ = ens.drivers(rid)
        x = SamplePath(ens.grid, path.values)
        lhs_i = norm_inf(x, horizon, alpha)
        lam_i = capital_lambda(fbm, horizon, alpha)
        b_vals = np.asarray(ens.coeffs.b(times, path.values), dtype=float)
        if b_vals.ndim == 0:
            b_vals = np.full(times.shape, float(b_vals))
        jb_i = norm_inf(ito_integral_path(b_vals, wiener), horizon, alpha)
        lhs.append(lhs_i)
        lam.append(lam_i)
        jb.append(jb_i)
        kmin.append(_minimal_k(lhs_i, lam_i ** lam_pow_exp, jb_i))

    n_train = min(max(int(round(train_fraction * ens.size)), 1), ens.size - 1)
    envelope = np.maximum.accumulate(np.array(kmin[:n_train]))
    k_fit = float(envelope[-1])

    satisfied = []
    for lhs_i, lam_i, jb_i in zip(lhs, lam, jb):
        if k_fit > 0.0:
            rhs = pathwise_bound_rhs(lam_i, jb_i, alpha, k_fit)
        else:
            rhs = 0.0
        # 1e-9 relative slack absorbs the lambertw/exp round trip on
        # paths whose fitted K is the binding one
        satisfied.append(lhs_i <= rhs * (1.0 + 1e-9))
    holdout = satisfied[n_train:]
    rate = float(np.mean(holdout)) if holdout else 1.0
    return LemmaReport(alpha, ens.size, n_train, k_fit, tuple(envelope),
                       rate, thresholds.holdout_pass_fraction,
                       tuple(ens.replica_ids), tuple(lhs), tuple(lam),
                       tuple(jb), tuple(kmin), tuple(satisfied))


# ---------------------------------------------------------------------------
# quadrature estimates


def _quad_checked(fn, lo: float, hi: float, issues: list, label: str, **kw) -> float:
    res = integrate.quad(fn, lo, hi, full_output=1, limit=200, **kw)
    if len(res) > 3:
        issues.append(f"{label}: {res[3].splitlines()[0]}")
    return float(res[0])


@dataclass(frozen=True)
class KernelReport:
    """Quadrature check of the two singular-kernel inequalities.

    (i) the exponentially weighted power kernel is dominated by
    gamma(1-alpha) * lambda^(alpha-1) uniformly in the endpoint;
    (ii) the two-power convolution is dominated by
    B(1-alpha, 2*alpha) * (t-u)^(-2*alpha) on the (u, t) triangle.
    """

    alpha: float
    horizon: float
    weighted_rows: tuple    # (lambda, sup ratio, s at sup)
    beta_ratio: float
    beta_argmax: tuple
    grid_size: int
    slack: float
    issues: tuple

    CSV_HEADER = "check,param_a,param_b,ratio"

    @property
    def passed(self) -> bool:
        ok = all(r <= 1.0 + self.slack for _, r, _ in self.weighted_rows)
        return ok and self.beta_ratio <= 1.0 + self.slack and not self.issues

    def lines(self) -> list:
        out = ["suite: kernel-estimates", f"alpha: {_num(self.alpha)}"]
        for lam, ratio, s_at in self.weighted_rows:
            out.append(f"lambda={_num(lam)}: sup ratio {_num(ratio)}"
                       f" at s={_num(s_at)}")
        u, t = self.beta_argmax
        out.append(f"beta bound: max ratio {_num(self.beta_ratio)}"
                   f" at (u={_num(u)}, t={_num(t)})"
                   f" on {self.grid_size}x{self.grid_size} grid")
        out.append(f"allowed ratio: <= 1 + {_num(self.slack)}")
        for issue in self.issues:
            out.append(f"quadrature issue: {issue}")
        out.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return out

    def csv_rows(self) -> list:
        fmt = CSV_FLOAT_FMT
        rows = [",".join(["weighted", fmt % lam, fmt % s_at, fmt % ratio])
                for lam, ratio, s_at in self.weighted_rows]
        u, t = self.beta_argmax
        rows.append(",".join(["beta", fmt % u, fmt % t, fmt % self.beta_ratio]))
        return rows


def verify_kernel_estimates(alpha: float, lambda_list, grid_size: int = 20,
                            horizon: float = 1.0, s_points: int = 64,
                            thresholds: Thresholds = DEFAULT_THRESHOLDS) -> KernelReport:
    """Check both kernel inequalities by adaptive quadrature.

    The weighted kernel integral is evaluated in the form
    int_0^s exp(-lambda*v) (s-v)^(-alpha) dv so the exponential stays
    bounded and the algebraic endpoint singularity is handled by the
    quadrature weight; sup over s is taken on a log-spaced grid fine
    enough to straddle the 1/lambda transition.
    """
    if not 0.0 < alpha < 0.5:
        raise ParameterError(f"alpha must lie in (0, 1/2), got {alpha}")
    if grid_size < 2:
        raise ParameterError(f"grid_size must be >= 2, got {grid_size}")
    issues: list = []

    weighted_rows = []
    gamma_factor = math.gamma(1.0 - alpha)
    for lam in lambda_list:
        lam = float(lam)
        if lam <= 0:
            raise ParameterError(f"lambda values must be positive, got {lam}")
        bound = gamma_factor * lam ** (alpha - 1.0)
        s_lo = min(0.01 / lam, horizon / 4.0)
        best, best_s = -math.inf, math.nan
        for s in np.geomspace(s_lo, horizon, s_points):
            val = _quad_checked(lambda v: math.exp(-lam * v), 0.0, s, issues,
                                f"weighted lambda={lam} s={s:.4g}",
                                weight="alg", wvar=(0.0, -alpha))
            ratio = val / bound
            if ratio > best:
                best, best_s = ratio, float(s)
        weighted_rows.append((lam, best, best_s))

    beta_factor = special.beta(1.0 - alpha, 2.0 * alpha)
    fracs = np.linspace(1.0, grid_size, grid_size) / (grid_size + 1.0)
    t_vals = np.linspace(horizon / grid_size, horizon, grid_size)
    beta_best, beta_arg = -math.inf, (math.nan, math.nan)
    for t in t_vals:
        for frac in fracs:
            u = frac * t
            val = _quad_checked(lambda s: (t - s) ** (-1.0 - alpha), 0.0, u,
                                issues, f"beta u={u:.4g} t={t:.4g}",
                                weight="alg", wvar=(0.0, -alpha))
            ratio = val / (beta_factor * (t - u) ** (-2.0 * alpha))
            if ratio > beta_best:
                beta_best, beta_arg = ratio, (float(u), float(t))
    return KernelReport(alpha, horizon, tuple(weighted_rows), beta_best,
                        beta_arg, grid_size, thresholds.ratio_slack,
                        tuple(issues))


# ---------------------------------------------------------------------------
# interval scaling of the roughness norm


@dataclass(frozen=True)
class SelfSimReport:
    """Two-sample KS check of the interval-scaling identity.

    The normalized statistic (b-a)^(-kappa) * ||B^H||_{0;[a,b]}^(1/(1-alpha))
    must match the law of the unit-interval statistic; kappa_scale != 1
    runs the same seeds with a deliberately wrong exponent to confirm the
    test would notice.
    """

    hurst: float
    alpha: float
    kappa: float
    kappa_scale: float
    sample_size: int
    rows: tuple      # (a, b, cells, pvalue)
    threshold: float

    CSV_HEADER = "a,b,cells,ks_pvalue"

    @property
    def passed(self) -> bool:
        return all(p > self.threshold for _, _, _, p in self.rows)

    def lines(self) -> list:
        out = ["suite: self-similarity",
               f"hurst: {_num(self.hurst)}",
               f"alpha: {_num(self.alpha)}",
               f"kappa: {_num(self.kappa)} (below 1 for every admissible pair;"
               " only the distributional identity is checked)"]
        if self.kappa_scale != 1.0:
            out.append(f"kappa_scale: {_num(self.kappa_scale)} (control run)")
        for a, b, cells, pval in self.rows:
            out.append(f"interval [{_num(a)}, {_num(b)}] ({cells} cells):"
                       f" KS p={_num(pval)}")
        out.append(f"required p: > {_num(self.threshold)}")
        out.append(f"replicas: {self.sample_size}")
        out.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return out

    def csv_rows(self) -> list:
        fmt = CSV_FLOAT_FMT
        return [",".join([fmt % a, fmt % b, "%d" % cells, fmt % p])
                for a, b, cells, p in self.rows]


def verify_self_similarity(hurst: float, alpha: float, interval_list, replicas: int,
                           seed: Seed, steps: int = 256, horizon: float = 1.0,
                           kappa_scale: float = 1.0,
                           thresholds: Thresholds = DEFAULT_THRESHOLDS) -> SelfSimReport:
    """Sample the scaled interval statistic against its unit-interval law.

    The reference sample is drawn on a unit-interval grid with the same
    number of cells as the interval under test, so the two discrete
    statistics share their exact law and the KS comparison carries no
    discretization bias.  Interval endpoints must sit on the grid.
    """
    if not 0.5 < hurst < 1.0:
        raise ParameterError(f"hurst must lie in (1/2, 1), got {hurst}")
    if not (1.0 - hurst) < alpha < 0.5:
        raise ParameterError(f"alpha must lie in (1-H, 1/2), got {alpha}")
    if replicas < 10:
        raise ParameterError(f"need at least 10 replicas, got {replicas}")
    kappa = (alpha + hurst - 1.0) / (1.0 - alpha)
    kappa_used = kappa_scale * kappa
    expo = 1.0 / (1.0 - alpha)
    grid_full = GridSpec(horizon, steps)
    dt = grid_full.dt

    rows = []
    for k, (a, b) in enumerate(interval_list):
        a, b = float(a), float(b)
        if not 0.0 <= a < b <= horizon:
            raise ParameterError(f"bad interval [{a}, {b}]")
        cells = int(round((b - a) / dt))
        if abs(a / dt - round(a / dt)) > 1e-9 or abs((b - a) / dt - cells) > 1e-9:
            raise ParameterError(f"interval [{a}, {b}] must align with the grid")
        scale = (b - a) ** (-kappa_used)
        grid_ref = GridSpec(1.0, cells)
        sample = np.empty(replicas)
        reference = np.empty(replicas)
        for r in range(replicas):
            bh = gen_fbm(grid_full, hurst, seed.child(2 * k).child(r))
            sample[r] = scale * norm_0_interval(bh, a, b, alpha) ** expo
            ref = gen_fbm(grid_ref, hurst, seed.child(2 * k + 1).child(r))
            reference[r] = norm_0_interval(ref, 0.0, 1.0, alpha) ** expo
        pval = float(stats.ks_2samp(sample, reference).pvalue)
        rows.append((a, b, cells, pval))
    return SelfSimReport(hurst, alpha, kappa, kappa_scale, replicas,
                         tuple(rows), thresholds.ks_pvalue_min)


# ---------------------------------------------------------------------------
# compound-Poisson product moment


@dataclass(frozen=True)
class JumpMomentReport:
    """Monte Carlo check of the product-of-jump-gains expectation.

    E[prod g(mark)^(4p) over jumps up to T] has the closed form
    exp(rate * T * (E[g(Y)^(4p)] - 1)) for a finite-activity train; the
    empirical mean must land within `se_multiplier` batch-means standard
    errors of it.
    """

    rate: float
    power: float
    horizon: float
    sample_size: int
    empirical: float
    std_error: float
    exact: float
    z_score: float
    threshold: float

    CSV_HEADER = "rate,power,horizon,replicas,empirical,std_error,exact,z"

    @property
    def passed(self) -> bool:
        return self.z_score <= self.threshold

    def lines(self) -> list:
        return ["suite: jump-product",
                f"rate: {_num(self.rate)}",
                f"gain exponent: {_num(self.power)}",
                f"replicas: {self.sample_size}",
                f"empirical: {_num(self.empirical)} +- {_num(self.std_error)}",
                f"exact: {_num(self.exact)}",
                f"z: {_num(self.z_score)} (allowed <= {_num(self.threshold)})",
                f"result: {'PASS' if self.passed else 'FAIL'}"]

    def csv_rows(self) -> list:
        fmt = CSV_FLOAT_FMT
        return [",".join([fmt % self.rate, fmt % self.power, fmt % self.horizon,
                          "%d" % self.sample_size, fmt % self.empirical,
                          fmt % self.std_error, fmt % self.exact,
                          fmt % self.z_score])]


def verify_jump_product_moment(rate: float, marks: MarkLaw, gain, p: float,
                               horizon: float, replicas: int, seed: Seed,
                               thresholds: Thresholds = DEFAULT_THRESHOLDS) -> JumpMomentReport:
    """Compare the empirical jump-gain product moment with its closed form.

    `gain` must accept an ndarray of marks; the exponent applied is 4p.
    An empty train contributes the empty product 1, which is also the
    closed form at rate 0.
    """
    if not (rate >= 0.0 and math.isfinite(rate)):
        raise ParameterError(f"rate must be finite and nonnegative, got {rate}")
    if replicas < 16:
        raise ParameterError(f"need at least 16 replicas, got {replicas}")
    power = 4.0 * float(p)
    prods = np.empty(replicas)
    for r in range(replicas):
        train = gen_jump_train(rate, marks, horizon,
                               seed.child(REPLICA_STREAM_BASE + r))
        if train.count:
            gains = np.asarray(gain(train.marks), dtype=float)
            prods[r] = float(np.prod(gains ** power))
        else:
            prods[r] = 1.0
    empirical = float(prods.mean())
    err = _batch_se(prods)
    mean_gain = marks.expect(lambda y: float(np.asarray(gain(y), dtype=float)) ** power)
    exact = math.exp(rate * horizon * (mean_gain - 1.0))
    if err > 0.0:
        z = abs(empirical - exact) / err
    else:
        z = 0.0 if empirical == exact else math.inf
    return JumpMomentReport(rate, power, horizon, replicas, empirical, err,
                            exact, z, thresholds.se_multiplier)
