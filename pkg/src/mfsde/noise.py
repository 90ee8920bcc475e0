"""Driving noise: Wiener paths, exact fractional Brownian motion, and
finite-activity compound-Poisson jump trains.

Every generator is a pure function of (parameters, seed).  Substreams are
derived from the root seed by counter-based splitting (Philox keyed through
a SeedSequence spawn path), with fixed stream indices so any component of a
run can be regenerated in isolation:

    0  Wiener path
    1  fractional Brownian motion
    2  jump train
    3+ ensemble replicas (replica r uses stream 3 + r, then 0/1/2 below it)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.linalg import toeplitz

from .errors import EmbeddingError, ParameterError

WIENER_STREAM = 0
FBM_STREAM = 1
JUMP_STREAM = 2
REPLICA_STREAM_BASE = 3

# 17 significant digits round-trips IEEE doubles through text.
CSV_FLOAT_FMT = "%.17g"

ALPHA_RANGE_MESSAGE = "alpha must lie in (1-H, 1/2)"


@dataclass(frozen=True)
class Seed:
    """Root entropy plus a stream path for derived substreams.

    Identical (root, stream) always reproduces identical draws bit for bit;
    distinct stream paths give independent streams.
    """

    root: int
    stream: tuple[int, ...] = ()

    def child(self, index: int) -> "Seed":
        return Seed(self.root, self.stream + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.root, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, horizon] with `steps` cells."""

    horizon: float
    steps: int

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ParameterError(f"horizon must be positive and finite, got {self.horizon}")
        if self.steps < 1:
            raise ParameterError(f"steps must be >= 1, got {self.steps}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.steps + 1)

    def refine(self, factor: int) -> "GridSpec":
        return GridSpec(self.horizon, self.steps * int(factor))


@dataclass(frozen=True)
class FracParams:
    """Roughness/order bundle: Hurst index, fractional order, time exponent.

    The admissible chain is 1/2 < hurst < 1, 1 - hurst < alpha < 1/2 and
    beta in (1 - hurst, 1).  Omitted alpha/beta default to the midpoint of
    their ranges.
    """

    hurst: float
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if not 0.5 < self.hurst < 1.0:
            raise ParameterError(f"hurst must lie in (1/2, 1), got {self.hurst}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 0.5 * ((1.0 - self.hurst) + 0.5))
        if not (1.0 - self.hurst) < self.alpha < 0.5:
            raise ParameterError(ALPHA_RANGE_MESSAGE)
        if self.beta is None:
            object.__setattr__(self, "beta", 0.5 * ((1.0 - self.hurst) + 1.0))
        if not (1.0 - self.hurst) < self.beta < 1.0:
            raise ParameterError(f"beta must lie in (1-H, 1), got {self.beta}")


@dataclass
class SamplePath:
    """Values on the nodes of a uniform grid; cadlag paths store right limits."""

    grid: GridSpec
    values: np.ndarray
    kind: str = "continuous"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.steps + 1,):
            raise ParameterError(
                f"path needs {self.grid.steps + 1} values, got shape {self.values.shape}"
            )

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def terminal(self) -> float:
        return float(self.values[-1])

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def to_csv(self, file) -> None:
        data = np.column_stack([self.times, self.values])
        np.savetxt(file, data, fmt=CSV_FLOAT_FMT, delimiter=",", header="t,value", comments="")

    @classmethod
    def from_csv(cls, file, kind: str = "continuous") -> "SamplePath":
        data = np.loadtxt(file, delimiter=",", skiprows=1, ndmin=2)
        t = data[:, 0]
        grid = GridSpec(float(t[-1]), len(t) - 1)
        if not np.allclose(t, grid.times, rtol=0.0, atol=1e-9 * max(1.0, abs(t[-1]))):
            raise ParameterError("CSV nodes are not a uniform grid starting at 0")
        return cls(grid, data[:, 1], kind=kind)


@dataclass
class JumpTrain:
    """Jump times and marks of a finite-activity train on (0, horizon]."""

    times: np.ndarray
    marks: np.ndarray
    rate: float
    horizon: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.marks = np.asarray(self.marks, dtype=float)
        if self.times.shape != self.marks.shape:
            raise ParameterError("times and marks must have equal length")
        if self.times.size and (
            np.any(self.times <= 0.0)
            or np.any(self.times > self.horizon)
            or np.any(np.diff(self.times) <= 0.0)
        ):
            raise ParameterError("jump times must be strictly increasing within (0, horizon]")
        if not (self.rate >= 0.0 and math.isfinite(self.rate)):
            raise ParameterError(f"rate must be finite and nonnegative, got {self.rate}")

    @property
    def count(self) -> int:
        return int(self.times.size)

    def to_csv(self, file) -> None:
        data = np.column_stack([self.times, self.marks]) if self.count else np.empty((0, 2))
        np.savetxt(file, data, fmt=CSV_FLOAT_FMT, delimiter=",", header="tau,mark", comments="")

    @classmethod
    def from_csv(cls, file, rate: float, horizon: float) -> "JumpTrain":
        data = np.loadtxt(file, delimiter=",", skiprows=1, ndmin=2)
        if data.size == 0:
            return cls(np.empty(0), np.empty(0), rate, horizon)
        return cls(data[:, 0], data[:, 1], rate, horizon)


# ---------------------------------------------------------------------------
# mark laws


class MarkLaw:
    """Distribution of jump marks; subclasses define sampling and expectations."""

    name = "abstract"

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def expect(self, fn) -> float:
        """E[fn(Y)] under the mark law."""
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianMarks(MarkLaw):
    mean: float = 0.0
    std: float = 1.0
    name = "gaussian"

    def __post_init__(self):
        if self.std <= 0:
            raise ParameterError("mark std must be positive")

    def sample(self, rng, size):
        return rng.normal(self.mean, self.std, size)

    def expect(self, fn):
        lo, hi = self.mean - 12 * self.std, self.mean + 12 * self.std
        dens = lambda y: math.exp(-0.5 * ((y - self.mean) / self.std) ** 2) / (
            self.std * math.sqrt(2 * math.pi)
        )
        val, _ = integrate.quad(lambda y: fn(y) * dens(y), lo, hi, limit=200)
        return val


@dataclass(frozen=True)
class TwoPointMarks(MarkLaw):
    """Mass p_low at `low`, 1 - p_low at `high`."""

    low: float = -1.0
    high: float = 1.0
    p_low: float = 0.5
    name = "two_point"

    def __post_init__(self):
        if not 0.0 <= self.p_low <= 1.0:
            raise ParameterError("p_low must lie in [0, 1]")

    def sample(self, rng, size):
        return np.where(rng.random(size) < self.p_low, self.low, self.high)

    def expect(self, fn):
        return self.p_low * fn(self.low) + (1.0 - self.p_low) * fn(self.high)


@dataclass(frozen=True)
class UniformMarks(MarkLaw):
    low: float = -1.0
    high: float = 1.0
    name = "uniform"

    def __post_init__(self):
        if not self.high > self.low:
            raise ParameterError("uniform marks need high > low")

    def sample(self, rng, size):
        return rng.uniform(self.low, self.high, size)

    def expect(self, fn):
        width = self.high - self.low
        val, _ = integrate.quad(lambda y: fn(y) / width, self.low, self.high, limit=200)
        return val


MARK_LAWS = {
    "gaussian": GaussianMarks,
    "two_point": TwoPointMarks,
    "uniform": UniformMarks,
}


def build_mark_law(name: str, **params) -> MarkLaw:
    if name not in MARK_LAWS:
        raise ParameterError(f"unknown mark law {name!r}, expected one of {sorted(MARK_LAWS)}")
    try:
        return MARK_LAWS[name](**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for mark law {name!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# fractional Brownian motion


def _fgn_autocov(n: int, hurst: float) -> np.ndarray:
    """Autocovariance of unit-spacing fractional Gaussian noise at lags 0..n."""
    k = np.arange(n + 1, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * ((k + 1.0) ** h2 - 2.0 * k**h2 + np.abs(k - 1.0) ** h2)


def _circulant_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    # embedding row [g0 .. gn, g(n-1) .. g1], length 2n
    first_row = np.concatenate([gamma, gamma[-2:0:-1]])
    return np.fft.fft(first_row).real


def _hermitian_noise(rng: np.random.Generator, n: int):
    """Fixed-order Gaussian draws for one spectral synthesis of length 2n."""
    v0 = rng.standard_normal()
    vn = rng.standard_normal()
    vre = rng.standard_normal(n - 1) if n > 1 else np.empty(0)
    vim = rng.standard_normal(n - 1) if n > 1 else np.empty(0)
    return v0, vn, vre, vim


def _spectral_transform(noise, eigs: np.ndarray, n: int) -> np.ndarray:
    """Turn Hermitian spectral noise into n stationary Gaussian increments."""
    v0, vn, vre, vim = noise
    m = 2 * n
    lam = np.clip(eigs, 0.0, None)
    w = np.zeros(m, dtype=complex)
    w[0] = math.sqrt(lam[0] / m) * v0
    w[n] = math.sqrt(lam[n] / m) * vn
    if n > 1:
        amp = np.sqrt(lam[1:n] / (2.0 * m))
        w[1:n] = amp * (vre + 1j * vim)
        w[n + 1 :] = np.conj(w[1:n][::-1])
    return np.fft.fft(w).real[:n]


_EMBED_TOL = 1e-12


def _embedding_ok(eigs: np.ndarray) -> bool:
    return eigs.min() >= -_EMBED_TOL * max(float(eigs.max()), 1.0)


def _fgn_cholesky(rng: np.random.Generator, gamma: np.ndarray, n: int) -> np.ndarray:
    cov = toeplitz(gamma[:n])
    chol = np.linalg.cholesky(cov)
    return chol @ rng.standard_normal(n)


def gen_fbm(grid: GridSpec, hurst: float, seed: Seed, method: str = "auto") -> SamplePath:
    """Exact fractional Brownian motion on the grid, started at 0.

    Synthesis is circulant embedding of the increment covariance; if the
    embedding is not nonnegative definite the generator falls back to a dense
    Cholesky factorization (method="auto"), or fails loudly (method="circulant").
    """
    if not 0.0 < hurst < 1.0:
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    if method not in ("auto", "circulant", "cholesky"):
        raise ParameterError(f"unknown method {method!r}")
    n = grid.steps
    rng = seed.generator()
    gamma = _fgn_autocov(n, hurst)
    use_cholesky = method == "cholesky"
    if not use_cholesky:
        eigs = _circulant_eigenvalues(gamma)
        if not _embedding_ok(eigs):
            if method == "circulant":
                raise EmbeddingError(
                    "circulant embedding is not nonnegative definite "
                    f"(min eigenvalue {eigs.min():.3e}) and no fallback was allowed"
                )
            use_cholesky = True
    if use_cholesky:
        fgn = _fgn_cholesky(rng, gamma, n)
    else:
        fgn = _spectral_transform(_hermitian_noise(rng, n), eigs, n)
    incr = fgn * grid.dt**hurst
    values = np.concatenate([[0.0], np.cumsum(incr)])
    return SamplePath(grid, values)


def gen_wiener(grid: GridSpec, seed: Seed) -> SamplePath:
    """Standard Wiener path on the grid, started at 0."""
    rng = seed.generator()
    incr = rng.standard_normal(grid.steps) * math.sqrt(grid.dt)
    values = np.concatenate([[0.0], np.cumsum(incr)])
    return SamplePath(grid, values)


def gen_jump_train(rate: float, marks: MarkLaw, horizon: float, seed: Seed) -> JumpTrain:
    """Compound-Poisson jump train: Poisson(rate * horizon) many jumps, uniform
    times on (0, horizon), i.i.d. marks."""
    if not (math.isfinite(rate) and rate >= 0.0):
        raise ParameterError(f"rate must be finite and nonnegative, got {rate}")
    if horizon <= 0:
        raise ParameterError(f"horizon must be positive, got {horizon}")
    rng = seed.generator()
    count = int(rng.poisson(rate * horizon))
    times = np.sort(rng.uniform(0.0, horizon, size=count))
    # ties and exact zeros have probability zero; redraw defensively
    while count and (times[0] <= 0.0 or np.any(np.diff(times) <= 0.0)):
        times = np.sort(rng.uniform(0.0, horizon, size=count))
    mark_values = marks.sample(rng, count)
    return JumpTrain(times, mark_values, float(rate), float(horizon))


def gen_driving_triple(
    grid: GridSpec,
    hurst: float,
    rate: float,
    marks: MarkLaw,
    seed: Seed,
    dependence: str = "independent",
):
    """(Wiener, fBm, jump train) from substreams 0/1/2 of `seed`.

    dependence="independent" (default) draws the three components from
    disjoint substreams.  dependence="coupled" is experimental: the Wiener
    and fBm paths are built from one shared spectral draw (stream 1), which
    keeps both marginal laws exact but makes them dependent.  The jump train
    is always independent.
    """
    if dependence not in ("independent", "coupled"):
        raise ParameterError(f"unknown dependence model {dependence!r}")
    train = gen_jump_train(rate, marks, grid.horizon, seed.child(JUMP_STREAM))
    if dependence == "independent":
        wiener = gen_wiener(grid, seed.child(WIENER_STREAM))
        fbm = gen_fbm(grid, hurst, seed.child(FBM_STREAM))
        return wiener, fbm, train
    if not 0.0 < hurst < 1.0:
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    n = grid.steps
    rng = seed.child(FBM_STREAM).generator()
    gamma = _fgn_autocov(n, hurst)
    eigs = _circulant_eigenvalues(gamma)
    if _embedding_ok(eigs):
        noise = _hermitian_noise(rng, n)
        fgn = _spectral_transform(noise, eigs, n)
        white = _spectral_transform(noise, np.ones(2 * n), n)
    else:
        shared = rng.standard_normal(n)
        cov = toeplitz(gamma[:n])
        fgn = np.linalg.cholesky(cov) @ shared
        white = shared
    wiener_values = np.concatenate([[0.0], np.cumsum(white * math.sqrt(grid.dt))])
    fbm_values = np.concatenate([[0.0], np.cumsum(fgn * grid.dt**hurst)])
    return (
        SamplePath(grid, wiener_values),
        SamplePath(grid, fbm_values),
        train,
    )
