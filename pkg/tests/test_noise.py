"""Driving-noise generators: distributional laws, determinism, CSV I/O."""

import io

import numpy as np
import pytest
from scipy import stats

from mfsde.errors import ParameterError
from mfsde.noise import (
    ALPHA_RANGE_MESSAGE,
    FracParams,
    GaussianMarks,
    GridSpec,
    JumpTrain,
    SamplePath,
    Seed,
    TwoPointMarks,
    UniformMarks,
    build_mark_law,
    gen_driving_triple,
    gen_fbm,
    gen_jump_train,
    gen_wiener,
)


def test_grid_spec_basics():
    g = GridSpec(2.0, 4)
    assert g.dt == 0.5
    assert np.array_equal(g.times, np.array([0.0, 0.5, 1.0, 1.5, 2.0]))
    assert np.all(np.diff(g.times) > 0)
    r = g.refine(4)
    assert r.steps == 16 and r.horizon == 2.0
    with pytest.raises(ParameterError):
        GridSpec(0.0, 4)
    with pytest.raises(ParameterError):
        GridSpec(1.0, 0)


def test_frac_params_defaults_and_ranges():
    p = FracParams(hurst=0.75)
    # default order sits at the midpoint of the admissible interval
    assert p.alpha == pytest.approx((1 - 0.75 + 0.5) / 2)
    assert 1 - 0.75 < p.beta < 1.0
    with pytest.raises(ParameterError):
        FracParams(hurst=0.5)
    with pytest.raises(ParameterError, match="alpha"):
        FracParams(hurst=0.75, alpha=0.6)
    with pytest.raises(ParameterError):
        FracParams(hurst=0.75, beta=0.1)
    assert "alpha" in ALPHA_RANGE_MESSAGE


def test_sample_path_csv_roundtrip():
    g = GridSpec(1.0, 8)
    p = gen_fbm(g, 0.7, Seed(3).child(1))
    buf = io.StringIO()
    p.to_csv(buf)
    buf.seek(0)
    q = SamplePath.from_csv(buf)
    assert np.array_equal(p.values, q.values)
    assert q.grid == g


def test_jump_train_invariants_and_csv():
    for s in range(20):
        train = gen_jump_train(4.0, TwoPointMarks(), 2.0, Seed(s).child(2))
        if train.count:
            assert np.all(np.diff(train.times) > 0)
            assert train.times[0] > 0.0 and train.times[-1] <= 2.0
    train = gen_jump_train(5.0, TwoPointMarks(), 2.0, Seed(11).child(2))
    buf = io.StringIO()
    train.to_csv(buf)
    buf.seek(0)
    back = JumpTrain.from_csv(buf, rate=5.0, horizon=2.0)
    assert np.array_equal(train.times, back.times)
    assert np.array_equal(train.marks, back.marks)


def test_seed_determinism_bytes():
    g = GridSpec(1.0, 32)
    for make in (lambda s: gen_wiener(g, s.child(0)),
                 lambda s: gen_fbm(g, 0.8, s.child(1))):
        a, b = io.StringIO(), io.StringIO()
        make(Seed(99)).to_csv(a)
        make(Seed(99)).to_csv(b)
        assert a.getvalue() == b.getvalue()
    t1 = gen_jump_train(2.0, TwoPointMarks(), 1.0, Seed(99).child(2))
    t2 = gen_jump_train(2.0, TwoPointMarks(), 1.0, Seed(99).child(2))
    assert np.array_equal(t1.times, t2.times) and np.array_equal(t1.marks, t2.marks)


def test_fbm_starts_at_zero():
    g = GridSpec(1.0, 16)
    for h in (0.55, 0.75, 0.9):
        for s in range(5):
            assert gen_fbm(g, h, Seed(s).child(1)).values[0] == 0.0


def test_fbm_half_is_brownian_increments():
    # H = 1/2: adjacent increments independent, variance dt
    g = GridSpec(1.0, 2)
    m = 10_000
    d = np.empty((m, 2))
    for r in range(m):
        d[r] = np.diff(gen_fbm(g, 0.5, Seed(1).child(3 + r).child(1)).values)
    corr = np.corrcoef(d[:, 0], d[:, 1])[0, 1]
    assert abs(corr) < 4.0 / np.sqrt(m)
    assert abs(d.var() / g.dt - 1.0) < 4.0 * np.sqrt(2.0 / (2 * m))


def test_fbm_cov_at_one_and_two():
    # Cov(B_1, B_2) = (1 + 2^(2H) - 1)/2 = sqrt(2) at H = 0.75
    g = GridSpec(2.0, 2)
    m = 100_000
    vals = np.empty((m, 2))
    for r in range(m):
        vals[r] = gen_fbm(g, 0.75, Seed(2).child(3 + r).child(1)).values[1:]
    c11, c22 = 1.0, 2.0 ** 1.5
    c12 = 0.5 * (1.0 + c22 - 1.0)
    emp = float(np.mean(vals[:, 0] * vals[:, 1]))
    se = np.sqrt((c12 ** 2 + c11 * c22) / m)
    assert abs(emp - np.sqrt(2.0)) < 4.0 * se


def test_fbm_half_matches_wiener_in_law():
    g = GridSpec(1.0, 16)
    m = 10_000
    a = np.array([gen_fbm(g, 0.5, Seed(1).child(3 + r).child(1)).terminal
                  for r in range(m)])
    b = np.array([gen_wiener(g, Seed(2).child(3 + r).child(0)).terminal
                  for r in range(m)])
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_fbm_parameter_errors_and_methods():
    g = GridSpec(1.0, 8)
    with pytest.raises(ParameterError):
        gen_fbm(g, 0.0, Seed(0))
    with pytest.raises(ParameterError):
        gen_fbm(g, 1.0, Seed(0))
    with pytest.raises(ParameterError):
        gen_fbm(g, 0.8, Seed(0), method="nope")
    a = gen_fbm(g, 0.8, Seed(5).child(1), method="cholesky")
    b = gen_fbm(g, 0.8, Seed(5).child(1), method="cholesky")
    assert np.array_equal(a.values, b.values)


def test_wiener_law():
    g = GridSpec(2.0, 4)
    m = 100_000
    vals = np.empty((m, 2))
    for r in range(m):
        w = gen_wiener(g, Seed(4).child(3 + r).child(0))
        assert w.values[0] == 0.0
        vals[r] = w.values[1], w.values[-1]  # W_0.5 and W_2
    var = float(np.mean(vals[:, 1] ** 2))
    assert abs(var - 2.0) < 4.0 * 2.0 * np.sqrt(2.0 / m)
    cov = float(np.mean(vals[:, 0] * vals[:, 1]))
    se = np.sqrt((0.5 ** 2 + 0.5 * 2.0) / m)
    assert abs(cov - 0.5) < 4.0 * se


def test_jump_train_law():
    assert gen_jump_train(0.0, TwoPointMarks(), 1.0, Seed(0).child(2)).count == 0
    m = 100_000
    counts = np.empty(m)
    for r in range(m):
        counts[r] = gen_jump_train(3.0, TwoPointMarks(), 2.0,
                                   Seed(6).child(3 + r).child(2)).count
    assert abs(counts.mean() - 6.0) < 4.0 * np.sqrt(6.0 / m)
    with pytest.raises(ParameterError):
        gen_jump_train(-1.0, TwoPointMarks(), 1.0, Seed(0))
    with pytest.raises(ParameterError):
        gen_jump_train(float("inf"), TwoPointMarks(), 1.0, Seed(0))


def test_interarrival_law():
    train = gen_jump_train(100.0, TwoPointMarks(), 100.0, Seed(8).child(2))
    gaps = np.diff(np.concatenate([[0.0], train.times]))
    assert len(gaps) > 9000
    assert stats.kstest(gaps, "expon", args=(0, 1 / 100.0)).pvalue > 0.01


def test_driving_triple_independence():
    g = GridSpec(1.0, 2)
    m = 10_000
    dw = np.empty((m, 2))
    dz = np.empty((m, 2))
    for r in range(m):
        w, z, _ = gen_driving_triple(g, 0.75, 0.0, TwoPointMarks(),
                                     Seed(10).child(3 + r))
        dw[r] = np.diff(w.values)
        dz[r] = np.diff(z.values)
    corr = np.corrcoef(dw.ravel(), dz.ravel())[0, 1]
    assert abs(corr) < 4.0 / np.sqrt(dw.size)


def test_driving_triple_contract():
    g = GridSpec(1.0, 16)
    w1, z1, t1 = gen_driving_triple(g, 0.75, 2.0, TwoPointMarks(), Seed(12))
    w2, z2, t2 = gen_driving_triple(g, 0.75, 2.0, TwoPointMarks(), Seed(12))
    assert np.array_equal(w1.values, w2.values)
    assert np.array_equal(z1.values, z2.values)
    assert np.array_equal(t1.times, t2.times)
    _, _, empty = gen_driving_triple(g, 0.75, 0.0, TwoPointMarks(), Seed(12))
    assert empty.count == 0
    with pytest.raises(ParameterError):
        gen_driving_triple(g, 0.75, 0.0, TwoPointMarks(), Seed(0),
                           dependence="entangled")


def test_driving_triple_coupled_mode_runs():
    g = GridSpec(1.0, 64)
    w, z, _ = gen_driving_triple(g, 0.75, 0.0, TwoPointMarks(), Seed(13),
                                 dependence="coupled")
    assert w.values[0] == 0.0 and z.values[0] == 0.0
    assert not np.array_equal(w.values, z.values)
    w2, z2, _ = gen_driving_triple(g, 0.75, 0.0, TwoPointMarks(), Seed(13),
                                   dependence="coupled")
    assert np.array_equal(w.values, w2.values) and np.array_equal(z.values, z2.values)


def test_mark_laws():
    tp = TwoPointMarks(low=-0.5, high=1.0, p_low=0.25)
    assert tp.expect(lambda y: y) == pytest.approx(0.25 * -0.5 + 0.75 * 1.0)
    gm = GaussianMarks(mean=0.3, std=0.5)
    assert gm.expect(lambda y: y ** 2) == pytest.approx(0.5 ** 2 + 0.3 ** 2, rel=1e-6)
    um = UniformMarks(-1.0, 3.0)
    assert um.expect(lambda y: y) == pytest.approx(1.0, rel=1e-8)
    assert isinstance(build_mark_law("two_point", low=-1.0, high=1.0), TwoPointMarks)
    with pytest.raises(ParameterError):
        build_mark_law("cauchy")
    with pytest.raises(ParameterError):
        build_mark_law("two_point", widthh=1.0)
    with pytest.raises(ParameterError):
        UniformMarks(2.0, -2.0)
