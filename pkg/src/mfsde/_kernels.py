"""Product-integration primitives for weakly singular power kernels on
uniform grids.

Every routine integrates the piecewise-linear interpolant of node data in
closed form against a power kernel, so the rules are exact for piecewise-
linear inputs.  Absolute-value variants split cells at sign changes of the
interpolant, keeping them exact for |interpolant| as well.

Conventions: `values` has n+1 nodes with spacing h.  "Right-singular" means
the kernel blows up at the evaluation node t_i (kernel (t_i - u)^(-1-alpha),
0 < alpha < 1); "left-singular" means it blows up at the anchor node t_i
(kernel (z - t_i)^(alpha - 2)).  Both are integrable against interpolants
vanishing at the singular point.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve


def _power_tables(n: int, alpha: float, h: float):
    """Cell integrals of w^(-1-alpha) and w^(-alpha) at integer lags.

    G1[k] = integral of w^(-1-alpha) over [(k-1)h, kh], G2[k] the same for
    w^(-alpha).  G1[1] is set to 0: its coefficient vanishes identically for
    interpolants that are zero at the singular node, which is the only case
    in which the first cell is touched.
    """
    k = np.arange(n + 1, dtype=float)
    with np.errstate(divide="ignore"):
        pow_neg = k**-alpha
    pow_pos = k ** (1.0 - alpha)
    g1 = np.zeros(n + 1)
    if n >= 2:
        g1[2:] = (pow_neg[1:-1] - pow_neg[2:]) * h**-alpha / alpha
    g2 = np.zeros(n + 1)
    g2[1:] = (pow_pos[1:] - pow_pos[:-1]) * h ** (1.0 - alpha) / (1.0 - alpha)
    return g1, g2, pow_neg, pow_pos


def increment_kernel_sums(values: np.ndarray, alpha: float, h: float) -> np.ndarray:
    """I[i] = integral over [t_0, t_i] of (f(t_i) - f(u)) (t_i - u)^(-1-alpha) du
    for every node i, with f the piecewise-linear interpolant of `values`.

    Uniform spacing makes the cell sums convolutions, evaluated by FFT.
    """
    f = np.asarray(values, dtype=float)
    n = len(f) - 1
    out = np.zeros(n + 1)
    if n == 0:
        return out
    g1, g2, _, _ = _power_tables(n, alpha, h)
    df = np.diff(f)
    kg1 = np.arange(n + 1, dtype=float) * g1
    cg1 = np.cumsum(g1)
    # cell j at lag k = i - j contributes c_j G1[k] + slope_j G2[k] with
    # slope_j = df[j]/h and c_j = f_i - f[j+1] - df[j] (k - 1)
    conv_f_g1 = fftconvolve(f[1:], g1)[: n + 1]        # index i -> sum f[j+1] G1[i-j]
    conv_df_g1 = fftconvolve(df, g1)[: n + 1]
    conv_df_kg1 = fftconvolve(df, kg1)[: n + 1]
    conv_df_g2 = fftconvolve(df, g2)[: n + 1]
    out = f * cg1 - conv_f_g1 - conv_df_kg1 + conv_df_g1 + conv_df_g2 / h
    out[0] = 0.0
    return out


def _abs_right_singular_total(
    d: np.ndarray, i: int, alpha: float, h: float, g1, g2, pow_neg, pow_pos
) -> float:
    """Integral over [t_0, t_i] of |d_lin(u)| (t_i - u)^(-1-alpha) du where
    d_lin interpolates d[0..i] and d[i] == 0."""
    if i == 0:
        return 0.0
    v = np.abs(d[: i + 1])
    vj = v[:i]
    vj1 = v[1:]
    slope = (vj - vj1) / h              # dv/dw, w = t_i - u
    g1r = g1[1 : i + 1][::-1]           # lag k = i - j aligned with j
    g2r = g2[1 : i + 1][::-1]
    w_lo = np.arange(i, dtype=float)[::-1] * h
    c = vj1 - slope * w_lo
    total = float(np.dot(c, g1r) + np.dot(slope, g2r))
    cross = np.nonzero(d[:i] * d[1 : i + 1] < 0.0)[0]
    if cross.size:
        j = cross
        k_lag = (i - j).astype(float)
        w_hi_c = k_lag * h
        w_lo_c = (k_lag - 1.0) * h
        w_star = w_hi_c - h * vj[j] / (vj[j] + vj1[j])
        hi_neg = pow_neg[i - j] * h**-alpha
        hi_pos = pow_pos[i - j] * h ** (1.0 - alpha)
        lo_neg = pow_neg[i - j - 1] * h**-alpha
        lo_pos = pow_pos[i - j - 1] * h ** (1.0 - alpha)
        st_neg = w_star**-alpha
        st_pos = w_star ** (1.0 - alpha)
        sub_hi = vj[j] / (w_hi_c - w_star) * (
            (hi_pos - st_pos) / (1.0 - alpha) - w_star * (st_neg - hi_neg) / alpha
        )
        sub_lo = vj1[j] / (w_star - w_lo_c) * (
            w_star * (lo_neg - st_neg) / alpha - (st_pos - lo_pos) / (1.0 - alpha)
        )
        base = c[j] * g1r[j] + slope[j] * g2r[j]
        total += float(np.sum(sub_hi + sub_lo - base))
    return total


def abs_increment_kernel(values: np.ndarray, alpha: float, h: float, at: int) -> float:
    """Integral over [t_0, t_at] of |f(t_at) - f(u)| (t_at - u)^(-1-alpha) du."""
    f = np.asarray(values, dtype=float)
    g1, g2, pow_neg, pow_pos = _power_tables(at, alpha, h)
    d = f[at] - f[: at + 1]
    return _abs_right_singular_total(d, at, alpha, h, g1, g2, pow_neg, pow_pos)


def abs_increment_kernel_profile(values: np.ndarray, alpha: float, h: float) -> np.ndarray:
    """abs_increment_kernel for every node, sharing the power tables."""
    f = np.asarray(values, dtype=float)
    n = len(f) - 1
    out = np.zeros(n + 1)
    if n == 0:
        return out
    g1, g2, pow_neg, pow_pos = _power_tables(n, alpha, h)
    for i in range(1, n + 1):
        d = f[i] - f[: i + 1]
        out[i] = _abs_right_singular_total(d, i, alpha, h, g1, g2, pow_neg, pow_pos)
    return out


def _left_power_tables(m: int, alpha: float, h: float):
    """Cell integrals of w^(alpha-2) and w^(alpha-1) at integer lags.

    Q1[k] covers [(k-1)h, kh] for w^(alpha-2); Q1[1] is set to 0 because its
    coefficient vanishes for interpolants that are zero at the singularity.
    """
    k = np.arange(m + 1, dtype=float)
    with np.errstate(divide="ignore"):
        pow_m1 = k ** (alpha - 1.0)
    pow_a = k**alpha
    q1 = np.zeros(m + 1)
    if m >= 2:
        q1[2:] = (pow_m1[1:-1] - pow_m1[2:]) * h ** (alpha - 1.0) / (1.0 - alpha)
    q2 = np.zeros(m + 1)
    q2[1:] = (pow_a[1:] - pow_a[:-1]) * h**alpha / alpha
    return q1, q2, pow_m1, pow_a


def abs_left_singular_cells(
    values: np.ndarray, start: int, alpha: float, h: float, tables=None
) -> np.ndarray:
    """Per-cell integrals of |f(t_start) - f(z)| (z - t_start)^(alpha-2) dz.

    Entry k-1 covers [t_(start+k-1), t_(start+k)]; cumulative sums give the
    integral up to any node right of `start`.
    """
    f = np.asarray(values, dtype=float)
    n = len(f) - 1
    m = n - start
    if m <= 0:
        return np.zeros(0)
    q1, q2, pow_m1, pow_a = tables if tables is not None else _left_power_tables(m, alpha, h)
    d = f[start:] - f[start]
    v = np.abs(d)
    v_lo = v[:-1]                       # node start+k-1, at w = (k-1)h
    v_hi = v[1:]                        # node start+k, at w = kh
    slope = (v_hi - v_lo) / h
    w_lo = np.arange(m, dtype=float) * h
    c = v_lo - slope * w_lo
    cells = c * q1[1 : m + 1] + slope * q2[1 : m + 1]
    cross = np.nonzero(d[:-1] * d[1:] < 0.0)[0]
    if cross.size:
        k = cross + 1.0                 # first cell (k=1) never crosses: d[0] == 0
        w_hi_c = k * h
        w_lo_c = (k - 1.0) * h
        w_star = w_lo_c + h * v_lo[cross] / (v_lo[cross] + v_hi[cross])
        hi_m1 = pow_m1[cross + 1] * h ** (alpha - 1.0)
        hi_a = pow_a[cross + 1] * h**alpha
        lo_m1 = pow_m1[cross] * h ** (alpha - 1.0)
        lo_a = pow_a[cross] * h**alpha
        st_m1 = w_star ** (alpha - 1.0)
        st_a = w_star**alpha
        sub_lo = v_lo[cross] / (w_star - w_lo_c) * (
            w_star * (lo_m1 - st_m1) / (1.0 - alpha) - (st_a - lo_a) / alpha
        )
        sub_hi = v_hi[cross] / (w_hi_c - w_star) * (
            (hi_a - st_a) / alpha - w_star * (st_m1 - hi_m1) / (1.0 - alpha)
        )
        cells[cross] = sub_lo + sub_hi
    return cells


def weighted_linear_integral(psi: np.ndarray, alpha: float, h: float) -> float:
    """Integral of y^(-alpha) psi_lin(y) over [0, m h], psi sampled at y = j h."""
    psi = np.asarray(psi, dtype=float)
    m = len(psi) - 1
    j = np.arange(m + 1, dtype=float)
    y_lo = j[:-1] * h
    p1 = (j * h) ** (1.0 - alpha)
    p2 = (j * h) ** (2.0 - alpha)
    r1 = (p1[1:] - p1[:-1]) / (1.0 - alpha)
    r2 = (p2[1:] - p2[:-1]) / (2.0 - alpha) - y_lo * r1
    slope = np.diff(psi) / h
    return float(np.dot(psi[:-1], r1) + np.dot(slope, r2))


def weighted_abs_integral(values: np.ndarray, alpha: float, h: float) -> float:
    """Integral of y^(-alpha) |f_lin(y)| over [0, m h], exact for the
    piecewise-linear interpolant of `values` (cells split at sign changes)."""
    f = np.asarray(values, dtype=float)
    m = len(f) - 1
    v = np.abs(f)
    j = np.arange(m + 1, dtype=float)
    y = j * h
    p1 = y ** (1.0 - alpha)
    p2 = y ** (2.0 - alpha)
    r1 = (p1[1:] - p1[:-1]) / (1.0 - alpha)
    base_slope = np.diff(v) / h
    r2 = (p2[1:] - p2[:-1]) / (2.0 - alpha) - y[:-1] * r1
    total = float(np.dot(v[:-1], r1) + np.dot(base_slope, r2))
    cross = np.nonzero(f[:-1] * f[1:] < 0.0)[0]
    if cross.size:
        y_lo = y[cross]
        y_hi = y[cross + 1]
        y_star = y_lo + h * v[cross] / (v[cross] + v[cross + 1])
        st1 = y_star ** (1.0 - alpha)
        st2 = y_star ** (2.0 - alpha)

        def piece(vp, vq, yp, yq, p1p, p1q, p2p, p2q):
            # linear v with v(yp)=vp, v(yq)=vq against y^(-alpha) on [yp, yq]
            slope = (vq - vp) / (yq - yp)
            c = vp - slope * yp
            i1 = (p1q - p1p) / (1.0 - alpha)
            i2 = (p2q - p2p) / (2.0 - alpha)
            return c * i1 + slope * i2

        sub = piece(v[cross], 0.0, y_lo, y_star, p1[cross], st1, p2[cross], st2)
        sub += piece(0.0, v[cross + 1], y_star, y_hi, st1, p1[cross + 1], st2, p2[cross + 1])
        base = v[cross] * r1[cross] + base_slope[cross] * r2[cross]
        total += float(np.sum(sub - base))
    return total
