"""Pure-numpy kernels. Same signatures and semantics as the numba set."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def fft_rows(x, twiddle, rev):
    """Radix-2 decimation-in-time FFT of every row of ``x``, scaled by 1/N."""
    n = x.shape[1]
    y = x[:, rev]
    size = 2
    while size <= n:
        half = size // 2
        w = twiddle[:: n // size][:half]
        blocks = y.reshape(y.shape[0], n // size, size)
        u = blocks[:, :, :half]
        t = w * blocks[:, :, half:]
        y = np.concatenate((u + t, u - t), axis=2).reshape(y.shape[0], n)
        size *= 2
    return y * (1.0 / n)


def tone_sum(en, ek, em, amps):
    out = np.zeros((en.shape[1], ek.shape[1], em.shape[1]), dtype=np.complex128)
    for p in range(amps.shape[0]):
        out += amps[p] * (en[p][:, None, None] * ek[p][None, :, None] * em[p][None, None, :])
    return out


def doppler_argmax(z, active):
    """Per-cell argmax of |z| over the last axis; inactive cells are not evaluated."""
    k = np.zeros(z.shape[:2], dtype=np.int64)
    sel = z[active]
    mag = np.hypot(sel.real.astype(np.float64), sel.imag.astype(np.float64))
    k[active] = np.argmax(mag, axis=1)
    return k


def local_stats(v, radius, active):
    # Window offsets are visited in row-major order and accumulated from 0.0,
    # which is the summation order of the loop kernel. Deviations are taken
    # about the centre cell so a constant window gives exactly zero variance.
    r_n, a_n = v.shape
    k = 2 * radius + 1
    pad = np.pad(v, radius)
    valid = np.pad(np.ones(v.shape), radius)
    cnt = np.zeros(v.shape)
    s = np.zeros(v.shape)
    for i in range(k):
        for j in range(k):
            w = valid[i : i + r_n, j : j + a_n]
            cnt += w
            s += (pad[i : i + r_n, j : j + a_n] - v) * w
    off = s / cnt
    q = np.zeros(v.shape)
    for i in range(k):
        for j in range(k):
            e = ((pad[i : i + r_n, j : j + a_n] - v) - off) * valid[i : i + r_n, j : j + a_n]
            q += e * e
    mu = v + off
    sigma2 = q / cnt
    mu[~active] = 0.0
    sigma2[~active] = 0.0
    return mu, sigma2


def _strided_sum(x, axis, k, groups):
    """Sum of k consecutive entries along ``axis``, accumulated left to right."""
    out = np.zeros(x.shape[:axis] + (groups,) + x.shape[axis + 1 :])
    idx = [slice(None)] * x.ndim
    for off in range(k):
        idx[axis] = slice(off, groups * k, k)
        out += x[tuple(idx)]
    return out


def avg_pool3(x, kr, ka, kd):
    c, r, a, d = x.shape
    gr, ga, gd = r // kr, a // ka, d // kd
    x = x[:, : gr * kr, : ga * ka, : gd * kd]
    s = _strided_sum(_strided_sum(_strided_sum(x, 3, kd, gd), 2, ka, ga), 1, kr, gr)
    return s / float(kr * ka * kd)


def lerp_rows(x, lo, hi, t):
    """Linear interpolation along axis 0 of a 2D array."""
    a = x[lo]
    return a + t[:, None] * (x[hi] - a)


def ca_cfar(power, guard, train, p_fa):
    # Ring cells are accumulated in row-major offset order, as in the loop
    # kernel; cells outside the map contribute nothing.
    h, w = power.shape
    outer = guard + train
    size = 2 * outer + 1
    pad = np.pad(power, outer)
    inside = np.pad(np.ones((h, w)), outer)
    sums = np.zeros((h, w))
    n = np.zeros((h, w), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            if abs(i - outer) <= guard and abs(j - outer) <= guard:
                continue
            m = inside[i : i + h, j : j + w]
            sums += pad[i : i + h, j : j + w] * m
            n += m.astype(np.int64)
    alpha = np.zeros((h, w))
    for cnt in np.unique(n):
        c = int(cnt)
        alpha[n == cnt] = c * (p_fa ** (-1.0 / c) - 1.0)
    return power > alpha * (sums / n)


def erode3(b):
    pad = np.pad(b, 1, constant_values=False)
    return sliding_window_view(pad, (3, 3)).all(axis=(2, 3))


def dilate3(b):
    pad = np.pad(b, 1, constant_values=False)
    return sliding_window_view(pad, (3, 3)).any(axis=(2, 3))
