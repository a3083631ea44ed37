"""numba kernels. Loop forms of the functions in ``_numpy``."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def fft_rows(x, twiddle, rev):
    b_rows, n = x.shape
    y = np.empty_like(x)
    for b in range(b_rows):
        for i in range(n):
            y[b, i] = x[b, rev[i]]
    size = 2
    while size <= n:
        half = size // 2
        step = n // size
        for b in range(b_rows):
            for start in range(0, n, size):
                for k in range(half):
                    w = twiddle[k * step]
                    u = y[b, start + k]
                    t = w * y[b, start + k + half]
                    y[b, start + k] = u + t
                    y[b, start + k + half] = u - t
        size *= 2
    scale = 1.0 / n
    for b in range(b_rows):
        for i in range(n):
            y[b, i] = y[b, i] * scale
    return y


@njit(cache=True)
def tone_sum(en, ek, em, amps):
    n_s = en.shape[1]
    n_d = ek.shape[1]
    n_a = em.shape[1]
    out = np.zeros((n_s, n_d, n_a), dtype=np.complex128)
    for p in range(amps.shape[0]):
        a = amps[p]
        for n in range(n_s):
            an = a * en[p, n]
            for k in range(n_d):
                ank = an * ek[p, k]
                for m in range(n_a):
                    out[n, k, m] += ank * em[p, m]
    return out


@njit(cache=True)
def doppler_argmax(z, active):
    r_n, a_n, d_n = z.shape
    k = np.zeros((r_n, a_n), dtype=np.int64)
    for r in range(r_n):
        for a in range(a_n):
            if not active[r, a]:
                continue
            best = 0
            bv = -1.0
            for d in range(d_n):
                c = z[r, a, d]
                m = math.hypot(np.float64(c.real), np.float64(c.imag))
                if m > bv:
                    bv = m
                    best = d
            k[r, a] = best
    return k


@njit(cache=True)
def local_stats(v, radius, active):
    r_n, a_n = v.shape
    mu = np.zeros((r_n, a_n))
    sigma2 = np.zeros((r_n, a_n))
    for r in range(r_n):
        r0 = max(r - radius, 0)
        r1 = min(r + radius, r_n - 1)
        for a in range(a_n):
            if not active[r, a]:
                continue
            a0 = max(a - radius, 0)
            a1 = min(a + radius, a_n - 1)
            cnt = (r1 - r0 + 1) * (a1 - a0 + 1)
            c = v[r, a]
            s = 0.0
            for i in range(r0, r1 + 1):
                for j in range(a0, a1 + 1):
                    s += v[i, j] - c
            m = s / cnt
            q = 0.0
            for i in range(r0, r1 + 1):
                for j in range(a0, a1 + 1):
                    e = (v[i, j] - c) - m
                    q += e * e
            mu[r, a] = c + m
            sigma2[r, a] = q / cnt
    return mu, sigma2


@njit(cache=True)
def avg_pool3(x, kr, ka, kd):
    # Separable block sums (Doppler, then angle, then range), each summed
    # left to right from 0.0. The numpy version uses the same order.
    c_n, r_n, a_n, d_n = x.shape
    gr, ga, gd = r_n // kr, a_n // ka, d_n // kd
    t1 = np.zeros((c_n, gr * kr, ga * ka, gd))
    for c in range(c_n):
        for r in range(gr * kr):
            for a in range(ga * ka):
                for k in range(gd):
                    s = 0.0
                    for kk in range(k * kd, (k + 1) * kd):
                        s += x[c, r, a, kk]
                    t1[c, r, a, k] = s
    t2 = np.zeros((c_n, gr * kr, ga, gd))
    for c in range(c_n):
        for r in range(gr * kr):
            for j in range(ga):
                for k in range(gd):
                    s = 0.0
                    for jj in range(j * ka, (j + 1) * ka):
                        s += t1[c, r, jj, k]
                    t2[c, r, j, k] = s
    out = np.zeros((c_n, gr, ga, gd))
    norm = float(kr * ka * kd)
    for c in range(c_n):
        for i in range(gr):
            for j in range(ga):
                for k in range(gd):
                    s = 0.0
                    for ii in range(i * kr, (i + 1) * kr):
                        s += t2[c, ii, j, k]
                    out[c, i, j, k] = s / norm
    return out


@njit(cache=True)
def lerp_rows(x, lo, hi, t):
    m = lo.shape[0]
    cols = x.shape[1]
    out = np.empty((m, cols))
    for i in range(m):
        for j in range(cols):
            a = x[lo[i], j]
            out[i, j] = a + t[i] * (x[hi[i], j] - a)
    return out


@njit(cache=True)
def ca_cfar(power, guard, train, p_fa):
    h, w = power.shape
    outer = guard + train
    det = np.zeros((h, w), dtype=np.bool_)
    for r in range(h):
        for c in range(w):
            s = 0.0
            n = 0
            for i in range(max(r - outer, 0), min(r + outer, h - 1) + 1):
                for j in range(max(c - outer, 0), min(c + outer, w - 1) + 1):
                    if abs(i - r) <= guard and abs(j - c) <= guard:
                        continue
                    s += power[i, j]
                    n += 1
            alpha = n * (p_fa ** (-1.0 / n) - 1.0)
            det[r, c] = power[r, c] > alpha * (s / n)
    return det


@njit(cache=True)
def erode3(b):
    h, w = b.shape
    out = np.zeros((h, w), dtype=np.bool_)
    for r in range(1, h - 1):
        for c in range(1, w - 1):
            ok = True
            for i in range(r - 1, r + 2):
                for j in range(c - 1, c + 2):
                    if not b[i, j]:
                        ok = False
            out[r, c] = ok
    return out


@njit(cache=True)
def dilate3(b):
    h, w = b.shape
    out = np.zeros((h, w), dtype=np.bool_)
    for r in range(h):
        for c in range(w):
            hit = False
            for i in range(max(r - 1, 0), min(r + 1, h - 1) + 1):
                for j in range(max(c - 1, 0), min(c + 1, w - 1) + 1):
                    if b[i, j]:
                        hit = True
            out[r, c] = hit
    return out
