"""Numba vs pure-numpy kernel timings, plus end-to-end front-end latency.

Kernel timings call both implementations in-process. The end-to-end part
runs each backend in its own interpreter because the backend is fixed at
import time.

    python benchmarks/bench_backends.py [--reps 20] [--frames 8]
"""

from __future__ import annotations

import argparse
import contextlib
import io
import os
import subprocess
import sys
import tempfile
import time

import numpy as np

from radpose.kernels import _numba, _numpy
from radpose.radar_core import _fft_tables


def _best(fn, reps: int) -> float:
    fn()  # compile / warm caches
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(rng):
    z = (rng.normal(size=(64, 64, 16)) + 1j * rng.normal(size=(64, 64, 16))).astype(np.complex64)
    active = np.zeros((64, 64), bool)
    active[8:60, 10:54] = True
    v = rng.normal(size=(64, 64))
    rows = rng.normal(size=(4096, 256)) + 1j * rng.normal(size=(4096, 256))
    tw, rev = _fft_tables(256)
    cube = rng.normal(size=(1, 64, 64, 16))
    power = rng.exponential(size=(64, 64))
    blob = rng.random((64, 64)) < 0.3
    return {
        "fft_rows 4096x256": lambda m: m.fft_rows(rows, tw, rev),
        "doppler_argmax": lambda m: m.doppler_argmax(z, active),
        "local_stats r=2": lambda m: m.local_stats(v, 2, active),
        "avg_pool3 k=5": lambda m: m.avg_pool3(cube, 5, 5, 5),
        "ca_cfar 64x64": lambda m: m.ca_cfar(power, 1, 4, 1e-3),
        "erode3+dilate3": lambda m: m.dilate3(m.erode3(blob)),
    }


_E2E = """
import sys, time
from radpose import kernels
from radpose.pipeline import bench
from radpose.profiles import load_profile
for name in ("Ultra-Light", "Balanced", "Ultra-Precision"):
    rep = bench(sys.argv[1], load_profile(name), reps=int(sys.argv[2]), warmup=3)
    print(f"{kernels.BACKEND:6s} {name:16s} front end {1e3 * (rep.total_mean - rep.mean('io')):8.3f} ms")
"""


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--frames", type=int, default=8)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    print(f"{'kernel':22s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, call in kernel_cases(rng).items():
        t_nb = _best(lambda: call(_numba), args.reps)
        t_np = _best(lambda: call(_numpy), args.reps)
        print(f"{name:22s} {1e3 * t_nb:10.3f} {1e3 * t_np:10.3f} {t_np / t_nb:8.2f}")

    with tempfile.TemporaryDirectory() as tmp:
        from radpose.cli import main as cli

        with contextlib.redirect_stdout(io.StringIO()):
            cli(["simulate", "--frames", str(args.frames), "--seed", "0", "--out", tmp])
        print(flush=True)
        for backend in ("numba", "numpy"):
            env = dict(os.environ, RADPOSE_BACKEND=backend)
            subprocess.run([sys.executable, "-c", _E2E, tmp, str(args.reps)], check=True, env=env)
    return 0


if __name__ == "__main__":
    sys.exit(main())
