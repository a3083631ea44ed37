"""Front-end assembly, per-stage timing, analytic cost model, the pseudo-RAD
lift for marginal heatmaps, and the latency benchmark loop."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from radpose import kernels
from radpose.hmsf import global_features, multi_scale
from radpose.mcp import (
    LocalStats,
    MotionDescriptors,
    VelocityField,
    apply_doppler_mask,
    doppler_mask,
    dominant_doppler,
    global_descriptors,
    local_stats,
)
from radpose.profiles import Profile
from radpose.radar_core import AxisMaps, RadarConfig, build_axis_maps, DimensionError
from radpose.regressor import MlpShape, MlpWeights, param_count, prn_forward
from radpose.ssp import apply_mask, build_spatial_mask
from radpose.tensor_io import RadCube, RealCube, magnitude, read_cube

STAGES = ("ssp", "mcp", "hmsf", "prn")
BENCH_STAGES = ("io",) + STAGES


def radar_for_dims(dims) -> RadarConfig:
    """Default waveform with antenna/chirp counts matching a cube's dims."""
    r, a, d = dims
    n_s = max(256, 1 << (int(r) - 1).bit_length())
    base = RadarConfig()
    return RadarConfig(
        f_c=base.f_c, bandwidth=base.bandwidth, t_chirp=base.t_chirp, t_idle=base.t_idle,
        f_s=n_s / base.t_chirp, n_samples=n_s, n_chirps=int(d), n_antennas=int(a),
    )


@lru_cache(maxsize=8)
def default_axes(dims) -> AxisMaps:
    return build_axis_maps(radar_for_dims(dims), n_range=int(dims[0]))


@dataclass
class FrontEnd:
    spatial_mask: np.ndarray
    field: VelocityField
    stats: LocalStats
    motion_mask: np.ndarray  # Doppler mask AND spatial mask
    descriptors: MotionDescriptors
    features: np.ndarray
    timings: dict[str, float]


def front_end(cube: RadCube, profile: Profile, axes: AxisMaps | None = None) -> FrontEnd:
    """SSP -> MCP -> magnitude -> HMSF -> pooled feature vector.

    Argmax and window statistics are evaluated on ROI cells only. Outside the
    ROI the cube is zero, so the argmax there is bin 0 either way, and those
    cells are dropped by the spatial AND.
    """
    axes = axes or cube.axes or default_axes(cube.dims)
    if axes.dims != cube.dims:
        raise DimensionError(f"axis maps {axes.dims} do not match cube {cube.dims}")
    clock = time.perf_counter
    t0 = clock()
    spatial = build_spatial_mask(profile.bounds, axes)
    r_spatial = apply_mask(cube, spatial)
    t1 = clock()
    fld = dominant_doppler(r_spatial, axes, active=spatial)
    st = local_stats(fld, profile.window_radius, active=spatial)
    motion = doppler_mask(fld, st, profile.thresholds) & spatial
    desc = global_descriptors(fld, motion)
    r_motion = apply_doppler_mask(r_spatial, motion)
    t2 = clock()
    _, _, f_multi = multi_scale(magnitude(r_motion, support=motion), profile.pool)
    feats = global_features(f_multi, desc, profile.grid)
    t3 = clock()
    return FrontEnd(spatial, fld, st, motion, desc, feats, {"ssp": t1 - t0, "mcp": t2 - t1, "hmsf": t3 - t2})


@dataclass
class StageReport:
    times: dict[str, float]
    flops: dict[str, int] = field(default_factory=dict)
    bytes: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return sum(self.times.values())

    @property
    def percent(self) -> dict[str, float]:
        tot = self.total
        return {k: (100.0 * v / tot if tot > 0 else 100.0 / len(self.times)) for k, v in self.times.items()}

    def to_record(self, **extra) -> dict:
        rec = dict(extra)
        pct = self.percent
        for k in self.times:
            rec[f"{k}_s"] = self.times[k]
            rec[f"{k}_pct"] = pct[k]
            rec[f"{k}_flops"] = self.flops.get(k, 0)
            rec[f"{k}_bytes"] = self.bytes.get(k, 0)
        rec["total_s"] = self.total
        return rec


def run_pipeline(cube: RadCube, profile: Profile, weights: MlpWeights, axes: AxisMaps | None = None):
    fe = front_end(cube, profile, axes)
    t0 = time.perf_counter()
    pose = prn_forward(weights, fe.features)
    times = dict(fe.timings, prn=time.perf_counter() - t0)
    shape = weights.shape
    report = StageReport(times, stage_flops(profile, cube.dims, axes or cube.axes, shape),
                         working_set(profile, cube.dims, shape))
    return pose, report


# Cost model ----------------------------------------------------------------


def _covered(dims, k) -> int:
    n = 1
    for size in dims:
        ke = min(k, size)
        n *= (size // ke) * ke
    return n


def flop_terms(profile: Profile, dims, axes: AxisMaps | None = None, mlp: MlpShape | None = None) -> dict[str, int]:
    """Closed-form operation counts per pipeline term.

    Terms downstream of SSP scale with the ROI population N_roi, which is how
    the ROI bounds reach the cost.
    """
    r, a, d = (int(x) for x in dims)
    axes = axes or default_axes((r, a, d))
    n_roi = int(build_spatial_mask(profile.bounds, axes).sum())
    win = (2 * profile.window_radius + 1) ** 2
    mlp = mlp or MlpShape(profile.feature_dim, profile.h1, profile.h2, 42)
    full = r * a * d
    return {
        "ssp_mask": r * a,
        "ssp_apply": full,
        "mcp_argmax": n_roi * d,
        "mcp_local_stats": n_roi * win * 2,
        "mcp_mask": n_roi,
        "hmsf_pool": _covered(dims, profile.s_c) + _covered(dims, profile.s_m),
        "hmsf_upsample": 8 * full * 2,
        "hmsf_global_pool": 3 * full,
        "prn": 2 * param_count(mlp),
    }


def flop_estimate(profile: Profile, dims, axes: AxisMaps | None = None, mlp: MlpShape | None = None) -> int:
    return sum(flop_terms(profile, dims, axes, mlp).values())


def stage_flops(profile: Profile, dims, axes=None, mlp: MlpShape | None = None) -> dict[str, int]:
    terms = flop_terms(profile, dims, axes, mlp)
    out = {s: 0 for s in STAGES}
    for name, val in terms.items():
        out[name.split("_", 1)[0]] += val
    return out


def working_set(profile: Profile, dims, mlp: MlpShape | None = None) -> dict[str, int]:
    """Peak bytes live within each stage (float64 / complex128 buffers)."""
    r, a, d = (int(x) for x in dims)
    full = r * a * d
    mlp = mlp or MlpShape(profile.feature_dim, profile.h1, profile.h2, 42)
    return {
        "io": 8 * full,
        "ssp": 16 * full * 2 + r * a,
        "mcp": 16 * full + 8 * full + r * a * (8 + 8 + 8 + 8 + 1),
        "hmsf": 8 * full * 4,
        "prn": 8 * (param_count(mlp) + mlp.h1 + mlp.h2 + mlp.d_out),
    }


# Pseudo-RAD ----------------------------------------------------------------


def build_pseudo_rad(h_ra: np.ndarray, h_rd: np.ndarray) -> RealCube:
    """Lift RA and RD magnitude maps to (1, R, A, D): H_RA(r,a) * H_RD(r,d) / sum_d H_RD(r,d).

    Rows of H_RD that sum to zero give an all-zero slab.
    """
    h_ra = np.asarray(h_ra, dtype=np.float64)
    h_rd = np.asarray(h_rd, dtype=np.float64)
    if h_ra.ndim != 2 or h_rd.ndim != 2 or h_ra.shape[0] != h_rd.shape[0]:
        raise DimensionError(f"need (R, A) and (R, D) maps with equal R, got {h_ra.shape} and {h_rd.shape}")
    if (h_ra < 0).any() or (h_rd < 0).any():
        raise ValueError("heatmaps must be non-negative")
    tot = h_rd.sum(axis=1, keepdims=True)
    norm = np.divide(h_rd, tot, out=np.zeros_like(h_rd), where=tot > 0)
    return RealCube((h_ra[:, :, None] * norm[:, None, :])[None])


# Benchmark -----------------------------------------------------------------


@dataclass
class BenchReport:
    profile: str
    reps: int
    samples: dict[str, list[float]]
    flops: dict[str, int]
    bytes: dict[str, int]

    def mean(self, stage: str) -> float:
        return statistics.fmean(self.samples[stage])

    def std(self, stage: str) -> float:
        xs = self.samples[stage]
        return statistics.pstdev(xs) if len(xs) > 1 else 0.0

    @property
    def total_mean(self) -> float:
        return sum(self.mean(s) for s in BENCH_STAGES)

    def percent(self) -> dict[str, float]:
        tot = self.total_mean
        return {s: 100.0 * self.mean(s) / tot for s in BENCH_STAGES}

    def to_record(self) -> dict:
        rec: dict[str, object] = {"profile": self.profile, "backend": kernels.BACKEND, "reps": self.reps}
        pct = self.percent()
        for s in BENCH_STAGES:
            rec[f"{s}_mean_s"] = self.mean(s)
            rec[f"{s}_std_s"] = self.std(s)
            rec[f"{s}_pct"] = pct[s]
            rec[f"{s}_flops"] = self.flops.get(s, 0)
            rec[f"{s}_bytes"] = self.bytes.get(s, 0)
        rec["total_mean_s"] = self.total_mean
        return rec


def cube_files(dataset) -> list[Path]:
    root = Path(dataset)
    if root.is_file():
        return [root]
    files = sorted((root / "cubes").glob("*.radc")) or sorted(root.glob("*.radc"))
    if not files:
        raise FileNotFoundError(f"no .radc files under {root}")
    return files


def bench(dataset, profile: Profile, reps: int = 500, warmup: int = 10,
          weights: MlpWeights | None = None) -> BenchReport:
    """Per-stage latency over ``reps`` inferences after ``warmup`` discarded ones.

    Frames are cycled in file order. Single-threaded by design.
    """
    from radpose.regressor import init_weights

    if reps < 1:
        raise ValueError("reps must be >= 1")
    files = cube_files(dataset)
    samples: dict[str, list[float]] = {s: [] for s in BENCH_STAGES}
    flops: dict[str, int] = {}
    nbytes: dict[str, int] = {}
    for i in range(warmup + reps):
        path = files[i % len(files)]
        t0 = time.perf_counter()
        with open(path, "rb") as fh:
            cube = read_cube(fh)
        t_io = time.perf_counter() - t0
        if weights is None:
            weights = init_weights(MlpShape(profile.feature_dim, profile.h1, profile.h2, 42))
        _, rep = run_pipeline(cube, profile, weights)
        if i < warmup:
            continue
        samples["io"].append(t_io)
        for s in STAGES:
            samples[s].append(rep.times[s])
        if not flops:
            flops = dict(rep.flops, io=0)
            nbytes = dict(rep.bytes)
    return BenchReport(profile.name, reps, samples, flops, nbytes)
