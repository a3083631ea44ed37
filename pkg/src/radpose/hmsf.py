"""Hierarchical multi-scale fusion: block-mean pooling at two kernel sizes,
trilinear upsampling back to the full grid, channel concatenation and the
final pooled feature vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radpose import kernels
from radpose.mcp import MotionDescriptors
from radpose.radar_core import DimensionError
from radpose.tensor_io import RealCube


@dataclass(frozen=True)
class PoolSpec:
    s_c: int
    s_m: int

    def __post_init__(self):
        if self.s_c < 1 or self.s_m < 1:
            raise ValueError("kernel sizes must be >= 1")


def _kernel3(k, dims) -> tuple[int, int, int]:
    ks = (k, k, k) if np.isscalar(k) else tuple(k)
    if len(ks) != 3 or any(int(v) < 1 for v in ks):
        raise ValueError(f"kernel must be >= 1 on every axis, got {k!r}")
    return tuple(min(int(v), n) for v, n in zip(ks, dims))


def avg_pool3(x: RealCube, k) -> RealCube:
    """Non-overlapping block means, stride = kernel, trailing cells dropped."""
    kr, ka, kd = _kernel3(k, x.dims)
    data = np.ascontiguousarray(x.data, dtype=np.float64)
    return RealCube(kernels.avg_pool3(data, kr, ka, kd))


def _interp_axis(src: int, dst: int):
    i = np.arange(dst, dtype=np.float64)
    pos = np.clip((i + 0.5) * (src / dst) - 0.5, 0.0, src - 1)
    lo = np.floor(pos).astype(np.int64)
    hi = np.minimum(lo + 1, src - 1)
    return lo, hi, pos - lo


def upsample_trilinear(x: RealCube, target) -> RealCube:
    """Half-pixel-center trilinear resize, applied one axis at a time."""
    target = tuple(int(t) for t in target)
    if len(target) != 3 or any(t < s for t, s in zip(target, x.dims)):
        raise DimensionError(f"target {target} smaller than source {x.dims}")
    out = np.asarray(x.data, dtype=np.float64)
    for axis, (src, dst) in enumerate(zip(x.dims, target), start=1):
        if src == dst:
            continue
        lo, hi, t = _interp_axis(src, dst)
        moved = np.moveaxis(out, axis, 0)
        rest = moved.shape[1:]
        flat = np.ascontiguousarray(moved.reshape(src, -1))
        res = kernels.lerp_rows(flat, lo, hi, t)
        out = np.moveaxis(res.reshape((dst,) + rest), 0, axis)
    return RealCube(np.ascontiguousarray(out))


def fuse(coarse: RealCube, medium: RealCube, fine: RealCube) -> RealCube:
    if not coarse.dims == medium.dims == fine.dims:
        raise DimensionError(f"scale dims differ: {coarse.dims}, {medium.dims}, {fine.dims}")
    return RealCube(np.concatenate([coarse.data, medium.data, fine.data], axis=0))


def multi_scale(x: RealCube, spec: PoolSpec) -> tuple[RealCube, RealCube, RealCube]:
    """(coarse, medium, F_multi) for a magnitude tensor."""
    coarse = avg_pool3(x, spec.s_c)
    medium = avg_pool3(x, spec.s_m)
    f_multi = fuse(upsample_trilinear(coarse, x.dims), upsample_trilinear(medium, x.dims), x)
    return coarse, medium, f_multi


def grid_kernel(dims, grid) -> tuple[int, int, int]:
    ks = []
    for n, g in zip(dims, grid):
        if g < 1 or g > n:
            raise DimensionError(f"grid {tuple(grid)} does not fit dims {tuple(dims)}")
        ks.append(n // g)
    return tuple(ks)


def feature_length(grid) -> int:
    gr, ga, gd = grid
    return 3 * gr * ga * gd + 3


def global_features(f_multi: RealCube, desc: MotionDescriptors, grid=(4, 4, 2)) -> np.ndarray:
    """Pool every channel to ``grid``, flatten in (channel, r, a, d) order,
    then append (mu_g, sigma_g, vmax_g). grid (1, 1, 1) is plain global
    average pooling."""
    kr, ka, kd = grid_kernel(f_multi.dims, grid)
    gr, ga, gd = grid
    data = np.ascontiguousarray(f_multi.data[:, : gr * kr, : ga * ka, : gd * kd], dtype=np.float64)
    pooled = kernels.avg_pool3(data, kr, ka, kd)
    return np.concatenate([pooled.ravel(), desc.as_array()])
