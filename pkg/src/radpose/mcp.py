"""Motion continuity preservation.

Per range-angle cell: dominant Doppler bin -> radial velocity, windowed
velocity mean/variance, a threshold mask, and three global descriptors over
the masked-in cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from radpose import kernels
from radpose.radar_core import AxisMaps, DimensionError
from radpose.ssp import apply_mask
from radpose.tensor_io import RadCube


@dataclass
class VelocityField:
    k_star: np.ndarray  # (R, A) int64
    v: np.ndarray  # (R, A) m/s


@dataclass
class LocalStats:
    mu: np.ndarray
    sigma2: np.ndarray
    radius: int


@dataclass(frozen=True)
class DopplerThresholds:
    """|v| and local std bounds, inclusive. sigma_max may be inf."""

    v_min: float = 0.0
    v_max: float = math.inf
    sigma_min: float = 0.0
    sigma_max: float = math.inf

    def __post_init__(self):
        if not 0 <= self.v_min < self.v_max:
            raise ValueError("need 0 <= v_min < v_max")
        if not 0 <= self.sigma_min < self.sigma_max:
            raise ValueError("need 0 <= sigma_min < sigma_max")


@dataclass(frozen=True)
class MotionDescriptors:
    mu_g: float = 0.0
    sigma_g: float = 0.0
    vmax_g: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.mu_g, self.sigma_g, self.vmax_g])


def _axes_of(cube: RadCube, axes: AxisMaps | None) -> AxisMaps:
    axes = axes if axes is not None else cube.axes
    if axes is None:
        raise ValueError("cube carries no axis maps; pass axes explicitly")
    if axes.dims != cube.dims:
        raise DimensionError(f"axis maps {axes.dims} do not match cube {cube.dims}")
    return axes


def dominant_doppler(cube: RadCube, axes: AxisMaps | None = None, active: np.ndarray | None = None) -> VelocityField:
    """Argmax of |cube| over Doppler, lowest index on ties.

    ``active`` restricts the search; inactive cells report bin 0, which is
    what an all-zero cell yields anyway.
    """
    axes = _axes_of(cube, axes)
    z = cube.data
    if active is None:
        active = np.ones(cube.dims[:2], dtype=bool)
    active = np.ascontiguousarray(active, dtype=bool)
    k = kernels.doppler_argmax(z, active)
    return VelocityField(k_star=k, v=np.asarray(axes.v_of_d)[k])


def local_stats(field: VelocityField, radius: int = 2, active: np.ndarray | None = None) -> LocalStats:
    """Window mean and population variance; the window is clipped at the grid edge."""
    if radius < 1:
        raise ValueError("window radius must be >= 1")
    v = np.ascontiguousarray(field.v, dtype=np.float64)
    if active is None:
        active = np.ones(v.shape, dtype=bool)
    mu, s2 = kernels.local_stats(v, int(radius), np.ascontiguousarray(active, dtype=bool))
    return LocalStats(mu=mu, sigma2=s2, radius=int(radius))


def doppler_mask(field: VelocityField, stats: LocalStats, th: DopplerThresholds) -> np.ndarray:
    if field.v.shape != stats.sigma2.shape:
        raise DimensionError("velocity field and stats disagree in shape")
    sigma = np.sqrt(stats.sigma2)
    speed = np.abs(field.v)
    return (
        (th.sigma_min <= sigma) & (sigma <= th.sigma_max)
        & (th.v_min <= speed) & (speed <= th.v_max)
    )


def apply_doppler_mask(cube: RadCube, mask: np.ndarray, spatial: np.ndarray | None = None) -> RadCube:
    """R_motion. ``spatial`` is AND-ed in so SSP-rejected cells stay out."""
    mask = np.asarray(mask, dtype=bool)
    if spatial is not None:
        mask = mask & np.asarray(spatial, dtype=bool)
    return apply_mask(cube, mask)


def global_descriptors(field: VelocityField, mask: np.ndarray) -> MotionDescriptors:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != field.v.shape:
        raise DimensionError("mask and velocity field disagree in shape")
    sel = field.v[mask]
    if sel.size == 0:
        return MotionDescriptors()
    mu = float(sel.mean())
    return MotionDescriptors(mu_g=mu, sigma_g=float(np.sqrt(np.mean((sel - mu) ** 2))), vmax_g=float(np.abs(sel).max()))
