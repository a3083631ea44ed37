"""Spatial structure preservation: range-angle ROI masking."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from radpose.radar_core import AxisMaps, DimensionError
from radpose.tensor_io import RadCube


@dataclass(frozen=True)
class SpatialBounds:
    """ROI box. Distances in meters, angles in radians; both ends inclusive."""

    d_min: float
    d_max: float
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if not self.d_min < self.d_max:
            raise ValueError("d_min must be < d_max")
        if not self.theta_min < self.theta_max:
            raise ValueError("theta_min must be < theta_max")

    @classmethod
    def from_degrees(cls, d_min, d_max, theta_min_deg, theta_max_deg) -> "SpatialBounds":
        return cls(d_min, d_max, math.radians(theta_min_deg), math.radians(theta_max_deg))


def build_spatial_mask(bounds: SpatialBounds, axes: AxisMaps) -> np.ndarray:
    """Boolean (R, A) mask of cells inside the ROI."""
    d = np.asarray(axes.d_of_r)
    th = np.asarray(axes.theta_of_a)
    in_r = (bounds.d_min <= d) & (d <= bounds.d_max)
    in_a = (bounds.theta_min <= th) & (th <= bounds.theta_max)
    return in_r[:, None] & in_a[None, :]


def apply_mask(cube: RadCube, mask: np.ndarray) -> RadCube:
    """Broadcast an (R, A) mask along Doppler; masked-out cells become +0."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != cube.dims[:2]:
        raise DimensionError(f"mask shape {mask.shape} does not match cube {cube.dims[:2]}")
    data = np.where(mask[:, :, None], cube.data, np.zeros((), dtype=cube.data.dtype))
    return RadCube(data, cube.axes)


apply_spatial_mask = apply_mask
