"""Classical front end: ROI, Doppler-collapsed energy map, 2-D cell-averaging
CFAR, 3x3 opening/closing, and a pooled detection feature vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radpose import kernels
from radpose.radar_core import DimensionError
from radpose.tensor_io import RadCube, RealCube


@dataclass(frozen=True)
class CfarParams:
    guard: int = 1
    train: int = 4
    p_fa: float = 1e-3

    def __post_init__(self):
        if self.guard < 0 or self.train < 1 or not 0 < self.p_fa < 1:
            raise ValueError("CFAR needs guard >= 0, train >= 1, 0 < p_fa < 1")

    @property
    def n_train(self) -> int:
        """Training cells for an interior cell (square ring)."""
        outer = 2 * (self.guard + self.train) + 1
        inner = 2 * self.guard + 1
        return outer * outer - inner * inner


def cfar_alpha(n: int, p_fa: float) -> float:
    """Threshold multiplier that gives false-alarm rate p_fa on exponential noise."""
    return n * (p_fa ** (-1.0 / n) - 1.0)


def collapse_doppler(cube: RadCube) -> RealCube:
    """Energy per range-angle cell: sum over Doppler of |z|^2 -> (1, R, A, 1)."""
    z = cube.data
    re = z.real.astype(np.float64)
    im = z.imag.astype(np.float64)
    return RealCube((re * re + im * im).sum(axis=2)[None, :, :, None])


def _as_map(x) -> np.ndarray:
    if isinstance(x, RealCube):
        if x.data.shape[0] != 1 or x.data.shape[3] != 1:
            raise DimensionError("expected a (1, R, A, 1) map")
        return x.data[0, :, :, 0]
    return np.asarray(x)


def ca_cfar_2d(power, params: CfarParams = CfarParams()) -> np.ndarray:
    """Boolean detections: cell > alpha(N) * mean(training ring).

    The ring is clipped at the map border and N counts the cells that remain.
    """
    p = np.ascontiguousarray(_as_map(power), dtype=np.float64)
    span = 2 * (params.guard + params.train)
    if p.ndim != 2 or min(p.shape) <= span:
        raise DimensionError(f"map {p.shape} must exceed the CFAR window span {span} on both axes")
    return kernels.ca_cfar(p, int(params.guard), int(params.train), float(params.p_fa))


def opening(b: np.ndarray) -> np.ndarray:
    return kernels.dilate3(kernels.erode3(b))


def closing(b: np.ndarray) -> np.ndarray:
    return kernels.erode3(kernels.dilate3(b))


def morph_open_close(b: np.ndarray) -> np.ndarray:
    """3x3 opening then closing. Outside the map counts as background."""
    b = np.ascontiguousarray(b, dtype=bool)
    return closing(opening(b))


def featurize_detections(det: np.ndarray, energy, grid=(4, 4)) -> np.ndarray:
    """Detection-masked energy pooled to a (g_r, g_a) grid, plus detection count.

    Length is g_r * g_a + 1.
    """
    e = _as_map(energy).astype(np.float64)
    det = np.asarray(det, dtype=bool)
    if det.shape != e.shape:
        raise DimensionError("detection and energy maps differ in shape")
    gr, ga = grid
    kr, ka = e.shape[0] // gr, e.shape[1] // ga
    if kr < 1 or ka < 1:
        raise DimensionError(f"grid {grid} does not fit map {e.shape}")
    masked = np.where(det, e, 0.0)[: gr * kr, : ga * ka]
    pooled = kernels.avg_pool3(np.ascontiguousarray(masked[None, :, :, None]), kr, ka, 1)
    return np.concatenate([pooled.ravel(), [float(det.sum())]])


def baseline_features(cube: RadCube, roi_mask: np.ndarray, params: CfarParams = CfarParams(),
                      grid=(4, 4)) -> np.ndarray:
    from radpose.ssp import apply_mask

    energy = collapse_doppler(apply_mask(cube, roi_mask))
    det = morph_open_close(ca_cfar_2d(energy, params))
    return featurize_detections(det, energy, grid)
