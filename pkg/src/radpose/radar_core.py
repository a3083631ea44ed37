"""FMCW waveform model: configuration, bin-to-physical mappings and the
range/angle/Doppler FFT chain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from radpose import kernels

C_LIGHT = 299_792_458.0


class ConfigError(ValueError):
    """Invalid radar configuration."""


class DimensionError(ValueError):
    """Array dimensions do not match what the operation expects."""


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class RadarConfig:
    """FMCW waveform and array parameters (SI units).

    ``element_spacing`` of ``None`` means half a wavelength.
    """

    f_c: float = 77e9
    bandwidth: float = 3.6e9
    t_chirp: float = 60e-6
    t_idle: float = 7e-6
    f_s: float = 256 / 60e-6
    n_samples: int = 256
    n_chirps: int = 16
    n_antennas: int = 64
    element_spacing: float | None = None

    @property
    def spacing(self) -> float:
        if self.element_spacing is None:
            return C_LIGHT / self.f_c / 2.0
        return self.element_spacing

    def validate(self) -> None:
        for name in ("f_c", "bandwidth", "t_chirp", "t_idle", "f_s"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise ConfigError(f"{name} must be positive and finite, got {val!r}")
        if self.element_spacing is not None and not self.element_spacing > 0:
            raise ConfigError("element_spacing must be positive")
        for name in ("n_samples", "n_chirps", "n_antennas"):
            val = getattr(self, name)
            if not isinstance(val, (int, np.integer)) or not _is_pow2(int(val)):
                raise ConfigError(f"{name} must be a power of two, got {val!r}")
        # ADC window must fit inside the chirp (relative slack for rounding).
        if self.f_s * self.t_chirp < self.n_samples * (1 - 1e-9):
            raise ConfigError("n_samples / f_s exceeds the chirp duration")


@dataclass(frozen=True)
class DerivedParams:
    wavelength: float
    slope: float
    t_rep: float
    range_res: float
    v_amb: float


def derive_params(cfg: RadarConfig) -> DerivedParams:
    cfg.validate()
    lam = C_LIGHT / cfg.f_c
    t_rep = cfg.t_chirp + cfg.t_idle
    return DerivedParams(
        wavelength=lam,
        slope=cfg.bandwidth / cfg.t_chirp,
        t_rep=t_rep,
        range_res=C_LIGHT / (2.0 * cfg.bandwidth),
        v_amb=lam / (4.0 * t_rep),
    )


@dataclass(frozen=True)
class AxisMaps:
    """Physical value of every bin: meters, radians and m/s."""

    d_of_r: np.ndarray
    theta_of_a: np.ndarray
    v_of_d: np.ndarray

    @property
    def dims(self) -> tuple[int, int, int]:
        return (len(self.d_of_r), len(self.theta_of_a), len(self.v_of_d))


def build_axis_maps(cfg: RadarConfig, params: DerivedParams | None = None, n_range: int = 64) -> AxisMaps:
    if params is None:
        params = derive_params(cfg)
    else:
        cfg.validate()
    if not 1 <= n_range <= cfg.n_samples:
        raise ConfigError(f"n_range must be in [1, {cfg.n_samples}], got {n_range}")
    half_d = cfg.n_chirps / 2
    half_a = cfg.n_antennas / 2
    d_of_r = np.arange(n_range) * params.range_res
    v_of_d = params.v_amb * ((np.arange(cfg.n_chirps) - half_d) / half_d)
    u = (params.wavelength / (2.0 * cfg.spacing)) * ((np.arange(cfg.n_antennas) - half_a) / half_a)
    theta_of_a = np.arcsin(np.clip(u, -1.0, 1.0))
    for arr in (d_of_r, theta_of_a, v_of_d):
        arr.setflags(write=False)
    return AxisMaps(d_of_r=d_of_r, theta_of_a=theta_of_a, v_of_d=v_of_d)


@lru_cache(maxsize=None)
def _fft_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.int64)
    for i in range(n):
        rev[i] = int(format(i, f"0{bits}b")[::-1], 2) if bits else 0
    k = np.arange(n // 2 if n > 1 else 1)
    ang = 2.0 * np.pi * k / n
    twiddle = np.cos(ang) - 1j * np.sin(ang)
    twiddle.setflags(write=False)
    rev.setflags(write=False)
    return twiddle, rev


def fft(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Forward DFT along ``axis`` with 1/N scaling (power-of-two length)."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[axis]
    if not _is_pow2(n):
        raise DimensionError(f"FFT length must be a power of two, got {n}")
    moved = np.moveaxis(x, axis, -1)
    shape = moved.shape
    rows = np.ascontiguousarray(moved.reshape(-1, n))
    twiddle, rev = _fft_tables(n)
    out = kernels.fft_rows(rows, twiddle, rev)
    return np.moveaxis(out.reshape(shape), -1, axis)


def fft_chain(raw: np.ndarray, n_range: int | None = None, window: str = "rect"):
    """Raw ADC cube (samples, chirps, antennas) -> complex (range, angle, Doppler).

    Angle and Doppler spectra are half-shifted so index A/2 is boresight and
    D/2 is zero velocity. Returns a ``RadCube`` without axis maps.
    """
    from radpose.tensor_io import RadCube

    raw = np.asarray(raw)
    if raw.ndim != 3:
        raise DimensionError(f"raw cube must be 3-D (samples, chirps, antennas), got shape {raw.shape}")
    n_s, n_d, n_a = raw.shape
    for n in raw.shape:
        if not _is_pow2(n):
            raise DimensionError(f"raw cube dims must be powers of two, got {raw.shape}")
    n_range = n_s if n_range is None else n_range
    if not 1 <= n_range <= n_s:
        raise DimensionError(f"n_range must be in [1, {n_s}]")
    x = raw.astype(np.complex128)
    if window == "hann":
        for ax, n in enumerate(raw.shape):
            w = np.hanning(n + 1)[:n]
            shp = [1, 1, 1]
            shp[ax] = n
            x = x * w.reshape(shp)
    elif window != "rect":
        raise ValueError(f"unknown window {window!r}")
    x = fft(x, axis=0)[:n_range]
    x = np.fft.fftshift(fft(x, axis=2), axes=2)
    x = np.fft.fftshift(fft(x, axis=1), axes=1)
    return RadCube(np.ascontiguousarray(x.transpose(0, 2, 1)))
