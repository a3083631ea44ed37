"""Point-scatterer FMCW scene generator with exact ground truth.

The IF sample for fast-time index n, chirp k and antenna m is::

    s[n, k, m] = sum_p A_p exp(j 2 pi f_IF,p n / f_s)
                           exp(j 4 pi v_p T_r k / lambda)
                           exp(j 2 pi l m sin(theta_p) / lambda)  +  w[n, k, m]

with f_IF = 2 S d / c (stop-and-hop: d is frozen for the frame). Positive
``v`` means the target approaches and lands above the zero-Doppler bin.

Noise is circular complex Gaussian built with Box-Muller from uniform
doubles of numpy's PCG64 stream, seeded by ``SeedSequence([seed, frame])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from radpose import kernels
from radpose.radar_core import C_LIGHT, DerivedParams, RadarConfig, build_axis_maps, derive_params, fft_chain
from radpose.tensor_io import JOINT_NAMES, RadCube


class SceneError(ValueError):
    """Scatterer outside the unambiguous region of the waveform."""


@dataclass(frozen=True)
class Scatterer:
    d: float
    theta: float
    v: float = 0.0
    amp: complex = 1.0


@dataclass
class Scene:
    scatterers: list[Scatterer] = field(default_factory=list)
    noise_sigma: float = 0.0
    clutter: list[Scatterer] = field(default_factory=list)


def max_range(cfg: RadarConfig, params: DerivedParams | None = None) -> float:
    params = params or derive_params(cfg)
    return cfg.n_samples * params.range_res


def _check(p: Scatterer, cfg: RadarConfig, params: DerivedParams) -> None:
    if not 0 < p.d < max_range(cfg, params):
        raise SceneError(f"range {p.d} m outside (0, {max_range(cfg, params):.3f}) m")
    if not abs(p.theta) < math.pi / 2:
        raise SceneError(f"azimuth {p.theta} rad outside (-pi/2, pi/2)")
    if not abs(p.v) < params.v_amb:
        raise SceneError(f"velocity {p.v} m/s exceeds v_amb = {params.v_amb:.3f} m/s")


def frame_rng(seed: int, frame: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, frame])))


def box_muller(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    """``n`` circular complex normals with E|w|^2 = sigma^2."""
    u1 = rng.random(n)
    u2 = rng.random(n)
    rad = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 lies in (0, 1]
    ang = 2.0 * np.pi * u2
    scale = sigma / math.sqrt(2.0)
    return scale * rad * (np.cos(ang) + 1j * np.sin(ang))


def synthesize_frame(scene: Scene, cfg: RadarConfig, seed: int = 0, frame: int = 0) -> np.ndarray:
    params = derive_params(cfg)
    if scene.noise_sigma < 0:
        raise SceneError("noise_sigma must be non-negative")
    pts = list(scene.scatterers) + list(scene.clutter)
    for p in pts:
        _check(p, cfg, params)
    n = np.arange(cfg.n_samples)
    k = np.arange(cfg.n_chirps)
    m = np.arange(cfg.n_antennas)
    lam, t_r, l_sp = params.wavelength, params.t_rep, cfg.spacing
    if pts:
        f_if = np.array([2.0 * params.slope * p.d / C_LIGHT for p in pts])
        vel = np.array([p.v for p in pts])
        sin_t = np.array([math.sin(p.theta) for p in pts])
        amps = np.array([complex(p.amp) for p in pts])
        en = np.exp(1j * (2.0 * np.pi * f_if[:, None] * n[None, :] / cfg.f_s))
        ek = np.exp(1j * (4.0 * np.pi * vel[:, None] * t_r * k[None, :] / lam))
        em = np.exp(1j * (2.0 * np.pi * l_sp * m[None, :] * sin_t[:, None] / lam))
        out = kernels.tone_sum(en, ek, em, amps)
    else:
        out = np.zeros((cfg.n_samples, cfg.n_chirps, cfg.n_antennas), dtype=np.complex128)
    if scene.noise_sigma > 0:
        rng = frame_rng(seed, frame)
        out = out + box_muller(rng, out.size, scene.noise_sigma).reshape(out.shape)
    return out


def expected_bins(p: Scatterer, cfg: RadarConfig, params: DerivedParams | None = None,
                  n_range: int = 64) -> tuple[int, int, int]:
    params = params or derive_params(cfg)
    a_half = cfg.n_antennas / 2
    d_half = cfg.n_chirps / 2
    r = round(p.d / params.range_res)
    a = round(a_half + a_half * (2.0 * cfg.spacing / params.wavelength) * math.sin(p.theta))
    d = round(d_half + p.v / params.v_amb * d_half)
    clamp = lambda x, hi: int(min(max(x, 0), hi - 1))  # noqa: E731
    return clamp(r, n_range), clamp(a, cfg.n_antennas), clamp(d, cfg.n_chirps)


# Skeleton scenes -----------------------------------------------------------

# Rest offsets from the pelvis root in meters: x lateral, y up, z away from the radar.
REST_OFFSETS = np.array(
    [
        [0.00, 0.70, 0.0],
        [0.00, 0.50, 0.0],
        [0.18, 0.45, 0.0],
        [-0.18, 0.45, 0.0],
        [0.22, 0.18, 0.0],
        [-0.22, 0.18, 0.0],
        [0.24, -0.08, 0.0],
        [-0.24, -0.08, 0.0],
        [0.10, 0.00, 0.0],
        [-0.10, 0.00, 0.0],
        [0.11, -0.45, 0.0],
        [-0.11, -0.45, 0.0],
        [0.12, -0.88, 0.0],
        [-0.12, -0.88, 0.0],
    ]
)
# Reflectivity by joint, torso strongest.
JOINT_AMPLITUDE = np.array([1.0, 1.0, 1.0, 1.0, 0.7, 0.7, 0.5, 0.5, 1.0, 1.0, 0.7, 0.7, 0.5, 0.5])
# Forward-swing gain (fraction of limb amplitude) and gait phase (rad) per joint.
_SWING_GAIN = np.array([0, 0, 0, 0, 0.5, 0.5, 1.0, 1.0, 0, 0, 0.5, 0.5, 1.0, 1.0])
_SWING_PHASE = np.array([0, 0, 0, 0, 0, np.pi, 0, np.pi, 0, 0, np.pi, 0, np.pi, 0])
_TORSO = _SWING_GAIN == 0

assert len(REST_OFFSETS) == len(JOINT_NAMES)


@dataclass(frozen=True)
class MotionParams:
    """Parametric gait: a Lissajous root path plus sinusoidal limb swing.

    Root:  x = x0 + path_x sin(2 pi t / period_x + phi_x),
           z = z0 + path_z sin(2 pi t / period_z + phi_z),  y = y0 + bob sin(4 pi f t)
    Limb:  z += swing_gain * limb_amp * sin(2 pi f t + swing_phase)
    """

    root: tuple[float, float, float] = (0.0, -0.1, 1.6)
    path_x: float = 0.6
    path_z: float = 0.45
    period_x: float = 23.0
    period_z: float = 17.0
    bob: float = 0.02
    limb_amp: float = 0.2
    gait_hz: float = 1.5
    frame_period: float = 0.1
    noise_sigma: float = 1.0

    @classmethod
    def still(cls, **kw) -> "MotionParams":
        base = dict(path_x=0.0, path_z=0.0, bob=0.0, limb_amp=0.0)
        base.update(kw)
        return cls(**base)

    def peak_speed(self) -> tuple[float, float]:
        """Upper bounds on (torso, wrist/ankle) speed in m/s."""
        w = 2 * np.pi
        root = math.hypot(self.path_x * w / self.period_x, self.path_z * w / self.period_z)
        torso = root + self.bob * 2 * w * self.gait_hz
        limb = torso + self.limb_amp * w * self.gait_hz
        return torso, limb


def skeleton_state(t: float, mp: MotionParams, phase: tuple[float, float] = (0.0, 0.0)):
    """Joint positions (J, 3) in meters and velocities (J, 3) in m/s at time t."""
    w = 2 * np.pi
    x0, y0, z0 = mp.root
    ax, az = w / mp.period_x, w / mp.period_z
    g = w * mp.gait_hz
    root = np.array([
        x0 + mp.path_x * math.sin(ax * t + phase[0]),
        y0 + mp.bob * math.sin(2 * g * t),
        z0 + mp.path_z * math.sin(az * t + phase[1]),
    ])
    root_v = np.array([
        mp.path_x * ax * math.cos(ax * t + phase[0]),
        mp.bob * 2 * g * math.cos(2 * g * t),
        mp.path_z * az * math.cos(az * t + phase[1]),
    ])
    pos = root + REST_OFFSETS
    vel = np.tile(root_v, (len(REST_OFFSETS), 1))
    swing = _SWING_GAIN * mp.limb_amp
    pos[:, 2] += swing * np.sin(g * t + _SWING_PHASE)
    vel[:, 2] += swing * g * np.cos(g * t + _SWING_PHASE)
    return pos, vel


def joint_scatterers(pos: np.ndarray, vel: np.ndarray, amps: Sequence[complex]) -> list[Scatterer]:
    """Radar at the origin, array along x. Approaching motion gives positive v."""
    out = []
    for p, u, a in zip(pos, vel, amps):
        d = float(np.linalg.norm(p))
        out.append(Scatterer(d=d, theta=math.asin(p[0] / d), v=-float(p @ u) / d, amp=complex(a)))
    return out


def iter_skeleton_dataset(n_frames: int, motion: MotionParams | None = None, cfg: RadarConfig | None = None,
                          seed: int = 0, n_range: int = 64) -> Iterator[tuple[RadCube, np.ndarray]]:
    """Yield (RadCube, pose in mm) per frame. Cubes are complex64."""
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    motion = motion or MotionParams()
    cfg = cfg or RadarConfig()
    params = derive_params(cfg)
    axes = build_axis_maps(cfg, params, n_range)
    torso_v, limb_v = motion.peak_speed()
    if limb_v >= params.v_amb:
        raise SceneError(f"limb speed bound {limb_v:.2f} m/s exceeds v_amb = {params.v_amb:.2f} m/s")
    meta = frame_rng(seed, 2**32)
    t0 = float(meta.random() * 1000.0)
    phase = (float(meta.random() * 2 * np.pi), float(meta.random() * 2 * np.pi))
    for i in range(n_frames):
        pos, vel = skeleton_state(t0 + i * motion.frame_period, motion, phase)
        rng = frame_rng(seed, i)
        amps = JOINT_AMPLITUDE * np.exp(2j * np.pi * rng.random(len(JOINT_AMPLITUDE)))
        scene = Scene(joint_scatterers(pos, vel, amps), noise_sigma=motion.noise_sigma)
        raw = synthesize_frame(scene, cfg, seed=seed ^ 0x5EED, frame=i)
        cube = fft_chain(raw, n_range)
        yield RadCube(cube.data.astype(np.complex64), axes), (pos * 1000.0).astype(np.float32)


def make_skeleton_dataset(n_frames: int, motion: MotionParams | None = None, cfg: RadarConfig | None = None,
                          seed: int = 0, n_range: int = 64) -> tuple[list[RadCube], np.ndarray]:
    cubes, poses = [], []
    for cube, pose in iter_skeleton_dataset(n_frames, motion, cfg, seed, n_range):
        cubes.append(cube)
        poses.append(pose)
    return cubes, np.stack(poses)
