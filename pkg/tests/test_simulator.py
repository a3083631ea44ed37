import math

import numpy as np
import pytest

from radpose.radar_core import RadarConfig, build_axis_maps, derive_params, fft_chain
from radpose.simulator import (
    MotionParams, Scatterer, Scene, SceneError, box_muller, expected_bins, frame_rng, iter_skeleton_dataset,
    joint_scatterers, make_skeleton_dataset, skeleton_state, synthesize_frame,
)

CFG = RadarConfig()
P = derive_params(CFG)


def on_grid(r, a, d):
    half_a, half_d = CFG.n_antennas / 2, CFG.n_chirps / 2
    s = (a - half_a) / half_a * P.wavelength / (2 * CFG.spacing)
    return Scatterer(d=r * P.range_res, theta=math.asin(s), v=(d - half_d) / half_d * P.v_amb)


def peak(cube):
    return np.unravel_index(np.argmax(np.abs(cube)), cube.shape)


@pytest.mark.parametrize("bins", [(10, 32, 8), (40, 20, 3), (5, 50, 14)])
def test_on_grid_scatterer_lands_exactly(bins):
    p = on_grid(*bins)
    assert expected_bins(p, CFG) == bins
    cube = fft_chain(synthesize_frame(Scene([p]), CFG), 64).data
    assert peak(cube) == bins
    # on-grid tone: all energy in one bin with the scatterer's amplitude
    assert abs(cube[bins]) == pytest.approx(1.0, abs=1e-9)
    assert np.sum(np.abs(cube) ** 2) == pytest.approx(1.0, abs=1e-9)


def test_expected_bins_clamps():
    p = Scatterer(d=5.0, theta=0.0, v=0.0)
    assert expected_bins(p, CFG, n_range=64) == (63, 32, 8)


def test_scene_validation():
    for bad in (Scatterer(d=-1, theta=0), Scatterer(d=100, theta=0), Scatterer(d=1, theta=2.0),
                Scatterer(d=1, theta=0, v=P.v_amb)):
        with pytest.raises(SceneError):
            synthesize_frame(Scene([bad]), CFG)
    with pytest.raises(SceneError):
        synthesize_frame(Scene([], noise_sigma=-1), CFG)


def test_empty_scene_is_zero_or_pure_noise():
    assert not synthesize_frame(Scene([]), CFG).any()
    w = synthesize_frame(Scene([], noise_sigma=2.0), CFG, seed=3, frame=1)
    assert np.mean(np.abs(w) ** 2) == pytest.approx(4.0, rel=0.02)
    assert abs(w.mean()) < 0.02


def test_noise_is_seeded_per_frame():
    a = synthesize_frame(Scene([], noise_sigma=1.0), CFG, seed=1, frame=0)
    b = synthesize_frame(Scene([], noise_sigma=1.0), CFG, seed=1, frame=0)
    c = synthesize_frame(Scene([], noise_sigma=1.0), CFG, seed=1, frame=1)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_box_muller_moments():
    w = box_muller(frame_rng(9), 200_000, 1.0)
    assert np.var(w.real) == pytest.approx(0.5, rel=0.02)
    assert np.var(w.imag) == pytest.approx(0.5, rel=0.02)
    assert abs(np.mean(w.real * w.imag)) < 0.01


def test_skeleton_velocity_is_position_derivative():
    mp = MotionParams()
    h = 1e-6
    for t in (0.0, 1.3, 7.7):
        p1, v = skeleton_state(t, mp, (0.3, 1.1))
        p2, _ = skeleton_state(t + h, mp, (0.3, 1.1))
        p0, _ = skeleton_state(t - h, mp, (0.3, 1.1))
        np.testing.assert_allclose((p2 - p0) / (2 * h), v, atol=1e-6)


def test_peak_speed_bounds_sampled_speeds():
    mp = MotionParams()
    torso_bound, limb_bound = mp.peak_speed()
    speeds = [np.linalg.norm(skeleton_state(t, mp)[1], axis=1) for t in np.linspace(0, 40, 2001)]
    speeds = np.array(speeds)
    assert speeds.max() <= limb_bound + 1e-12
    assert speeds[:, :4].max() <= torso_bound + 1e-12


def test_joint_scatterer_geometry():
    pos = np.array([[0.5, 0.2, 1.0]])
    vel = np.array([[0.0, 0.0, -1.0]])  # walking towards the radar
    (s,) = joint_scatterers(pos, vel, [1.0])
    d = math.sqrt(0.25 + 0.04 + 1.0)
    assert s.d == pytest.approx(d)
    assert s.theta == pytest.approx(math.asin(0.5 / d))
    assert s.v == pytest.approx(1.0 / d) and s.v > 0


def test_skeleton_dataset_shapes_and_determinism():
    cubes, poses = make_skeleton_dataset(3, seed=4)
    assert poses.shape == (3, 14, 3) and poses.dtype == np.float32
    assert cubes[0].dims == (64, 64, 16) and cubes[0].data.dtype == np.complex64
    assert cubes[0].axes.dims == (64, 64, 16)
    again = list(iter_skeleton_dataset(3, seed=4))
    for c, (c2, p2) in zip(cubes, again):
        assert np.array_equal(c.data, c2.data)
    assert np.array_equal(poses, np.stack([p for _, p in again]))
    other = make_skeleton_dataset(1, seed=5)[1]
    assert not np.array_equal(poses[0], other[0])


def test_skeleton_dataset_stays_inside_first_range_bins():
    mp = MotionParams()
    max_d = max(np.linalg.norm(skeleton_state(t, mp)[0], axis=1).max() for t in np.linspace(0, 60, 601))
    assert max_d < 64 * P.range_res


def test_skeleton_dataset_rejects_aliasing_motion():
    with pytest.raises(SceneError):
        next(iter_skeleton_dataset(1, MotionParams(limb_amp=3.0, gait_hz=2.0)))
    with pytest.raises(ValueError):
        next(iter_skeleton_dataset(0))


def test_unit_tone_has_unit_modulus():
    s = synthesize_frame(Scene([Scatterer(1.3, 0.2, 0.7)]), CFG)
    np.testing.assert_allclose(np.abs(s), 1.0, atol=1e-12)


def test_two_metre_example():
    p = Scatterer(d=2.0, theta=0.0, v=1.0)
    bins = expected_bins(p, CFG)
    assert bins[0] == 48 and bins[1] == 32
    assert bins[2] == round(8 + 1.0 / P.v_amb * 8) == 9
    cube = fft_chain(synthesize_frame(Scene([p]), CFG), 64).data
    assert peak(cube) == bins


def test_positive_velocity_above_centre():
    for v in (1.0, 3.0, 9.0):  # at least half a bin (~0.9 m/s) above zero
        assert expected_bins(Scatterer(1.0, 0.0, v), CFG)[2] > 8
        cube = fft_chain(synthesize_frame(Scene([Scatterer(1.0, 0.0, v)]), CFG), 64).data
        assert peak(cube)[2] > 8


def test_superposition():
    a = [Scatterer(1.0, 0.1, 0.5, 0.5 + 0.2j)]
    b = [Scatterer(2.2, -0.4, -1.5, 2.0)]
    both = synthesize_frame(Scene(a + b), CFG)
    np.testing.assert_allclose(both, synthesize_frame(Scene(a), CFG) + synthesize_frame(Scene(b), CFG), atol=1e-12)
    clutter = synthesize_frame(Scene(a, clutter=b), CFG)
    np.testing.assert_allclose(clutter, both, atol=1e-12)


def test_still_motion_is_rest_pose():
    from radpose.simulator import REST_OFFSETS

    mp = MotionParams.still()
    cubes, poses = make_skeleton_dataset(1, mp, seed=2)
    rest = (np.array(mp.root) + REST_OFFSETS) * 1000
    np.testing.assert_allclose(poses[0], rest, atol=1e-3)
    pos, vel = skeleton_state(5.0, mp)
    assert not vel.any()
    for s in joint_scatterers(pos, vel, np.ones(14)):
        assert expected_bins(s, CFG)[2] == 8


def test_consecutive_frames_follow_gait():
    mp = MotionParams()
    phase = (0.4, 2.0)
    p0, _ = skeleton_state(10.0, mp, phase)
    p1, _ = skeleton_state(10.0 + mp.frame_period, mp, phase)
    w = 2 * np.pi
    dx = mp.path_x * (np.sin(w / mp.period_x * 10.1 + 0.4) - np.sin(w / mp.period_x * 10.0 + 0.4))
    np.testing.assert_allclose(p1[:, 0] - p0[:, 0], dx, atol=1e-12)
    wrist = 6  # r_wrist swings along z on top of the root path
    g = w * mp.gait_hz
    dz_root = mp.path_z * (np.sin(w / mp.period_z * 10.1 + 2.0) - np.sin(w / mp.period_z * 10.0 + 2.0))
    dz_swing = mp.limb_amp * (np.sin(g * 10.1) - np.sin(g * 10.0))
    assert p1[wrist, 2] - p0[wrist, 2] == pytest.approx(dz_root + dz_swing, abs=1e-12)


def test_off_grid_within_one_bin(rng):
    for _ in range(20):
        p = Scatterer(d=rng.uniform(0.2, 2.5), theta=rng.uniform(-1.0, 1.0), v=rng.uniform(-12, 12))
        got = peak(fft_chain(synthesize_frame(Scene([p]), CFG), 64).data)
        assert all(abs(int(g) - e) <= 1 for g, e in zip(got, expected_bins(p, CFG)))


def test_long_dataset_regenerates_identically():
    import hashlib

    def digest():
        h = hashlib.sha256()
        for cube, pose in iter_skeleton_dataset(200, seed=77):
            h.update(cube.data.tobytes())
            h.update(pose.tobytes())
        return h.hexdigest()

    assert digest() == digest()
