import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radpose.hmsf import (
    PoolSpec, avg_pool3, feature_length, fuse, global_features, grid_kernel, multi_scale, upsample_trilinear,
)
from radpose.mcp import MotionDescriptors
from radpose.radar_core import DimensionError
from radpose.tensor_io import RealCube


def block_means(x, k):
    c, r, a, d = x.shape
    out = np.zeros((c, r // k[0], a // k[1], d // k[2]))
    for ch in range(c):
        for i in range(out.shape[1]):
            for j in range(out.shape[2]):
                for l in range(out.shape[3]):
                    tot = 0.0
                    for ii in range(i * k[0], (i + 1) * k[0]):
                        for jj in range(j * k[1], (j + 1) * k[1]):
                            for ll in range(l * k[2], (l + 1) * k[2]):
                                tot += x[ch, ii, jj, ll]
                    out[ch, i, j, l] = tot / (k[0] * k[1] * k[2])
    return out


def test_pool_example():
    x = RealCube(np.arange(8, dtype=float).reshape(1, 2, 2, 2))
    assert avg_pool3(x, 2).data.ravel().tolist() == [3.5]


def test_pool_kernel_clamps_per_axis():
    x = RealCube(np.ones((1, 64, 64, 16)))
    assert avg_pool3(x, 9).dims == (7, 7, 1)
    assert avg_pool3(x, 20).dims == (3, 3, 1)
    with pytest.raises(ValueError):
        avg_pool3(x, 0)


def test_upsample_identity_and_constant():
    x = RealCube(np.random.default_rng(0).normal(size=(1, 3, 3, 2)))
    assert np.array_equal(upsample_trilinear(x, (3, 3, 2)).data, x.data)
    c = RealCube(np.full((2, 2, 3, 1), 4.25))
    assert (upsample_trilinear(c, (5, 7, 4)).data == 4.25).all()
    with pytest.raises(DimensionError):
        upsample_trilinear(x, (2, 3, 2))


def test_upsample_1d_profile():
    x = RealCube(np.array([0.0, 1.0]).reshape(1, 2, 1, 1))
    got = upsample_trilinear(x, (4, 1, 1)).data.ravel()
    np.testing.assert_allclose(got, [0.0, 0.25, 0.75, 1.0])


def test_fuse_order_and_dims():
    a, b, c = (RealCube(np.full((1, 2, 2, 2), v)) for v in (1.0, 2.0, 3.0))
    assert fuse(a, b, c).data[:, 0, 0, 0].tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(DimensionError):
        fuse(a, b, RealCube(np.zeros((1, 2, 2, 1))))


def test_multi_scale_shapes(rng):
    x = RealCube(rng.random((1, 16, 16, 8)))
    coarse, medium, f = multi_scale(x, PoolSpec(3, 5))
    assert coarse.dims == (5, 5, 2) and medium.dims == (3, 3, 1)
    assert f.data.shape == (3, 16, 16, 8)
    assert np.array_equal(f.data[2], x.data[0])
    with pytest.raises(ValueError):
        PoolSpec(0, 3)


def test_global_features_layout(rng):
    f = RealCube(rng.random((3, 8, 8, 4)))
    d = MotionDescriptors(0.1, 0.2, 0.3)
    g = global_features(f, d, (1, 1, 1))
    np.testing.assert_allclose(g[:3], f.data.mean(axis=(1, 2, 3)))
    assert g[3:].tolist() == [0.1, 0.2, 0.3]
    g = global_features(f, d, (2, 2, 2))
    assert len(g) == feature_length((2, 2, 2)) == 27
    np.testing.assert_allclose(g[:24], block_means(f.data, (4, 4, 2)).ravel())


def test_global_features_crops_remainder():
    f = RealCube(np.arange(3 * 5 * 4 * 2, dtype=float).reshape(3, 5, 4, 2))
    g = global_features(f, MotionDescriptors(), (2, 2, 1))
    assert grid_kernel((5, 4, 2), (2, 2, 1)) == (2, 2, 2)
    np.testing.assert_allclose(g[:-3], block_means(f.data[:, :4], (2, 2, 2)).ravel())
    with pytest.raises(DimensionError):
        global_features(f, MotionDescriptors(), (6, 1, 1))


@given(st.integers(0, 2**31), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_pool_then_upsample_preserves_block_mean_of_constant_blocks(seed, k):
    # a tensor that is constant on k-blocks pools to exactly those constants
    rng = np.random.default_rng(seed)
    coarse = rng.normal(size=(1, 2, 3, 1))
    fine = np.repeat(np.repeat(np.repeat(coarse, k, 1), k, 2), k, 3)
    np.testing.assert_allclose(avg_pool3(RealCube(fine), (k, k, k)).data, coarse, atol=1e-12)


def test_pool_examples():
    x = RealCube(np.array([1.0, 2.0, 3.0, 4.0]).reshape(1, 4, 1, 1))
    assert avg_pool3(x, (2, 1, 1)).data.ravel().tolist() == [1.5, 3.5]
    c = RealCube(np.full((1, 6, 6, 4), 2.5))
    assert (avg_pool3(c, 3).data == 2.5).all()


def test_pool_random_against_loops(rng):
    x = rng.normal(size=(1, 8, 8, 4))
    np.testing.assert_allclose(avg_pool3(RealCube(x), 2).data, block_means(x, (2, 2, 2)), atol=1e-12)


def _tri_oracle(x, out_shape):
    # direct evaluation at every output site: half-pixel source coordinate,
    # clamped, then the 8-corner weighted sum
    src = x.shape
    out = np.zeros(out_shape)
    for idx in np.ndindex(out_shape):
        lo, frac = [], []
        for i, s, o in zip(idx, src, out_shape):
            p = min(max((i + 0.5) * s / o - 0.5, 0.0), s - 1)
            lo.append(int(np.floor(p)))
            frac.append(p - np.floor(p))
        val = 0.0
        for corner in np.ndindex(2, 2, 2):
            w = 1.0
            pos = []
            for c, l, f, s in zip(corner, lo, frac, src):
                w *= f if c else 1 - f
                pos.append(min(l + c, s - 1))
            val += w * x[tuple(pos)]
        out[idx] = val
    return out


def test_trilinear_closed_form_2_to_4():
    x = np.arange(8.0).reshape(2, 2, 2)
    got = upsample_trilinear(RealCube(x[None]), (4, 4, 4)).data[0]
    np.testing.assert_allclose(got, _tri_oracle(x, (4, 4, 4)), atol=1e-12)


def test_trilinear_random_and_convex(rng):
    x = rng.normal(size=(3, 2, 5))
    got = upsample_trilinear(RealCube(x[None]), (7, 5, 9)).data[0]
    np.testing.assert_allclose(got, _tri_oracle(x, (7, 5, 9)), atol=1e-12)
    assert got.min() >= x.min() - 1e-12 and got.max() <= x.max() + 1e-12


def test_literal_pooling_example():
    chans = [RealCube(np.full((1, 4, 4, 2), v)) for v in (1.0, 2.0, 3.0)]
    g = global_features(fuse(*chans), MotionDescriptors(), (1, 1, 1))
    assert g.tolist() == [1.0, 2.0, 3.0, 0.0, 0.0, 0.0]


def test_octant_means():
    x = np.zeros((3, 4, 4, 2))
    for c in range(3):
        for i in range(2):
            for j in range(2):
                x[c, 2 * i:2 * i + 2, 2 * j:2 * j + 2] = 10 * c + 2 * i + j
    g = global_features(RealCube(x), MotionDescriptors(), (2, 2, 1))
    assert g[:12].tolist() == [10.0 * c + 2 * i + j for c in range(3) for i in range(2) for j in range(2)]


@given(st.integers(0, 2**31), st.integers(1, 5))
@settings(max_examples=30, deadline=None)
def test_pool_mean_preservation(seed, k):
    rng = np.random.default_rng(seed)
    x = rng.random((1, 11, 9, 6))
    kk = tuple(min(k, n) for n in x.shape[1:])
    covered = x[:, : 11 // kk[0] * kk[0], : 9 // kk[1] * kk[1], : 6 // kk[2] * kk[2]]
    pooled = avg_pool3(RealCube(x), k).data
    assert abs(pooled.mean() - covered.mean()) <= 1e-9 * covered.mean()


def test_fuse_copies_inputs(rng):
    a, b, c = (RealCube(rng.normal(size=(1, 3, 3, 2))) for _ in range(3))
    f = fuse(a, b, c).data
    for i, src in enumerate((a, b, c)):
        assert np.array_equal(f[i], src.data[0])
