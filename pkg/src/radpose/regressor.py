"""Pose regression MLP (two ReLU hidden layers), Adam training, and the
MAJPE / PA-MAJPE error metrics."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import BinaryIO

import numpy as np

from radpose.tensor_io import FORMAT_VERSION, _check_count, _read_exact, _read_header


class ShapeError(ValueError):
    pass


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""


@dataclass(frozen=True)
class MlpShape:
    c: int
    h1: int = 512
    h2: int = 512
    d_out: int = 42

    def __post_init__(self):
        if min(self.c, self.h1, self.h2, self.d_out) < 1:
            raise ShapeError("all widths must be >= 1")
        if self.d_out % 3:
            raise ShapeError("d_out must be a multiple of 3")


@dataclass
class MlpWeights:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray

    NAMES = ("w1", "b1", "w2", "b2", "w3", "b3")

    @property
    def shape(self) -> MlpShape:
        return MlpShape(self.w1.shape[1], self.w1.shape[0], self.w2.shape[0], self.w3.shape[0])

    def arrays(self) -> list[np.ndarray]:
        return [getattr(self, n) for n in self.NAMES]

    def copy(self) -> "MlpWeights":
        return MlpWeights(*(a.copy() for a in self.arrays()))

    def validate(self) -> None:
        s = self.shape
        want = [(s.h1, s.c), (s.h1,), (s.h2, s.h1), (s.h2,), (s.d_out, s.h2), (s.d_out,)]
        for name, arr, shp in zip(self.NAMES, self.arrays(), want):
            if arr.shape != shp:
                raise ShapeError(f"{name} has shape {arr.shape}, expected {shp}")


def param_count(shape: MlpShape) -> int:
    c, h1, h2, d = shape.c, shape.h1, shape.h2, shape.d_out
    return (c * h1 + h1) + (h1 * h2 + h2) + (h2 * d + d)


def init_weights(shape: MlpShape, seed: int = 0) -> MlpWeights:
    """Glorot-uniform matrices, zero biases."""
    rng = np.random.Generator(np.random.PCG64(seed))

    def glorot(fan_out, fan_in):
        lim = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-lim, lim, size=(fan_out, fan_in))

    return MlpWeights(
        glorot(shape.h1, shape.c), np.zeros(shape.h1),
        glorot(shape.h2, shape.h1), np.zeros(shape.h2),
        glorot(shape.d_out, shape.h2), np.zeros(shape.d_out),
    )


def _forward(w: MlpWeights, x: np.ndarray):
    z1 = x @ w.w1.T + w.b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ w.w2.T + w.b2
    h2 = np.maximum(z2, 0.0)
    return z1, h1, z2, h2, h2 @ w.w3.T + w.b3


def prn_forward(w: MlpWeights, f: np.ndarray) -> np.ndarray:
    """Feature vector (C,) -> pose (J, 3); a batch (B, C) gives (B, J, 3)."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape[-1] != w.w1.shape[1]:
        raise ShapeError(f"feature length {f.shape[-1]} != C = {w.w1.shape[1]}")
    o = _forward(w, f)[-1]
    return o.reshape(f.shape[:-1] + (-1, 3))


def _loss_and_grads(w: MlpWeights, x: np.ndarray, y: np.ndarray):
    """Loss 0.5 * mean((o - y)^2) over batch and coordinates, and its gradients."""
    z1, h1, z2, h2, o = _forward(w, x)
    err = o - y
    loss = 0.5 * float(np.mean(err * err))
    g_o = err / err.size
    g_w3 = g_o.T @ h2
    g_b3 = g_o.sum(axis=0)
    g_z2 = (g_o @ w.w3) * (z2 > 0)
    g_w2 = g_z2.T @ h1
    g_b2 = g_z2.sum(axis=0)
    g_z1 = (g_z2 @ w.w2) * (z1 > 0)
    g_w1 = g_z1.T @ x
    g_b1 = g_z1.sum(axis=0)
    return loss, MlpWeights(g_w1, g_b1, g_w2, g_b2, g_w3, g_b3)


def prn_backward(w: MlpWeights, f: np.ndarray, target: np.ndarray) -> MlpWeights:
    """Exact gradients of 0.5 * mean squared coordinate error for one pair."""
    f = np.asarray(f, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64).reshape(1, -1)
    if f.shape != (w.w1.shape[1],) or y.shape[1] != w.w3.shape[0]:
        raise ShapeError("feature/target shapes do not match the network")
    return _loss_and_grads(w, f[None, :], y)[1]


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    epochs: int = 200
    seed: int = 0
    # Train in z-scored feature / centered-and-scaled target coordinates and
    # fold the affine maps into the first and last layers afterwards.
    standardize: bool = True

    def __post_init__(self):
        if self.lr < 0 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("invalid training configuration")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1 and self.eps > 0):
            raise ValueError("Adam betas must lie in (0, 1) and eps > 0")


@dataclass
class TrainResult:
    weights: MlpWeights
    losses: list[float] = field(default_factory=list)  # per-epoch MSE, mm^2


def _fold(w: MlpWeights, f_mu, f_sd, y_mu, y_scale) -> MlpWeights:
    w1 = w.w1 / f_sd[None, :]
    b1 = w.b1 - w1 @ f_mu
    return MlpWeights(w1, b1, w.w2.copy(), w.b2.copy(), w.w3 * y_scale, w.b3 * y_scale + y_mu)


def train(features: np.ndarray, poses: np.ndarray, cfg: TrainConfig = TrainConfig(),
          shape: MlpShape | None = None, init: MlpWeights | None = None) -> TrainResult:
    """Minibatch Adam on the 0.5 * MSE loss.

    Update per parameter, step t (1-based)::

        m = b1 m + (1 - b1) g;  v = b2 v + (1 - b2) g^2
        p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)

    Shuffle order comes from PCG64(seed); batches are processed in order.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(poses, dtype=np.float64).reshape(len(x), -1)
    if len(x) == 0:
        raise ValueError("empty dataset")
    if shape is None:
        shape = init.shape if init is not None else MlpShape(x.shape[1], d_out=y.shape[1])
    if shape.c != x.shape[1] or shape.d_out != y.shape[1]:
        raise ShapeError(f"network {shape} does not match data ({x.shape[1]} -> {y.shape[1]})")
    w = init.copy() if init is not None else init_weights(shape, cfg.seed)

    if cfg.standardize:
        f_mu = x.mean(axis=0)
        f_sd = x.std(axis=0)
        f_sd = np.where(f_sd > 1e-12 * max(1.0, float(np.abs(f_mu).max())), f_sd, 1.0)
        y_mu = y.mean(axis=0)
        y_scale = float(np.sqrt(np.mean((y - y_mu) ** 2))) or 1.0
        x = (x - f_mu) / f_sd
        y = (y - y_mu) / y_scale
    else:
        y_scale = 1.0

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    params = w.arrays()
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    step = 0
    losses = []
    n = len(x)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, grads = _loss_and_grads(w, x[idx], y[idx])
            if not math.isfinite(loss):
                raise DivergenceError(f"non-finite loss at step {step}")
            total += loss * len(idx)
            step += 1
            c1 = 1.0 - cfg.beta1**step
            c2 = 1.0 - cfg.beta2**step
            for p, g, mi, vi in zip(params, grads.arrays(), m, v):
                mi *= cfg.beta1
                mi += (1.0 - cfg.beta1) * g
                vi *= cfg.beta2
                vi += (1.0 - cfg.beta2) * (g * g)
                p -= cfg.lr * (mi / c1) / (np.sqrt(vi / c2) + cfg.eps)
        losses.append(2.0 * total / n * y_scale**2)

    if cfg.standardize:
        w = _fold(w, f_mu, f_sd, y_mu, y_scale)
    return TrainResult(weights=w, losses=losses)


def save_weights(w: MlpWeights, sink: BinaryIO) -> None:
    """PRNW: magic, u32 version, u32 C, H1, H2, D_out, then f32 LE arrays
    (W1, b1, W2, b2, W3, b3), matrices row-major."""
    s = w.shape
    sink.write(b"PRNW" + struct.pack("<5I", FORMAT_VERSION, s.c, s.h1, s.h2, s.d_out))
    for arr in w.arrays():
        sink.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_weights(source: BinaryIO) -> MlpWeights:
    c, h1, h2, d = _read_header(source, b"PRNW", 5)
    shape = MlpShape(c, h1, h2, d)
    shapes = [(h1, c), (h1,), (h2, h1), (h2,), (d, h2), (d,)]
    arrays = []
    for shp in shapes:
        n = _check_count(shp)
        buf = _read_exact(source, 4 * n, "weight payload")
        arrays.append(np.frombuffer(buf, dtype="<f4").astype(np.float64).reshape(shp))
    w = MlpWeights(*arrays)
    assert w.shape == shape
    return w


# Metrics ------------------------------------------------------------------


def _as_frames(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    return p[None] if p.ndim == 2 else p


def majpe(pred, gt) -> float:
    """Mean Euclidean joint error (mm) over frames and joints."""
    pred, gt = _as_frames(pred), _as_frames(gt)
    if pred.shape != gt.shape:
        raise ShapeError(f"prediction {pred.shape} and ground truth {gt.shape} differ")
    return float(np.mean(np.linalg.norm(pred - gt, axis=-1)))


def jacobi_svd3(m: np.ndarray, sweeps: int = 30):
    """One-sided (Hestenes) Jacobi SVD of a 3x3 matrix: m = U diag(s) V^T.

    Singular values come back in descending order. Columns of U for zero
    singular values are left as zero vectors.
    """
    a = np.array(m, dtype=np.float64)
    v = np.eye(3)
    for _ in range(sweeps):
        rotated = False
        for p, q in ((0, 1), (0, 2), (1, 2)):
            alpha = a[:, p] @ a[:, p]
            beta = a[:, q] @ a[:, q]
            gamma = a[:, p] @ a[:, q]
            if abs(gamma) <= 1e-15 * math.sqrt(alpha * beta) or gamma == 0.0:
                continue
            rotated = True
            zeta = (beta - alpha) / (2.0 * gamma)
            t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = c * t
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    sv = np.sqrt(np.sum(a * a, axis=0))
    order = np.argsort(-sv, kind="stable")
    sv, a, v = sv[order], a[:, order], v[:, order]
    u = np.zeros((3, 3))
    for i in range(3):
        if sv[i] > 0:
            u[:, i] = a[:, i] / sv[i]
    return u, sv, v


def _det3(m: np.ndarray) -> float:
    return float(m[:, 0] @ np.cross(m[:, 1], m[:, 2]))


def procrustes_align(pred: np.ndarray, gt: np.ndarray) -> np.ndarray:
    """Best similarity transform (rotation, uniform scale, translation) of
    ``pred`` onto ``gt``. Rank-deficient sets fall back to translation only."""
    x = np.asarray(pred, dtype=np.float64)
    y = np.asarray(gt, dtype=np.float64)
    mx, my = x.mean(axis=0), y.mean(axis=0)
    xc, yc = x - mx, y - my
    u, sv, v = jacobi_svd3(yc.T @ xc)
    norm_x = float(np.sum(xc * xc))
    if norm_x == 0.0 or sv[0] == 0.0 or sv[1] <= 1e-12 * sv[0]:
        return xc + my
    if sv[2] <= 1e-12 * sv[0]:
        u[:, 2] = np.cross(u[:, 0], u[:, 1])
    d = 1.0 if _det3(u) * _det3(v) > 0 else -1.0
    rot = u @ np.diag([1.0, 1.0, d]) @ v.T
    scale = (sv[0] + sv[1] + d * sv[2]) / norm_x
    return scale * xc @ rot.T + my


def pa_majpe(pred, gt) -> float:
    pred, gt = _as_frames(pred), _as_frames(gt)
    if pred.shape != gt.shape:
        raise ShapeError(f"prediction {pred.shape} and ground truth {gt.shape} differ")
    if pred.shape[1] < 3:
        raise ShapeError("PA-MAJPE needs at least 3 joints")
    aligned = np.stack([procrustes_align(p, g) for p, g in zip(pred, gt)])
    return majpe(aligned, gt)
