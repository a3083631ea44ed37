"""Tensor containers and their little-endian binary formats.

RADC layout::

    b"RADC" | u32 version | u32 R | u32 A | u32 D | R*A*D x (f32 re, f32 im)

POSE layout::

    b"POSE" | u32 version | u32 frames | u32 J | u32 3 | frames*J*3 x f32 (mm)

Metrics records are single lines of ``key=value`` pairs separated by one
space; keys match ``[a-z_]+`` and values are decimals or double-quoted
strings (backslash escapes ``\\"`` and ``\\\\``).
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Mapping

import numpy as np

FORMAT_VERSION = 1
_U32_MAX = 2**32 - 1
_MAX_ELEMENTS = 2**31  # refuse payloads above 16 GiB

JOINT_NAMES = (
    "head",
    "neck",
    "r_shoulder",
    "l_shoulder",
    "r_elbow",
    "l_elbow",
    "r_wrist",
    "l_wrist",
    "r_hip",
    "l_hip",
    "r_knee",
    "l_knee",
    "r_ankle",
    "l_ankle",
)


class FormatError(ValueError):
    """Base class for malformed binary streams."""


class BadMagicError(FormatError):
    pass


class TruncatedPayloadError(FormatError):
    pass


class DimensionOverflowError(FormatError):
    pass


@dataclass
class RadCube:
    """Complex (range, angle, Doppler) cube; ``axes`` is an optional AxisMaps."""

    data: np.ndarray
    axes: object = None

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValueError(f"RadCube data must be 3-D, got shape {self.data.shape}")
        if not np.iscomplexobj(self.data):
            self.data = self.data.astype(np.complex128)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape


@dataclass
class RealCube:
    """Real tensor with an explicit leading channel axis: (C, R, A, D)."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 4 or self.data.shape[0] < 1:
            raise ValueError(f"RealCube data must be (C, R, A, D), got shape {self.data.shape}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape[1:]


def magnitude(cube: RadCube, support: np.ndarray | None = None) -> RealCube:
    """|z| in float64 as a one-channel RealCube.

    ``support`` is an optional (R, A) mask promising that the cube is zero
    elsewhere; only those cells are evaluated. The result is identical.
    """
    z = cube.data
    if support is None:
        return RealCube(np.hypot(z.real.astype(np.float64), z.imag.astype(np.float64))[None])
    support = np.asarray(support, dtype=bool)
    out = np.zeros((1,) + z.shape)
    sel = z[support]
    out[0][support] = np.hypot(sel.real.astype(np.float64), sel.imag.astype(np.float64))
    return RealCube(out)


def _read_exact(src: BinaryIO, n: int, what: str) -> bytes:
    buf = src.read(n)
    if len(buf) != n:
        raise TruncatedPayloadError(f"{what}: expected {n} bytes, got {len(buf)}")
    return buf


def _read_header(src: BinaryIO, magic: bytes, n_fields: int) -> tuple[int, ...]:
    got = src.read(4)
    if got != magic:
        raise BadMagicError(f"expected magic {magic!r}, got {got!r}")
    fields = struct.unpack(f"<{n_fields}I", _read_exact(src, 4 * n_fields, "header"))
    if fields[0] != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {fields[0]}")
    return fields[1:]


def _check_count(dims: Iterable[int]) -> int:
    total = 1
    for d in dims:
        if d < 0 or d > _U32_MAX:
            raise DimensionOverflowError(f"dimension {d} does not fit in u32")
        total *= d
    if total > _MAX_ELEMENTS:
        raise DimensionOverflowError(f"{total} elements exceeds the format limit")
    return total


def write_cube(cube: RadCube, sink: BinaryIO) -> None:
    r, a, d = cube.dims
    _check_count((r, a, d))
    sink.write(b"RADC" + struct.pack("<4I", FORMAT_VERSION, r, a, d))
    sink.write(np.ascontiguousarray(cube.data, dtype="<c8").tobytes())


def read_cube(source: BinaryIO) -> RadCube:
    r, a, d = _read_header(source, b"RADC", 4)
    n = _check_count((r, a, d))
    payload = _read_exact(source, 8 * n, "cube payload")
    data = np.frombuffer(payload, dtype="<c8").astype(np.complex64).reshape(r, a, d)
    return RadCube(data)


def write_pose_set(poses: np.ndarray, sink: BinaryIO) -> None:
    poses = np.asarray(poses)
    if poses.ndim != 3 or poses.shape[2] != 3:
        raise ValueError(f"pose set must be (frames, J, 3), got {poses.shape}")
    frames, j, _ = poses.shape
    _check_count((frames, j, 3))
    sink.write(b"POSE" + struct.pack("<4I", FORMAT_VERSION, frames, j, 3))
    sink.write(np.ascontiguousarray(poses, dtype="<f4").tobytes())


def read_pose_set(source: BinaryIO) -> np.ndarray:
    frames, j, three = _read_header(source, b"POSE", 4)
    if three != 3:
        raise FormatError(f"pose coordinate count must be 3, got {three}")
    n = _check_count((frames, j, 3))
    payload = _read_exact(source, 4 * n, "pose payload")
    return np.frombuffer(payload, dtype="<f4").astype(np.float32).reshape(frames, j, 3)


_KEY = re.compile(r"[a-z_]+\Z")
_PAIR = re.compile(r'([a-z_]+)=("(?:[^"\\]|\\.)*"|[^\s"]+)')


def format_record(fields: Mapping[str, object]) -> str:
    parts = []
    for key, val in fields.items():
        if not _KEY.match(key):
            raise ValueError(f"bad record key {key!r}")
        if isinstance(val, str):
            esc = val.replace("\\", "\\\\").replace('"', '\\"')
            parts.append(f'{key}="{esc}"')
        elif isinstance(val, (bool, np.bool_)):
            parts.append(f"{key}={int(val)}")
        elif isinstance(val, (int, np.integer)):
            parts.append(f"{key}={int(val)}")
        elif isinstance(val, (float, np.floating)):
            parts.append(f"{key}={float(val)!r}")
        else:
            raise TypeError(f"record value for {key!r} must be a number or string")
    return " ".join(parts)


def parse_record(line: str) -> dict[str, object]:
    line = line.strip()
    out: dict[str, object] = {}
    pos = 0
    while pos < len(line):
        m = _PAIR.match(line, pos)
        if m is None:
            raise FormatError(f"malformed record at column {pos}: {line!r}")
        key, raw = m.groups()
        if raw.startswith('"'):
            out[key] = re.sub(r"\\(.)", r"\1", raw[1:-1])
        else:
            try:
                out[key] = int(raw)
            except ValueError:
                try:
                    out[key] = float(raw)
                except ValueError:
                    raise FormatError(f"value for {key!r} is neither decimal nor quoted: {raw!r}") from None
        pos = m.end()
        if pos < len(line):
            if line[pos] != " ":
                raise FormatError(f"expected single space at column {pos}: {line!r}")
            pos += 1
    return out
