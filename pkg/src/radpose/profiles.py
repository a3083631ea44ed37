"""Named front-end hyperparameter bundles and their text format.

Format: one ``key = value`` per line, ``#`` starts a comment. Angles are in
degrees, distances in meters, velocities in m/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from radpose.dsp_baseline import CfarParams
from radpose.hmsf import PoolSpec, feature_length
from radpose.mcp import DopplerThresholds
from radpose.ssp import SpatialBounds


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Profile:
    name: str
    d_min: float
    d_max: float
    theta_min_deg: float
    theta_max_deg: float
    v_min: float
    v_max: float
    sigma_min: float
    sigma_max: float = math.inf
    window_radius: int = 2
    s_c: int = 5
    s_m: int = 9
    grid: tuple[int, int, int] = (4, 4, 2)
    h1: int = 512
    h2: int = 512
    cfar_guard: int = 1
    cfar_train: int = 4
    cfar_p_fa: float = 1e-3

    def __post_init__(self):
        _ = (self.bounds, self.thresholds, self.pool, self.cfar)  # component invariants raise here
        if self.window_radius < 1 or min(self.grid) < 1 or self.h1 < 1 or self.h2 < 1:
            raise ProfileError(f"profile {self.name!r}: window radius, grid and widths must be >= 1")

    @property
    def bounds(self) -> SpatialBounds:
        return SpatialBounds.from_degrees(self.d_min, self.d_max, self.theta_min_deg, self.theta_max_deg)

    @property
    def thresholds(self) -> DopplerThresholds:
        return DopplerThresholds(self.v_min, self.v_max, self.sigma_min, self.sigma_max)

    @property
    def pool(self) -> PoolSpec:
        return PoolSpec(self.s_c, self.s_m)

    @property
    def cfar(self) -> CfarParams:
        return CfarParams(self.cfar_guard, self.cfar_train, self.cfar_p_fa)

    @property
    def feature_dim(self) -> int:
        return feature_length(self.grid)

    def paper_literal(self) -> "Profile":
        """Same profile with global (1, 1, 1) pooling."""
        return replace(self, grid=(1, 1, 1))


# Spatial mask, Doppler mask and kernel pairs of the five runtime profiles.
BUILTIN = {
    p.name: p
    for p in (
        Profile("Ultra-Light", 0.5, 2.0, -40.0, 40.0, 0.3, 2.0, 0.5, s_c=3, s_m=5),
        Profile("Light", 0.4, 2.5, -50.0, 50.0, 0.2, 2.5, 0.4, s_c=3, s_m=5),
        Profile("Balanced", 0.3, 3.0, -60.0, 60.0, 0.1, 3.0, 0.3, s_c=5, s_m=9),
        Profile("High-Precision", 0.2, 3.5, -70.0, 70.0, 0.05, 3.5, 0.2, s_c=7, s_m=13),
        Profile("Ultra-Precision", 0.1, 4.0, -80.0, 80.0, 0.05, 4.0, 0.1, s_c=7, s_m=13),
    )
}
PROFILE_ORDER = tuple(BUILTIN)

_KEYS = {
    "ssp.d_min": ("d_min", float),
    "ssp.d_max": ("d_max", float),
    "ssp.theta_min": ("theta_min_deg", float),
    "ssp.theta_max": ("theta_max_deg", float),
    "mcp.v_min": ("v_min", float),
    "mcp.v_max": ("v_max", float),
    "mcp.sigma_min": ("sigma_min", float),
    "mcp.sigma_max": ("sigma_max", float),
    "mcp.window_radius": ("window_radius", int),
    "hmsf.s_c": ("s_c", int),
    "hmsf.s_m": ("s_m", int),
    "hmsf.grid_r": (None, int),
    "hmsf.grid_a": (None, int),
    "hmsf.grid_d": (None, int),
    "mlp.h1": ("h1", int),
    "mlp.h2": ("h2", int),
    "cfar.guard": ("cfar_guard", int),
    "cfar.train": ("cfar_train", int),
    "cfar.p_fa": ("cfar_p_fa", float),
}
_REQUIRED = ("ssp.d_min", "ssp.d_max", "ssp.theta_min", "ssp.theta_max", "mcp.v_min", "mcp.v_max", "mcp.sigma_min")


def emit_profile(p: Profile) -> str:
    lines = ["# radpose front-end profile", f"name = {p.name}"]
    for key, (attr, _) in _KEYS.items():
        if attr is None:
            val = p.grid["rad".index(key[-1])]
        else:
            val = getattr(p, attr)
        lines.append(f"{key} = {val!r}" if isinstance(val, float) else f"{key} = {val}")
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> Profile:
    vals: dict[str, object] = {}
    grid = {}
    name = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProfileError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "name":
            name = val
            continue
        if key not in _KEYS:
            raise ProfileError(f"line {lineno}: unknown key {key!r}")
        attr, conv = _KEYS[key]
        try:
            parsed = conv(val)
        except ValueError:
            raise ProfileError(f"line {lineno}: bad value {val!r} for {key}") from None
        if attr is None:
            grid[key[-1]] = parsed
        else:
            vals[attr] = parsed
    if name is None:
        raise ProfileError("profile has no name")
    missing = [k for k in _REQUIRED if _KEYS[k][0] not in vals]
    if missing:
        raise ProfileError(f"profile {name!r} is missing {', '.join(missing)}")
    if grid:
        if set(grid) != set("rad"):
            raise ProfileError("hmsf.grid_r/grid_a/grid_d must be given together")
        vals["grid"] = (grid["r"], grid["a"], grid["d"])
    try:
        return Profile(name=name, **vals)
    except ValueError as exc:
        raise ProfileError(str(exc)) from None


def load_profile(spec: str) -> Profile:
    """Built-in name (case-insensitive) or path to a profile file."""
    for name, prof in BUILTIN.items():
        if spec.lower() == name.lower():
            return prof
    path = Path(spec)
    if not path.is_file():
        raise ProfileError(f"no built-in profile or file named {spec!r}")
    return parse_profile(path.read_text())
