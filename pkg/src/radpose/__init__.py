"""Physics-guided radar pose front end: FMCW cube synthesis, spatial and
motion masking, multi-scale pooling and an MLP pose regressor."""

from radpose.radar_core import RadarConfig, build_axis_maps, derive_params, fft_chain
from radpose.tensor_io import RadCube, RealCube, magnitude
from radpose.profiles import BUILTIN, Profile, load_profile
from radpose.pipeline import build_pseudo_rad, flop_estimate, run_pipeline

__version__ = "0.1.0"
