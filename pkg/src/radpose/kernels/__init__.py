"""Hot numeric kernels, dispatched to numba or pure numpy.

Both implementations are importable directly (``kernels._numpy``,
``kernels._numba``); the names exported here follow ``RADPOSE_BACKEND``.
"""

from radpose._backend import BACKEND
from radpose.kernels import _numpy as numpy_impl

if BACKEND == "numba":
    from radpose.kernels import _numba as _impl
else:
    _impl = numpy_impl

fft_rows = _impl.fft_rows
tone_sum = _impl.tone_sum
doppler_argmax = _impl.doppler_argmax
local_stats = _impl.local_stats
avg_pool3 = _impl.avg_pool3
lerp_rows = _impl.lerp_rows
ca_cfar = _impl.ca_cfar
erode3 = _impl.erode3
dilate3 = _impl.dilate3

__all__ = [
    "BACKEND",
    "fft_rows",
    "tone_sum",
    "doppler_argmax",
    "local_stats",
    "avg_pool3",
    "lerp_rows",
    "ca_cfar",
    "erode3",
    "dilate3",
]
