"""Dense 3-D scalar grids indexed as data[x, y, t].

A Volume holds either a video or a sampled filter kernel. Axis convention:
x grows rightward, y grows downward, t is the frame index. ``origin`` is the
array index of the (x=0, y=0, t=0) grid point: videos use (0, 0, 0); kernels
are centered spatially and start at t=0, so their origin is (h, h, 0).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NumericError


@dataclass(eq=False)
class Volume:
    """An immutable float64 grid plus the index of its coordinate origin.

    The array is adopted (converted to contiguous float64 if needed) and
    marked read-only, not defensively copied.
    """

    data: np.ndarray
    origin: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise InvalidParameterError(
                f"volume data must be 3-d (x, y, t), got {data.ndim}-d"
            )
        if min(data.shape) < 1:
            raise InvalidParameterError(
                f"volume extent must be at least 1 per axis, got {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise NumericError("volume contains non-finite values")
        if len(self.origin) != 3:
            raise InvalidParameterError("origin must have three components")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "origin", tuple(int(c) for c in self.origin))

    @property
    def width(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def frames(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape
