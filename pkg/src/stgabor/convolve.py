"""3-D convolution of video volumes against kernel volumes.

Two interchangeable backends compute true (kernel-flipped) convolution with
zero-padded boundaries and output matching the video extent:

``direct``
    Accumulates one shifted, scaled copy of the video per kernel tap.
    Cost is kernel voxels x video voxels; summation order is fixed, so
    results are bitwise reproducible.
``spectral``
    Multiplies zero-padded real FFTs and crops. Cost is a few FFTs of the
    padded volume, independent of kernel density.

``auto`` routes each call by the product of kernel and video voxel counts.
Both backends agree to ~1e-13 relative error; each serves as the oracle for
the other in the test suite.

All accumulation happens in float64 regardless of input storage.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.fft

from .errors import InvalidParameterError
from .volume import Volume

BACKENDS = ("direct", "spectral", "auto")

# auto picks spectral when kernel voxels x video voxels exceeds this;
# direct's tap loop wins below it, FFTs win above.
AUTO_SPECTRAL_THRESHOLD = 1 << 22


@dataclass(frozen=True)
class ConvolutionOptions:
    """Backend routing plus fixed v1 boundary/extent policy.

    ``boundary`` and ``output_extent`` admit a single value each for now;
    the fields exist so call sites stay stable if alternatives appear.
    """

    backend: str = "auto"
    boundary: str = "zero"
    output_extent: str = "same"

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise InvalidParameterError(
                f"backend must be one of {BACKENDS}, got {self.backend!r}"
            )
        if self.boundary != "zero":
            raise InvalidParameterError(
                f"only zero-padded boundaries are supported, got {self.boundary!r}"
            )
        if self.output_extent != "same":
            raise InvalidParameterError(
                f"only same-as-input output extent is supported, got "
                f"{self.output_extent!r}"
            )


def _resolve_backend(video_shape, kernel_shape, backend: str) -> str:
    if backend != "auto":
        return backend
    work = int(np.prod(video_shape)) * int(np.prod(kernel_shape))
    return "spectral" if work > AUTO_SPECTRAL_THRESHOLD else "direct"


def _convolve_direct(video: np.ndarray, kernel: np.ndarray, origin) -> np.ndarray:
    out = np.zeros(video.shape, dtype=np.float64)
    dims = video.shape
    kw, kh, kt = kernel.shape
    ox, oy, ot = origin
    # out[z] += k[a] * video[z + (origin - a)] for every tap a; the shifted
    # copy is restricted to indices where both sides are in range.
    for ax in range(kw):
        for ay in range(kh):
            for at in range(kt):
                weight = kernel[ax, ay, at]
                if weight == 0.0:
                    continue
                shift = (ox - ax, oy - ay, ot - at)
                dst = []
                src = []
                for s, n in zip(shift, dims):
                    lo, hi = max(0, -s), min(n, n - s)
                    if lo >= hi:
                        break
                    dst.append(slice(lo, hi))
                    src.append(slice(lo + s, hi + s))
                else:
                    out[tuple(dst)] += weight * video[tuple(src)]
    return out


class BankConvolver:
    """Convolves one video against many kernels.

    The video's forward transform is computed once, at a padded shape large
    enough for the biggest spectral-routed kernel, and reused for every
    spectral call. Direct-routed kernels bypass the transform entirely.
    """

    def __init__(self, video: Volume, kernel_shapes: Sequence[tuple[int, int, int]],
                 opts: ConvolutionOptions | None = None):
        if opts is None:
            opts = ConvolutionOptions()
        self.opts = opts
        self.video = video
        spectral_shapes = [
            shape for shape in kernel_shapes
            if _resolve_backend(video.shape, shape, opts.backend) == "spectral"
        ]
        self._fft_shape = None
        self._video_fft = None
        if spectral_shapes:
            pad = [max(s[axis] for s in spectral_shapes) for axis in range(3)]
            self._fft_shape = tuple(
                scipy.fft.next_fast_len(video.shape[axis] + pad[axis] - 1)
                for axis in range(3)
            )
            self._video_fft = scipy.fft.rfftn(video.data, self._fft_shape)

    def convolve(self, kernel: Volume) -> Volume:
        backend = _resolve_backend(self.video.shape, kernel.shape,
                                   self.opts.backend)
        if backend == "direct":
            out = _convolve_direct(self.video.data, kernel.data, kernel.origin)
        else:
            if self._video_fft is None or any(
                self.video.shape[i] + kernel.shape[i] - 1 > self._fft_shape[i]
                for i in range(3)
            ):
                raise InvalidParameterError(
                    "kernel shape exceeds the shapes this convolver was built for"
                )
            kernel_fft = scipy.fft.rfftn(kernel.data, self._fft_shape)
            full = scipy.fft.irfftn(self._video_fft * kernel_fft, self._fft_shape)
            out = full[tuple(
                slice(o, o + n) for o, n in zip(kernel.origin, self.video.shape)
            )]
        # Volume construction re-checks finiteness, turning overflow into
        # NumericError.
        return Volume(out, origin=self.video.origin)


def convolve(video: Volume, kernel: Volume,
             opts: ConvolutionOptions | None = None) -> Volume:
    """True convolution of ``video`` with ``kernel``.

    The result has the video's extent and origin; values whose receptive
    field extends past the boundary are computed as if the video were
    embedded in zeros.
    """
    return BankConvolver(video, [kernel.shape], opts).convolve(kernel)


def convolve_bank(video: Volume, kernels: Sequence[Volume],
                  opts: ConvolutionOptions | None = None) -> list[Volume]:
    """Convolve ``video`` with every kernel, sharing the video transform
    across all spectral-routed kernels."""
    kernels = list(kernels)
    if not kernels:
        raise InvalidParameterError("kernel bank must not be empty")
    convolver = BankConvolver(video, [k.shape for k in kernels], opts)
    return [convolver.convolve(k) for k in kernels]
