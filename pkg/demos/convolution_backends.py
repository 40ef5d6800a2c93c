"""
Direct vs spectral convolution: agreement and cost
==================================================

The convolution engine has two interchangeable backends: a tap-accumulation
loop and a padded-FFT path. This script confirms they agree to floating
point noise and times both across workload sizes, showing where the "auto"
routing threshold sits. It also demonstrates the shared video transform
when convolving a whole bank.

Run:  python demos/convolution_backends.py
"""

import time

import numpy as np

from stgabor import (
    AUTO_SPECTRAL_THRESHOLD,
    ConvolutionOptions,
    Volume,
    convolve,
    convolve_bank,
    derive_params,
    direction_grid,
    sample_kernel,
)

rng = np.random.default_rng(0)


def rel_linf(a, b):
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    return float(np.max(np.abs(a - b)) / scale)


def stopwatch(fn):
    started = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - started


# %% Agreement and timing across workload sizes.
cases = [
    ((16, 16, 8), (5, 5, 3)),
    ((32, 32, 16), (9, 9, 5)),
    ((48, 48, 24), (13, 13, 7)),
    ((64, 64, 24), (21, 21, 10)),
]
print(f"auto threshold: {AUTO_SPECTRAL_THRESHOLD} kernel*video voxels\n")
print(f"{'video':>14} {'kernel':>12} {'work':>12} {'direct s':>9} "
      f"{'spectral s':>10} {'rel Linf':>10} {'auto picks':>10}")
for vshape, kshape in cases:
    video = Volume(rng.standard_normal(vshape))
    kernel = Volume(rng.standard_normal(kshape),
                    origin=(kshape[0] // 2, kshape[1] // 2, 0))
    direct, t_direct = stopwatch(
        lambda: convolve(video, kernel, ConvolutionOptions("direct"))
    )
    spectral, t_spectral = stopwatch(
        lambda: convolve(video, kernel, ConvolutionOptions("spectral"))
    )
    work = np.prod(vshape) * np.prod(kshape)
    routed = "spectral" if work > AUTO_SPECTRAL_THRESHOLD else "direct"
    print(f"{str(vshape):>14} {str(kshape):>12} {work:>12d} {t_direct:9.3f} "
          f"{t_spectral:10.3f} {rel_linf(direct.data, spectral.data):10.2e} "
          f"{routed:>10}")

# %% Bank convolution reuses one forward transform of the video.
video = Volume(rng.standard_normal((64, 64, 24)))
kernels = [sample_kernel(derive_params(v, theta))
           for v in (0.5, 1.0) for theta in direction_grid(8)]
opts = ConvolutionOptions("spectral")

_, t_bank = stopwatch(lambda: convolve_bank(video, kernels, opts))
_, t_each = stopwatch(lambda: [convolve(video, k, opts) for k in kernels])
print(f"\nbank of {len(kernels)} kernels on {video.shape}:")
print(f"  shared video transform: {t_bank:.3f} s")
print(f"  one transform per call: {t_each:.3f} s")
