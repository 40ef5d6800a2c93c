"""Phase-insensitive motion-energy features over a (speed, direction) bank.

For each bank entry, the video is convolved with a quadrature pair of
kernels (carrier phases phi0 and phi0 - pi/2); the pointwise root sum of
squares of the two responses is insensitive to where the stimulus pattern
sits within a carrier period. Summing its squares over the whole response
volume gives one energy per entry; energies ordered row-major over
(speed, direction) form the feature vector.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .convolve import BankConvolver, ConvolutionOptions
from .errors import InvalidParameterError
from .kernel import (
    ENVELOPE_MODES,
    FilterParams,
    KernelSupport,
    default_support,
    derive_params,
    quadrature_partner,
    sample_kernel,
)
from .volume import Volume

TWO_PI = 2.0 * math.pi

NORMALIZATIONS = ("none", "per-voxel")


@dataclass(frozen=True)
class BankConfig:
    """The (speed, direction) grid a feature vector is computed over.

    ``support`` overrides the per-filter default sampling grid when set.
    Feature ordering is row-major: entry i*len(directions)+j belongs to
    (speeds[i], directions[j]).
    """

    speeds: tuple[float, ...]
    directions: tuple[float, ...]
    envelope_mode: str = "moving"
    support: KernelSupport | None = None

    def __post_init__(self):
        speeds = tuple(float(v) for v in self.speeds)
        directions = tuple(float(d) for d in self.directions)
        if not speeds or not directions:
            raise InvalidParameterError("bank needs at least one speed and one direction")
        if any(v < 0 for v in speeds):
            raise InvalidParameterError(f"speeds must be >= 0, got {speeds}")
        if any(b <= a for a, b in zip(speeds, speeds[1:])):
            raise InvalidParameterError(f"speeds must be strictly increasing, got {speeds}")
        if any(d < 0 or d >= TWO_PI for d in directions):
            raise InvalidParameterError(
                f"directions must lie in [0, 2 pi), got {directions}"
            )
        if any(b <= a for a, b in zip(directions, directions[1:])):
            raise InvalidParameterError(
                f"directions must be strictly increasing, got {directions}"
            )
        if self.envelope_mode not in ENVELOPE_MODES:
            raise InvalidParameterError(
                f"envelope_mode must be one of {ENVELOPE_MODES}, got "
                f"{self.envelope_mode!r}"
            )
        object.__setattr__(self, "speeds", speeds)
        object.__setattr__(self, "directions", directions)

    def __len__(self) -> int:
        return len(self.speeds) * len(self.directions)

    def grid(self) -> list[tuple[float, float]]:
        """(speed, direction) pairs in feature order."""
        return [(v, d) for v in self.speeds for d in self.directions]


def direction_grid(count: int) -> tuple[float, ...]:
    """``count`` directions evenly spaced over [0, 2 pi)."""
    if count < 1:
        raise InvalidParameterError(f"direction count must be >= 1, got {count}")
    return tuple(TWO_PI * k / count for k in range(count))


def speed_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic speed grid start, start+step, ..., stop.

    Values are rounded to 12 decimals so decimal steps like 0.1 produce the
    grid points one would write by hand.
    """
    if start < 0 or step <= 0 or stop < start:
        raise InvalidParameterError(
            f"need 0 <= start <= stop and step > 0, got {start}:{stop}:{step}"
        )
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(count))


def config_fingerprint(bank: BankConfig, normalize: str = "none") -> str:
    """Short stable hash identifying the feature pipeline configuration.

    Vectors are comparable only when their fingerprints match.
    """
    if normalize not in NORMALIZATIONS:
        raise InvalidParameterError(
            f"normalize must be one of {NORMALIZATIONS}, got {normalize!r}"
        )
    support = "default" if bank.support is None else (
        f"{bank.support.spatial_halfwidth},{bank.support.temporal_length}"
    )
    payload = "|".join((
        "speeds=" + ",".join(repr(v) for v in bank.speeds),
        "directions=" + ",".join(repr(d) for d in bank.directions),
        "envelope=" + bank.envelope_mode,
        "support=" + support,
        "normalize=" + normalize,
    ))
    return hashlib.sha256(payload.encode("ascii")).hexdigest()[:16]


@dataclass(eq=False)
class FeatureVector:
    """Bank energies in row-major (speed, direction) order."""

    values: np.ndarray
    config_fingerprint: str

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InvalidParameterError("feature vector must be non-empty and 1-d")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidParameterError(
                "feature values must be finite and non-negative"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


def _sample_pair(params: FilterParams, support: KernelSupport | None):
    if support is None:
        support = default_support(params)
    return (sample_kernel(params, support),
            sample_kernel(quadrature_partner(params), support))


def _quadrature_volume(r0: Volume, r1: Volume) -> Volume:
    return Volume(np.hypot(r0.data, r1.data), origin=r0.origin)


def quadrature_response(video: Volume, params: FilterParams,
                        opts: ConvolutionOptions | None = None,
                        support: KernelSupport | None = None) -> Volume:
    """Pointwise magnitude of the quadrature-pair response.

    Convolves with the kernel at ``params.phi`` and at ``params.phi - pi/2``
    and returns sqrt(r0^2 + r1^2); every value is >= 0.
    """
    k0, k1 = _sample_pair(params, support)
    convolver = BankConvolver(video, [k0.shape, k1.shape], opts)
    return _quadrature_volume(convolver.convolve(k0), convolver.convolve(k1))


def energy(response: Volume) -> float:
    """Sum of squared response values over the whole volume."""
    return float(np.sum(np.square(response.data)))


def extract_features(video: Volume, bank: BankConfig,
                     opts: ConvolutionOptions | None = None,
                     normalize: str = "none") -> FeatureVector:
    """One quadrature energy per (speed, direction) bank entry.

    ``normalize="per-voxel"`` divides each energy by the video's voxel
    count, making differently sized videos comparable.
    """
    fingerprint = config_fingerprint(bank, normalize)  # validates normalize
    pairs = []
    for v, theta in bank.grid():
        params = derive_params(v, theta, 0.0, bank.envelope_mode)
        pairs.append(_sample_pair(params, bank.support))
    shapes = [k.shape for pair in pairs for k in pair]
    convolver = BankConvolver(video, shapes, opts)

    values = np.empty(len(pairs), dtype=np.float64)
    for i, (k0, k1) in enumerate(pairs):
        response = _quadrature_volume(convolver.convolve(k0),
                                      convolver.convolve(k1))
        values[i] = energy(response)
    if normalize == "per-voxel":
        values /= float(video.data.size)
    return FeatureVector(values, fingerprint)
