"""Synthesis of 3-D spatiotemporal Gabor kernels.

Each kernel is the product of three factors evaluated on an integer
(x, y, t) grid:

    g(x, y, t) = gamma / (2 pi sigma^2)
                 * exp(-((xb + v_c t)^2 + gamma^2 yb^2) / (2 sigma^2))
                 * cos((2 pi / wavelength) (xb + v t) + phi)
                 * (1 / sqrt(2 pi tau)) * exp(-(t - mu_t)^2 / (2 tau^2))

with the rotated spatial frame

    xb =  x cos(theta) + y sin(theta)
    yb = -x sin(theta) + y cos(theta)

The carrier drifts one wavelength per ``wavelength / v`` frames along -xb,
and the Gaussian envelope center drifts at ``v_c`` along the same axis
(``v_c = v`` gives a moving envelope, ``v_c = 0`` a stationary one). The
temporal Gaussian is evaluated on t >= 0 only, making the filter causal.

Direction labels are shared with :mod:`stgabor.stimuli`: a stimulus built
with direction ``theta`` drifts along the same constant-phase trajectories
``xb + v t = const`` that the kernel's carrier follows, so a filter responds
most strongly to the stimulus carrying its own (v, theta) label.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError, NumericError
from .volume import Volume

TWO_PI = 2.0 * math.pi

# Carrier wavelength at v = 0, in pixels; grows with speed so that one
# temporal period stays resolvable.
BASE_WAVELENGTH = 2.0
# Envelope width per unit wavelength; the classical value giving roughly a
# one-octave spatial-frequency bandwidth.
SIGMA_PER_WAVELENGTH = 0.56
# Ellipticity of the spatial envelope (elongated along yb).
DEFAULT_ASPECT = 0.5
# Center and width of the causal temporal window, in frames.
DEFAULT_TEMPORAL_MEAN = 1.75
DEFAULT_TEMPORAL_STD = 2.75

ENVELOPE_MODES = ("moving", "stationary")


@dataclass(frozen=True)
class FilterParams:
    """Full parameter set of one spatiotemporal Gabor filter.

    Parameters
    ----------
    v : float
        Carrier drift speed, pixels/frame, >= 0.
    theta : float
        Direction, radians; normalized into [0, 2 pi).
    phi : float
        Carrier phase offset, radians; wrapped into [-pi, pi).
    v_c : float
        Envelope drift speed, pixels/frame; 0 keeps the envelope stationary,
        v makes it track the carrier.
    sigma : float
        Spatial envelope standard deviation, pixels, > 0.
    wavelength : float
        Carrier wavelength, pixels, > 0.
    gamma : float
        Spatial aspect ratio of the envelope, > 0.
    mu_t : float
        Temporal window mean, frames.
    tau : float
        Temporal window standard deviation, frames, > 0.
    """

    v: float
    theta: float
    phi: float
    v_c: float
    sigma: float
    wavelength: float
    gamma: float = DEFAULT_ASPECT
    mu_t: float = DEFAULT_TEMPORAL_MEAN
    tau: float = DEFAULT_TEMPORAL_STD

    def __post_init__(self):
        for name in ("v", "theta", "phi", "v_c", "sigma", "wavelength",
                     "gamma", "mu_t", "tau"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.v < 0:
            raise InvalidParameterError(f"speed must be >= 0, got {self.v}")
        if self.v_c < 0:
            raise InvalidParameterError(
                f"envelope speed must be >= 0, got {self.v_c}"
            )
        for name in ("sigma", "wavelength", "gamma", "tau"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(
                    f"{name} must be > 0, got {getattr(self, name)}"
                )
        object.__setattr__(self, "theta", self.theta % TWO_PI)
        # Wrap into [-pi, pi); -pi and pi give the same carrier.
        object.__setattr__(
            self, "phi", (self.phi + math.pi) % TWO_PI - math.pi
        )


@dataclass(frozen=True)
class KernelSupport:
    """Extent of the sampling grid: x, y span +-spatial_halfwidth and t
    spans 0 .. temporal_length - 1."""

    spatial_halfwidth: int
    temporal_length: int

    def __post_init__(self):
        if int(self.spatial_halfwidth) < 1 or int(self.temporal_length) < 1:
            raise InvalidParameterError(
                "support requires spatial_halfwidth >= 1 and "
                f"temporal_length >= 1, got {self}"
            )
        object.__setattr__(self, "spatial_halfwidth", int(self.spatial_halfwidth))
        object.__setattr__(self, "temporal_length", int(self.temporal_length))

    @property
    def shape(self) -> tuple[int, int, int]:
        side = 2 * self.spatial_halfwidth + 1
        return (side, side, self.temporal_length)


def derive_params(v: float, theta: float, phi: float = 0.0,
                  envelope_mode: str = "moving") -> FilterParams:
    """Build filter parameters from speed and direction.

    Applies the standard relations: wavelength = BASE_WAVELENGTH *
    sqrt(1 + v^2), sigma = SIGMA_PER_WAVELENGTH * wavelength, aspect and
    temporal window at their defaults, and v_c = v ("moving") or 0
    ("stationary").
    """
    if v < 0:
        raise InvalidParameterError(f"speed must be >= 0, got {v}")
    if envelope_mode not in ENVELOPE_MODES:
        raise InvalidParameterError(
            f"envelope_mode must be one of {ENVELOPE_MODES}, got {envelope_mode!r}"
        )
    wavelength = BASE_WAVELENGTH * math.sqrt(1.0 + v * v)
    return FilterParams(
        v=v,
        theta=theta,
        phi=phi,
        v_c=v if envelope_mode == "moving" else 0.0,
        sigma=SIGMA_PER_WAVELENGTH * wavelength,
        wavelength=wavelength,
    )


def quadrature_partner(params: FilterParams) -> FilterParams:
    """The same filter with its carrier phase retarded by 90 degrees."""
    return replace(params, phi=params.phi - math.pi / 2)


def default_support(params: FilterParams) -> KernelSupport:
    """Grid extent capturing at least 98% of each Gaussian factor's mass.

    Spatially that is 3 standard deviations of the wider envelope axis;
    temporally the grid runs from 0 (the causal cutoff, part of the filter's
    definition) to mu_t + 2.5 tau.
    """
    halfwidth = math.ceil(3.0 * params.sigma / min(1.0, params.gamma))
    length = math.ceil(params.mu_t + 2.5 * params.tau) + 1
    return KernelSupport(spatial_halfwidth=halfwidth, temporal_length=length)


def sample_kernel(params: FilterParams,
                  support: KernelSupport | None = None) -> Volume:
    """Evaluate the kernel on its integer grid.

    Returns a Volume of shape (2h+1, 2h+1, temporal_length) with origin
    (h, h, 0), h = support.spatial_halfwidth.
    """
    if support is None:
        support = default_support(params)
    h = support.spatial_halfwidth
    length = support.temporal_length

    x = np.arange(-h, h + 1, dtype=np.float64)[:, None, None]
    y = np.arange(-h, h + 1, dtype=np.float64)[None, :, None]
    t = np.arange(length, dtype=np.float64)[None, None, :]

    cos_t, sin_t = math.cos(params.theta), math.sin(params.theta)
    xb = x * cos_t + y * sin_t
    yb = -x * sin_t + y * cos_t

    try:
        sigma2 = params.sigma * params.sigma
        envelope = (params.gamma / (TWO_PI * sigma2)) * np.exp(
            -((xb + params.v_c * t) ** 2 + (params.gamma * yb) ** 2) / (2.0 * sigma2)
        )
        carrier = np.cos(
            (TWO_PI / params.wavelength) * (xb + params.v * t) + params.phi
        )
        window = (1.0 / math.sqrt(TWO_PI * params.tau)) * np.exp(
            -((t - params.mu_t) ** 2) / (2.0 * params.tau * params.tau)
        )
        data = envelope * carrier * window
    except (ZeroDivisionError, OverflowError) as exc:
        raise NumericError(f"kernel evaluation overflowed: {exc}") from None
    if not np.all(np.isfinite(data)):
        raise NumericError("kernel evaluation produced non-finite values")
    return Volume(data, origin=(h, h, 0))
