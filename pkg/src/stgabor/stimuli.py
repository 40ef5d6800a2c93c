"""Synthetic moving-bar, moving-edge, and drifting-grating videos, plus
single-axis tuning curves of filter energy against those stimuli.

Motion convention
-----------------
A stimulus with direction ``theta`` and speed ``v`` is constant along the
rotated yb axis and translates along constant-phase trajectories
``xb + v t = const`` -- the same trajectories the kernel carrier in
:mod:`stgabor.kernel` follows. Under this shared convention the filter
labeled (v, theta) responds most strongly to the stimulus labeled
(v, theta), which is what the tuning operations below measure. Physically
the pattern drifts along the -xb(theta) axis.

Bars and edges translate without wraparound (the pattern enters and exits
the frame); their trajectory is centered so the pattern sits mid-frame at
the middle of the sequence. Sub-pixel positions blend the profile linearly
over one pixel, avoiding temporal aliasing at fractional speeds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .convolve import ConvolutionOptions
from .errors import InvalidParameterError
from .features import BankConfig, extract_features
from .volume import Volume

TWO_PI = 2.0 * math.pi

STIMULUS_KINDS = ("bar", "edge", "grating")

DEFAULT_EXTENT = (64, 64, 16)
DEFAULT_BAR_WIDTH = 2.0
DEFAULT_EDGE_POLARITY = 1.0
DEFAULT_GRATING_WAVELENGTH = 4.0


@dataclass(frozen=True)
class StimulusSpec:
    """Description of one synthetic video.

    ``geometry`` is kind-specific: bar width in pixels (bar), transition
    polarity +-1 (edge), or wavelength in pixels (grating); ``None`` picks
    the kind's default. ``contrast`` is (foreground, background); gratings
    default to (1, -1), which makes the rendered signal exactly
    cos((2 pi / wavelength)(xb + v t) + phase), while bars and edges default
    to a unit pattern on a zero background. ``phase`` only affects gratings.
    """

    kind: str
    direction: float
    speed: float
    geometry: float | None = None
    extent: tuple[int, int, int] = DEFAULT_EXTENT
    contrast: tuple[float, float] | None = None
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in STIMULUS_KINDS:
            raise InvalidParameterError(
                f"kind must be one of {STIMULUS_KINDS}, got {self.kind!r}"
            )
        if not math.isfinite(self.direction):
            raise InvalidParameterError("direction must be finite")
        if not (math.isfinite(self.speed) and self.speed >= 0):
            raise InvalidParameterError(f"speed must be >= 0, got {self.speed}")
        extent = tuple(int(n) for n in self.extent)
        if len(extent) != 3 or min(extent) < 1:
            raise InvalidParameterError(
                f"extent must be three positive sizes, got {self.extent}"
            )
        geometry = self.geometry
        if geometry is None:
            geometry = {"bar": DEFAULT_BAR_WIDTH,
                        "edge": DEFAULT_EDGE_POLARITY,
                        "grating": DEFAULT_GRATING_WAVELENGTH}[self.kind]
        geometry = float(geometry)
        if self.kind == "bar" and geometry <= 0:
            raise InvalidParameterError(f"bar width must be > 0, got {geometry}")
        if self.kind == "edge" and geometry not in (1.0, -1.0):
            raise InvalidParameterError(
                f"edge polarity must be +1 or -1, got {geometry}"
            )
        if self.kind == "grating" and geometry < 2.0:
            raise InvalidParameterError(
                f"grating wavelength must be >= 2 pixels, got {geometry}"
            )
        contrast = self.contrast
        if contrast is None:
            contrast = (1.0, -1.0) if self.kind == "grating" else (1.0, 0.0)
        contrast = (float(contrast[0]), float(contrast[1]))
        if not all(math.isfinite(c) for c in contrast):
            raise InvalidParameterError("contrast levels must be finite")
        object.__setattr__(self, "direction", float(self.direction))
        object.__setattr__(self, "speed", float(self.speed))
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "geometry", geometry)
        object.__setattr__(self, "contrast", contrast)
        object.__setattr__(self, "phase", float(self.phase))


@dataclass(frozen=True)
class TuningCurve:
    """Energy as a function of one filter parameter, other settings fixed."""

    axis: str
    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.axis not in ("direction", "speed"):
            raise InvalidParameterError(
                f"axis must be 'direction' or 'speed', got {self.axis!r}"
            )
        samples = tuple((float(p), float(e)) for p, e in self.samples)
        params = [p for p, _ in samples]
        if any(b <= a for a, b in zip(params, params[1:])):
            raise InvalidParameterError("parameter values must be strictly increasing")
        if any(e < 0 for _, e in samples):
            raise InvalidParameterError("energies must be non-negative")
        object.__setattr__(self, "samples", samples)

    @property
    def parameters(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.samples)

    @property
    def energies(self) -> tuple[float, ...]:
        return tuple(e for _, e in self.samples)

    def argmax(self) -> float:
        """Parameter value with the largest energy."""
        return max(self.samples, key=lambda s: s[1])[0]


def render(spec: StimulusSpec) -> Volume:
    """Deterministically rasterize the stimulus described by ``spec``."""
    width, height, frames = spec.extent
    x = np.arange(width, dtype=np.float64)[:, None, None]
    y = np.arange(height, dtype=np.float64)[None, :, None]
    t = np.arange(frames, dtype=np.float64)[None, None, :]
    xb = x * math.cos(spec.direction) + y * math.sin(spec.direction)
    fg, bg = spec.contrast

    if spec.kind == "grating":
        wave = np.cos(TWO_PI / spec.geometry * (xb + spec.speed * t) + spec.phase)
        data = (fg + bg) / 2.0 + (fg - bg) / 2.0 * wave
    else:
        # Profile argument; zero where the pattern center sits. Centering
        # the trajectory at mid-sequence keeps the pattern in frame as long
        # as the total displacement allows.
        mid = (float(xb.min()) + float(xb.max())) / 2.0
        u = xb + spec.speed * (t - (frames - 1) / 2.0) - mid
        if spec.kind == "bar":
            coverage = np.clip(spec.geometry / 2.0 + 0.5 - np.abs(u), 0.0, 1.0)
        else:
            coverage = np.clip(spec.geometry * u + 0.5, 0.0, 1.0)
        data = bg + (fg - bg) * coverage
    # A zero-speed stimulus has no t dependence; materialize the full extent.
    return Volume(np.broadcast_to(data, (width, height, frames)))


def direction_tuning(filter_speed: float, directions, spec: StimulusSpec,
                     envelope_mode: str = "moving",
                     opts: ConvolutionOptions | None = None) -> TuningCurve:
    """Energy of each direction's filter (at ``filter_speed``) in response
    to the rendered stimulus."""
    bank = BankConfig(speeds=(filter_speed,), directions=tuple(directions),
                      envelope_mode=envelope_mode)
    vector = extract_features(render(spec), bank, opts)
    return TuningCurve("direction", tuple(zip(bank.directions, vector.values)))


def speed_tuning(filter_direction: float, speeds, spec: StimulusSpec,
                 envelope_mode: str = "moving",
                 opts: ConvolutionOptions | None = None) -> TuningCurve:
    """Energy of each speed's filter (at ``filter_direction``) in response
    to the rendered stimulus."""
    bank = BankConfig(speeds=tuple(speeds), directions=(filter_direction,),
                      envelope_mode=envelope_mode)
    vector = extract_features(render(spec), bank, opts)
    return TuningCurve("speed", tuple(zip(bank.speeds, vector.values)))
