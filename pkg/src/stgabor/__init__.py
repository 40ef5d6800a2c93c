"""Dynamic texture recognition with banks of 3-D spatiotemporal Gabor filters.

The pipeline: synthesize quadrature kernel pairs over a (speed, direction)
grid, convolve a video volume with every kernel, square and sum the
phase-insensitive responses into one energy per grid point, and classify the
resulting feature vectors with a nearest-neighbor rule under seeded
cross-validation. A synthetic-stimulus harness (moving bars, edges, drifting
gratings) measures the filters' direction and speed tuning.
"""

from .classify import (
    CvReport,
    LabeledDataset,
    cross_validate,
    knn_predict,
)
from .convolve import (
    AUTO_SPECTRAL_THRESHOLD,
    BankConvolver,
    ConvolutionOptions,
    convolve,
    convolve_bank,
)
from .errors import (
    DataFormatError,
    IncompatibleFeaturesError,
    InconsistentFramesError,
    InvalidParameterError,
    MissingFrameError,
    NumericError,
    StgaborError,
)
from .features import (
    BankConfig,
    FeatureVector,
    config_fingerprint,
    direction_grid,
    energy,
    extract_features,
    quadrature_response,
    speed_grid,
)
from .io import (
    FrameSequenceSource,
    features_from_csv,
    load_video,
    load_volume,
    read_features_csv,
    save_volume,
    write_features_csv,
)
from .kernel import (
    BASE_WAVELENGTH,
    DEFAULT_ASPECT,
    DEFAULT_TEMPORAL_MEAN,
    DEFAULT_TEMPORAL_STD,
    SIGMA_PER_WAVELENGTH,
    FilterParams,
    KernelSupport,
    default_support,
    derive_params,
    quadrature_partner,
    sample_kernel,
)
from .stimuli import (
    StimulusSpec,
    TuningCurve,
    direction_tuning,
    render,
    speed_tuning,
)
from .volume import Volume

__version__ = "0.1.0"

__all__ = [
    "AUTO_SPECTRAL_THRESHOLD",
    "BASE_WAVELENGTH",
    "BankConfig",
    "BankConvolver",
    "ConvolutionOptions",
    "CvReport",
    "DEFAULT_ASPECT",
    "DEFAULT_TEMPORAL_MEAN",
    "DEFAULT_TEMPORAL_STD",
    "DataFormatError",
    "FeatureVector",
    "FilterParams",
    "FrameSequenceSource",
    "IncompatibleFeaturesError",
    "InconsistentFramesError",
    "InvalidParameterError",
    "KernelSupport",
    "LabeledDataset",
    "MissingFrameError",
    "NumericError",
    "SIGMA_PER_WAVELENGTH",
    "StgaborError",
    "StimulusSpec",
    "TuningCurve",
    "Volume",
    "config_fingerprint",
    "convolve",
    "convolve_bank",
    "cross_validate",
    "default_support",
    "derive_params",
    "direction_grid",
    "direction_tuning",
    "energy",
    "extract_features",
    "features_from_csv",
    "knn_predict",
    "load_video",
    "load_volume",
    "quadrature_partner",
    "quadrature_response",
    "read_features_csv",
    "render",
    "sample_kernel",
    "save_volume",
    "speed_grid",
    "speed_tuning",
    "write_features_csv",
]
