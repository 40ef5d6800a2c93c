"""Exception types shared across the library."""


class StgaborError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(StgaborError, ValueError):
    """A parameter value violates its documented range or relation."""


class NumericError(StgaborError, ArithmeticError):
    """A computation produced non-finite values."""


class DataFormatError(StgaborError, ValueError):
    """A file does not conform to its expected format."""


class MissingFrameError(DataFormatError):
    """A frame index in a sequence has no corresponding file."""


class InconsistentFramesError(DataFormatError):
    """Frames in a sequence disagree on size or pixel format."""


class IncompatibleFeaturesError(StgaborError, ValueError):
    """Feature vectors from different bank configurations were mixed."""
