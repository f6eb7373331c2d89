"""
Exception types raised by skintex.
"""


class SkintexError(Exception):
    """Base class for all skintex errors."""


class PpmDecodeError(SkintexError, ValueError):
    """A PPM byte stream could not be decoded."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class PpmMagicError(PpmDecodeError):
    """Magic number is not P3 or P6."""


class PpmHeaderError(PpmDecodeError):
    """Header token missing, malformed or out of range."""


class PpmMaxvalError(PpmDecodeError):
    """Maxval other than 255."""


class PpmTruncatedError(PpmDecodeError):
    """Pixel data ends before width x height pixels were read."""


class DegenerateGlcmError(SkintexError, ValueError):
    """No pixel pair fits inside the image for the requested displacement."""


class TrainingDivergedError(SkintexError, RuntimeError):
    """SSE or gradient became non-finite during training."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class ModelFormatError(SkintexError, ValueError):
    """A model file is malformed."""


class ModelVersionError(ModelFormatError):
    """Model file has an unsupported format_version."""


class ModelDimensionError(ModelFormatError):
    """Model file dimensions do not match the 13-50-1 network."""


class ModelValueError(ModelFormatError):
    """Model file contains a non-finite parameter."""


class DatasetError(SkintexError, ValueError):
    """A dataset directory is missing parts or holds no usable images."""
