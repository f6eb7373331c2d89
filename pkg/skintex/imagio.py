"""
Image data model, PPM codec, grayscale conversion and gray-level quantization.
"""

import logging
import re
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import (
    PpmDecodeError,
    PpmHeaderError,
    PpmMagicError,
    PpmMaxvalError,
    PpmTruncatedError,
)

logger = logging.getLogger(__name__)

_WHITESPACE = b" \t\n\r\x0b\x0c"
_P3_TOKEN = re.compile(rb"#[^\r\n]*|(\d+)|(\S+)")

# ITU-R BT.601 luma weights in thousandths; they sum to 1000
_LUMA_WEIGHTS = np.array([299, 587, 114], dtype=np.int64)


class Channel(IntEnum):
    """Color planes of an RgbImage, indexed as stored."""

    R = 0
    G = 1
    B = 2


@dataclass(frozen=True, eq=False)
class RgbImage:
    """
    An 8-bit RGB image.

    Args:
        pixels: Array of shape (height, width, 3); values must lie in [0, 255]
    """

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) pixels, got shape {pixels.shape}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError("image width and height must be >= 1")
        if pixels.dtype != np.uint8:
            if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
                raise ValueError("channel values must lie in [0, 255]")
            pixels = pixels.astype(np.uint8)
        pixels = np.array(pixels, dtype=np.uint8, copy=True)
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_rows(cls, rows):
        """Build an image from nested rows of (r, g, b) tuples."""
        return cls(np.array(rows, dtype=np.int64).reshape(len(rows), -1, 3))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def channel(self, channel):
        """Return one color plane as a (height, width) array."""
        return self.pixels[:, :, Channel(channel)]

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"RgbImage(width={self.width}, height={self.height})"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """
    A single-channel image over the gray-level alphabet [0, levels - 1].

    Args:
        pixels: Integer array of shape (height, width)
        levels: Number of gray levels L (>= 2)
    """

    pixels: np.ndarray
    levels: int = 256

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError(f"expected (height, width) pixels, got shape {pixels.shape}")
        if self.levels < 2:
            raise ValueError("levels must be >= 2")
        if pixels.min() < 0 or pixels.max() >= self.levels:
            raise ValueError(f"gray values must lie in [0, {self.levels - 1}]")
        pixels = np.array(pixels, dtype=np.int64, copy=True)
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def transpose(self):
        return GrayImage(self.pixels.T, self.levels)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.levels == other.levels and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"GrayImage(width={self.width}, height={self.height}, levels={self.levels})"


def _skip_separators(data, pos):
    """Advance past whitespace and '#' comments."""
    while pos < len(data):
        byte = data[pos]
        if byte == ord("#"):
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
        elif byte in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _read_header_int(data, pos, name):
    """Read one decimal header token; return (value, end position)."""
    pos = _skip_separators(data, pos)
    if pos >= len(data):
        raise PpmHeaderError(f"header ends before {name}", pos)
    start = pos
    while pos < len(data) and 48 <= data[pos] <= 57:
        pos += 1
    if pos == start:
        raise PpmHeaderError(f"expected decimal {name}", start)
    if pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
        raise PpmHeaderError(f"malformed {name}", pos)
    return int(data[start:pos]), pos


def decode_ppm(data):
    """
    Decode a P3 (ASCII) or P6 (binary) PPM file with maxval 255.

    Args:
        data: Complete file contents as bytes

    Returns:
        RgbImage with the exact pixel values stored in the file
    """
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P3", b"P6"):
        raise PpmMagicError(f"unsupported magic {magic!r}, expected P3 or P6", 0)
    if len(data) > 2 and data[2] not in _WHITESPACE and data[2] != ord("#"):
        raise PpmMagicError("magic number must be followed by whitespace", 2)

    width, pos = _read_header_int(data, 2, "width")
    height, pos = _read_header_int(data, pos, "height")
    if width < 1 or height < 1:
        raise PpmHeaderError(f"zero image dimension {width}x{height}", pos)
    maxval_start = _skip_separators(data, pos)
    maxval, pos = _read_header_int(data, pos, "maxval")
    if maxval != 255:
        raise PpmMaxvalError(f"maxval must be 255, got {maxval}", maxval_start)

    count = width * height * 3
    if magic == b"P6":
        # exactly one whitespace byte separates maxval from the payload
        if pos >= len(data):
            raise PpmTruncatedError("missing pixel data", pos)
        if data[pos] not in _WHITESPACE:
            raise PpmHeaderError("maxval must be followed by a single whitespace byte", pos)
        payload_start = pos + 1
        payload = data[payload_start:payload_start + count]
        if len(payload) < count:
            raise PpmTruncatedError(
                f"expected {count} sample bytes, found {len(payload)}",
                payload_start + len(payload),
            )
        if len(data) > payload_start + count:
            logger.debug("Ignoring %d trailing bytes after P6 payload", len(data) - payload_start - count)
        samples = np.frombuffer(payload, dtype=np.uint8)
    else:
        # every sample is at least a separator and a digit
        if 2 * count > len(data) - pos:
            raise PpmTruncatedError(f"{len(data) - pos} bytes cannot hold {count} samples", len(data))
        samples = np.empty(count, dtype=np.int64)
        filled = 0
        for match in _P3_TOKEN.finditer(data, pos):
            if filled == count:
                break
            if match.group(2) is not None:
                raise PpmDecodeError(f"invalid sample token {match.group(2)[:16]!r}", match.start())
            if match.group(1) is None:
                continue
            value = int(match.group(1))
            if value > maxval:
                raise PpmDecodeError(f"sample value {value} exceeds maxval {maxval}", match.start())
            samples[filled] = value
            filled += 1
        if filled < count:
            raise PpmTruncatedError(f"expected {count} samples, found {filled}", len(data))

    return RgbImage(samples.reshape(height, width, 3))


def encode_ppm(img):
    """Encode an image as a binary P6 PPM."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def read_ppm(path):
    """Read and decode a PPM file from disk."""
    return decode_ppm(Path(path).read_bytes())


def write_ppm(path, img):
    """Encode an image and write it to disk as P6."""
    path = Path(path)
    path.write_bytes(encode_ppm(img))
    return path


def to_gray(img):
    """
    Convert to 256-level gray with BT.601 luma weights.

    Each pixel is round-half-up of 0.299 r + 0.587 g + 0.114 b, computed in
    integer thousandths so ties resolve identically on every platform.
    """
    weighted = img.pixels.astype(np.int64) @ _LUMA_WEIGHTS
    gray = np.clip((weighted + 500) // 1000, 0, 255)
    return GrayImage(gray, levels=256)


def quantize(img, target_levels):
    """
    Reduce a gray image to fewer gray levels.

    Args:
        img: Source GrayImage
        target_levels: New level count, 2 <= target_levels <= img.levels

    Returns:
        GrayImage whose pixel p maps to floor(p * target_levels / img.levels)
    """
    if not 2 <= target_levels <= img.levels:
        raise ValueError(f"target_levels must be in [2, {img.levels}], got {target_levels}")
    if target_levels == img.levels:
        return img
    return GrayImage((img.pixels * target_levels) // img.levels, levels=target_levels)
