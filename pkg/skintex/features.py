"""
Color and texture features for skin texture recognition.

The feature vector has 13 elements in a fixed order: four GLCM texture
metrics (entropy, energy, contrast, homogeneity) followed by mean, standard
deviation and skewness of the R, G and B planes.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_DISPLACEMENT, DEFAULT_LEVELS, INPUT_SIZE
from .errors import DegenerateGlcmError
from .imagio import Channel, quantize, to_gray

TEXTURE_NAMES = ("entropy", "energy", "contrast", "homogeneity")
MOMENT_NAMES = tuple(
    f"{moment}_{channel.name.lower()}"
    for channel in Channel
    for moment in ("mean", "std", "skew")
)
FEATURE_NAMES = TEXTURE_NAMES + MOMENT_NAMES


@dataclass(frozen=True)
class ColorMoments:
    """Mean, standard deviation and skewness of one color plane."""

    mean: float
    std_dev: float
    skewness: float

    def as_tuple(self):
        return (self.mean, self.std_dev, self.skewness)


@dataclass(frozen=True)
class Displacement:
    """Pixel offset (dx columns, dy rows) between the two pixels of a GLCM pair."""

    dx: int = DEFAULT_DISPLACEMENT[0]
    dy: int = DEFAULT_DISPLACEMENT[1]

    def __post_init__(self):
        if (self.dx, self.dy) == (0, 0):
            raise ValueError("displacement must not be (0, 0)")

    @classmethod
    def parse(cls, text):
        """Parse a "dx,dy" string such as "1,0"."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"displacement must look like 'dx,dy', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, Displacement):
            return value
        dx, dy = value
        return cls(int(dx), int(dy))

    def as_tuple(self):
        return (self.dx, self.dy)


@dataclass(frozen=True, eq=False)
class Glcm:
    """Normalized, ordered gray-level co-occurrence matrix for one displacement."""

    levels: int
    entries: np.ndarray
    pair_count: int

    def __eq__(self, other):
        if not isinstance(other, Glcm):
            return NotImplemented
        return (
            self.levels == other.levels
            and self.pair_count == other.pair_count
            and np.array_equal(self.entries, other.entries)
        )


@dataclass(frozen=True)
class TextureMetrics:
    entropy: float
    energy: float
    contrast: float
    homogeneity: float

    def as_tuple(self):
        return (self.entropy, self.energy, self.contrast, self.homogeneity)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """The 13 features of one image, in FEATURE_NAMES order."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != (INPUT_SIZE,):
            raise ValueError(f"feature vector must have {INPUT_SIZE} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature vector contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_parts(cls, texture, moments):
        """
        Assemble a vector from texture metrics and per-channel moments.

        Args:
            texture: TextureMetrics
            moments: ColorMoments for R, G and B, in that order
        """
        values = list(texture.as_tuple())
        for channel_moments in moments:
            values.extend(channel_moments.as_tuple())
        return cls(np.array(values))

    def as_dict(self):
        return dict(zip(FEATURE_NAMES, self.values.tolist()))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"FeatureVector({self.values.tolist()})"


@dataclass(frozen=True, eq=False)
class NormalizationRanges:
    """Per-feature (min, max) pairs learned from a training set."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.array(self.mins, dtype=np.float64, copy=True)
        maxs = np.array(self.maxs, dtype=np.float64, copy=True)
        if mins.shape != (INPUT_SIZE,) or maxs.shape != (INPUT_SIZE,):
            raise ValueError(f"ranges need {INPUT_SIZE} min/max pairs")
        if not (np.all(np.isfinite(mins)) and np.all(np.isfinite(maxs))):
            raise ValueError("ranges contain non-finite values")
        if np.any(mins > maxs):
            raise ValueError("every range needs min <= max")
        mins.flags.writeable = False
        maxs.flags.writeable = False
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @classmethod
    def from_pairs(cls, pairs):
        pairs = np.asarray(pairs, dtype=np.float64)
        return cls(pairs[:, 0], pairs[:, 1])

    def to_pairs(self):
        return [[lo, hi] for lo, hi in zip(self.mins.tolist(), self.maxs.tolist())]

    def apply(self, values):
        """
        Map raw features to [-1, 1] per feature.

        Works on one vector or on an (n, 13) matrix. Constant features map to
        0; values outside a range extrapolate linearly.
        """
        values = np.asarray(values, dtype=np.float64)
        span = self.maxs - self.mins
        varying = span > 0
        out = np.zeros_like(values)
        out[..., varying] = 2.0 * (values[..., varying] - self.mins[varying]) / span[varying] - 1.0
        return out

    def __eq__(self, other):
        if not isinstance(other, NormalizationRanges):
            return NotImplemented
        return np.array_equal(self.mins, other.mins) and np.array_equal(self.maxs, other.maxs)


def color_moments(img, channel):
    """
    Mean, standard deviation and skewness of one color plane.

    Skewness is the signed cube root of the third central moment. Raw power
    sums are accumulated as exact integers, so the central moments carry no
    cancellation error and depend only on the multiset of values.
    """
    values = img.channel(channel).astype(np.int64).ravel()
    n = values.size
    s1 = int(values.sum())
    s2 = int((values * values).sum())
    s3 = int((values * values * values).sum())

    second = (n * s2 - s1 * s1) / (n * n)
    third = (n * n * s3 - 3 * n * s1 * s2 + 2 * s1 ** 3) / n ** 3

    return ColorMoments(
        mean=s1 / n,
        std_dev=math.sqrt(second),
        skewness=float(np.cbrt(third)),
    )


def glcm(img, d):
    """
    Count ordered pixel pairs (r, c) -> (r + dy, c + dx) and normalize.

    Args:
        img: GrayImage
        d: Displacement or (dx, dy) tuple

    Returns:
        Glcm with C(i, j) = share of in-bounds pairs with levels i then j
    """
    d = Displacement.coerce(d)
    height, width = img.pixels.shape
    r0, r1 = max(0, -d.dy), height - max(0, d.dy)
    c0, c1 = max(0, -d.dx), width - max(0, d.dx)
    if r1 <= r0 or c1 <= c0:
        raise DegenerateGlcmError(
            f"displacement ({d.dx}, {d.dy}) leaves no pixel pair inside a {width}x{height} image"
        )

    first = img.pixels[r0:r1, c0:c1]
    second = img.pixels[r0 + d.dy:r1 + d.dy, c0 + d.dx:c1 + d.dx]
    levels = img.levels
    counts = np.bincount((first * levels + second).ravel(), minlength=levels * levels)
    pair_count = first.size

    entries = counts.reshape(levels, levels) / pair_count
    entries.flags.writeable = False
    return Glcm(levels=levels, entries=entries, pair_count=pair_count)


def texture_metrics(g):
    """
    Entropy, energy, contrast and homogeneity of a normalized GLCM.

    Entropy is sum C ln C with 0 ln 0 = 0, with no leading minus, so it is
    never positive.
    """
    entries = g.entries
    i, j = np.indices(entries.shape)
    occupied = entries[entries > 0]
    return TextureMetrics(
        entropy=float(np.sum(occupied * np.log(occupied))),
        energy=float(np.sum(entries * entries)),
        contrast=float(np.sum((i - j) ** 2 * entries)),
        homogeneity=float(np.sum(entries / (1.0 + np.abs(i - j)))),
    )


def extract_features(img, d=DEFAULT_DISPLACEMENT, levels=DEFAULT_LEVELS):
    """
    Compute the 13-element feature vector of an RGB image.

    Args:
        img: RgbImage
        d: GLCM displacement
        levels: Gray levels used for the GLCM

    Returns:
        FeatureVector; texture from the quantized gray image, moments from raw RGB
    """
    gray = to_gray(img)
    if levels != gray.levels:
        gray = quantize(gray, levels)
    texture = texture_metrics(glcm(gray, d))
    moments = [color_moments(img, channel) for channel in Channel]
    return FeatureVector.from_parts(texture, moments)


def _as_matrix(vectors):
    if isinstance(vectors, np.ndarray):
        return np.atleast_2d(vectors).astype(np.float64)
    return np.vstack([v.values if isinstance(v, FeatureVector) else np.asarray(v) for v in vectors])


def fit_ranges(vectors):
    """Per-feature min/max over a non-empty collection of feature vectors."""
    if len(vectors) == 0:
        raise ValueError("cannot fit normalization ranges on an empty list")
    matrix = _as_matrix(vectors)
    return NormalizationRanges(matrix.min(axis=0), matrix.max(axis=0))


def normalize(v, r):
    """Scale a feature vector with the given ranges (see NormalizationRanges.apply)."""
    return FeatureVector(r.apply(v.values))
