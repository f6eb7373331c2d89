"""
Deterministic synthetic skin/non-skin corpus.

Skin-like patches have a reddish base color (R > G > B), non-skin patches a
bluish one (B > G > R); both get the same seeded per-pixel Gaussian noise.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from .config import PATCH_SIZE
from .imagio import RgbImage, write_ppm
from .mlp import Label

logger = logging.getLogger(__name__)

BASE_COLORS = {
    Label.SKIN: (205.0, 150.0, 125.0),
    Label.NON_SKIN: (125.0, 150.0, 205.0),
}
NOISE_SIGMA = 12.0
MIN_SIZE = 8


@dataclass(frozen=True)
class SynthCorpus:
    root: Path
    skin_dir: Path
    nonskin_dir: Path
    paths: List[Path]


def synth_patch(rng, label, size):
    """One noisy patch of the given class."""
    noise = rng.normal(0.0, NOISE_SIGMA, size=(size, size, 3))
    pixels = np.clip(np.rint(np.asarray(BASE_COLORS[label]) + noise), 0, 255)
    return RgbImage(pixels.astype(np.uint8))


def synth_corpus(out_dir, seed, n_per_class, size=PATCH_SIZE):
    """
    Write a seeded corpus of P6 images under out_dir/skin and out_dir/nonskin.

    Args:
        out_dir: Destination directory (created if needed)
        seed: Seed for numpy's default generator
        n_per_class: Images per class, >= 1
        size: Patch width and height in pixels, >= 8

    Returns:
        SynthCorpus listing every written file
    """
    if n_per_class < 1:
        raise ValueError(f"n_per_class must be >= 1, got {n_per_class}")
    if size < MIN_SIZE:
        raise ValueError(f"size must be >= {MIN_SIZE}, got {size}")

    root = Path(out_dir)
    rng = np.random.default_rng(seed)
    paths = []
    for label in (Label.SKIN, Label.NON_SKIN):
        directory = root / label.directory
        directory.mkdir(parents=True, exist_ok=True)
        for index in range(n_per_class):
            path = directory / f"{label.directory}_{index:04d}.ppm"
            write_ppm(path, synth_patch(rng, label, size))
            paths.append(path)

    logger.info("Wrote %d synthetic images to %s", len(paths), root)
    return SynthCorpus(
        root=root,
        skin_dir=root / Label.SKIN.directory,
        nonskin_dir=root / Label.NON_SKIN.directory,
        paths=paths,
    )
