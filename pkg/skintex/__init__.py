"""
skintex - Skin texture recognition with color moments, GLCM features and a
feed-forward neural network.

This package provides functionality to:
- Extract a 13-element color + texture feature vector from an RGB image
- Build a labeled library of skin and non-skin features from a directory
- Train a 13-50-1 tanh network with adaptive-learning-rate gradient descent
- Classify and evaluate images, and generate a synthetic test corpus
"""

__version__ = "0.1.0"

from .config import FeatureConfig, TrainConfig
from .features import Displacement, FeatureVector, extract_features
from .imagio import RgbImage, read_ppm, write_ppm
from .library import SkinLibrary
from .mlp import Label, MlpModel, classify, read_model, write_model
from .pipeline import EvalReport, evaluate, ingest, train_pipeline
from .synth import synth_corpus

__all__ = [
    "Displacement",
    "EvalReport",
    "FeatureConfig",
    "FeatureVector",
    "Label",
    "MlpModel",
    "RgbImage",
    "SkinLibrary",
    "TrainConfig",
    "classify",
    "evaluate",
    "extract_features",
    "ingest",
    "read_model",
    "read_ppm",
    "synth_corpus",
    "train_pipeline",
    "write_model",
    "write_ppm",
]
