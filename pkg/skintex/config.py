"""
Configuration defaults and settings objects for skintex.
"""

from dataclasses import dataclass
from typing import Tuple

# Network shape: 13 features in, 50 tanh hidden units, 1 tanh output
INPUT_SIZE = 13
HIDDEN_SIZE = 50
OUTPUT_SIZE = 1

# Feature extraction
DEFAULT_DISPLACEMENT = (1, 0)
DEFAULT_LEVELS = 256
PATCH_SIZE = 80

# Dataset layout
SKIN_DIR = "skin"
NONSKIN_DIR = "nonskin"
IMAGE_SUFFIX = ".ppm"

# Model file
MODEL_FORMAT_VERSION = 1
FEATURE_ORDER_TAG = "glcm4-rgbmoments9-v1"


@dataclass(frozen=True)
class FeatureConfig:
    """Settings that control feature extraction."""

    displacement: Tuple[int, int] = DEFAULT_DISPLACEMENT
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        dx, dy = self.displacement
        if (dx, dy) == (0, 0):
            raise ValueError("displacement must not be (0, 0)")
        if not 2 <= self.levels <= 256:
            raise ValueError(f"levels must be in [2, 256], got {self.levels}")
        object.__setattr__(self, "displacement", (int(dx), int(dy)))


@dataclass(frozen=True)
class TrainConfig:
    """
    Hyperparameters for full-batch gradient descent with adaptive learning rate.

    Args:
        sse_goal: Stop once the sum of squared errors drops to this value
        max_epochs: Hard cap on the number of epochs
        lr_initial: Starting learning rate
        lr_increase: Factor applied to the rate after an improving step
        lr_decrease: Factor applied to the rate after a rejected step
        max_sse_growth: A step is rejected if SSE grows by more than this ratio
        lr_min: Lower bound on the learning rate
        lr_max: Upper bound on the learning rate
        seed: Seed for weight initialization
    """

    sse_goal: float = 1e-6
    max_epochs: int = 50000
    lr_initial: float = 0.01
    lr_increase: float = 1.05
    lr_decrease: float = 0.7
    max_sse_growth: float = 1.04
    lr_min: float = 1e-9
    lr_max: float = 10.0
    seed: int = 1

    def __post_init__(self):
        if not self.lr_decrease < 1.0 < self.lr_increase:
            raise ValueError("need lr_decrease < 1 < lr_increase")
        if not self.max_sse_growth > 1.0:
            raise ValueError("max_sse_growth must be > 1")
        if not self.lr_min < self.lr_initial < self.lr_max:
            raise ValueError("need lr_min < lr_initial < lr_max")
        if not self.sse_goal > 0.0:
            raise ValueError("sse_goal must be > 0")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be >= 0")
