"""
Library module for the labeled collection of skin and non-skin features.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from .config import FeatureConfig
from .features import FEATURE_NAMES
from .mlp import Label
from .pipeline import ingest

logger = logging.getLogger(__name__)


class SkinLibrary:
    """Manages the library of representative skin and non-skin features."""

    def __init__(self, root, feature_config=None):
        """
        Initialize the library.

        Args:
            root: Dataset directory holding skin/ and nonskin/ subdirectories
            feature_config: FeatureConfig used for extraction
        """
        self.root = Path(root)
        self.feature_config = feature_config or FeatureConfig()
        self.samples = []

    def ingest(self, workers=1, progress=True):
        """
        Extract features for every image in the dataset directory.

        Args:
            workers: Number of extraction threads
            progress: Whether to show a progress bar

        Returns:
            self for method chaining
        """
        self.samples = ingest(
            self.root,
            self.feature_config.displacement,
            self.feature_config.levels,
            workers=workers,
            progress=progress,
        )
        return self

    def get_stats(self):
        """Get library statistics."""
        skin = sum(1 for sample in self.samples if sample.label is Label.SKIN)
        return {
            "total": len(self.samples),
            "skin": skin,
            "non_skin": len(self.samples) - skin,
        }

    def features_matrix(self):
        """Raw features as an (n, 13) array."""
        if not self.samples:
            raise ValueError("Library is empty. Call ingest() first.")
        return np.vstack([sample.features.values for sample in self.samples])

    def targets(self):
        """Network targets: +1 for skin, -1 for non-skin."""
        return np.array([sample.label.target for sample in self.samples])

    def to_dataframe(self):
        """
        Get the library as a pandas DataFrame.

        Returns:
            DataFrame with columns path, label and the 13 features in fixed order
        """
        if not self.samples:
            raise ValueError("Library is empty. Call ingest() first.")
        frame = pd.DataFrame(self.features_matrix(), columns=list(FEATURE_NAMES))
        frame.insert(0, "label", [sample.label.value for sample in self.samples])
        frame.insert(0, "path", [str(sample.path) for sample in self.samples])
        return frame

    def save_features_csv(self, path_or_buf):
        """
        Write the feature dump: a header line, then one record per image.

        Args:
            path_or_buf: Output filename or text stream
        """
        frame = self.to_dataframe()
        frame.to_csv(path_or_buf, index=False, float_format="%.17g")
        if isinstance(path_or_buf, (str, Path)):
            logger.info("Saved %d feature records to %s", len(frame), path_or_buf)
