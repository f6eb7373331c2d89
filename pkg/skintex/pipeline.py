"""
Dataset ingestion, training orchestration and evaluation.

The pipeline runs in three tasks: build the library of labeled features from
a directory, train the network on it, and classify held-out images.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix
from tqdm import tqdm

from .config import IMAGE_SUFFIX, PATCH_SIZE, FeatureConfig, TrainConfig
from .errors import DatasetError, DegenerateGlcmError, PpmDecodeError
from .features import Displacement, FeatureVector, extract_features, fit_ranges
from .imagio import read_ppm
from .mlp import Batch, Label, ModelMetadata, classify, init_model, train

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledSample:
    path: Path
    label: Label
    features: FeatureVector


@dataclass(frozen=True)
class SampleOutput:
    """Network output for one evaluated image."""

    path: str
    label: Label
    score: float
    predicted: Label


@dataclass
class EvalReport:
    """Confusion counts and accuracy of a model on a labeled test set."""

    true_positive: int
    true_negative: int
    false_positive: int
    false_negative: int
    accuracy: float
    misclassified: List[str] = field(default_factory=list)
    outputs: List[SampleOutput] = field(default_factory=list)

    @property
    def total(self):
        return self.true_positive + self.true_negative + self.false_positive + self.false_negative

    def to_dict(self):
        return {
            "true_positive": self.true_positive,
            "true_negative": self.true_negative,
            "false_positive": self.false_positive,
            "false_negative": self.false_negative,
            "total": self.total,
            "accuracy": self.accuracy,
            "misclassified": list(self.misclassified),
            "outputs": [
                {"path": o.path, "label": o.label.value, "predicted": o.predicted.value, "score": o.score}
                for o in self.outputs
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self):
        """Render the report as a plain-text table."""
        table = pd.DataFrame(
            [[self.true_positive, self.false_negative], [self.false_positive, self.true_negative]],
            index=pd.Index(["skin", "non-skin"], name="actual"),
            columns=pd.Index(["skin", "non-skin"], name="predicted"),
        )
        correct = self.true_positive + self.true_negative
        lines = [
            table.to_string(),
            "",
            f"Accuracy: {self.accuracy:.4f} ({correct}/{self.total})",
            f"Misclassified: {len(self.misclassified)}",
        ]
        lines.extend(f"  {path}" for path in self.misclassified)
        return "\n".join(lines)


def _list_images(directory):
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() == IMAGE_SUFFIX)


def _extract_sample(job, feature_config):
    path, label = job
    try:
        img = read_ppm(path)
        features = extract_features(img, feature_config.displacement, feature_config.levels)
    except (PpmDecodeError, DegenerateGlcmError, OSError) as exc:
        logger.warning("Skipping %s: %s", path, exc)
        return None
    if (img.width, img.height) != (PATCH_SIZE, PATCH_SIZE):
        logger.warning("%s is %dx%d, not %dx%d", path, img.width, img.height, PATCH_SIZE, PATCH_SIZE)
    return LabeledSample(path=path, label=label, features=features)


def ingest(root, d=None, levels=None, workers=1, progress=True):
    """
    Extract features for every image under root/skin and root/nonskin.

    Args:
        root: Dataset directory
        d: GLCM displacement (default (1, 0))
        levels: Gray levels for the GLCM (default 256)
        workers: Threads used for extraction; output order does not depend on it
        progress: Show a progress bar on stderr when it is a terminal

    Returns:
        List of LabeledSample in lexicographic path order
    """
    defaults = FeatureConfig()
    feature_config = FeatureConfig(
        displacement=Displacement.coerce(d).as_tuple() if d is not None else defaults.displacement,
        levels=levels if levels is not None else defaults.levels,
    )
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset directory {root} does not exist")

    jobs = []
    for label in Label:
        subdir = root / label.directory
        if not subdir.is_dir():
            raise DatasetError(f"missing subdirectory {subdir}")
        jobs.extend((path, label) for path in _list_images(subdir))
    jobs.sort(key=lambda job: str(job[0]))

    def work(job):
        return _extract_sample(job, feature_config)

    bar = dict(total=len(jobs), desc="Extracting features", unit="img", disable=None if progress else True)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(tqdm(pool.map(work, jobs), **bar))
    else:
        results = [work(job) for job in tqdm(jobs, **bar)]

    samples = [sample for sample in results if sample is not None]
    for label in Label:
        if not any(sample.label is label for sample in samples):
            raise DatasetError(f"no decodable images in {root / label.directory}")

    skin = sum(1 for sample in samples if sample.label is Label.SKIN)
    logger.info("Ingested %d samples (%d skin, %d non-skin) from %s", len(samples), skin, len(samples) - skin, root)
    return samples


def train_pipeline(train_samples, cfg=None, feature_config=None):
    """
    Fit normalization ranges on the training set and train a fresh network.

    Args:
        train_samples: LabeledSample list holding both classes
        cfg: TrainConfig, defaults when None
        feature_config: Extraction settings recorded in the model metadata

    Returns:
        (MlpModel, TrainTrace)
    """
    cfg = cfg or TrainConfig()
    feature_config = feature_config or FeatureConfig()
    labels = {sample.label for sample in train_samples}
    if labels != set(Label):
        raise ValueError("training set must contain both skin and non-skin samples")

    ranges = fit_ranges([sample.features for sample in train_samples])
    inputs = ranges.apply(np.vstack([sample.features.values for sample in train_samples]))
    targets = [sample.label.target for sample in train_samples]

    metadata = ModelMetadata(displacement=feature_config.displacement, levels=feature_config.levels)
    model = init_model(cfg.seed, ranges=ranges, metadata=metadata)
    return train(model, Batch(inputs, targets), cfg)


def evaluate(m, test_samples):
    """
    Classify every test sample and tally the confusion counts.

    Skin is the positive class.
    """
    if len(test_samples) == 0:
        raise ValueError("cannot evaluate on an empty test set")

    outputs = []
    for sample in test_samples:
        result = classify(m, sample.features)
        outputs.append(SampleOutput(str(sample.path), sample.label, result.score, result.label))

    tn, fp, fn, tp = confusion_matrix(
        [o.label.value for o in outputs],
        [o.predicted.value for o in outputs],
        labels=[Label.NON_SKIN.value, Label.SKIN.value],
    ).ravel()
    total = len(outputs)
    return EvalReport(
        true_positive=int(tp),
        true_negative=int(tn),
        false_positive=int(fp),
        false_negative=int(fn),
        accuracy=(int(tp) + int(tn)) / total,
        misclassified=[o.path for o in outputs if o.label is not o.predicted],
        outputs=outputs,
    )
