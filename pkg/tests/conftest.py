"""
Shared fixtures: small synthetic corpora and a model trained on one.
"""

import numpy as np
import pytest

from skintex.config import TrainConfig
from skintex.features import FeatureVector
from skintex.imagio import RgbImage
from skintex.mlp import Label
from skintex.pipeline import LabeledSample, ingest, train_pipeline
from skintex.synth import synth_corpus


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("train_corpus")
    synth_corpus(root, seed=7, n_per_class=10, size=16)
    return root


@pytest.fixture(scope="session")
def held_out_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("test_corpus")
    synth_corpus(root, seed=8, n_per_class=5, size=16)
    return root


@pytest.fixture(scope="session")
def small_samples(small_corpus):
    return ingest(small_corpus, progress=False)


@pytest.fixture(scope="session")
def trained(small_samples):
    """(model, trace) from a short training run on the small corpus."""
    return train_pipeline(small_samples, TrainConfig(max_epochs=2000, seed=1))


def constant_image(color, width=4, height=4):
    return RgbImage(np.tile(np.array(color, dtype=np.uint8), (height, width, 1)))


def sample_with_first_feature(value, label, path):
    """A LabeledSample whose only nonzero feature is the first one."""
    values = np.zeros(13)
    values[0] = value
    return LabeledSample(path=path, label=label, features=FeatureVector(values))


SKIN, NON_SKIN = Label.SKIN, Label.NON_SKIN
