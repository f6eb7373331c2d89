"""
The 13-50-1 tanh feed-forward network: forward pass, SSE backpropagation,
adaptive-learning-rate training and the model file format.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .config import (
    DEFAULT_DISPLACEMENT,
    DEFAULT_LEVELS,
    FEATURE_ORDER_TAG,
    HIDDEN_SIZE,
    INPUT_SIZE,
    MODEL_FORMAT_VERSION,
    NONSKIN_DIR,
    OUTPUT_SIZE,
    SKIN_DIR,
    FeatureConfig,
    TrainConfig,
)
from .errors import (
    ModelDimensionError,
    ModelFormatError,
    ModelValueError,
    ModelVersionError,
    TrainingDivergedError,
)
from .features import FeatureVector, NormalizationRanges

logger = logging.getLogger(__name__)

IDENTITY_RANGES = NormalizationRanges(-np.ones(INPUT_SIZE), np.ones(INPUT_SIZE))


class Label(str, Enum):
    """Class of a texture patch."""

    SKIN = "skin"
    NON_SKIN = "non-skin"

    @property
    def target(self):
        """Desired network output: +1 for skin, -1 for non-skin."""
        return 1.0 if self is Label.SKIN else -1.0

    @property
    def directory(self):
        return SKIN_DIR if self is Label.SKIN else NONSKIN_DIR

    @classmethod
    def from_score(cls, score):
        # a score of exactly 0 counts as skin
        return cls.SKIN if score >= 0.0 else cls.NON_SKIN


@dataclass(frozen=True)
class ModelMetadata:
    """Extraction settings a model was trained with."""

    displacement: Tuple[int, int] = DEFAULT_DISPLACEMENT
    levels: int = DEFAULT_LEVELS
    feature_order: str = FEATURE_ORDER_TAG


def _frozen_array(values, shape, name):
    array = np.array(values, dtype=np.float64, copy=True)
    if array.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains non-finite values")
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class MlpModel:
    """
    Weights and biases of a one-hidden-layer tanh network.

    Args:
        hidden_weights: (hidden, inputs) matrix
        hidden_biases: (hidden,) vector
        output_weights: (1, hidden) matrix
        output_bias: Scalar output bias
        ranges: Feature normalization applied by classify
        metadata: Extraction settings recorded with the model
    """

    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_bias: float = 0.0
    ranges: NormalizationRanges = field(default_factory=lambda: IDENTITY_RANGES)
    metadata: ModelMetadata = field(default_factory=ModelMetadata)

    def __post_init__(self):
        w1 = np.asarray(self.hidden_weights)
        if w1.ndim != 2:
            raise ValueError("hidden_weights must be a matrix")
        hidden, inputs = w1.shape
        object.__setattr__(self, "hidden_weights", _frozen_array(w1, (hidden, inputs), "hidden_weights"))
        object.__setattr__(self, "hidden_biases", _frozen_array(self.hidden_biases, (hidden,), "hidden_biases"))
        object.__setattr__(
            self, "output_weights", _frozen_array(self.output_weights, (OUTPUT_SIZE, hidden), "output_weights")
        )
        bias = float(self.output_bias)
        if not math.isfinite(bias):
            raise ValueError("output_bias is not finite")
        object.__setattr__(self, "output_bias", bias)

    @property
    def dims(self):
        hidden, inputs = self.hidden_weights.shape
        return (inputs, hidden, OUTPUT_SIZE)

    def parameters(self):
        """All weights and biases as one flat vector."""
        return np.concatenate([
            self.hidden_weights.ravel(),
            self.hidden_biases,
            self.output_weights.ravel(),
            [self.output_bias],
        ])

    def with_parameters(self, vector):
        """Return a copy of this model with parameters taken from a flat vector."""
        inputs, hidden, _ = self.dims
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (hidden * inputs + 2 * hidden + 1,):
            raise ValueError("parameter vector has the wrong length")
        w1_end = hidden * inputs
        b1_end = w1_end + hidden
        w2_end = b1_end + hidden
        return replace(
            self,
            hidden_weights=vector[:w1_end].reshape(hidden, inputs),
            hidden_biases=vector[w1_end:b1_end],
            output_weights=vector[b1_end:w2_end].reshape(OUTPUT_SIZE, hidden),
            output_bias=vector[w2_end],
        )

    def __eq__(self, other):
        if not isinstance(other, MlpModel):
            return NotImplemented
        return (
            np.array_equal(self.parameters(), other.parameters())
            and self.dims == other.dims
            and self.ranges == other.ranges
            and self.metadata == other.metadata
        )


@dataclass(frozen=True)
class Gradient:
    """SSE gradient, shaped like the model parameters."""

    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_bias: float

    def flatten(self):
        return np.concatenate([
            self.hidden_weights.ravel(),
            self.hidden_biases,
            self.output_weights.ravel(),
            [self.output_bias],
        ])


@dataclass(frozen=True, eq=False)
class Batch:
    """Training inputs (n, inputs) and their +1/-1 targets (n,)."""

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        targets = np.asarray(self.targets, dtype=np.float64).ravel()
        if targets.size == 0:
            raise ValueError("batch must not be empty")
        if inputs.shape[0] != targets.size:
            raise ValueError("batch inputs and targets differ in length")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @classmethod
    def from_pairs(cls, pairs):
        """Build a batch from (x, t) pairs."""
        pairs = list(pairs)
        if not pairs:
            raise ValueError("batch must not be empty")
        inputs = np.vstack([np.asarray(x, dtype=np.float64) for x, _ in pairs])
        return cls(inputs, [t for _, t in pairs])

    def __len__(self):
        return self.targets.size


class TerminalReason(str, Enum):
    GOAL_REACHED = "goal_reached"
    MAX_EPOCHS = "max_epochs"


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    sse: float
    lr: float
    accepted: bool


@dataclass
class TrainTrace:
    """
    Per-epoch history of a training run.

    Each record holds the SSE of the parameters kept after that epoch and the
    learning rate to be used next.
    """

    initial_sse: float
    records: List[EpochRecord] = field(default_factory=list)
    reason: TerminalReason = TerminalReason.MAX_EPOCHS

    @property
    def epochs(self):
        return len(self.records)

    @property
    def final_sse(self):
        return self.records[-1].sse if self.records else self.initial_sse

    @property
    def accepted_steps(self):
        return sum(1 for record in self.records if record.accepted)

    def sse_history(self):
        return np.array([record.sse for record in self.records])

    def lr_history(self):
        return np.array([record.lr for record in self.records])


def _as_batch(batch):
    return batch if isinstance(batch, Batch) else Batch.from_pairs(batch)


def _activations(m, inputs):
    hidden = np.tanh(inputs @ m.hidden_weights.T + m.hidden_biases)
    outputs = np.tanh(hidden @ m.output_weights[0] + m.output_bias)
    return hidden, outputs


def init_model(seed, ranges=IDENTITY_RANGES, metadata=None, hidden=HIDDEN_SIZE, inputs=INPUT_SIZE):
    """
    Create a freshly initialized network.

    Weights are drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)] with a
    numpy PCG64 generator seeded by `seed`, hidden layer first; biases start
    at zero.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    hidden_bound = 1.0 / math.sqrt(inputs)
    output_bound = 1.0 / math.sqrt(hidden)
    return MlpModel(
        hidden_weights=rng.uniform(-hidden_bound, hidden_bound, size=(hidden, inputs)),
        hidden_biases=np.zeros(hidden),
        output_weights=rng.uniform(-output_bound, output_bound, size=(OUTPUT_SIZE, hidden)),
        output_bias=0.0,
        ranges=ranges,
        metadata=metadata or ModelMetadata(),
    )


def forward(m, x):
    """
    Network output tanh(W2 tanh(W1 x + b1) + b2).

    Args:
        m: MlpModel
        x: One normalized input vector, or an (n, inputs) matrix

    Returns:
        float for a single vector, an (n,) array for a matrix
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return float(_activations(m, x[np.newaxis, :])[1][0])
    return _activations(m, x)[1]


def sse(m, batch):
    """Sum over the batch of (t - forward(m, x))^2."""
    batch = _as_batch(batch)
    _, outputs = _activations(m, batch.inputs)
    residual = batch.targets - outputs
    return float(residual @ residual)


def gradient(m, batch):
    """Exact gradient of sse with respect to every weight and bias."""
    batch = _as_batch(batch)
    hidden, outputs = _activations(m, batch.inputs)
    residual = batch.targets - outputs

    delta_out = -2.0 * residual * (1.0 - outputs * outputs)
    delta_hidden = np.outer(delta_out, m.output_weights[0]) * (1.0 - hidden * hidden)

    return Gradient(
        hidden_weights=delta_hidden.T @ batch.inputs,
        hidden_biases=delta_hidden.sum(axis=0),
        output_weights=(delta_out @ hidden)[np.newaxis, :],
        output_bias=float(delta_out.sum()),
    )


def train(m, batch, cfg=None):
    """
    Full-batch gradient descent with an adaptive learning rate.

    Each epoch tries theta - lr * grad. A step that grows SSE by more than
    cfg.max_sse_growth is rejected and the rate shrinks; otherwise it is kept,
    and the rate grows if SSE went down.

    Returns:
        (trained model, TrainTrace)
    """
    cfg = cfg or TrainConfig()
    batch = _as_batch(batch)

    current = m
    current_sse = sse(current, batch)
    trace = TrainTrace(initial_sse=current_sse)
    if not math.isfinite(current_sse):
        raise TrainingDivergedError("initial SSE is not finite", trace)
    if current_sse <= cfg.sse_goal:
        trace.reason = TerminalReason.GOAL_REACHED
        return current, trace

    logger.info("Training on %d samples, initial SSE %.6g", len(batch), current_sse)
    lr = cfg.lr_initial
    for epoch in range(1, cfg.max_epochs + 1):
        theta = current.parameters()
        step = gradient(current, batch).flatten()
        if not np.all(np.isfinite(step)):
            raise TrainingDivergedError(f"gradient became non-finite at epoch {epoch}", trace)

        proposal = theta - lr * step
        if not np.all(np.isfinite(proposal)):
            raise TrainingDivergedError(f"parameters overflowed at epoch {epoch}", trace)
        candidate = current.with_parameters(proposal)
        candidate_sse = sse(candidate, batch)
        if not math.isfinite(candidate_sse):
            raise TrainingDivergedError(f"SSE became non-finite at epoch {epoch}", trace)

        if candidate_sse > cfg.max_sse_growth * current_sse:
            lr = max(lr * cfg.lr_decrease, cfg.lr_min)
            accepted = False
        else:
            if candidate_sse < current_sse:
                lr = min(lr * cfg.lr_increase, cfg.lr_max)
            current, current_sse = candidate, candidate_sse
            accepted = True

        trace.records.append(EpochRecord(epoch=epoch, sse=current_sse, lr=lr, accepted=accepted))
        if epoch % 1000 == 0:
            logger.debug("epoch %d  SSE %.6g  lr %.4g", epoch, current_sse, lr)
        if current_sse <= cfg.sse_goal:
            trace.reason = TerminalReason.GOAL_REACHED
            break

    if trace.reason is TerminalReason.GOAL_REACHED:
        logger.info("Performance goal %.3g reached after %d epochs", cfg.sse_goal, trace.epochs)
    else:
        logger.warning(
            "Stopped at max_epochs=%d with SSE %.6g (goal %.3g)", cfg.max_epochs, current_sse, cfg.sse_goal
        )
    return current, trace


@dataclass(frozen=True)
class Classification:
    label: Label
    score: float


def classify(m, raw_features):
    """Normalize raw features with the model's ranges and classify by output sign."""
    values = raw_features.values if isinstance(raw_features, FeatureVector) else raw_features
    score = forward(m, m.ranges.apply(values))
    return Classification(label=Label.from_score(score), score=score)


def format_real(value):
    """Shortest-exact decimal for a double: 17 significant digits."""
    text = format(float(value), ".17g")
    # keep a fraction part so "-0" and "1" read back as floats
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _reals(values):
    return "[" + ", ".join(format_real(v) for v in values) + "]"


def save_model(m):
    """
    Serialize a model as a versioned JSON document.

    Every real is written with 17 significant digits, which reads back to the
    identical double.
    """
    inputs, hidden, outputs = m.dims
    metadata = {
        "displacement": list(m.metadata.displacement),
        "levels": m.metadata.levels,
        "feature_order": m.metadata.feature_order,
    }
    lines = [
        "{",
        f'  "format_version": {MODEL_FORMAT_VERSION},',
        f'  "dims": [{inputs}, {hidden}, {outputs}],',
        '  "activation": "tanh",',
        f'  "hidden_weights": {_reals(m.hidden_weights.ravel())},',
        f'  "hidden_biases": {_reals(m.hidden_biases)},',
        f'  "output_weights": {_reals(m.output_weights.ravel())},',
        f'  "output_bias": {format_real(m.output_bias)},',
        '  "ranges": [' + ", ".join(_reals(pair) for pair in m.ranges.to_pairs()) + "],",
        f'  "metadata": {json.dumps(metadata)}',
        "}",
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _real_array(document, key, length):
    if key not in document:
        raise ModelFormatError(f"model file lacks '{key}'")
    try:
        array = np.asarray(document[key], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"'{key}' must hold numbers") from exc
    if array.ndim != 1 or array.size != length:
        raise ModelDimensionError(f"'{key}' must hold {length} values, found shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ModelValueError(f"'{key}' contains non-finite values")
    return array


def load_model(data):
    """
    Parse a model file written by save_model.

    Raises:
        ModelVersionError: format_version is not supported
        ModelDimensionError: dims or array sizes differ from 13-50-1
        ModelValueError: a parameter is not finite
        ModelFormatError: anything else malformed
    """
    try:
        document = json.loads(bytes(data).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ModelFormatError("model file must hold a JSON object")

    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model format_version {version!r}, expected {MODEL_FORMAT_VERSION}")
    dims = document.get("dims")
    if dims != [INPUT_SIZE, HIDDEN_SIZE, OUTPUT_SIZE]:
        raise ModelDimensionError(f"model dims {dims!r} do not match {[INPUT_SIZE, HIDDEN_SIZE, OUTPUT_SIZE]}")
    if document.get("activation") != "tanh":
        raise ModelFormatError(f"unsupported activation {document.get('activation')!r}")

    hidden_weights = _real_array(document, "hidden_weights", HIDDEN_SIZE * INPUT_SIZE)
    hidden_biases = _real_array(document, "hidden_biases", HIDDEN_SIZE)
    output_weights = _real_array(document, "output_weights", OUTPUT_SIZE * HIDDEN_SIZE)
    output_bias = _real_array({"output_bias": [document.get("output_bias")]}, "output_bias", 1)[0]

    try:
        pairs = np.asarray(document.get("ranges"), dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError("'ranges' must hold min/max number pairs") from exc
    if pairs.shape != (INPUT_SIZE, 2):
        raise ModelDimensionError(f"'ranges' must hold {INPUT_SIZE} min/max pairs, found shape {pairs.shape}")
    if not np.all(np.isfinite(pairs)):
        raise ModelValueError("'ranges' contains non-finite values")
    if np.any(pairs[:, 0] > pairs[:, 1]):
        raise ModelValueError("'ranges' has a pair with min > max")

    meta = document.get("metadata")
    try:
        dx, dy = meta["displacement"]
        extraction = FeatureConfig(displacement=(int(dx), int(dy)), levels=int(meta["levels"]))
        metadata = ModelMetadata(
            displacement=extraction.displacement,
            levels=extraction.levels,
            feature_order=str(meta["feature_order"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"model metadata is malformed: {exc}") from exc
    if metadata.feature_order != FEATURE_ORDER_TAG:
        raise ModelFormatError(f"unknown feature order {metadata.feature_order!r}")

    return MlpModel(
        hidden_weights=hidden_weights.reshape(HIDDEN_SIZE, INPUT_SIZE),
        hidden_biases=hidden_biases,
        output_weights=output_weights.reshape(OUTPUT_SIZE, HIDDEN_SIZE),
        output_bias=output_bias,
        ranges=NormalizationRanges.from_pairs(pairs),
        metadata=metadata,
    )


def write_model(path, m):
    path = Path(path)
    path.write_bytes(save_model(m))
    return path


def read_model(path):
    return load_model(Path(path).read_bytes())
