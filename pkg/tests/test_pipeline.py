import json
import logging

import numpy as np
import pytest

from skintex.config import TrainConfig
from skintex.errors import DatasetError
from skintex.features import fit_ranges
from skintex.imagio import write_ppm
from skintex.mlp import MlpModel, TerminalReason, save_model
from skintex.pipeline import EvalReport, evaluate, ingest, train_pipeline

from .conftest import NON_SKIN, SKIN, constant_image, sample_with_first_feature


def first_feature_model():
    """Scores tanh(tanh(x0)): the sign of the first raw feature decides."""
    hidden_weights = np.zeros((50, 13))
    hidden_weights[0, 0] = 1.0
    output_weights = np.zeros((1, 50))
    output_weights[0, 0] = 1.0
    return MlpModel(hidden_weights=hidden_weights, hidden_biases=np.zeros(50), output_weights=output_weights)


def make_dataset(root, skin_colors, nonskin_colors, size=8):
    for directory, colors in (("skin", skin_colors), ("nonskin", nonskin_colors)):
        (root / directory).mkdir(parents=True, exist_ok=True)
        for index, color in enumerate(colors):
            write_ppm(root / directory / f"img_{index}.ppm", constant_image(color, size, size))
    return root


class TestIngest:
    def test_two_per_class(self, tmp_path):
        root = make_dataset(tmp_path, [(200, 150, 120), (210, 140, 130)], [(90, 150, 200), (80, 160, 220)])
        samples = ingest(root, progress=False)
        assert len(samples) == 4
        for sample in samples:
            assert sample.label is (SKIN if sample.path.parent.name == "skin" else NON_SKIN)
        assert [str(s.path) for s in samples] == sorted(str(s.path) for s in samples)

    def test_empty_class_directory(self, tmp_path):
        root = make_dataset(tmp_path, [], [(90, 150, 200)])
        with pytest.raises(DatasetError):
            ingest(root, progress=False)

    def test_missing_subdirectory(self, tmp_path):
        (tmp_path / "skin").mkdir()
        with pytest.raises(DatasetError):
            ingest(tmp_path, progress=False)

    def test_missing_root(self, tmp_path):
        with pytest.raises(DatasetError):
            ingest(tmp_path / "nowhere", progress=False)

    def test_undecodable_file_is_skipped(self, tmp_path, caplog):
        root = make_dataset(tmp_path, [(200, 150, 120)], [(90, 150, 200)])
        (root / "skin" / "broken.ppm").write_bytes(b"P5 1 1 255\n\x00")
        with caplog.at_level(logging.WARNING, logger="skintex"):
            samples = ingest(root, progress=False)
        assert len(samples) == 2
        assert any("broken.ppm" in record.getMessage() for record in caplog.records)

    def test_oversized_p3_header_is_skipped(self, tmp_path):
        root = make_dataset(tmp_path, [(200, 150, 120)], [(90, 150, 200)])
        (root / "nonskin" / "huge.ppm").write_bytes(b"P3 100000 100000 255 1 2 3")
        samples = ingest(root, progress=False)
        assert [s.path.name for s in samples] == ["img_0.ppm", "img_0.ppm"]

    def test_only_undecodable_files(self, tmp_path):
        root = make_dataset(tmp_path, [], [(90, 150, 200)])
        (root / "skin" / "broken.ppm").write_bytes(b"garbage")
        with pytest.raises(DatasetError):
            ingest(root, progress=False)

    def test_non_standard_size_warns(self, tmp_path, caplog):
        root = make_dataset(tmp_path, [(200, 150, 120)], [(90, 150, 200)], size=8)
        with caplog.at_level(logging.WARNING, logger="skintex"):
            ingest(root, progress=False)
        assert any("not 80x80" in record.getMessage() for record in caplog.records)

    def test_other_suffixes_ignored(self, tmp_path):
        root = make_dataset(tmp_path, [(200, 150, 120)], [(90, 150, 200)])
        (root / "skin" / "notes.txt").write_text("not an image")
        assert len(ingest(root, progress=False)) == 2

    def test_deterministic(self, small_corpus, small_samples):
        again = ingest(small_corpus, progress=False)
        assert [s.path for s in again] == [s.path for s in small_samples]
        assert [s.features for s in again] == [s.features for s in small_samples]

    def test_workers_do_not_change_result(self, small_corpus, small_samples):
        threaded = ingest(small_corpus, workers=4, progress=False)
        assert [(s.path, s.label, s.features) for s in threaded] == [
            (s.path, s.label, s.features) for s in small_samples
        ]

    def test_levels_and_displacement_are_used(self, small_corpus, small_samples):
        coarse = ingest(small_corpus, d=(0, 1), levels=16, progress=False)
        assert coarse[0].features != small_samples[0].features
        np.testing.assert_array_equal(coarse[0].features.values[4:], small_samples[0].features.values[4:])


class TestTrainPipeline:
    def test_tiny_set_reaches_goal(self, tmp_path):
        samples = [
            sample_with_first_feature(1.0, SKIN, tmp_path / "a.ppm"),
            sample_with_first_feature(-1.0, NON_SKIN, tmp_path / "b.ppm"),
        ]
        model, trace = train_pipeline(samples, TrainConfig())
        assert trace.reason is TerminalReason.GOAL_REACHED
        assert trace.final_sse <= 1e-6

    def test_ranges_come_from_training_features(self, trained, small_samples):
        model, _ = trained
        assert model.ranges == fit_ranges([s.features for s in small_samples])

    def test_single_class_rejected(self, tmp_path):
        samples = [sample_with_first_feature(float(k), SKIN, tmp_path / f"{k}.ppm") for k in range(3)]
        with pytest.raises(ValueError):
            train_pipeline(samples)

    def test_metadata_recorded(self, trained):
        model, _ = trained
        assert model.metadata.displacement == (1, 0)
        assert model.metadata.levels == 256


class TestEvaluate:
    def test_hand_tally(self, tmp_path):
        samples = [
            sample_with_first_feature(0.5, SKIN, tmp_path / "tp.ppm"),
            sample_with_first_feature(-0.5, SKIN, tmp_path / "fn.ppm"),
            sample_with_first_feature(0.5, NON_SKIN, tmp_path / "fp.ppm"),
            sample_with_first_feature(-0.5, NON_SKIN, tmp_path / "tn.ppm"),
        ]
        report = evaluate(first_feature_model(), samples)
        assert (report.true_positive, report.true_negative, report.false_positive, report.false_negative) == (
            1, 1, 1, 1,
        )
        assert report.accuracy == 0.5
        assert report.misclassified == [str(tmp_path / "fn.ppm"), str(tmp_path / "fp.ppm")]

    def test_ninety_six_of_hundred(self, tmp_path):
        samples = []
        for k in range(50):
            skin_value = -1.0 if k < 2 else 1.0
            nonskin_value = 1.0 if k < 2 else -1.0
            samples.append(sample_with_first_feature(skin_value, SKIN, tmp_path / f"s{k}.ppm"))
            samples.append(sample_with_first_feature(nonskin_value, NON_SKIN, tmp_path / f"n{k}.ppm"))
        report = evaluate(first_feature_model(), samples)
        assert report.accuracy == 0.96
        assert report.total == 100
        assert len(report.misclassified) == 4

    def test_all_correct(self, tmp_path):
        samples = [
            sample_with_first_feature(0.3, SKIN, tmp_path / "a.ppm"),
            sample_with_first_feature(-0.3, NON_SKIN, tmp_path / "b.ppm"),
        ]
        report = evaluate(first_feature_model(), samples)
        assert report.accuracy == 1.0
        assert report.misclassified == []

    def test_empty_set(self):
        with pytest.raises(ValueError):
            evaluate(first_feature_model(), [])

    def test_does_not_touch_model(self, trained, held_out_corpus):
        model, _ = trained
        before = save_model(model)
        evaluate(model, ingest(held_out_corpus, progress=False))
        assert save_model(model) == before

    def test_held_out_accuracy(self, trained, held_out_corpus):
        model, _ = trained
        report = evaluate(model, ingest(held_out_corpus, progress=False))
        assert report.total == 10
        assert report.accuracy >= 0.95

    def test_report_formats(self, trained, held_out_corpus):
        model, _ = trained
        report = evaluate(model, ingest(held_out_corpus, progress=False))
        document = json.loads(report.to_json())
        assert document["total"] == report.total
        assert len(document["outputs"]) == report.total
        assert {o["label"] for o in document["outputs"]} == {"skin", "non-skin"}
        table = report.to_table()
        assert "Accuracy:" in table
        assert "predicted" in table

    def test_end_to_end_deterministic(self, small_samples, held_out_corpus):
        cfg = TrainConfig(max_epochs=300, seed=3)
        reports = []
        for _ in range(2):
            model, _ = train_pipeline(small_samples, cfg)
            reports.append(evaluate(model, ingest(held_out_corpus, progress=False)).to_dict())
        assert reports[0] == reports[1]


def test_report_total():
    report = EvalReport(true_positive=3, true_negative=4, false_positive=1, false_negative=2, accuracy=0.7)
    assert report.total == 10
    assert report.to_dict()["outputs"] == []
