"""
Command-line interface for skintex.

Exit codes: 0 success, 1 processing failure, 2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path

from .config import DEFAULT_LEVELS, FeatureConfig, TrainConfig
from .errors import SkintexError
from .features import Displacement, extract_features
from .imagio import read_ppm
from .library import SkinLibrary
from .mlp import classify, format_real, read_model, write_model
from .pipeline import evaluate, train_pipeline
from .synth import synth_corpus

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

RULE = "=" * 80

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """Bad arguments detected after parsing."""


def _displacement(text):
    try:
        return Displacement.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _levels(text):
    try:
        levels = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be an integer, got {text!r}")
    if not 2 <= levels <= 256:
        raise argparse.ArgumentTypeError(f"levels must be in [2, 256], got {levels}")
    return levels


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _require_file(path):
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"no such file: {path}")
    return path


def _require_dir(path):
    path = Path(path)
    if not path.is_dir():
        raise UsageError(f"no such directory: {path}")
    return path


def _feature_config(args):
    return FeatureConfig(displacement=args.displacement.as_tuple(), levels=args.levels)


def _add_feature_flags(parser):
    parser.add_argument(
        "--displacement", type=_displacement, default=Displacement(),
        metavar="DX,DY", help="GLCM displacement vector (default: 1,0)",
    )
    parser.add_argument(
        "--levels", type=_levels, default=DEFAULT_LEVELS,
        help=f"gray levels for the GLCM, 2-256 (default: {DEFAULT_LEVELS})",
    )


def _add_workers_flag(parser):
    parser.add_argument("--workers", type=_positive_int, default=1, help="feature extraction threads")


def cmd_extract(args):
    """Print the 13 features of one image, or the feature dump of a dataset."""
    feature_config = _feature_config(args)
    if args.data is not None:
        library = SkinLibrary(_require_dir(args.data), feature_config)
        library.ingest(workers=args.workers, progress=not args.quiet)
        library.save_features_csv(sys.stdout)
        return EXIT_OK

    img = read_ppm(_require_file(args.image))
    features = extract_features(img, feature_config.displacement, feature_config.levels)
    print(",".join(format_real(v) for v in features))
    return EXIT_OK


def cmd_train(args):
    """Train a model on a dataset directory and write the model file."""
    try:
        cfg = TrainConfig(
            sse_goal=args.goal,
            max_epochs=args.max_epochs,
            lr_initial=args.lr,
            lr_increase=args.lr_increase,
            lr_decrease=args.lr_decrease,
            max_sse_growth=args.max_sse_growth,
            lr_min=args.lr_min,
            lr_max=args.lr_max,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    feature_config = _feature_config(args)

    library = SkinLibrary(_require_dir(args.data), feature_config)
    library.ingest(workers=args.workers, progress=not args.quiet)
    stats = library.get_stats()

    model, trace = train_pipeline(library.samples, cfg, feature_config)
    write_model(args.out, model)

    print(RULE)
    print("TRAINING COMPLETE")
    print(RULE)
    print(f"Samples: {stats['total']} ({stats['skin']} skin, {stats['non_skin']} non-skin)")
    print(f"Epochs: {trace.epochs} (accepted steps: {trace.accepted_steps})")
    print(f"Final SSE: {trace.final_sse:.6g} (goal {cfg.sse_goal:g})")
    print(f"Terminal reason: {trace.reason.value}")
    print(f"✓ Model written to {args.out}")

    if args.plot_trace:
        from .plots import plot_performance

        plot_performance(trace, cfg.sse_goal, args.plot_trace)
        print(f"✓ Saved performance plot to {args.plot_trace}")
    print(RULE)
    return EXIT_OK


def cmd_classify(args):
    """Classify images with a trained model, one line per image."""
    model = read_model(_require_file(args.model))
    metadata = model.metadata
    status = EXIT_OK
    for image in args.images:
        try:
            img = read_ppm(image)
            features = extract_features(img, metadata.displacement, metadata.levels)
        except (SkintexError, OSError) as exc:
            print(f"skintex: {image}: {exc}", file=sys.stderr)
            status = EXIT_FAILURE
            continue
        result = classify(model, features)
        print(f"{image}\t{result.label.value}\t{format_real(result.score)}")
    return status


def cmd_evaluate(args):
    """Evaluate a model on a labeled dataset directory."""
    model = read_model(_require_file(args.model))
    feature_config = FeatureConfig(displacement=model.metadata.displacement, levels=model.metadata.levels)
    library = SkinLibrary(_require_dir(args.data), feature_config)
    library.ingest(workers=args.workers, progress=not args.quiet)

    report = evaluate(model, library.samples)
    if args.json:
        print(report.to_json())
    else:
        print(RULE)
        print(f"GENERALIZATION TEST: {args.data}")
        print(RULE)
        print(report.to_table())
        print(RULE)

    if args.plot:
        from .plots import plot_generalization

        plot_generalization(report, args.plot)
        logger.info("Saved generalization plot to %s", args.plot)
    return EXIT_OK


def cmd_synth(args):
    """Write a deterministic synthetic corpus."""
    try:
        corpus = synth_corpus(args.out, args.seed, args.per_class, args.size)
    except ValueError as exc:
        raise UsageError(str(exc))
    print(f"✓ Wrote {len(corpus.paths)} images to {corpus.skin_dir} and {corpus.nonskin_dir}")
    return EXIT_OK


def build_parser():
    """Build the argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="skintex",
        description="Skin texture recognition from color moments and GLCM features.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("-q", "--quiet", action="store_true", help="hide progress bars")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    extract = commands.add_parser("extract", help="print the 13-element feature vector of an image")
    source = extract.add_mutually_exclusive_group(required=True)
    source.add_argument("image", nargs="?", help="PPM image")
    source.add_argument("--data", help="dataset directory; dump every image's features as CSV")
    _add_feature_flags(extract)
    _add_workers_flag(extract)
    extract.set_defaults(handler=cmd_extract)

    train = commands.add_parser("train", help="train a model on a dataset directory")
    defaults = TrainConfig()
    train.add_argument("--data", required=True, help="dataset directory with skin/ and nonskin/")
    train.add_argument("--out", required=True, help="model file to write")
    train.add_argument("--seed", type=int, default=defaults.seed, help="weight initialization seed")
    train.add_argument("--goal", type=float, default=defaults.sse_goal, help="SSE goal (default: 1e-6)")
    train.add_argument("--max-epochs", type=int, default=defaults.max_epochs)
    train.add_argument("--lr", type=float, default=defaults.lr_initial, help="initial learning rate")
    train.add_argument("--lr-increase", type=float, default=defaults.lr_increase)
    train.add_argument("--lr-decrease", type=float, default=defaults.lr_decrease)
    train.add_argument("--max-sse-growth", type=float, default=defaults.max_sse_growth)
    train.add_argument("--lr-min", type=float, default=defaults.lr_min)
    train.add_argument("--lr-max", type=float, default=defaults.lr_max)
    train.add_argument("--plot-trace", help="save the performance curve to this PNG file")
    _add_feature_flags(train)
    _add_workers_flag(train)
    train.set_defaults(handler=cmd_train)

    classify_cmd = commands.add_parser("classify", help="classify images as skin or non-skin")
    classify_cmd.add_argument("--model", required=True, help="model file")
    classify_cmd.add_argument("images", nargs="+", help="PPM images")
    classify_cmd.set_defaults(handler=cmd_classify)

    evaluate_cmd = commands.add_parser("evaluate", help="report accuracy on a labeled dataset")
    evaluate_cmd.add_argument("--model", required=True, help="model file")
    evaluate_cmd.add_argument("--data", required=True, help="dataset directory with skin/ and nonskin/")
    evaluate_cmd.add_argument("--json", action="store_true", help="emit the report as JSON")
    evaluate_cmd.add_argument("--plot", help="save the generalization output plot to this PNG file")
    _add_workers_flag(evaluate_cmd)
    evaluate_cmd.set_defaults(handler=cmd_evaluate)

    synth = commands.add_parser("synth", help="write a synthetic skin/non-skin corpus")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--per-class", type=int, default=50)
    synth.add_argument("--size", type=int, default=80, help="patch size in pixels")
    synth.set_defaults(handler=cmd_synth)

    return parser


def _configure_logging(verbose):
    package_logger = logging.getLogger("skintex")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(handler)
    package_logger.setLevel(logging.DEBUG if verbose else logging.INFO)


def main(argv=None):
    """Entry point for the skintex console script."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code

    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"skintex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SkintexError, OSError) as exc:
        print(f"skintex: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
