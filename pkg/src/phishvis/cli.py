"""Command-line front end: ``phishvis <command> [flags]``.

Every command also accepts ``--config FILE``, a flat ``key = value`` file
whose keys are the long flag names (``pyramid = 1+4``, ``trees = 100``).
Precedence is built-in default < config file < command-line flag.

Exit status: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .corpus import (
    class_distribution,
    read_feature_cache,
    scan_corpus,
    write_feature_cache,
)
from .descriptors import DescriptorKind, HogParams
from .evaluation import cross_validate, holdout_evaluate, model_evaluate
from .features import FeatureSpec, extract_corpus
from .imaging import load_image
from .ml import RandomForestParams, SvmParams, TrainedModel, train
from .pyramid import PyramidConfig

log = logging.getLogger("phishvis")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# argument types; ArgumentTypeError makes argparse report a usage error

def _descriptor(token: str) -> DescriptorKind:
    try:
        return DescriptorKind.parse(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pyramid(token: str) -> PyramidConfig:
    try:
        return PyramidConfig.parse(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _hog(token: str) -> HogParams:
    try:
        return HogParams.parse(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _size(token: str) -> tuple[int, int]:
    w, sep, h = token.lower().partition("x")
    try:
        size = int(w), int(h)
    except ValueError:
        size = None
    if not sep or size is None or min(size) < 1:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {token!r}")
    return size


def _classifier(token: str) -> str:
    aliases = {"rf": "rf", "random_forest": "rf", "randomforest": "rf",
               "svm": "svm", "svm_rbf": "svm", "smo": "svm"}
    try:
        return aliases[token.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown classifier {token!r}; choose rf or svm") from None


def _positive_int(token: str) -> int:
    try:
        v = int(token)
    except ValueError:
        v = 0
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {token!r}")
    return v


def _int(token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {token!r}") from None


def _float(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {token!r}") from None


DEFAULTS = {
    "pyramid": PyramidConfig((1,)),
    "hog_params": HogParams(),
    "resize": (640, 480),
    "split": "train",
    "workers": None,
    "classifier": "rf",
    "trees": 100,
    "features_per_split": None,
    "max_depth": None,
    "cost": 40.0,
    "gamma": None,
    "seed": 0,
    "folds": 10,
    "json": False,
}


def _add_classifier_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("classifier")
    g.add_argument("--classifier", type=_classifier, help="rf (default) or svm")
    g.add_argument("--trees", type=_positive_int, help="RF: number of trees (100)")
    g.add_argument("--features-per-split", type=_positive_int,
                   help="RF: features tried per split (floor(log2 d)+1)")
    g.add_argument("--max-depth", type=_positive_int, help="RF: depth limit (unlimited)")
    g.add_argument("--cost", type=_float, help="SVM: C (40)")
    g.add_argument("--gamma", type=_float, help="SVM: RBF gamma (1/dim)")
    g.add_argument("--seed", type=_int, help="random seed (0)")


def _add_report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PREFIX",
                   help="also write PREFIX.txt and PREFIX.json reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phishvis",
        description="Brand classification of phishing screenshots with compact visual descriptors.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def command(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", metavar="FILE", help="key=value defaults for this command")
        return p

    p = command("extract", "screenshot corpus -> feature cache")
    p.add_argument("--descriptor", type=_descriptor, help="scd, cld, cedd, fcth, jcd or hog")
    p.add_argument("--pyramid", type=_pyramid, help="patch layout, e.g. 1, 1+4, 1+4+9, 16 (1)")
    p.add_argument("--hog-params", type=_hog, help="HOG block-stride-cell[-bins] (80-40-20-9)")
    p.add_argument("--resize", type=_size, help="HOG input size WxH (640x480)")
    p.add_argument("--in", dest="input", metavar="DIR", help="corpus root with class sub-directories")
    p.add_argument("--out", metavar="FILE", help="feature cache to write")
    p.add_argument("--split", choices=("train", "test"), help="split tag recorded for the samples")
    p.add_argument("--workers", type=_positive_int, help="extraction processes (CPU count)")

    p = command("train", "feature cache -> model file")
    p.add_argument("--in", dest="input", metavar="CACHE")
    p.add_argument("--out", metavar="MODEL")
    _add_classifier_flags(p)

    p = command("predict", "classify screenshots with a saved model")
    p.add_argument("--model", metavar="MODEL")
    p.add_argument("--image", action="append", metavar="IMAGE", help="repeatable")

    p = command("evaluate", "hold-out evaluation from a model or a train/test cache pair")
    p.add_argument("--model", metavar="MODEL", help="score this saved model on --test")
    p.add_argument("--train", metavar="CACHE", help="train on this cache, then score --test")
    p.add_argument("--test", metavar="CACHE")
    _add_classifier_flags(p)
    _add_report_flags(p)

    p = command("cross-validate", "stratified k-fold evaluation of a feature cache")
    p.add_argument("--in", dest="input", metavar="CACHE")
    p.add_argument("--folds", type=_positive_int, help="number of folds (10)")
    _add_classifier_flags(p)
    _add_report_flags(p)

    p = command("stats", "per-class image counts of one or more corpus roots")
    p.add_argument("--in", dest="input", action="append", metavar="DIR", help="repeatable")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")

    p = command("export", "feature cache -> tab-separated matrix, label first")
    p.add_argument("--in", dest="input", metavar="CACHE")
    p.add_argument("--out", metavar="FILE")
    return parser


# config file handling

def read_config_file(path) -> list[tuple[str, str]]:
    entries = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key = value")
        entries.append((key.strip().lstrip("-"), value.strip()))
    return entries


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:  # argparse exposes no public lookup
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _config_values(sub: argparse.ArgumentParser, entries) -> dict:
    by_flag = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_flag[opt[2:]] = action
    values: dict = {}
    for key, raw in entries:
        action = by_flag.get(key.replace("_", "-"))
        if action is None or action.dest in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.lower() in ("1", "true", "yes", "on")
        else:
            try:
                value = action.type(raw) if action.type else raw
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
            if action.choices and value not in action.choices:
                raise UsageError(f"config key {key!r}: {raw!r} not in {list(action.choices)}")
        if isinstance(action, argparse._AppendAction):
            values.setdefault(action.dest, []).append(value)
        else:
            values[action.dest] = value
    return values


def resolve_args(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    given = vars(parser.parse_args(argv))
    merged = dict(DEFAULTS)
    if "config" in given:
        entries = read_config_file(given["config"])
        merged.update(_config_values(_subparser(parser, given["command"]), entries))
    merged.update(given)
    return argparse.Namespace(**merged)


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) in (None, [])]
    if missing:
        flags = ", ".join("--" + ("in" if n == "input" else n.replace("_", "-")) for n in missing)
        raise UsageError(f"{args.command}: missing required {flags}")


def learner_params(args):
    if args.classifier == "rf":
        return RandomForestParams(
            n_trees=args.trees, features_per_split=args.features_per_split,
            max_depth=args.max_depth, seed=args.seed,
        )
    return SvmParams(cost=args.cost, gamma=args.gamma, seed=args.seed)


# commands

def cmd_extract(args, out, err) -> int:
    _require(args, "descriptor", "input", "out")
    if args.descriptor is DescriptorKind.HOG:
        spec = FeatureSpec(args.descriptor, hog=args.hog_params, resize=args.resize)
    else:
        spec = FeatureSpec(args.descriptor, pyramid=args.pyramid)
    corpus = scan_corpus(args.input, args.split)
    table, failed = extract_corpus(corpus, spec, args.workers or os.cpu_count())
    write_feature_cache(table, args.out)
    for path, reason in corpus.skipped + failed:
        print(f"skipped {path}: {reason}", file=err)
    print(
        f"wrote {len(table)} rows ({spec.kind.value} {spec.token}, dim {spec.dim}) to {args.out}"
        + (f"; skipped {len(corpus.skipped) + len(failed)}" if corpus.skipped or failed else ""),
        file=out,
    )
    return EXIT_OK


def cmd_train(args, out, err) -> int:
    _require(args, "input", "out")
    table = read_feature_cache(args.input)
    model = train(table, learner_params(args))
    model.save(args.out)
    print(f"trained {model.family} on {len(table)} rows, {len(model.classes)} classes -> {args.out}",
          file=out)
    return EXIT_OK


def cmd_predict(args, out, err) -> int:
    _require(args, "model", "image")
    model = TrainedModel.load(args.model)
    spec = FeatureSpec.from_token(model.kind, model.config)
    for path in args.image:
        img = load_image(path)
        spec.check_size(img)
        label, scores = model.predict(spec.extract(img))
        print(f"{path} {label} {scores[label]:.4f}", file=out)
    return EXIT_OK


def _emit_report(report, args, out) -> None:
    out.write(report.to_text())
    if getattr(args, "out", None):
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{prefix}.txt").write_text(report.to_text(), encoding="utf-8")
        Path(f"{prefix}.json").write_text(report.to_json(), encoding="utf-8")


def cmd_evaluate(args, out, err) -> int:
    _require(args, "test")
    if (getattr(args, "model", None) is None) == (getattr(args, "train", None) is None):
        raise UsageError("evaluate: give exactly one of --model or --train")
    test = read_feature_cache(args.test)
    if getattr(args, "model", None):
        report = model_evaluate(TrainedModel.load(args.model), test)
    else:
        report = holdout_evaluate(read_feature_cache(args.train), test, learner_params(args), args.seed)
    _emit_report(report, args, out)
    return EXIT_OK


def cmd_cross_validate(args, out, err) -> int:
    _require(args, "input")
    table = read_feature_cache(args.input)
    report = cross_validate(table, args.folds, learner_params(args), args.seed)
    _emit_report(report, args, out)
    return EXIT_OK


def cmd_stats(args, out, err) -> int:
    _require(args, "input")
    dists = {root: class_distribution(scan_corpus(root)) for root in args.input}
    if args.json:
        payload = {root: {"counts": d.counts, "total": d.total} for root, d in dists.items()}
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    roots = list(dists)
    classes = sorted({c for d in dists.values() for c in d.counts})
    width = max([5] + [len(c) for c in classes])
    cols = [max(len(r), 6) for r in roots]
    out.write(f"{'class':<{width}}" + "".join(f" {r:>{w}}" for r, w in zip(roots, cols)) + "\n")
    for c in classes:
        out.write(f"{c:<{width}}" + "".join(
            f" {dists[r].counts.get(c, 0):>{w}d}" for r, w in zip(roots, cols)) + "\n")
    out.write(f"{'total':<{width}}" + "".join(
        f" {dists[r].total:>{w}d}" for r, w in zip(roots, cols)) + "\n")
    return EXIT_OK


def cmd_export(args, out, err) -> int:
    _require(args, "input", "out")
    table = read_feature_cache(args.input)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for label, row in zip(table.labels, table.X):
            writer.writerow([label, *(repr(float(v)) for v in row)])
    print(f"exported {len(table)} x {table.dim} matrix to {args.out}", file=out)
    return EXIT_OK


COMMANDS = {
    "extract": cmd_extract,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "cross-validate": cmd_cross_validate,
    "stats": cmd_stats,
    "export": cmd_export,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = resolve_args(parser, argv)
    except SystemExit as exc:  # argparse: --help or usage error
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"phishvis: error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"phishvis: error: {exc}", file=err)
        return EXIT_RUNTIME

    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=err,
    )
    try:
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        print(f"phishvis: error: {exc}", file=err)
        return EXIT_USAGE
    except (OSError, ValueError, TypeError) as exc:
        print(f"phishvis: error: {exc}", file=err)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
