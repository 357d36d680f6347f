"""Batch command-line interface tying the pipeline together.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
All output files are written atomically (temp file + rename), so a failing
command never leaves a partial output behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .core import DataFormatError, derive_targets, parse_dataset, parse_tagged
from .features import assemble_features, fit_scaler, parse_features
from .metrics import metric_vector, metric_vector_to_json
from .regressor import (MlpConfig, ModelFileError, NumericError, grid_search,
                        init_model, load_model, predict_batch, save_model, train)
from .evaluation import evaluate

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write_atomic(path: str, content: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
    os.replace(tmp, path)


def _check_inputs_exist(paths):
    for p in paths:
        if not os.path.exists(p):
            raise CliError(f"input file not found: {p}", EXIT_DATA)


def _join_by_id(records, tagged, feature_records):
    rec_ids = [r.id for r in records]
    tagged_by_id = {s.id: s for s in tagged}
    features_by_id = {f.id: f for f in feature_records}
    for rid in rec_ids:
        if rid not in tagged_by_id:
            raise CliError(f"id {rid!r} missing from tagged file", EXIT_DATA)
        if rid not in features_by_id:
            raise CliError(f"id {rid!r} missing from features file", EXIT_DATA)
    for sid in tagged_by_id:
        if sid not in set(rec_ids):
            raise CliError(f"id {sid!r} in tagged file has no dataset record", EXIT_DATA)
    for fid in features_by_id:
        if fid not in set(rec_ids):
            raise CliError(f"id {fid!r} in features file has no dataset record", EXIT_DATA)
    return [(r, tagged_by_id[r.id], features_by_id[r.id]) for r in records]


def _assemble_matrix(joined, scaler):
    vectors = []
    dim = None
    for _, sentence, feats in joined:
        fv = assemble_features(metric_vector(sentence), feats, scaler)
        if dim is None:
            dim = fv.values.shape[0]
        elif fv.values.shape[0] != dim:
            raise CliError(
                f"feature dimension mismatch at id {fv.id!r}: "
                f"{fv.values.shape[0]} != {dim}", EXIT_DATA)
        vectors.append(fv.values)
    return np.array(vectors), dim


def _config_from_args(args, input_dim):
    kwargs = {"input_dim": input_dim, "seed": args.seed}
    if args.lr is not None:
        kwargs["learning_rate"] = args.lr
    if args.hidden_dims is not None:
        kwargs["hidden_dims"] = tuple(int(d) for d in args.hidden_dims.split(","))
    if args.batch_size is not None:
        kwargs["batch_size"] = args.batch_size
    if args.max_epochs is not None:
        kwargs["max_epochs"] = args.max_epochs
    return MlpConfig(**kwargs)


def _target_values(records, task):
    targets = [derive_targets(r) for r in records]
    return np.array([getattr(t, task) for t in targets], dtype=np.float64)


def cmd_metrics(args) -> int:
    _check_inputs_exist([args.tagged])
    sentences = parse_tagged(args.tagged)
    lines = [metric_vector_to_json(metric_vector(s)) for s in sentences]
    _write_atomic(args.out, "\n".join(lines) + ("\n" if lines else ""))
    return 0


def _load_joined(args):
    _check_inputs_exist([args.dataset, args.tagged, args.features])
    records = parse_dataset(args.dataset)
    tagged = parse_tagged(args.tagged)
    _, feature_records = parse_features(args.features)
    return records, _join_by_id(records, tagged, feature_records)


def cmd_train(args) -> int:
    records, joined = _load_joined(args)
    scaler = fit_scaler([metric_vector(s) for _, s, _ in joined])
    xs, dim = _assemble_matrix(joined, scaler)
    targets = _target_values(records, args.task)
    config = _config_from_args(args, dim)
    model = init_model(config)
    model.scaler = scaler
    model.feature_dim = dim
    model.task = args.task
    trained, report = train(model, xs, targets, config)
    save_model(trained, args.model_out)
    print(json.dumps({
        "task": args.task,
        "n_instances": len(records),
        "feature_dim": dim,
        "epochs_run": report.epochs_run,
        "final_learning_rate": report.final_learning_rate,
        "final_loss": report.losses[-1],
        "seed": report.seed,
    }))
    return 0


def cmd_predict(args) -> int:
    _check_inputs_exist([args.model])
    model = load_model(args.model)
    records, joined = _load_joined(args)
    if model.scaler is None or model.task is None:
        raise CliError(f"model {args.model} lacks scaler/task metadata", EXIT_DATA)
    xs, dim = _assemble_matrix(joined, model.scaler)
    if dim != model.config.input_dim:
        raise CliError(
            f"assembled feature dim {dim} does not match model input_dim "
            f"{model.config.input_dim}", EXIT_DATA)
    raw = predict_batch(model, xs)
    from .evaluation import round_clip
    lines = []
    for record, pred in zip(records, raw):
        lines.append(json.dumps({
            "id": record.id,
            "raw": float(pred),
            "rounded": round_clip(float(pred), model.task),
        }))
    _write_atomic(args.out, "\n".join(lines) + ("\n" if lines else ""))
    return 0


def parse_predictions(path: str) -> list[dict]:
    preds = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"{path}:{lineno}: malformed JSON ({e.msg})") from e
            for key in ("id", "raw", "rounded"):
                if key not in obj:
                    raise DataFormatError(f"{path}:{lineno}: missing field {key!r}")
            if obj["id"] in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate id {obj['id']!r}")
            seen.add(obj["id"])
            preds.append(obj)
    return preds


def cmd_evaluate(args) -> int:
    _check_inputs_exist([args.predictions, args.dataset])
    preds = parse_predictions(args.predictions)
    records = parse_dataset(args.dataset)
    gold_by_id = {r.id: getattr(derive_targets(r), args.task) for r in records}
    gold, raw = [], []
    for p in preds:
        if p["id"] not in gold_by_id:
            raise CliError(f"prediction id {p['id']!r} has no dataset record", EXIT_DATA)
        gold.append(gold_by_id[p["id"]])
        raw.append(float(p["raw"]))
    missing = set(gold_by_id) - {p["id"] for p in preds}
    if missing:
        raise CliError(f"no prediction for id {sorted(missing)[0]!r}", EXIT_DATA)
    report = evaluate(gold, raw, args.task, f1_average=args.f1_average)
    out = report.to_json()
    print(out)
    if args.out:
        _write_atomic(args.out, out + "\n")
    return 0


def cmd_gridsearch(args) -> int:
    records, joined = _load_joined(args)
    scaler = fit_scaler([metric_vector(s) for _, s, _ in joined])
    xs, dim = _assemble_matrix(joined, scaler)
    targets = _target_values(records, args.task)
    config = _config_from_args(args, dim)
    if args.lr_grid is not None:
        grid = tuple(float(v) for v in args.lr_grid.split(","))
        from dataclasses import replace
        config = replace(config, lr_grid=grid)
    best, scores = grid_search(xs, targets, config,
                               search_hidden_dims=args.search_hidden_dims)
    result = {
        "selected": {"learning_rate": best.learning_rate,
                     "hidden_dims": list(best.hidden_dims)},
        "scores": scores,
    }
    out = json.dumps(result)
    print(out)
    if args.out:
        _write_atomic(args.out, out + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hinglishqe",
                     description="Quality estimation for synthetic Hinglish sentences")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="compute code-mixing metrics per sentence")
    p.add_argument("--tagged", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    def add_model_io(p, needs_task=True):
        p.add_argument("--dataset", required=True)
        p.add_argument("--tagged", required=True)
        p.add_argument("--features", required=True)
        if needs_task:
            p.add_argument("--task", choices=("quality", "disagreement"), required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lr", type=float, default=None)
        p.add_argument("--hidden-dims", dest="hidden_dims", default=None,
                       help="comma-separated, e.g. 1000,100,10")
        p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
        p.add_argument("--max-epochs", dest="max_epochs", type=int, default=None)

    p = sub.add_parser("train", help="train an MLP regressor for one task")
    add_model_io(p)
    p.add_argument("--model-out", dest="model_out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict with a trained model")
    p.add_argument("--model", required=True)
    add_model_io(p, needs_task=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against gold targets")
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--task", choices=("quality", "disagreement"), required=True)
    p.add_argument("--f1-average", dest="f1_average", default="weighted",
                   choices=("macro", "micro", "weighted"))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gridsearch", help="grid search over learning rates")
    add_model_io(p)
    p.add_argument("--lr-grid", dest="lr_grid", default=None,
                   help="comma-separated learning rates")
    p.add_argument("--search-hidden-dims", dest="search_hidden_dims",
                   action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gridsearch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (DataFormatError, ModelFileError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
