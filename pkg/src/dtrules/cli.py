"""Command-line interface.

Subcommands: train, compile, explain, predict, rank, serve. Long-form flags
only. Errors go to stderr; exit codes: 0 success, 1 usage, 2 data problems,
3 model problems.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import compiler, learn, pipeline
from .model import DataError, ModelError, TrainParams, load_tree


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we want exit 1
        raise UsageError(message)


def _load_model(path: str):
    try:
        return pipeline.LoadedModel.from_file(path)
    except OSError as exc:
        raise ModelError(f"cannot read model file: {exc}") from None


def _read_cases(path: str, fmt: str, model: pipeline.LoadedModel):
    """Returns ('cases', list[Case]) or ('facts', dict[int, facts])."""
    if fmt == "auto":
        fmt = "lp" if path.endswith(".lp") else "csv"
    try:
        if fmt == "lp":
            return "facts", pipeline.read_cases_lp(path)
        return "cases", pipeline.read_cases_csv(path, model.tree.features)
    except OSError as exc:
        raise DataError(f"cannot read case file: {exc}") from None


def _pick_case_id(requested: Optional[int], available: list[int]) -> int:
    if requested is not None:
        if requested not in available:
            raise DataError(f"case {requested} not found "
                            f"(available: {', '.join(map(str, available))})")
        return requested
    if len(available) == 1:
        return available[0]
    raise UsageError("--case-id is required when the file holds several cases")


# ---------------------------------------------------------------------------
# subcommands


def cmd_train(args) -> int:
    fixed_flags = [args.max_depth is not None, args.criterion is not None,
                   args.max_features is not None,
                   args.min_samples_leaf is not None]
    if args.grid and any(fixed_flags):
        raise UsageError("--grid excludes the fixed parameter flags")
    if not args.grid and args.max_depth is None:
        raise UsageError("either --grid or --max-depth is required")

    grid = None
    folds = 5
    params = None
    if args.grid:
        try:
            grid, folds = pipeline.load_grid_spec(args.grid, args.seed)
        except OSError as exc:
            raise DataError(f"cannot read grid file: {exc}") from None
    else:
        params = TrainParams(
            max_depth=args.max_depth,
            criterion=args.criterion or "entropy",
            max_features=args.max_features or "all",
            min_samples_leaf=args.min_samples_leaf or 1,
            rng_seed=args.seed)

    config = pipeline.PipelineConfig(
        dataset_path=args.dataset, out_dir=args.out, seed=args.seed,
        fmt=args.format, target=args.target,
        train_fraction=args.train_fraction, select_k=args.select_k,
        max_thresholds=args.max_thresholds, grid=grid, params=params,
        folds=folds)
    report = pipeline.run_train(config)
    kappa = report.metrics["kappa"]
    print(f"wrote {report.model_path}")
    print(f"wrote {report.metrics_path}")
    print(f"accuracy={report.metrics['accuracy']:.4f} "
          f"kappa={'undefined' if kappa is None else f'{kappa:.4f}'}")
    return 0


def cmd_compile(args) -> int:
    model = _load_model(args.model)
    cases = None
    if args.cases:
        try:
            cases = pipeline.read_cases_csv(args.cases, model.tree.features)
        except OSError as exc:
            raise DataError(f"cannot read case file: {exc}") from None
    for path in pipeline.run_compile(model, args.out, cases):
        print(f"wrote {path}")
    return 0


def cmd_explain(args) -> int:
    if args.encoding not in pipeline.ENCODINGS:
        raise UsageError(f"unknown encoding {args.encoding!r}")
    model = _load_model(args.model)
    kind, loaded = _read_cases(args.cases, args.cases_format, model)
    if kind == "facts":
        cid = _pick_case_id(args.case_id, sorted(loaded))
        report = pipeline.explain_facts(model, loaded[cid], cid, args.encoding)
    else:
        ids = [c.id for c in loaded]
        cid = _pick_case_id(args.case_id, ids)
        case = next(c for c in loaded if c.id == cid)
        report = pipeline.explain_case(model, case, args.encoding)
    print(report.rendered)
    return 0


def cmd_predict(args) -> int:
    model = _load_model(args.model)
    kind, loaded = _read_cases(args.cases, args.cases_format, model)
    print("id,prediction")
    if kind == "facts":
        for cid in sorted(loaded):
            report = pipeline.explain_facts(model, loaded[cid], cid, "paths")
            print(f"{cid},{report.prediction}")
    else:
        for case in loaded:
            label = compiler.predict_by_traversal(model.tree, case)
            print(f"{case.id},{label}")
    return 0


def cmd_rank(args) -> int:
    dataset = pipeline.load_dataset_checked(args.dataset, args.format,
                                            args.target)
    view = pipeline.discretize_dataset(dataset, args.max_thresholds)
    for name in view.skipped:
        print(f"note: feature {name!r} has no usable threshold, excluded "
              "from ranking", file=sys.stderr)
    k = args.top if args.top is not None else len(view.dataset.features)
    ranking = learn.select_features(view.dataset, k)
    print("feature,statistic,p_value")
    for r in ranking:
        print(f"{r.feature},{r.statistic!r},{r.p_value!r}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(_load_model(args.model))
    uvicorn.run(app, host=args.bind, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="dtrules",
                     description="Train decision trees, compile them to rule "
                                 "programs, and explain predictions.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("train", help="fit a tree and write model + metrics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--target", default="goal_death")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--select-k", type=int, default=None,
                   help="features to keep after ranking "
                        "(default: 7 or all usable, whichever is smaller)")
    p.add_argument("--max-thresholds", type=int, default=3)
    p.add_argument("--grid", default=None, help="grid spec JSON file")
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--criterion", choices=("entropy", "gini"), default=None)
    p.add_argument("--max-features", choices=("sqrt", "log2", "all"),
                   default=None)
    p.add_argument("--min-samples-leaf", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compile", help="write nodes.lp / paths.lp / extra.lp")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cases", default=None,
                   help="case CSV; also writes cases.lp")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("explain", help="print the explanation for one case")
    p.add_argument("--model", required=True)
    p.add_argument("--cases", required=True, help="case CSV or .lp fact file")
    p.add_argument("--cases-format", choices=("auto", "csv", "lp"),
                   default="auto")
    p.add_argument("--case-id", type=int, default=None)
    p.add_argument("--encoding", default="paths",
                   help="nodes or paths (default paths)")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("predict", help="print id,prediction CSV for all cases")
    p.add_argument("--model", required=True)
    p.add_argument("--cases", required=True)
    p.add_argument("--cases-format", choices=("auto", "csv", "lp"),
                   default="auto")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("rank", help="chi-square feature ranking as CSV")
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--target", default="goal_death")
    p.add_argument("--max-thresholds", type=int, default=3)
    p.add_argument("--top", type=int, default=None)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--bind", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required (see --help)")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
