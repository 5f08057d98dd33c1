"""End-to-end flows shared by the CLI and the HTTP service: the training
pipeline (discretize, rank, split, search, fit, score), compilation to
program files, case-file loading, and case explanation against a loaded model.
"""
from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from . import compiler, explain, learn, rules
from .model import (CATEGORICAL, NUMERIC, Case, DataError, Dataset,
                    DecisionTree, FeatureSchema, ModelError, TrainParams,
                    fmt_number, is_numeric_token, load_tree, save_tree)

ENCODINGS = ("nodes", "paths")


# ---------------------------------------------------------------------------
# loaded model


@dataclass(frozen=True)
class LoadedModel:
    """A tree compiled once into both encodings, ready to answer cases."""

    tree: DecisionTree
    node_program: rules.RuleProgram
    path_program: rules.RuleProgram
    prediction_rules: rules.RuleProgram
    thresholds: dict[str, list[float]]
    labels: dict[str, dict[str, str]]  # class token -> {encoding: label}

    @classmethod
    def from_tree(cls, tree: DecisionTree,
                  labels: Optional[dict[str, str]] = None) -> "LoadedModel":
        return cls(
            tree=tree,
            node_program=compiler.compile_node_encoding(tree, labels),
            path_program=compiler.compile_path_encoding(tree, labels),
            prediction_rules=compiler.prediction_program(tree),
            thresholds=tree.thresholds(),
            labels={cat: {"nodes": compiler.class_labels(tree, "nodes", labels)[cat],
                          "paths": compiler.class_labels(tree, "paths", labels)[cat]}
                    for cat in tree.target.categories},
        )

    @classmethod
    def from_file(cls, path: str) -> "LoadedModel":
        return cls.from_tree(load_tree(path))

    def program(self, encoding: str) -> rules.RuleProgram:
        if encoding == "nodes":
            return self.node_program
        if encoding == "paths":
            return self.path_program
        raise DataError(f"unknown encoding {encoding!r}")

    def program_text(self, encoding: str) -> str:
        return compiler.serialize_program(self.program(encoding))

    def full_program(self, encoding: str) -> rules.RuleProgram:
        """Encoding plus the untraced prediction wrapper."""
        return rules.merge_programs(self.program(encoding),
                                    self.prediction_rules)


@dataclass(frozen=True)
class CaseReport:
    """One explained case."""

    case_id: int
    prediction: str
    atom: rules.Atom
    explanations: tuple[explain.ExplanationTree, ...]
    rendered: str


def explain_facts(model: LoadedModel, facts: Sequence[rules.Rule],
                  case_id: int, encoding: str) -> CaseReport:
    """Evaluate the encoding on pre-grounded facts and explain prediction(id)."""
    program = model.full_program(encoding)
    graph = rules.evaluate(program, facts)
    cid = str(case_id)
    preds = compiler.class_predicates(model.tree)
    derived = [cat for cat, pred in preds.items()
               if graph.has(rules.Atom(pred, (cid,)))]
    if not derived:
        raise DataError(f"case {case_id}: no class was derived "
                        "(incomplete case facts?)")
    if len(derived) > 1:
        raise ModelError(f"case {case_id}: multiple classes derived: {derived}")
    atom = rules.Atom("prediction", (cid,))
    trees = explain.build_explanations(graph, program, atom)
    return CaseReport(case_id, derived[0], atom, tuple(trees),
                      explain.render_ascii(atom, trees))


def explain_case(model: LoadedModel, case: Case, encoding: str) -> CaseReport:
    facts = rules.case_to_facts(case, model.tree.features, model.thresholds)
    return explain_facts(model, facts, case.id, encoding)


# ---------------------------------------------------------------------------
# case validation (typed values, per-field messages)


def validate_case_values(features: Sequence[FeatureSchema],
                         values: dict) -> tuple[dict, list[tuple[str, str]]]:
    """Check a value mapping against the schema.

    Returns (normalized values, errors) where each error is (field, message).
    Booleans are accepted for binary categorical features as 'true'/'false'.
    """
    errors: list[tuple[str, str]] = []
    known = {f.name for f in features}
    for name in values:
        if name not in known:
            errors.append((name, "unknown feature"))
    clean: dict[str, Union[float, str]] = {}
    for feat in features:
        if feat.name not in values:
            errors.append((feat.name, "missing value"))
            continue
        v = values[feat.name]
        if feat.kind == NUMERIC:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                errors.append((feat.name, "expected a number"))
                continue
            clean[feat.name] = float(v)
        else:
            if isinstance(v, bool):
                v = "true" if v else "false"
            if not isinstance(v, str) or v not in feat.categories:
                errors.append((feat.name, "expected one of: "
                               + ", ".join(feat.categories)))
                continue
            clean[feat.name] = v
    return clean, errors


# ---------------------------------------------------------------------------
# case files


def read_cases_csv(path: str, features: Sequence[FeatureSchema]) -> list[Case]:
    """Cases from a CSV with an ``id`` column plus one column per feature."""
    by_name = {f.name: f for f in features}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError("empty case file") from None
        rows = [row for row in reader if row]
    if "id" not in header:
        raise DataError("case file needs an 'id' column")
    unknown = [h for h in header if h != "id" and h not in by_name]
    if unknown:
        raise DataError(f"case file has unknown column {unknown[0]!r}")
    missing = [f.name for f in features if f.name not in header]
    if missing:
        raise DataError(f"case file is missing column {missing[0]!r}")
    if len(set(header)) != len(header):
        raise DataError("case file has duplicate columns")

    cases = []
    seen_ids: set[int] = set()
    for rno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise DataError(f"row {rno}: expected {len(header)} fields, "
                            f"got {len(row)}")
        record = dict(zip(header, row))
        try:
            cid = int(record["id"])
        except ValueError:
            raise DataError(f"row {rno}: case id {record['id']!r} is not an "
                            "integer") from None
        if cid in seen_ids:
            raise DataError(f"row {rno}: duplicate case id {cid}")
        seen_ids.add(cid)
        values: dict[str, Union[float, str]] = {}
        for name, feat in by_name.items():
            raw = record[name]
            if raw == "":
                raise DataError(f"row {rno}: missing value for {name!r}")
            if feat.kind == NUMERIC:
                if not is_numeric_token(raw):
                    raise DataError(f"row {rno}: {name!r} expects a number, "
                                    f"got {raw!r}")
                values[name] = float(raw)
            else:
                values[name] = raw
        cases.append(Case(cid, values))
    return cases


def read_cases_lp(path: str) -> dict[int, list[rules.Rule]]:
    """Facts from a program file, grouped by case id (each fact's first
    argument). A missing ``case(id).`` fact is synthesized."""
    with open(path, encoding="utf-8") as fh:
        program = rules.parse_program(fh.read())
    groups: dict[int, list[rules.Rule]] = {}
    for rule in program.rules:
        if rule.body:
            raise DataError(f"case files contain only facts, found a rule "
                            f"for {rule.head.predicate}")
        if not rule.head.args:
            raise DataError(f"fact {rules.atom_text(rule.head)} has no case "
                            "id argument")
        first = rule.head.args[0]
        try:
            cid = int(first)
        except (TypeError, ValueError):
            raise DataError(f"fact {rules.atom_text(rule.head)}: case id "
                            f"{first!r} is not an integer") from None
        groups.setdefault(cid, []).append(rules.fact(rule.head))
    for cid, facts in groups.items():
        case_atom = rules.Atom("case", (str(cid),))
        if not any(f.head == case_atom for f in facts):
            facts.insert(0, rules.fact(case_atom))
    return groups


# ---------------------------------------------------------------------------
# discretization view


@dataclass(frozen=True)
class DiscretizedView:
    """A dataset with numeric features bucketed for chi-square ranking."""

    dataset: Dataset
    thresholds: dict[str, list[float]]
    skipped: tuple[str, ...]  # features with no usable cut


def discretize_dataset(dataset: Dataset, max_thresholds: int) -> DiscretizedView:
    labels = dataset.labels()
    thresholds: dict[str, list[float]] = {}
    skipped: list[str] = []
    feats: list[FeatureSchema] = []
    columns: dict[str, list[str]] = {}
    for feat in dataset.features:
        if feat.kind == CATEGORICAL:
            feats.append(feat)
            columns[feat.name] = dataset.column(feat.name)
            continue
        cuts = learn.discretize_feature(dataset.column(feat.name), labels,
                                        max_thresholds)
        if not cuts:
            skipped.append(feat.name)
            continue
        thresholds[feat.name] = cuts
        buckets = tuple(f"b{i}" for i in range(len(cuts) + 1))
        feats.append(FeatureSchema(feat.name, CATEGORICAL, buckets))
        col = []
        for v in dataset.column(feat.name):
            i = sum(1 for t in cuts if float(v) > t)
            col.append(f"b{i}")
        columns[feat.name] = col
    if not feats:
        raise DataError("no usable features after discretization")
    rows = tuple(
        (tuple(columns[f.name][r] for f in feats), labels[r])
        for r in range(len(dataset)))
    return DiscretizedView(Dataset(tuple(feats), dataset.target, rows),
                           thresholds, tuple(skipped))


# ---------------------------------------------------------------------------
# training pipeline


@dataclass(frozen=True)
class PipelineConfig:
    dataset_path: str
    out_dir: str
    seed: int
    fmt: str = "csv"
    target: str = "goal_death"
    train_fraction: float = 0.75
    select_k: Optional[int] = None  # None: min(7, usable features)
    max_thresholds: int = 3
    grid: Optional[dict] = None     # mutually exclusive with params
    params: Optional[TrainParams] = None
    folds: int = 5


@dataclass(frozen=True)
class TrainReport:
    tree: DecisionTree
    metrics: dict
    model_path: str
    metrics_path: str


def load_grid_spec(path: str, seed: int) -> tuple[dict, int]:
    """Read a grid file; returns (grid dict, folds). The file may repeat the
    pipeline seed, but contradicting --seed is an error."""
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid grid file: {exc}") from None
    if not isinstance(spec, dict):
        raise DataError("grid file must contain a JSON object")
    folds = spec.pop("folds", 5)
    file_seed = spec.pop("seed", None)
    if file_seed is not None and file_seed != seed:
        raise DataError(f"grid file seed {file_seed} contradicts --seed {seed}")
    if not isinstance(folds, int) or folds < 2:
        raise DataError("grid file: folds must be an integer >= 2")
    return spec, folds


def _cv_log(results: list[learn.CVResult], stream) -> None:
    for res in results:
        p = res.params
        folds = ", ".join(f"{a:.3f}" for a in res.fold_accuracies)
        print(f"cv max_depth={p.max_depth} criterion={p.criterion} "
              f"max_features={p.max_features} min_samples_leaf="
              f"{p.min_samples_leaf} mean={res.mean_accuracy:.4f} "
              f"folds=[{folds}]", file=stream)


def run_train(config: PipelineConfig, log=None) -> TrainReport:
    """Load, discretize, rank, split, fit (optionally grid-searched), score,
    and write model.json + metrics.json under the output directory."""
    log = log if log is not None else sys.stderr
    if (config.grid is None) == (config.params is None):
        raise DataError("exactly one of grid and fixed params is required")
    dataset = load_dataset_checked(config.dataset_path, config.fmt, config.target)

    view = discretize_dataset(dataset, config.max_thresholds)
    for name in view.skipped:
        print(f"note: feature {name!r} has no usable threshold, excluded "
              "from ranking", file=log)
    usable = len(view.dataset.features)
    k = config.select_k if config.select_k is not None else min(7, usable)
    ranking = learn.select_features(view.dataset, k)
    selected = [f.name for f in dataset.features
                if f.name in {r.feature for r in ranking}]
    restricted = dataset.project(selected)

    train, test = learn.stratified_split(restricted, config.train_fraction,
                                         config.seed)
    cv_results: list[learn.CVResult] = []
    if config.grid is not None:
        params, cv_results = learn.grid_search(train, config.grid,
                                               config.folds, config.seed)
        _cv_log(cv_results, log)
    else:
        params = config.params
    tree = learn.train_tree(train, params)

    preds = [compiler.predict_by_traversal(tree, test.case(i, i))
             for i in range(len(test))]
    acc = learn.accuracy(test.labels(), preds)
    kappa = learn.cohen_kappa(test.labels(), preds)

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model_path = str(out / "model.json")
    metrics_path = str(out / "metrics.json")
    save_tree(tree, model_path)
    metrics = {
        "accuracy": acc,
        "kappa": kappa,
        "best_params": {
            "max_depth": params.max_depth,
            "criterion": params.criterion,
            "max_features": params.max_features,
            "min_samples_leaf": params.min_samples_leaf,
            "rng_seed": params.rng_seed,
        },
        "ranking": [[r.feature, r.statistic, r.p_value] for r in ranking],
        "cv_results": [
            {"params": {
                "max_depth": res.params.max_depth,
                "criterion": res.params.criterion,
                "max_features": res.params.max_features,
                "min_samples_leaf": res.params.min_samples_leaf,
            },
             "fold_accuracies": list(res.fold_accuracies),
             "mean_accuracy": res.mean_accuracy}
            for res in cv_results
        ],
    }
    with open(metrics_path, "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2)
        fh.write("\n")
    return TrainReport(tree, metrics, model_path, metrics_path)


def load_dataset_checked(path: str, fmt: str, target: str) -> Dataset:
    from .model import load_dataset

    if not Path(path).exists():
        raise DataError(f"dataset file not found: {path}")
    return load_dataset(path, fmt, target)


# ---------------------------------------------------------------------------
# compile-to-files


def run_compile(model: LoadedModel, out_dir: str,
                cases: Optional[Sequence[Case]] = None) -> list[str]:
    """Write nodes.lp, paths.lp, extra.lp (and cases.lp if cases are given)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (
            ("nodes.lp", compiler.serialize_program(model.node_program)),
            ("paths.lp", compiler.serialize_program(model.path_program)),
            ("extra.lp", compiler.serialize_program(model.prediction_rules))):
        p = out / name
        p.write_text(text, encoding="utf-8")
        written.append(str(p))
    if cases is not None:
        text = compiler.serialize_program(
            compiler.cases_program(model.tree, cases))
        p = out / "cases.lp"
        p.write_text(text, encoding="utf-8")
        written.append(str(p))
    return written
