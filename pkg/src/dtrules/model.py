"""Tabular data model: feature schemas, datasets, cases, decision trees, file I/O.

Trees are stored with their schemas so every consumer (compiler, service, CLI)
works from a single self-describing object.
"""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union


class DataError(ValueError):
    """Bad input data: malformed files, ill-typed values, impossible requests."""


class ModelError(ValueError):
    """Bad model: malformed tree files, inconsistent schemas, broken invariants."""


NUMERIC = "numeric"
CATEGORICAL = "categorical"

IDENT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_INT_RE = re.compile(r"[+-]?[0-9]+\Z")
_NUM_RE = re.compile(r"[+-]?([0-9]+(\.[0-9]+)?|\.[0-9]+)([eE][+-]?[0-9]+)?\Z")


def is_numeric_token(text: str) -> bool:
    """True when *text* is a finite decimal literal (optionally signed, exponent ok)."""
    return bool(_NUM_RE.match(text.strip()))


def fmt_number(x: float) -> str:
    """Shortest decimal text that round-trips to *x*; integral floats drop the point."""
    if isinstance(x, int):
        return str(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite number: {x!r}")
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def atom_constant(token: str) -> str:
    """Map a category token to a rule-program constant.

    Tokens that are already identifiers or integers pass through; anything else
    is normalized (lowercased, invalid characters to ``_``, ``v_`` prefix when
    needed). Collisions are resolved by the schema, which sees all tokens.
    """
    if IDENT_RE.match(token) or _INT_RE.match(token):
        return token
    norm = re.sub(r"[^a-z0-9_]", "_", token.lower())
    if not norm or not re.match(r"[a-z]", norm[0]):
        norm = "v_" + norm
    return norm


# ---------------------------------------------------------------------------
# schema and conditions


@dataclass(frozen=True)
class FeatureSchema:
    """One column: a lowercase identifier name, a kind, and (if categorical)
    the ordered category list whose positions define the integer encoding."""

    name: str
    kind: str
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if not IDENT_RE.match(self.name):
            raise ModelError(f"invalid feature name {self.name!r}: "
                             "must match [a-z][a-z0-9_]*")
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise ModelError(f"feature {self.name}: unknown kind {self.kind!r}")
        if self.kind == NUMERIC and self.categories:
            raise ModelError(f"feature {self.name}: numeric features take no categories")
        if self.kind == CATEGORICAL:
            if not self.categories:
                raise ModelError(f"feature {self.name}: categorical feature "
                                 "needs at least one category")
            if len(set(self.categories)) != len(self.categories):
                raise ModelError(f"feature {self.name}: duplicate categories")

    @property
    def encoding(self) -> dict[str, int]:
        """Category token -> integer code (bijection onto 0..n-1)."""
        return {c: i for i, c in enumerate(self.categories)}

    def atom_values(self) -> dict[str, str]:
        """Category token -> rule-program constant, collision-free and deterministic."""
        out: dict[str, str] = {}
        used: set[str] = set()
        for i, cat in enumerate(self.categories):
            tok = atom_constant(cat)
            if tok in used:
                tok = f"{tok}_{i}"
            used.add(tok)
            out[cat] = tok
        return out


@dataclass(frozen=True)
class Condition:
    """A split test. ``le``/``gt`` compare a numeric feature against ``bound``
    (a finite number); ``eq`` tests a categorical feature against a category."""

    feature: str
    op: str
    bound: Union[float, str]

    def __post_init__(self):
        if self.op not in ("le", "gt", "eq"):
            raise ModelError(f"unknown condition op {self.op!r}")
        if self.op == "eq":
            if not isinstance(self.bound, str):
                raise ModelError(f"eq condition on {self.feature}: bound must be a category token")
        else:
            if isinstance(self.bound, bool) or not isinstance(self.bound, (int, float)):
                raise ModelError(f"{self.op} condition on {self.feature}: bound must be a number")
            if not math.isfinite(float(self.bound)):
                raise ModelError(f"{self.op} condition on {self.feature}: bound must be finite")
            object.__setattr__(self, "bound", float(self.bound))

    def holds(self, value: Union[float, str]) -> bool:
        if self.op == "eq":
            return value == self.bound
        x = float(value)
        return x <= self.bound if self.op == "le" else x > self.bound


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class LeafNode:
    id: int
    label: str
    counts: tuple[int, ...]


@dataclass(frozen=True)
class SplitNode:
    id: int
    condition: Condition
    true_child: int
    false_child: int


TreeNode = Union[SplitNode, LeafNode]


@dataclass(frozen=True)
class DecisionTree:
    """Binary decision tree over a feature schema.

    Node ids are pre-order positions (root 0, true child of node i is i+1,
    true branch is the left branch everywhere).
    """

    features: tuple[FeatureSchema, ...]
    target: FeatureSchema
    nodes: tuple[TreeNode, ...]
    root: int = 0

    def __post_init__(self):
        if self.target.kind != CATEGORICAL:
            raise ModelError("target must be categorical")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ModelError("duplicate feature names in schema")
        if self.target.name in names:
            raise ModelError("target cannot also be a feature")
        if not self.nodes:
            raise ModelError("tree has no nodes")
        if self.root != 0:
            raise ModelError("root must be node 0")
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise ModelError("ids must be pre-order from 0")
        self._check_preorder()
        by_name = {f.name: f for f in self.features}
        for node in self.nodes:
            if isinstance(node, SplitNode):
                self._check_condition(node, by_name)
            else:
                self._check_leaf(node)

    def _check_preorder(self):
        n = len(self.nodes)
        seen: set[int] = set()
        counter = 0

        def visit(nid: int) -> None:
            nonlocal counter
            if not (0 <= nid < n):
                raise ModelError(f"node {nid} out of range")
            if nid in seen:
                raise ModelError(f"node {nid} reached twice")
            if nid != counter:
                raise ModelError("ids must be pre-order from 0")
            seen.add(nid)
            counter += 1
            node = self.nodes[nid]
            if isinstance(node, SplitNode):
                if node.true_child != nid + 1:
                    raise ModelError("ids must be pre-order from 0")
                visit(node.true_child)
                visit(node.false_child)

        visit(self.root)
        if counter != n:
            raise ModelError(f"{n - counter} node(s) unreachable from the root")

    def _check_condition(self, node: SplitNode, by_name: dict[str, FeatureSchema]):
        cond = node.condition
        feat = by_name.get(cond.feature)
        if feat is None:
            raise ModelError(f"node {node.id}: unknown feature {cond.feature!r}")
        if cond.op == "eq":
            if feat.kind != CATEGORICAL:
                raise ModelError(f"node {node.id}: eq condition on numeric feature {feat.name}")
            if cond.bound not in feat.categories:
                raise ModelError(f"node {node.id}: {cond.bound!r} is not a category "
                                 f"of {feat.name}")
        elif feat.kind != NUMERIC:
            raise ModelError(f"node {node.id}: {cond.op} condition on categorical "
                             f"feature {feat.name}")

    def _check_leaf(self, node: LeafNode):
        if node.label not in self.target.categories:
            raise ModelError(f"leaf {node.id}: {node.label!r} is not a class "
                             f"of {self.target.name}")
        if len(node.counts) != len(self.target.categories):
            raise ModelError(f"leaf {node.id}: counts must have one entry per class")
        if any(c < 0 for c in node.counts):
            raise ModelError(f"leaf {node.id}: negative count")

    # -- lookups ------------------------------------------------------------

    def node(self, nid: int) -> TreeNode:
        return self.nodes[nid]

    def feature(self, name: str) -> FeatureSchema:
        for f in self.features:
            if f.name == name:
                return f
        raise ModelError(f"unknown feature {name!r}")

    def leaves(self) -> list[LeafNode]:
        return [n for n in self.nodes if isinstance(n, LeafNode)]

    def parent_edges(self) -> dict[int, tuple[int, str]]:
        """Child id -> (parent id, direction), direction 'left' for the true branch."""
        out: dict[int, tuple[int, str]] = {}
        for node in self.nodes:
            if isinstance(node, SplitNode):
                out[node.true_child] = (node.id, "left")
                out[node.false_child] = (node.id, "right")
        return out

    def thresholds(self) -> dict[str, list[float]]:
        """Feature name -> ascending distinct split bounds used anywhere in the tree.
        Numeric features only; features without splits map to an empty list."""
        acc: dict[str, set[float]] = {f.name: set() for f in self.features
                                      if f.kind == NUMERIC}
        for node in self.nodes:
            if isinstance(node, SplitNode) and node.condition.op in ("le", "gt"):
                acc[node.condition.feature].add(float(node.condition.bound))
        return {name: sorted(vals) for name, vals in acc.items()}

    def depth(self) -> int:
        edges = self.parent_edges()

        def d(nid: int) -> int:
            parent = edges.get(nid)
            return 0 if parent is None else 1 + d(parent[0])

        return max((d(n.id) for n in self.leaves()), default=0)


@dataclass(frozen=True)
class Case:
    """One subject to classify: an integer id plus feature -> value."""

    id: int
    values: dict[str, Union[float, str]]

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, int) \
                or self.id < 0:
            raise DataError(f"case id must be a non-negative integer, "
                            f"got {self.id!r}")


@dataclass(frozen=True)
class TrainParams:
    max_depth: int
    criterion: str = "entropy"
    max_features: str = "all"
    min_samples_leaf: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ModelError("max_depth must be >= 1")
        if self.criterion not in ("entropy", "gini"):
            raise ModelError(f"unknown criterion {self.criterion!r}")
        if self.max_features not in ("sqrt", "log2", "all"):
            raise ModelError(f"unknown max_features {self.max_features!r}")
        if self.min_samples_leaf < 1:
            raise ModelError("min_samples_leaf must be >= 1")


# ---------------------------------------------------------------------------
# datasets


@dataclass(frozen=True)
class Dataset:
    """Rows of feature values plus a categorical target.

    ``rows[i]`` is ``(values, label)`` with values aligned to ``features``.
    Subsets produced by splitting keep the parent's schemas, so category
    encodings stay stable across train/test/fold boundaries.
    """

    features: tuple[FeatureSchema, ...]
    target: FeatureSchema
    rows: tuple[tuple[tuple, str], ...]

    def __post_init__(self):
        if self.target.kind != CATEGORICAL:
            raise ModelError("target must be categorical")
        if not self.rows:
            raise DataError("dataset has no rows")
        width = len(self.features)
        for values, label in self.rows:
            if len(values) != width:
                raise DataError("row width does not match schema")
            if label not in self.target.categories:
                raise DataError(f"unknown target class {label!r}")

    def __len__(self) -> int:
        return len(self.rows)

    def feature_index(self, name: str) -> int:
        for i, f in enumerate(self.features):
            if f.name == name:
                return i
        raise DataError(f"unknown feature {name!r}")

    def column(self, name: str) -> list:
        i = self.feature_index(name)
        return [values[i] for values, _ in self.rows]

    def labels(self) -> list[str]:
        return [label for _, label in self.rows]

    def class_counts(self) -> list[int]:
        counts = [0] * len(self.target.categories)
        code = self.target.encoding
        for _, label in self.rows:
            counts[code[label]] += 1
        return counts

    def take(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(self.features, self.target,
                       tuple(self.rows[i] for i in indices))

    def project(self, names: Iterable[str]) -> "Dataset":
        """Restrict to the named features, keeping their given order."""
        idx = [self.feature_index(n) for n in names]
        feats = tuple(self.features[i] for i in idx)
        rows = tuple((tuple(values[i] for i in idx), label)
                     for values, label in self.rows)
        return Dataset(feats, self.target, rows)

    def case(self, row_index: int, case_id: int) -> Case:
        values, _ = self.rows[row_index]
        return Case(case_id, {f.name: v for f, v in zip(self.features, values)})


# ---------------------------------------------------------------------------
# dataset loading


def _infer_columns(names: list[str], raw_rows: list[list[str]],
                   target_name: str) -> Dataset:
    if target_name not in names:
        raise DataError(f"target column {target_name!r} not found")
    if len(set(names)) != len(names):
        raise DataError("duplicate column names")
    for name in names:
        if not IDENT_RE.match(name):
            raise DataError(f"invalid feature name {name!r}: must match [a-z][a-z0-9_]*")
    if not raw_rows:
        raise DataError("dataset has no rows")
    for rno, row in enumerate(raw_rows, start=2):
        if len(row) != len(names):
            raise DataError(f"row {rno}: expected {len(names)} fields, got {len(row)}")
        for name, value in zip(names, row):
            if value is None or value == "":
                raise DataError(f"row {rno}: missing value for {name!r}")

    t_idx = names.index(target_name)
    feat_idx = [i for i in range(len(names)) if i != t_idx]

    kinds: dict[int, str] = {}
    for i in feat_idx:
        col = [row[i] for row in raw_rows]
        kinds[i] = NUMERIC if all(is_numeric_token(v) for v in col) else CATEGORICAL

    features = []
    for i in feat_idx:
        if kinds[i] == NUMERIC:
            features.append(FeatureSchema(names[i], NUMERIC))
        else:
            cats = tuple(sorted({row[i] for row in raw_rows}))
            features.append(FeatureSchema(names[i], CATEGORICAL, cats))
    t_cats = tuple(sorted({row[t_idx] for row in raw_rows}))
    target = FeatureSchema(target_name, CATEGORICAL, t_cats)

    rows = []
    for row in raw_rows:
        values = tuple(float(row[i]) if kinds[i] == NUMERIC else row[i]
                       for i in feat_idx)
        rows.append((values, row[t_idx]))
    return Dataset(tuple(features), target, tuple(rows))


def _json_cell(value, rno: int, name: str) -> str:
    """Normalize one JSON value to token text; bools become 'true'/'false'."""
    if value is None:
        raise DataError(f"row {rno}: missing value for {name!r}")
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        if not math.isfinite(float(value)):
            raise DataError(f"row {rno}: non-finite number for {name!r}")
        return fmt_number(value)
    if isinstance(value, str):
        if value == "":
            raise DataError(f"row {rno}: missing value for {name!r}")
        return value
    raise DataError(f"row {rno}: unsupported value type for {name!r}")


def load_dataset(path: str, fmt: str = "csv",
                 target: str = "goal_death") -> Dataset:
    """Load a CSV (header row) or JSON (array of flat objects) dataset.

    A feature column is numeric iff every value parses as a finite number;
    otherwise it is categorical with lexicographically ordered categories.
    The target column is always categorical. Missing values are rejected.
    """
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                names = next(reader)
            except StopIteration:
                raise DataError("empty dataset file") from None
            raw = [row for row in reader if row]
        return _infer_columns([n.strip() for n in names], raw, target)
    if fmt == "json":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"invalid JSON dataset: {exc}") from None
        if not isinstance(data, list) or not data:
            raise DataError("JSON dataset must be a non-empty array of objects")
        first = data[0]
        if not isinstance(first, dict):
            raise DataError("JSON dataset must be a non-empty array of objects")
        names = list(first.keys())
        raw = []
        for rno, obj in enumerate(data, start=2):
            if not isinstance(obj, dict) or set(obj) != set(names):
                raise DataError(f"row {rno}: keys differ from first row")
            raw.append([_json_cell(obj[n], rno, n) for n in names])
        return _infer_columns(names, raw, target)
    raise DataError(f"unknown dataset format {fmt!r}")


# ---------------------------------------------------------------------------
# tree file I/O


def _schema_to_dict(f: FeatureSchema) -> dict:
    if f.kind == NUMERIC:
        return {"name": f.name, "kind": f.kind}
    return {"name": f.name, "kind": f.kind,
            "categories": list(f.categories), "encoding": f.encoding}


def _bound_to_json(bound):
    if isinstance(bound, str):
        return bound
    x = float(bound)
    return int(x) if x == int(x) and abs(x) < 1e16 else x


def tree_to_dict(tree: DecisionTree) -> dict:
    nodes = []
    for node in tree.nodes:
        if isinstance(node, SplitNode):
            nodes.append({"id": node.id, "kind": "split",
                          "feature": node.condition.feature,
                          "op": node.condition.op,
                          "bound": _bound_to_json(node.condition.bound),
                          "true_child": node.true_child,
                          "false_child": node.false_child})
        else:
            nodes.append({"id": node.id, "kind": "leaf",
                          "class": node.label, "counts": list(node.counts)})
    return {"schema": [_schema_to_dict(f) for f in tree.features],
            "target": _schema_to_dict(tree.target),
            "root": tree.root,
            "nodes": nodes}


def save_tree(tree: DecisionTree, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tree_to_dict(tree), fh, indent=2)
        fh.write("\n")


def _require(obj: dict, keys: list[str], where: str) -> None:
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ModelError(f"{where}: missing field {missing[0]!r}")
    extra = [k for k in obj if k not in keys]
    if extra:
        raise ModelError(f"{where}: unexpected field {extra[0]!r}")


def _schema_from_dict(obj: dict, where: str) -> FeatureSchema:
    if not isinstance(obj, dict):
        raise ModelError(f"{where}: expected an object")
    kind = obj.get("kind")
    if kind == NUMERIC:
        _require(obj, ["name", "kind"], where)
        return FeatureSchema(obj["name"], NUMERIC)
    if kind == CATEGORICAL:
        _require(obj, ["name", "kind", "categories", "encoding"], where)
        cats = obj["categories"]
        if not isinstance(cats, list) or not all(isinstance(c, str) for c in cats):
            raise ModelError(f"{where}: categories must be a list of strings")
        schema = FeatureSchema(obj["name"], CATEGORICAL, tuple(cats))
        if obj["encoding"] != schema.encoding:
            raise ModelError(f"{where}: encoding must map categories onto 0..n-1 "
                             "in category order")
        return schema
    raise ModelError(f"{where}: unknown kind {kind!r}")


def tree_from_dict(data: dict) -> DecisionTree:
    if not isinstance(data, dict):
        raise ModelError("tree file must contain a JSON object")
    _require(data, ["schema", "target", "root", "nodes"], "tree")
    if not isinstance(data["schema"], list):
        raise ModelError("tree: schema must be a list")
    features = tuple(_schema_from_dict(o, f"schema[{i}]")
                     for i, o in enumerate(data["schema"]))
    target = _schema_from_dict(data["target"], "target")
    if data["root"] != 0:
        raise ModelError("tree: root must be 0")
    if not isinstance(data["nodes"], list):
        raise ModelError("tree: nodes must be a list")

    nodes: list[TreeNode] = []
    for i, obj in enumerate(data["nodes"]):
        where = f"node {i}"
        if not isinstance(obj, dict):
            raise ModelError(f"{where}: expected an object")
        kind = obj.get("kind")
        if kind == "split":
            _require(obj, ["id", "kind", "feature", "op", "bound",
                           "true_child", "false_child"], where)
            bound = obj["bound"]
            if obj["op"] in ("le", "gt"):
                if isinstance(bound, bool) or not isinstance(bound, (int, float)):
                    raise ModelError(f"{where}: bound must be a number")
                bound = float(bound)
            nodes.append(SplitNode(obj["id"],
                                   Condition(obj["feature"], obj["op"], bound),
                                   obj["true_child"], obj["false_child"]))
        elif kind == "leaf":
            _require(obj, ["id", "kind", "class", "counts"], where)
            counts = obj["counts"]
            if (not isinstance(counts, list)
                    or not all(isinstance(c, int) and not isinstance(c, bool)
                               for c in counts)):
                raise ModelError(f"{where}: counts must be a list of integers")
            nodes.append(LeafNode(obj["id"], obj["class"], tuple(counts)))
        else:
            raise ModelError(f"{where}: unknown kind {kind!r}")

    try:
        return DecisionTree(features, target, tuple(nodes), data["root"])
    except ModelError:
        raise
    except (TypeError, KeyError) as exc:
        raise ModelError(f"malformed tree file: {exc}") from None


def load_tree(path: str) -> DecisionTree:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid tree file: {exc}") from None
    return tree_from_dict(data)
