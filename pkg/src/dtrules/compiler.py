"""Compile decision trees into trace-annotated rule programs.

Two encodings of the same tree:

* node encoding -- one rule per edge plus one per leaf. ``tree_node(N, P, D)``
  reads "case P leaves node N in direction D" (``left`` is the condition-true
  branch); each edge rule carries the condition text, each leaf rule the class
  label, so an explanation walks the path one condition per level.
* path encoding -- one rule per leaf over the case facts directly, with the
  leaf's conditions simplified to at most one constraint per feature; the leaf
  rule carries the class label and atom traces carry the condition texts, so
  an explanation is flat (label plus one child per condition).

Both derive exactly one class atom for any complete case; the shared oracle
is plain tree traversal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .model import (CATEGORICAL, Case, Condition, DataError, DecisionTree,
                    FeatureSchema, LeafNode, ModelError, SplitNode, fmt_number)
from .rules import (Atom, AtomTrace, Rule, RuleProgram, TraceAnnotation, Var,
                    atom_text, fact, make_program, rule_text)


class InfeasiblePathError(ModelError):
    """A root-to-leaf path whose conditions no value can satisfy."""


RESERVED_PREDICATES = frozenset(
    {"tree_node", "holds", "le", "gt", "case", "prediction"})

# default human labels per class token and encoding style
DEFAULT_CLASS_LABELS = {
    ("not_alive", "nodes"): "Bad (<5years)",
    ("not_alive", "paths"): "Bad forecast (<5years)",
    ("alive", "nodes"): "Good (>5years)",
    ("alive", "paths"): "Good forecast (>5years)",
}

_P = Var("P")


# ---------------------------------------------------------------------------
# shared pieces


def class_predicates(tree: DecisionTree) -> dict[str, str]:
    """Class token -> head predicate, deterministic and collision-free."""
    out: dict[str, str] = {}
    used: set[str] = set()
    tokens = tree.target.atom_values()
    for i, cat in enumerate(tree.target.categories):
        pred = tokens[cat]
        if not pred[0].isalpha():
            pred = f"class_{pred.lstrip('-')}"
        if pred in RESERVED_PREDICATES:
            pred = f"class_{pred}"
        if pred in used:
            pred = f"{pred}_{i}"
        used.add(pred)
        out[cat] = pred
    return out


def class_labels(tree: DecisionTree, style: str,
                 labels: Optional[dict[str, str]] = None) -> dict[str, str]:
    """Class token -> human label for the given encoding style."""
    out = {}
    for cat in tree.target.categories:
        if labels and cat in labels:
            out[cat] = labels[cat]
        else:
            out[cat] = DEFAULT_CLASS_LABELS.get((cat, style), cat)
    return out


def _label_trace(label: str, where: str) -> TraceAnnotation:
    if "%" in label:
        raise ModelError(f"{where}: label {label!r} contains '%', which is "
                         "reserved for trace placeholders")
    return TraceAnnotation(label, ())


def _checked_text(text: str, where: str) -> str:
    if "%" in text:
        raise ModelError(f"{where}: text {text!r} contains '%', which is "
                         "reserved for trace placeholders")
    return text


def _complement_category(feature: FeatureSchema, category: str) -> str:
    if len(feature.categories) != 2:
        raise ModelError(
            f"cannot encode the false branch of an equality split on "
            f"{feature.name!r}: the feature has {len(feature.categories)} "
            "categories (only binary categorical splits are supported)")
    a, b = feature.categories
    return b if category == a else a


def _condition_atom(tree: DecisionTree, cond: Condition,
                    negated: bool) -> tuple[Atom, str]:
    """Body atom and human text for a split condition (or its negation)."""
    feat = tree.feature(cond.feature)
    if cond.op == "eq":
        value = _complement_category(feat, cond.bound) if negated else cond.bound
        token = feat.atom_values()[value]
        return (Atom("holds", (_P, feat.name, token)),
                f"{feat.name} is {value}")
    bound = fmt_number(cond.bound)
    le = (cond.op == "le") != negated  # effective direction
    if le:
        return Atom("le", (_P, feat.name, bound)), f"{feat.name} <= {bound}"
    return Atom("gt", (_P, feat.name, bound)), f"{feat.name} > {bound}"


# ---------------------------------------------------------------------------
# node encoding


def compile_node_encoding(tree: DecisionTree,
                          labels: Optional[dict[str, str]] = None) -> RuleProgram:
    """One rule per edge and per leaf; explanations mirror the path shape."""
    preds = class_predicates(tree)
    names = class_labels(tree, "nodes", labels)
    rules: list[Rule] = []
    parents = tree.parent_edges()

    def incoming(nid: int) -> Optional[Atom]:
        edge = parents.get(nid)
        if edge is None:
            return None
        parent, direction = edge
        return Atom("tree_node", (str(parent), _P, direction))

    def visit(nid: int) -> None:
        """Emit a split's true-edge rule, the whole true subtree, then its
        false-edge rule and subtree; leaves emit their class rule."""
        node = tree.node(nid)
        if isinstance(node, LeafNode):
            guard = incoming(nid) or Atom("case", (_P,))
            rules.append(Rule(Atom(preds[node.label], (_P,)), (guard,),
                              _label_trace(names[node.label],
                                           f"leaf {nid}")))
            return
        for direction, negated, child in (("left", False, node.true_child),
                                          ("right", True, node.false_child)):
            cond_atom, text = _condition_atom(tree, node.condition, negated)
            body = [cond_atom]
            inc = incoming(nid)
            if inc is not None:
                body.append(inc)
            head = Atom("tree_node", (str(nid), _P, direction))
            rules.append(Rule(head, tuple(body),
                              TraceAnnotation(_checked_text(text, f"node {nid}"),
                                              ())))
            visit(child)

    visit(tree.root)
    return make_program(rules)


# ---------------------------------------------------------------------------
# path extraction and simplification


@dataclass(frozen=True)
class EqualTo:
    feature: str
    category: str


@dataclass(frozen=True)
class Interval:
    """Half-open numeric band (lower, upper]; None means unbounded."""

    feature: str
    lower: Optional[float] = None
    upper: Optional[float] = None

    def __post_init__(self):
        if self.lower is None and self.upper is None:
            raise ModelError(f"unconstrained interval for {self.feature}")


PathConstraint = Union[EqualTo, Interval]


@dataclass(frozen=True)
class LeafPath:
    """A root-to-leaf path: the raw (condition, negated) pairs in traversal
    order, and the simplified per-feature constraints once computed."""

    leaf: int
    label: str
    raw: tuple[tuple[Condition, bool], ...]
    constraints: tuple[PathConstraint, ...] = ()


def extract_paths(tree: DecisionTree) -> list[LeafPath]:
    """Every root-to-leaf path, leaves in id order, raw conditions only."""
    out: list[LeafPath] = []

    def walk(nid: int, acc: tuple[tuple[Condition, bool], ...]) -> None:
        node = tree.node(nid)
        if isinstance(node, LeafNode):
            out.append(LeafPath(nid, node.label, acc))
            return
        walk(node.true_child, acc + ((node.condition, False),))
        walk(node.false_child, acc + ((node.condition, True),))

    walk(tree.root, ())
    return out


def simplify_conditions(
        raw: Sequence[tuple[Condition, bool]]) -> list[PathConstraint]:
    """Merge a conjunction of conditions into at most one constraint per
    feature, ordered by first appearance.

    Numeric bounds tighten to the narrowest (lower, upper] band; equalities
    must agree. Negated equalities must be resolved to a concrete category
    (binary complement) before calling. An empty band or disagreeing
    equalities raise InfeasiblePathError naming the feature.
    """
    order: list[str] = []
    num: dict[str, list[Optional[float]]] = {}
    cat: dict[str, str] = {}

    for cond, negated in raw:
        f = cond.feature
        if cond.op == "eq":
            if negated:
                raise ModelError(f"negated equality on {f!r} must be resolved "
                                 "to a category before simplification")
            if f in num:
                raise ModelError(f"feature {f!r} mixes equality and numeric "
                                 "conditions")
            if f in cat:
                if cat[f] != cond.bound:
                    raise InfeasiblePathError(
                        f"contradictory equalities on {f!r}: "
                        f"{cat[f]!r} and {cond.bound!r}")
            else:
                cat[f] = cond.bound
                order.append(f)
            continue
        if f in cat:
            raise ModelError(f"feature {f!r} mixes equality and numeric "
                             "conditions")
        upper_side = (cond.op == "le") != negated
        t = float(cond.bound)
        if f not in num:
            num[f] = [None, None]
            order.append(f)
        lo, hi = num[f]
        if upper_side:
            num[f][1] = t if hi is None else min(hi, t)
        else:
            num[f][0] = t if lo is None else max(lo, t)

    out: list[PathConstraint] = []
    for f in order:
        if f in cat:
            out.append(EqualTo(f, cat[f]))
            continue
        lo, hi = num[f]
        if lo is not None and hi is not None and lo >= hi:
            raise InfeasiblePathError(
                f"infeasible conditions on {f!r}: the band "
                f"({fmt_number(lo)},{fmt_number(hi)}] is empty")
        out.append(Interval(f, lo, hi))
    return out


# ---------------------------------------------------------------------------
# path encoding


def _resolve_path(tree: DecisionTree,
                  path: LeafPath) -> list[tuple[Condition, bool]]:
    """Rewrite negated equalities to the binary complement category."""
    resolved = []
    for cond, negated in path.raw:
        if cond.op == "eq" and negated:
            feat = tree.feature(cond.feature)
            other = _complement_category(feat, cond.bound)
            resolved.append((Condition(cond.feature, "eq", other), False))
        else:
            resolved.append((cond, negated))
    return resolved


def _constraint_atoms(tree: DecisionTree,
                      c: PathConstraint) -> list[tuple[Atom, str]]:
    """Body atoms for one constraint, each with its one-sided/equality text."""
    if isinstance(c, EqualTo):
        feat = tree.feature(c.feature)
        token = feat.atom_values()[c.category]
        return [(Atom("holds", (_P, c.feature, token)),
                 f"{c.feature} is {c.category}")]
    out = []
    if c.lower is not None:
        b = fmt_number(c.lower)
        out.append((Atom("gt", (_P, c.feature, b)), f"{c.feature} > {b}"))
    if c.upper is not None:
        b = fmt_number(c.upper)
        out.append((Atom("le", (_P, c.feature, b)), f"{c.feature} <= {b}"))
    return out


def _pattern_key(atom: Atom) -> tuple:
    return (atom.predicate,) + tuple(a for a in atom.args
                                     if not isinstance(a, Var))


def _band_text(c: Interval) -> str:
    return (f"{c.feature} in ({fmt_number(c.lower)},"
            f"{fmt_number(c.upper)}]")


def _assign_atom_texts(tree: DecisionTree,
                       paths: Sequence[LeafPath]) -> dict[tuple, str]:
    """Choose one text per condition-atom pattern.

    Equality and one-sided patterns force their natural text. Each two-sided
    band then claims its gt atom (else its le atom) as the carrier of the
    "f in (l,u]" text, provided that atom is unforced and appears only for
    this band; bands that cannot claim a carrier fall back to the two
    one-sided texts. Every assignment is truthful wherever the atom occurs.
    """
    forced: dict[tuple, str] = {}
    claims: dict[tuple, set[str]] = {}
    bands: list[tuple[tuple, tuple, str, Interval]] = []
    seen_bands: set[tuple] = set()

    for path in paths:
        for c in path.constraints:
            if isinstance(c, Interval) and c.lower is not None \
                    and c.upper is not None:
                text = _band_text(c)
                gt_key = ("gt", c.feature, fmt_number(c.lower))
                le_key = ("le", c.feature, fmt_number(c.upper))
                claims.setdefault(gt_key, set()).add(text)
                claims.setdefault(le_key, set()).add(text)
                band_id = (c.feature, c.lower, c.upper)
                if band_id not in seen_bands:
                    seen_bands.add(band_id)
                    bands.append((gt_key, le_key, text, c))
            else:
                for atom, text in _constraint_atoms(tree, c):
                    forced[_pattern_key(atom)] = text

    assigned = dict(forced)
    for gt_key, le_key, text, c in bands:
        carrier = None
        for key in (gt_key, le_key):
            if key not in assigned and claims.get(key) == {text}:
                carrier = key
                break
        if carrier is not None:
            assigned[carrier] = text
        else:
            for key, side in ((gt_key, f"{c.feature} > {fmt_number(c.lower)}"),
                              (le_key, f"{c.feature} <= {fmt_number(c.upper)}")):
                if key not in assigned:
                    assigned[key] = side
    return assigned


def compile_path_encoding(tree: DecisionTree,
                          labels: Optional[dict[str, str]] = None) -> RuleProgram:
    """One rule per leaf over simplified conditions; explanations are flat."""
    preds = class_predicates(tree)
    names = class_labels(tree, "paths", labels)
    paths = []
    for path in extract_paths(tree):
        try:
            constraints = simplify_conditions(_resolve_path(tree, path))
        except InfeasiblePathError as exc:
            raise InfeasiblePathError(f"leaf {path.leaf}: {exc}") from None
        paths.append(LeafPath(path.leaf, path.label, path.raw,
                              tuple(constraints)))

    texts = _assign_atom_texts(tree, paths)
    rules: list[Rule] = []
    traces: list[AtomTrace] = []
    emitted: set[tuple] = set()
    for path in paths:
        body: list[Atom] = []
        for c in path.constraints:
            for atom, _ in _constraint_atoms(tree, c):
                body.append(atom)
                key = _pattern_key(atom)
                text = texts.get(key)
                if text is not None and key not in emitted:
                    emitted.add(key)
                    traces.append(AtomTrace(
                        atom, _checked_text(text, f"leaf {path.leaf}"), ()))
        if not body:
            body = [Atom("case", (_P,))]
        rules.append(Rule(Atom(preds[path.label], (_P,)), tuple(body),
                          _label_trace(names[path.label], f"leaf {path.leaf}")))
    return make_program(rules, traces)


# ---------------------------------------------------------------------------
# prediction wrapper and case files


def prediction_program(tree: DecisionTree) -> RuleProgram:
    """Untraced ``prediction(P) :- class(P).`` wrapper, one rule per class."""
    preds = class_predicates(tree)
    rules = [Rule(Atom("prediction", (_P,)), (Atom(pred, (_P,)),))
             for pred in preds.values()]
    return make_program(rules)


def cases_program(tree: DecisionTree, cases: Sequence[Case]) -> RuleProgram:
    """All grounded facts for the given cases, in case order."""
    from .rules import case_to_facts

    thresholds = tree.thresholds()
    facts = []
    for case in cases:
        facts.extend(case_to_facts(case, tree.features, thresholds))
    return make_program(facts)


# ---------------------------------------------------------------------------
# serialization


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def serialize_program(program: RuleProgram) -> str:
    """Program text: atom-trace directives first, then rules (each preceded
    by its trace_rule directive), one statement per line. parse_program of
    the result reproduces the program exactly."""
    lines = []
    for t in program.atom_traces:
        parts = [f'%!trace {atom_text(t.pattern)} "{_escape(t.template)}"']
        parts += list(t.bound_vars)
        lines.append(" ".join(parts))
    for rule in program.rules:
        if rule.trace:
            parts = [f'%!trace_rule "{_escape(rule.trace.template)}"']
            parts += list(rule.trace.bound_vars)
            lines.append(" ".join(parts))
        lines.append(rule_text(rule))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# traversal oracle


def predict_by_traversal(tree: DecisionTree, case: Case) -> str:
    """Walk the tree on the case values; the boundary x == threshold goes to
    the true branch of ``le`` splits. This is the reference semantics both
    encodings must reproduce."""
    for feat in tree.features:
        if feat.name not in case.values:
            raise DataError(f"case {case.id}: missing value for feature "
                            f"{feat.name!r}")
    for name in case.values:
        tree.feature(name)  # raises on unknown features
    nid = tree.root
    while True:
        node = tree.node(nid)
        if isinstance(node, LeafNode):
            return node.label
        value = case.values[node.condition.feature]
        feat = tree.feature(node.condition.feature)
        if feat.kind == CATEGORICAL:
            if not isinstance(value, str) or value not in feat.categories:
                raise DataError(f"case {case.id}: {value!r} is not a category "
                                f"of {feat.name!r}")
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DataError(f"case {case.id}: feature {feat.name!r} "
                                "expects a number")
        nid = node.true_child if node.condition.holds(value) else node.false_child
