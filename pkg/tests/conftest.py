"""Shared test helpers: independent oracles and random input generators.

Oracles here are written against the documented contracts only, using
different algorithms than the package (naive fixpoint instead of stratified
evaluation, scipy's gamma function, direct formula sums) so agreement is
evidence rather than tautology.
"""
from __future__ import annotations

import itertools
import math
import random
from typing import Optional, Sequence

from dtrules.model import (Case, Condition, Dataset, DecisionTree,
                           FeatureSchema, LeafNode, SplitNode)
from dtrules.rules import Atom, Rule, Var


# ---------------------------------------------------------------------------
# whitespace normalization for golden comparisons
#
# Documented rule (see README): strip each line's margins, collapse every
# run of spaces/tabs to a single space, drop blank lines. Applied to both
# sides before byte comparison.


def norm(text: str) -> str:
    lines = []
    for raw in text.splitlines():
        s = " ".join(raw.split())
        if s:
            lines.append(s)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# direct-formula statistics oracles


def entropy_oracle(counts: Sequence[int]) -> float:
    total = sum(counts)
    out = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            out -= p * math.log2(p)
    return out


def gini_oracle(counts: Sequence[int]) -> float:
    total = sum(counts)
    return 1.0 - sum((c / total) ** 2 for c in counts)


def chi_square_oracle(table: Sequence[Sequence[float]]) -> tuple[float, int, float]:
    """Pearson statistic by the direct formula; p via scipy's gammaincc."""
    from scipy.special import gammaincc

    rows = [sum(r) for r in table]
    cols = [sum(r[j] for r in table) for j in range(len(table[0]))]
    total = sum(rows)
    stat = 0.0
    for i, row in enumerate(table):
        for j, obs in enumerate(row):
            exp = rows[i] * cols[j] / total
            stat += (obs - exp) ** 2 / exp
    dof = (len(table) - 1) * (len(table[0]) - 1)
    return stat, dof, float(gammaincc(dof / 2.0, stat / 2.0))


def kappa_oracle(predicted: Sequence[str], actual: Sequence[str]) -> Optional[float]:
    labels = sorted(set(predicted) | set(actual))
    n = len(predicted)
    po = sum(1 for p, a in zip(predicted, actual) if p == a) / n
    pe = sum((predicted.count(l) / n) * (actual.count(l) / n) for l in labels)
    if pe >= 1.0:
        return None
    return (po - pe) / (1.0 - pe)


# ---------------------------------------------------------------------------
# naive fixpoint oracle for the evaluator
#
# Iterates every rule against the current atom set until nothing new appears,
# finding bindings by plain backtracking. No strata, no ordering: just the
# least model.


def _match(pattern: Atom, ground: Atom, env: dict) -> Optional[dict]:
    if pattern.predicate != ground.predicate or len(pattern.args) != len(ground.args):
        return None
    env = dict(env)
    for p, g in zip(pattern.args, ground.args):
        if isinstance(p, Var):
            if p.name in env:
                if env[p.name] != g:
                    return None
            else:
                env[p.name] = g
        elif p != g:
            return None
    return env


def _solve(body: Sequence[Atom], atoms: set, env: dict) -> list[dict]:
    if not body:
        return [env]
    out = []
    for ground in atoms:
        nxt = _match(body[0], ground, env)
        if nxt is not None:
            out.extend(_solve(body[1:], atoms, nxt))
    return out


def naive_fixpoint(rules: Sequence[Rule]) -> set:
    atoms: set = set()
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for env in _solve(rule.body, atoms, {}):
                args = tuple(env[a.name] if isinstance(a, Var) else a
                             for a in rule.head.args)
                atom = Atom(rule.head.predicate, args)
                if atom not in atoms:
                    atoms.add(atom)
                    changed = True
    return atoms


# ---------------------------------------------------------------------------
# random acyclic program generator
#
# Predicates p0..p7 are ordered; a rule's body only uses strictly smaller
# predicates, so the program is acyclic by construction at the bare
# predicate level.


def random_program(rng: random.Random, max_rules: int = 30,
                   n_consts: int = 4) -> list[Rule]:
    consts = ["a", "b", "c", "d"][:n_consts]
    arities = {f"p{i}": rng.randint(0, 2) for i in range(8)}
    preds = sorted(arities)
    rules = []
    n_rules = rng.randint(1, max_rules)
    for _ in range(n_rules):
        h = rng.randint(0, 7)
        head_pred = preds[h]
        if h == 0 or rng.random() < 0.25:
            # ground fact
            args = tuple(rng.choice(consts) for _ in range(arities[head_pred]))
            rules.append(Rule(Atom(head_pred, args)))
            continue
        body = []
        body_vars: list[str] = []
        for _ in range(rng.randint(1, 3)):
            b = preds[rng.randint(0, h - 1)]
            args = []
            for _ in range(arities[b]):
                if rng.random() < 0.5:
                    v = rng.choice(["X", "Y", "Z"])
                    args.append(Var(v))
                    if v not in body_vars:
                        body_vars.append(v)
                else:
                    args.append(rng.choice(consts))
            body.append(Atom(b, tuple(args)))
        head_args = tuple(
            Var(rng.choice(body_vars)) if body_vars and rng.random() < 0.6
            else rng.choice(consts)
            for _ in range(arities[head_pred]))
        rules.append(Rule(Atom(head_pred, head_args), tuple(body)))
    return rules


# ---------------------------------------------------------------------------
# random decision trees with exhaustively enumerable case domains
#
# Every generated path stays feasible: numeric splits only pick thresholds
# strictly inside the branch's open interval, and a categorical feature is
# split at most once per path. Thresholds come from small integer pools so
# the induced case grid stays small.


def random_schema(rng: random.Random, max_features: int = 6):
    n = rng.randint(2, max_features)
    features = []
    pools: dict[str, list[float]] = {}
    for i in range(n):
        name = f"f{i}"
        if rng.random() < 0.45:
            cats = rng.choice([("false", "true"), ("lo", "hi")])
            features.append(FeatureSchema(name, "categorical", cats))
        else:
            features.append(FeatureSchema(name, "numeric"))
            k = rng.choice([1, 1, 2, 2, 3])
            pools[name] = sorted(rng.sample(range(1, 10), k))
    target = FeatureSchema("label", "categorical", ("neg", "pos"))
    return tuple(features), target, pools


def random_tree(rng: random.Random, max_depth: int = 9,
                max_features: int = 6) -> DecisionTree:
    features, target, pools = random_schema(rng, max_features)
    nodes: list = []

    def usable(state):
        out = []
        for f in features:
            if f.kind == "numeric":
                lo, hi = state[f.name]
                if any(lo < t < hi for t in pools[f.name]):
                    out.append(f)
            elif state[f.name] is None:
                out.append(f)
        return out

    def leaf():
        nid = len(nodes)
        nodes.append(None)
        c0 = rng.randint(0, 9)
        c1 = rng.randint(0, 9)
        label = target.categories[0 if c0 >= c1 else 1]
        nodes[nid] = LeafNode(nid, label, (c0, c1))
        return nid

    def build(depth: int, state: dict) -> int:
        options = usable(state)
        if depth >= max_depth or not options or rng.random() < 0.25:
            return leaf()
        f = rng.choice(options)
        nid = len(nodes)
        nodes.append(None)
        if f.kind == "numeric":
            lo, hi = state[f.name]
            t = float(rng.choice([t for t in pools[f.name] if lo < t < hi]))
            cond = Condition(f.name, "le", t)
            true_state = dict(state)
            true_state[f.name] = (lo, t)
            false_state = dict(state)
            false_state[f.name] = (t, hi)
        else:
            v = rng.choice(f.categories)
            cond = Condition(f.name, "eq", v)
            other = [c for c in f.categories if c != v][0]
            true_state = dict(state)
            true_state[f.name] = v
            false_state = dict(state)
            false_state[f.name] = other
        t_child = build(depth + 1, true_state)
        f_child = build(depth + 1, false_state)
        nodes[nid] = SplitNode(nid, cond, t_child, f_child)
        return nid

    init = {f.name: (-math.inf, math.inf) if f.kind == "numeric" else None
            for f in features}
    build(0, init)
    return DecisionTree(features, target, tuple(nodes))


def exhaustive_cases(tree: DecisionTree, cap: int = 3000) -> Optional[list[Case]]:
    """Every categorical combination crossed with, per numeric feature, one
    value per threshold-bounded interval plus each threshold itself. Returns
    None when the grid would exceed cap."""
    used = tree.thresholds()
    axes = []
    size = 1
    for f in tree.features:
        if f.kind == "categorical":
            vals: list = list(f.categories)
        else:
            ts = used.get(f.name, [])
            if not ts:
                vals = [1.0]
            else:
                vals = sorted({ts[0] - 0.5} | set(ts) | {t + 0.5 for t in ts})
        axes.append((f.name, vals))
        size *= len(vals)
        if size > cap:
            return None
    cases = []
    for i, combo in enumerate(itertools.product(*[v for _, v in axes])):
        cases.append(Case(i, {name: val for (name, _), val
                              in zip(axes, combo)}))
    return cases


def tree_with_cases(rng: random.Random, **kw) -> tuple[DecisionTree, list[Case]]:
    while True:
        tree = random_tree(rng, **kw)
        cases = exhaustive_cases(tree)
        if cases is not None:
            return tree, cases


# ---------------------------------------------------------------------------
# random path-condition multisets and the boundary-sampling oracle


def random_raw_conditions(rng: random.Random) -> list[tuple[Condition, bool]]:
    kinds = {}
    for i in range(3):
        kinds[f"f{i}"] = rng.choice(["numeric", "categorical"])
    raw = []
    for _ in range(rng.randint(1, 6)):
        f = rng.choice(sorted(kinds))
        if kinds[f] == "numeric":
            cond = Condition(f, "le", float(rng.randint(0, 9)))
            raw.append((cond, rng.random() < 0.5))
        else:
            cond = Condition(f, "eq", rng.choice(["false", "true"]))
            # negated equality on a binary feature resolves to the complement
            raw.append((cond, False) if rng.random() < 0.8 else
                       (Condition(f, "eq",
                                  "true" if cond.bound == "false" else "false"),
                        False))
    return raw


def condition_samples(raw) -> dict[str, list]:
    """Per feature, values covering every region a le/gt bound can carve."""
    out: dict[str, list] = {}
    for cond, _neg in raw:
        if cond.op == "eq":
            out.setdefault(cond.feature, ["false", "true"])
        else:
            vals = out.setdefault(cond.feature, [])
            for v in (cond.bound - 0.5, cond.bound, cond.bound + 0.5):
                if v not in vals:
                    vals.append(v)
    return out


def raw_holds(raw, assignment: dict) -> bool:
    for cond, neg in raw:
        if cond.holds(assignment[cond.feature]) == neg:
            return False
    return True


def constraints_hold(constraints, assignment: dict) -> bool:
    from dtrules.compiler import EqualTo, Interval

    for c in constraints:
        v = assignment[c.feature]
        if isinstance(c, EqualTo):
            if v != c.category:
                return False
        else:
            assert isinstance(c, Interval)
            if c.lower is not None and not v > c.lower:
                return False
            if c.upper is not None and not v <= c.upper:
                return False
    return True


# ---------------------------------------------------------------------------
# synthetic datasets


def make_dataset(rng: random.Random, n: int = 120, numeric: int = 2,
                 categorical: int = 2, noise: float = 0.1) -> Dataset:
    """Rows follow a fixed threshold/category pattern with label noise, so
    trees have real signal to find."""
    features = []
    for i in range(numeric):
        features.append(FeatureSchema(f"n{i}", "numeric"))
    for i in range(categorical):
        features.append(FeatureSchema(f"c{i}", "categorical", ("false", "true")))
    target = FeatureSchema("label", "categorical", ("neg", "pos"))
    rows = []
    for _ in range(n):
        vals: list = [float(rng.randint(0, 20)) for _ in range(numeric)]
        vals += [rng.choice(["false", "true"]) for _ in range(categorical)]
        score = 0.0
        if numeric:
            score += 1.0 if vals[0] > 10 else -1.0
        if categorical:
            score += 0.8 if vals[numeric] == "true" else -0.8
        if numeric > 1:
            score += 0.5 if vals[1] > 14 else -0.2
        label = "pos" if score > 0 else "neg"
        if rng.random() < noise:
            label = "neg" if label == "pos" else "pos"
        rows.append((tuple(vals), label))
    return Dataset(tuple(features), target, tuple(rows))


def dataset_to_csv(dataset: Dataset, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f.name for f in dataset.features] + [dataset.target.name])
        for vals, label in dataset.rows:
            w.writerow(list(vals) + [label])


# ---------------------------------------------------------------------------
# acceptance reporting

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
