"""Tree induction and model selection: impurity measures, chi-square feature
ranking, supervised discretization, stratified splitting, CART-style training,
and cross-validated grid search.

Everything is seed-deterministic: a single random.Random drives each operation
and candidate enumeration orders are fixed, so equal inputs give equal outputs.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .model import (CATEGORICAL, NUMERIC, Case, DataError, Dataset,
                    DecisionTree, Condition, FeatureSchema, LeafNode,
                    SplitNode, TrainParams)

_EPS = 1e-12           # minimum impurity gain for a split to count
_GAMMA_TOL = 1e-12     # series / continued-fraction convergence
_GAMMA_ITMAX = 500


# ---------------------------------------------------------------------------
# impurity


def entropy(counts: Sequence[int]) -> float:
    """Shannon entropy in bits of a class-count vector."""
    n = sum(counts)
    if n <= 0:
        raise DataError("entropy of an empty distribution")
    h = 0.0
    for c in counts:
        if c < 0:
            raise DataError("negative class count")
        if c:
            p = c / n
            h -= p * math.log2(p)
    return h


def gini(counts: Sequence[int]) -> float:
    """Gini impurity of a class-count vector."""
    n = sum(counts)
    if n <= 0:
        raise DataError("gini of an empty distribution")
    if any(c < 0 for c in counts):
        raise DataError("negative class count")
    return 1.0 - sum((c / n) ** 2 for c in counts)


_IMPURITY = {"entropy": entropy, "gini": gini}


# ---------------------------------------------------------------------------
# chi-square


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a,x) by series, for x < a+1."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_GAMMA_ITMAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_TOL:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError("incomplete gamma series did not converge")


def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction,
    for x >= a+1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_ITMAX + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_TOL:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ArithmeticError("incomplete gamma continued fraction did not converge")


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a,x) / Gamma(a)."""
    if a <= 0 or x < 0:
        raise DataError("gamma_q requires a > 0 and x >= 0")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        q = 1.0 - _lower_gamma_series(a, x)
    else:
        q = _upper_gamma_cf(a, x)
    return min(1.0, max(0.0, q))


def chi_square_test(table: Sequence[Sequence[float]]) -> tuple[float, int, float]:
    """Pearson chi-square test of independence on an R x C contingency table.

    Returns (statistic, degrees of freedom, upper-tail p-value).
    """
    rows = len(table)
    if rows < 2 or any(len(r) != len(table[0]) for r in table):
        raise DataError("contingency table must be rectangular with >= 2 rows")
    cols = len(table[0])
    if cols < 2:
        raise DataError("contingency table must have >= 2 columns")
    for r in table:
        for v in r:
            if v < 0:
                raise DataError("negative cell in contingency table")
    row_sums = [sum(r) for r in table]
    col_sums = [sum(r[j] for r in table) for j in range(cols)]
    total = sum(row_sums)
    if any(s == 0 for s in row_sums) or any(s == 0 for s in col_sums):
        raise DataError("degenerate contingency table: zero marginal")
    stat = 0.0
    for i in range(rows):
        for j in range(cols):
            expected = row_sums[i] * col_sums[j] / total
            stat += (table[i][j] - expected) ** 2 / expected
    dof = (rows - 1) * (cols - 1)
    return stat, dof, gamma_q(dof / 2.0, stat / 2.0)


@dataclass(frozen=True)
class FeatureRanking:
    feature: str
    statistic: float
    p_value: float


def select_features(dataset: Dataset, k: int) -> list[FeatureRanking]:
    """Rank categorical features against the target by chi-square p-value and
    keep the k best (ascending p, ties by feature name)."""
    if k < 1:
        raise DataError("k must be >= 1")
    if k > len(dataset.features):
        raise DataError(f"k={k} exceeds the {len(dataset.features)} features")
    rankings = []
    for feat in dataset.features:
        if feat.kind != CATEGORICAL:
            raise DataError(f"feature {feat.name!r} is numeric: discretize it "
                            "before chi-square ranking")
        col = dataset.column(feat.name)
        labels = dataset.labels()
        observed_cats = [c for c in feat.categories if c in set(col)]
        observed_classes = [c for c in dataset.target.categories
                            if c in set(labels)]
        if len(observed_cats) < 2 or len(observed_classes) < 2:
            raise DataError(f"degenerate contingency table for feature {feat.name!r}")
        cell = {(a, b): 0 for a in observed_cats for b in observed_classes}
        for v, y in zip(col, labels):
            cell[(v, y)] += 1
        table = [[cell[(a, b)] for b in observed_classes] for a in observed_cats]
        stat, _, p = chi_square_test(table)
        rankings.append(FeatureRanking(feat.name, stat, p))
    rankings.sort(key=lambda r: (r.p_value, r.feature))
    return rankings[:k]


# ---------------------------------------------------------------------------
# supervised discretization


def discretize_feature(values: Sequence[float], targets: Sequence,
                       max_thresholds: int) -> list[float]:
    """Entropy-based thresholds for one numeric feature.

    Splits are chosen best-first (largest gain, then lowest threshold) up to
    max_thresholds cuts, never deeper than ceil(log2(max_thresholds + 1)).
    Returns midpoints sorted ascending; a constant or signal-free feature
    yields [].
    """
    if max_thresholds < 1:
        raise DataError("max_thresholds must be >= 1")
    if len(values) != len(targets):
        raise DataError("values and targets must have the same length")
    if len(values) < 2:
        raise DataError("need at least two values to discretize")
    vals = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DataError("discretize_feature needs numeric values")
        vals.append(float(v))
    labels = [str(t) for t in targets]
    classes = sorted(set(labels))
    code = {c: i for i, c in enumerate(classes)}
    ys = [code[l] for l in labels]
    max_depth = math.ceil(math.log2(max_thresholds + 1))

    def best_cut(idxs: list[int]) -> Optional[tuple[float, float, list[int], list[int]]]:
        pairs = sorted((vals[i], ys[i]) for i in idxs)
        n = len(pairs)
        counts = [0] * len(classes)
        for _, y in pairs:
            counts[y] += 1
        parent = entropy(counts)
        left = [0] * len(classes)
        right = counts[:]
        best = None
        for j in range(n - 1):
            v, y = pairs[j]
            left[y] += 1
            right[y] -= 1
            nxt = pairs[j + 1][0]
            if nxt == v:
                continue
            thr = (v + nxt) / 2.0
            if not (v <= thr < nxt):
                continue
            nl = j + 1
            gain = parent - (nl * entropy(left) + (n - nl) * entropy(right)) / n
            if gain > _EPS and (best is None or gain > best[0]):
                lo = [i for i in idxs if vals[i] <= thr]
                hi = [i for i in idxs if vals[i] > thr]
                best = (gain, thr, lo, hi)
        return best

    # best-first expansion under a cut budget and a depth bound
    segments = [(0, list(range(len(vals))))]  # (depth, indices)
    thresholds: list[float] = []
    while segments and len(thresholds) < max_thresholds:
        scored = []
        for si, (depth, idxs) in enumerate(segments):
            if depth >= max_depth or len(idxs) < 2:
                continue
            cut = best_cut(idxs)
            if cut is not None:
                scored.append((-cut[0], cut[1], si, cut))
        if not scored:
            break
        scored.sort(key=lambda s: (s[0], s[1], s[2]))
        _, _, si, (gain, thr, lo, hi) = scored[0]
        depth, _ = segments.pop(si)
        thresholds.append(thr)
        segments.append((depth + 1, lo))
        segments.append((depth + 1, hi))
    return sorted(thresholds)


# ---------------------------------------------------------------------------
# stratified splitting


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _class_indices(dataset: Dataset) -> list[tuple[str, list[int]]]:
    """Observed classes in encoding order with their row indices."""
    buckets: dict[str, list[int]] = {c: [] for c in dataset.target.categories}
    for i, (_, label) in enumerate(dataset.rows):
        buckets[label].append(i)
    return [(c, idxs) for c, idxs in buckets.items() if idxs]


def stratified_split(dataset: Dataset, fraction: float,
                     seed: int) -> tuple[Dataset, Dataset]:
    """Split rows into (train, test) keeping per-class proportions.

    Each class contributes round(count * fraction) rows to train; the largest
    class absorbs the difference so the global train size is round(n * fraction).
    """
    if not (0.0 < fraction < 1.0):
        raise DataError("fraction must be strictly between 0 and 1")
    classes = _class_indices(dataset)
    for label, idxs in classes:
        if len(idxs) < 2:
            raise DataError(f"class {label!r} has a single row")
    want = {label: _round_half_up(len(idxs) * fraction) for label, idxs in classes}
    total = _round_half_up(len(dataset) * fraction)
    largest = max(classes, key=lambda c: len(c[1]))[0]
    want[largest] += total - sum(want.values())
    rng = random.Random(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label, idxs in classes:
        t = want[label]
        if not (0 <= t <= len(idxs)):
            raise DataError(f"cannot satisfy stratified allocation for class {label!r}")
        shuffled = idxs[:]
        rng.shuffle(shuffled)
        train_idx += shuffled[:t]
        test_idx += shuffled[t:]
    if not train_idx or not test_idx:
        raise DataError("split leaves an empty side")
    return dataset.take(sorted(train_idx)), dataset.take(sorted(test_idx))


def stratified_kfold(dataset: Dataset, k: int,
                     seed: int) -> list[tuple[Dataset, Dataset]]:
    """Partition rows into k folds with per-class counts differing by at most
    one across folds. Returns (train, validation) pairs in fold order."""
    if k < 2:
        raise DataError("k must be >= 2")
    classes = _class_indices(dataset)
    smallest = min(len(idxs) for _, idxs in classes)
    if smallest < k:
        raise DataError(f"k={k} exceeds the smallest class ({smallest} rows)")
    rng = random.Random(seed)
    fold_idx: list[list[int]] = [[] for _ in range(k)]
    for _, idxs in classes:
        shuffled = idxs[:]
        rng.shuffle(shuffled)
        q, r = divmod(len(shuffled), k)
        pos = 0
        for f in range(k):
            size = q + (1 if f < r else 0)
            fold_idx[f] += shuffled[pos:pos + size]
            pos += size
    out = []
    all_rows = set(range(len(dataset)))
    for f in range(k):
        val = sorted(fold_idx[f])
        train = sorted(all_rows.difference(val))
        out.append((dataset.take(train), dataset.take(val)))
    return out


# ---------------------------------------------------------------------------
# tree training


def _subset_size(mode: str, n_features: int) -> int:
    if mode == "sqrt":
        return max(1, math.floor(math.sqrt(n_features)))
    if mode == "log2":
        return max(1, math.floor(math.log2(n_features)))
    return n_features


def _best_split(dataset: Dataset, idxs: list[int], feature_ids: list[int],
                ys: list[int], impurity, min_samples_leaf: int):
    """Best (gain, condition, true_idxs, false_idxs) over the given features,
    or None. Ties keep the first candidate in (feature, bound) order."""
    n = len(idxs)
    n_classes = len(dataset.target.categories)
    counts = [0] * n_classes
    for i in idxs:
        counts[ys[i]] += 1
    parent = impurity(counts)
    best = None  # (gain, condition, true_idxs, false_idxs)

    for fi in feature_ids:
        feat = dataset.features[fi]
        if feat.kind == NUMERIC:
            pairs = sorted((dataset.rows[i][0][fi], ys[i]) for i in idxs)
            left = [0] * n_classes
            right = counts[:]
            for j in range(n - 1):
                v, y = pairs[j]
                left[y] += 1
                right[y] -= 1
                nxt = pairs[j + 1][0]
                if nxt == v:
                    continue
                thr = (v + nxt) / 2.0
                if not (v <= thr < nxt):
                    continue
                nl = j + 1
                if nl < min_samples_leaf or n - nl < min_samples_leaf:
                    continue
                gain = parent - (nl * impurity(left) + (n - nl) * impurity(right)) / n
                if gain > _EPS and (best is None or gain > best[0]):
                    t_idx = [i for i in idxs if dataset.rows[i][0][fi] <= thr]
                    f_idx = [i for i in idxs if dataset.rows[i][0][fi] > thr]
                    best = (gain, Condition(feat.name, "le", thr), t_idx, f_idx)
        else:
            cell: dict[str, list[int]] = {}
            for i in idxs:
                cell.setdefault(dataset.rows[i][0][fi], [0] * n_classes)[ys[i]] += 1
            for cat in feat.categories:  # one-vs-rest in encoding order
                in_counts = cell.get(cat)
                if in_counts is None:
                    continue
                nl = sum(in_counts)
                if nl == n or nl < min_samples_leaf or n - nl < min_samples_leaf:
                    continue
                out_counts = [c - ic for c, ic in zip(counts, in_counts)]
                gain = parent - (nl * impurity(in_counts)
                                 + (n - nl) * impurity(out_counts)) / n
                if gain > _EPS and (best is None or gain > best[0]):
                    t_idx = [i for i in idxs if dataset.rows[i][0][fi] == cat]
                    f_idx = [i for i in idxs if dataset.rows[i][0][fi] != cat]
                    best = (gain, Condition(feat.name, "eq", cat), t_idx, f_idx)
    return best


def train_tree(dataset: Dataset, params: TrainParams) -> DecisionTree:
    """Grow a binary decision tree by greedy impurity reduction.

    Node ids come out in pre-order with the true branch first. When
    max_features is sqrt/log2 a fresh feature subset is drawn (same seeded rng)
    at every node that attempts a split; "all" never touches the rng, so the
    seed cannot change the result.
    """
    impurity = _IMPURITY[params.criterion]
    code = dataset.target.encoding
    ys = [code[label] for _, label in dataset.rows]
    n_features = len(dataset.features)
    size = _subset_size(params.max_features, n_features)
    rng = random.Random(params.rng_seed)
    nodes: list = []

    def leaf(nid: int, idxs: list[int]) -> None:
        counts = [0] * len(dataset.target.categories)
        for i in idxs:
            counts[ys[i]] += 1
        label = dataset.target.categories[counts.index(max(counts))]
        nodes[nid] = LeafNode(nid, label, tuple(counts))

    def build(idxs: list[int], depth: int) -> int:
        nid = len(nodes)
        nodes.append(None)
        distinct = {ys[i] for i in idxs}
        if (depth >= params.max_depth or len(distinct) == 1
                or len(idxs) < 2 * params.min_samples_leaf):
            leaf(nid, idxs)
            return nid
        if size >= n_features:
            feature_ids = list(range(n_features))
        else:
            feature_ids = sorted(rng.sample(range(n_features), size))
        best = _best_split(dataset, idxs, feature_ids, ys, impurity,
                           params.min_samples_leaf)
        if best is None:
            leaf(nid, idxs)
            return nid
        _, cond, t_idx, f_idx = best
        t_child = build(t_idx, depth + 1)
        f_child = build(f_idx, depth + 1)
        nodes[nid] = SplitNode(nid, cond, t_child, f_child)
        return nid

    build(list(range(len(dataset))), 0)
    return DecisionTree(dataset.features, dataset.target, tuple(nodes))


# ---------------------------------------------------------------------------
# metrics


def accuracy(y_true: Sequence[str], y_pred: Sequence[str]) -> float:
    if len(y_true) != len(y_pred):
        raise DataError("length mismatch")
    if not y_true:
        raise DataError("empty label lists")
    return sum(a == b for a, b in zip(y_true, y_pred)) / len(y_true)


def cohen_kappa(y_true: Sequence[str], y_pred: Sequence[str]) -> Optional[float]:
    """Cohen's kappa; None when chance agreement is 1 (kappa undefined)."""
    if len(y_true) != len(y_pred):
        raise DataError("length mismatch")
    n = len(y_true)
    if not n:
        raise DataError("empty label lists")
    po = sum(a == b for a, b in zip(y_true, y_pred)) / n
    labels = sorted(set(y_true) | set(y_pred))
    pe = sum((y_true.count(l) / n) * (y_pred.count(l) / n) for l in labels)
    if pe >= 1.0:
        return None
    return (po - pe) / (1.0 - pe)


# ---------------------------------------------------------------------------
# grid search


@dataclass(frozen=True)
class CVResult:
    params: TrainParams
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float


_GRID_KEYS = ("max_depth", "criterion", "max_features", "min_samples_leaf")
_CRITERION_ORDER = {"entropy": 0, "gini": 1}


def grid_search(dataset: Dataset, grid: dict, folds: int,
                seed: int) -> tuple[TrainParams, list[CVResult]]:
    """Exhaustive cross-validated search over a parameter grid.

    Every grid point is scored on the same stratified folds. The winner has
    the highest mean accuracy; ties prefer smaller max_depth, entropy over
    gini, then earlier grid positions of max_features and min_samples_leaf.
    """
    from .compiler import predict_by_traversal

    unknown = [k for k in grid if k not in _GRID_KEYS]
    if unknown:
        raise DataError(f"unknown grid key {unknown[0]!r}")
    for key in ("max_depth", "criterion", "max_features"):
        if key not in grid or not grid[key]:
            raise DataError(f"grid needs a non-empty {key!r} list")
    depths = list(grid["max_depth"])
    criteria = list(grid["criterion"])
    modes = list(grid["max_features"])
    leaf_sizes = list(grid.get("min_samples_leaf") or [1])

    fold_sets = stratified_kfold(dataset, folds, seed)
    results: list[CVResult] = []
    for depth, criterion, mode, msl in itertools.product(
            depths, criteria, modes, leaf_sizes):
        params = TrainParams(max_depth=depth, criterion=criterion,
                             max_features=mode, min_samples_leaf=msl,
                             rng_seed=seed)
        accs = []
        for train, val in fold_sets:
            tree = train_tree(train, params)
            preds = [predict_by_traversal(tree, val.case(i, i))
                     for i in range(len(val))]
            accs.append(accuracy(val.labels(), preds))
        results.append(CVResult(params, tuple(accs), sum(accs) / len(accs)))

    def rank(item: tuple[int, CVResult]):
        _, res = item
        p = res.params
        return (-res.mean_accuracy, p.max_depth, _CRITERION_ORDER[p.criterion],
                modes.index(p.max_features), leaf_sizes.index(p.min_samples_leaf))

    best = min(enumerate(results), key=rank)[1]
    return best.params, results
