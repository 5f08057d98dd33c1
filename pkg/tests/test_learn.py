"""Statistics, discretization, splitting, induction, model selection."""
from __future__ import annotations

import math
import random

import pytest

from conftest import (chi_square_oracle, entropy_oracle, gini_oracle,
                      kappa_oracle, make_dataset)
from dtrules.learn import (CVResult, accuracy, chi_square_test, cohen_kappa,
                           discretize_feature, entropy, gini, grid_search,
                           select_features, stratified_kfold, stratified_split,
                           train_tree)
from dtrules.model import (Condition, DataError, Dataset, FeatureSchema,
                           LeafNode, SplitNode, TrainParams)
from dtrules.compiler import predict_by_traversal
from dtrules.model import Case


# ---------------------------------------------------------------------------
# impurity


def test_entropy_known_values():
    assert entropy([5, 5]) == 1.0
    assert entropy([10, 0]) == 0.0
    assert abs(entropy([1, 2, 3]) - entropy_oracle([1, 2, 3])) < 1e-12


def test_gini_known_values():
    assert gini([5, 5]) == 0.5
    assert gini([10, 0]) == 0.0
    assert abs(gini([1, 2, 3]) - gini_oracle([1, 2, 3])) < 1e-12


def test_impurity_matches_oracle_on_random_counts():
    rng = random.Random(5)
    for _ in range(300):
        counts = [rng.randint(0, 40) for _ in range(rng.randint(2, 5))]
        if sum(counts) == 0:
            counts[0] = 1
        assert abs(entropy(counts) - entropy_oracle(counts)) < 1e-12
        assert abs(gini(counts) - gini_oracle(counts)) < 1e-12


def test_impurity_permutation_invariant_and_zero_on_pure():
    rng = random.Random(6)
    for _ in range(100):
        counts = [rng.randint(0, 30) for _ in range(4)]
        if sum(counts) == 0:
            counts[2] = 3
        mixed = counts[::-1]
        assert abs(entropy(counts) - entropy(mixed)) < 1e-12
        assert abs(gini(counts) - gini(mixed)) < 1e-12
    assert entropy([0, 9, 0]) == 0.0
    assert gini([0, 9, 0]) == 0.0


def test_impurity_rejects_empty():
    with pytest.raises(DataError):
        entropy([0, 0])
    with pytest.raises(DataError):
        gini([])


# ---------------------------------------------------------------------------
# chi-square


def test_chi_square_exact_independence():
    stat, dof, p = chi_square_test([[10, 10], [10, 10]])
    assert stat == 0.0 and dof == 1 and p == 1.0


def test_chi_square_perfect_association():
    stat, dof, p = chi_square_test([[20, 0], [0, 20]])
    assert stat == 40.0
    _, _, p_true = chi_square_oracle([[20, 0], [0, 20]])
    assert abs(p - p_true) < 1e-8


def test_chi_square_matches_oracle_on_random_tables():
    rng = random.Random(7)
    for _ in range(150):
        r = rng.choice([2, 2, 3])
        c = rng.choice([2, 3])
        table = [[rng.randint(1, 60) for _ in range(c)] for _ in range(r)]
        stat, dof, p = chi_square_test(table)
        stat_o, dof_o, p_o = chi_square_oracle(table)
        assert dof == dof_o
        assert abs(stat - stat_o) < 1e-9 * max(1.0, stat_o)
        assert abs(p - p_o) < 1e-8


def test_chi_square_transpose_invariant():
    rng = random.Random(8)
    for _ in range(50):
        table = [[rng.randint(1, 40) for _ in range(3)] for _ in range(2)]
        t_table = [list(col) for col in zip(*table)]
        assert abs(chi_square_test(table)[0] - chi_square_test(t_table)[0]) < 1e-9


def test_chi_square_degenerate_marginals():
    with pytest.raises(DataError) as err:
        chi_square_test([[0, 0], [3, 4]])
    assert "marginal" in str(err.value)
    with pytest.raises(DataError):
        chi_square_test([[1, 0], [3, 0]])
    with pytest.raises(DataError):
        chi_square_test([[1, 2]])


# ---------------------------------------------------------------------------
# feature selection


def _cat_dataset(columns: dict, labels: list) -> Dataset:
    names = sorted(columns)
    features = tuple(FeatureSchema(n, "categorical",
                                   tuple(sorted(set(columns[n]))))
                     for n in names)
    target = FeatureSchema("label", "categorical", tuple(sorted(set(labels))))
    rows = tuple((tuple(columns[n][i] for n in names), labels[i])
                 for i in range(len(labels)))
    return Dataset(features, target, rows)


def test_determining_feature_ranks_first():
    labels = ["a"] * 10 + ["b"] * 10
    ds = _cat_dataset({
        "exact": ["x"] * 10 + ["y"] * 10,
        "mixed": ["x", "y"] * 10,
    }, labels)
    ranking = select_features(ds, 2)
    assert ranking[0].feature == "exact"
    assert ranking[0].p_value < ranking[1].p_value


def test_ranking_matches_per_feature_oracle():
    rng = random.Random(9)
    for _ in range(30):
        n = 60
        labels = [rng.choice(["a", "b"]) for _ in range(n)]
        cols = {}
        for f in range(3):
            bias = rng.random()
            cols[f"f{f}"] = [
                lab if rng.random() < bias else rng.choice(["a", "b"])
                for lab in labels]
        ds = _cat_dataset(cols, labels)
        try:
            ranking = select_features(ds, 3)
        except DataError:
            continue  # a degenerate one-category column can occur
        expected = []
        for name in cols:
            table = []
            for cat in sorted(set(cols[name])):
                row = [sum(1 for v, l in zip(cols[name], labels)
                           if v == cat and l == lab)
                       for lab in sorted(set(labels))]
                table.append(row)
            _, _, p = chi_square_oracle(table)
            expected.append((p, name))
        expected.sort()
        assert [r.feature for r in ranking] == [n for _, n in expected]
        for r, (p, _) in zip(ranking, expected):
            assert abs(r.p_value - p) < 1e-8


def test_select_rejects_numeric_features():
    ds = make_dataset(random.Random(1), n=30)
    with pytest.raises(DataError) as err:
        select_features(ds, 1)
    assert "discretize" in str(err.value)


def test_select_names_degenerate_feature():
    labels = ["a", "a", "b", "b"]
    ds = _cat_dataset({"flat": ["u", "u", "u", "u"]}, labels)
    with pytest.raises(DataError) as err:
        select_features(ds, 1)
    assert "flat" in str(err.value)


def test_select_truncates_to_k():
    labels = ["a"] * 8 + ["b"] * 8
    ds = _cat_dataset({
        "f1": ["x"] * 8 + ["y"] * 8,
        "f2": ["x", "y"] * 8,
        "f3": ["x", "x", "y", "y"] * 4,
    }, labels)
    assert len(select_features(ds, 2)) == 2
    assert len(select_features(ds, 3)) == 3
    with pytest.raises(DataError):
        select_features(ds, 4)


# ---------------------------------------------------------------------------
# discretization


def test_discretize_single_boundary():
    assert discretize_feature([1, 2, 3, 4], ["a", "a", "b", "b"], 1) == [2.5]


def test_discretize_constant_values():
    assert discretize_feature([7, 7, 7], ["a", "b", "a"], 3) == []


def test_discretize_two_boundary_pattern():
    values = list(range(12))
    targets = ["a"] * 4 + ["b"] * 4 + ["a"] * 4
    cuts = discretize_feature(values, targets, 3)
    assert 3.5 in cuts and 7.5 in cuts


def _best_midpoint_oracle(values, targets):
    """Single best entropy split over every midpoint, first on ties."""
    pairs = sorted(zip(values, targets))
    classes = sorted(set(targets))

    def ent(labels):
        if not labels:
            return 0.0
        out = 0.0
        for c in classes:
            p = labels.count(c) / len(labels)
            if p > 0:
                out -= p * math.log2(p)
        return out

    total = ent([t for _, t in pairs])
    best = None
    xs = sorted(set(v for v, _ in pairs))
    for a, b in zip(xs, xs[1:]):
        mid = (a + b) / 2
        left = [t for v, t in pairs if v <= mid]
        right = [t for v, t in pairs if v > mid]
        gain = total - (len(left) * ent(left) + len(right) * ent(right)) / len(pairs)
        if gain > 1e-12 and (best is None or gain > best[0] + 1e-15):
            best = (gain, mid)
    return None if best is None else best[1]


def test_discretize_max_one_matches_best_split_oracle():
    rng = random.Random(10)
    for _ in range(150):
        n = rng.randint(4, 20)
        values = [rng.randint(0, 12) for _ in range(n)]
        targets = [("a" if v + rng.randint(-2, 2) < 6 else "b") for v in values]
        cuts = discretize_feature(values, targets, 1)
        want = _best_midpoint_oracle(values, targets)
        if want is None:
            assert cuts == []
        else:
            assert cuts == [want]


def test_discretize_respects_budget_and_sorting():
    rng = random.Random(11)
    for _ in range(80):
        n = rng.randint(6, 30)
        values = [rng.uniform(0, 10) for _ in range(n)]
        targets = [rng.choice(["a", "b"]) for _ in range(n)]
        for budget in (1, 2, 3, 5):
            cuts = discretize_feature(values, targets, budget)
            assert len(cuts) <= budget
            assert cuts == sorted(cuts)
            xs = sorted(set(values))
            mids = {(a + b) / 2 for a, b in zip(xs, xs[1:])}
            assert all(c in mids for c in cuts)


# ---------------------------------------------------------------------------
# splits and folds


def _label_dataset(counts: dict) -> Dataset:
    rows = []
    i = 0
    for label, n in sorted(counts.items()):
        for _ in range(n):
            rows.append(((float(i),), label))
            i += 1
    features = (FeatureSchema("x", "numeric"),)
    target = FeatureSchema("label", "categorical", tuple(sorted(counts)))
    return Dataset(features, target, tuple(rows))


def test_split_even_classes():
    ds = _label_dataset({"a": 8, "b": 8})
    train, test = stratified_split(ds, 0.75, 1)
    def count(d, lab):
        return sum(1 for _, l in d.rows if l == lab)
    assert count(train, "a") == 6 and count(train, "b") == 6
    assert len(train) + len(test) == 16


def test_split_deterministic_and_disjoint():
    ds = make_dataset(random.Random(2), n=80)
    a1 = stratified_split(ds, 0.7, 42)
    a2 = stratified_split(ds, 0.7, 42)
    assert a1 == a2
    b = stratified_split(ds, 0.7, 43)
    assert b != a1  # another seed shuffles differently
    train, test = a1
    all_rows = sorted(train.rows + test.rows)
    assert all_rows == sorted(ds.rows)


def test_split_imbalanced_ratio_within_one_row():
    ds = _label_dataset({"a": 190, "b": 60})
    train, test = stratified_split(ds, 0.75, 3)
    n_a = sum(1 for _, l in train.rows if l == "a")
    n_b = sum(1 for _, l in train.rows if l == "b")
    assert abs(n_a - 190 * 0.75) <= 1
    assert abs(n_b - 60 * 0.75) <= 1
    assert n_a + n_b == round(250 * 0.75)


def test_split_single_row_class_rejected():
    ds = _label_dataset({"a": 5, "b": 1})
    with pytest.raises(DataError) as err:
        stratified_split(ds, 0.75, 1)
    assert "b" in str(err.value)


def test_kfold_even_classes():
    ds = _label_dataset({"a": 10, "b": 10})
    folds = stratified_kfold(ds, 5, 1)
    assert len(folds) == 5
    for train, val in folds:
        assert sum(1 for _, l in val.rows if l == "a") == 2
        assert sum(1 for _, l in val.rows if l == "b") == 2
        assert len(train) == 16


def test_kfold_partitions_exactly():
    rng = random.Random(4)
    for _ in range(10):
        ds = make_dataset(rng, n=rng.randint(40, 90))
        k = rng.choice([3, 4, 5])
        if min(ds.class_counts()) < k:
            continue
        folds = stratified_kfold(ds, k, 9)
        seen = []
        for train, val in folds:
            seen.extend(val.rows)
            assert sorted(train.rows + val.rows) == sorted(ds.rows)
        assert sorted(seen) == sorted(ds.rows)


def test_kfold_uneven_counts():
    ds = _label_dataset({"a": 19, "b": 6})
    folds = stratified_kfold(ds, 5, 1)
    a_sizes = sorted(sum(1 for _, l in v.rows if l == "a") for _, v in folds)
    b_sizes = sorted(sum(1 for _, l in v.rows if l == "b") for _, v in folds)
    assert a_sizes == [3, 4, 4, 4, 4]
    assert b_sizes == [1, 1, 1, 1, 2]


def test_kfold_small_class_rejected():
    ds = _label_dataset({"a": 10, "b": 3})
    with pytest.raises(DataError):
        stratified_kfold(ds, 5, 1)


# ---------------------------------------------------------------------------
# induction


def test_pure_target_gives_single_leaf():
    ds = _label_dataset({"a": 10})
    # single observed class; force a 2-class schema for validity
    target = FeatureSchema("label", "categorical", ("a", "b"))
    ds = Dataset(ds.features, target, ds.rows)
    tree = train_tree(ds, TrainParams(max_depth=4))
    assert len(tree.nodes) == 1
    assert tree.nodes[0].label == "a"


def _xor_rows(copies):
    rows = []
    combos = [("false", "false"), ("false", "true"),
              ("true", "false"), ("true", "true")]
    for (p, q), n in zip(combos, copies):
        label = "pos" if (p == "true") != (q == "true") else "neg"
        rows += [((p, q), label)] * n
    return tuple(rows)


def test_xor_is_learned_exactly_at_depth_two():
    features = (FeatureSchema("p", "categorical", ("false", "true")),
                FeatureSchema("q", "categorical", ("false", "true")))
    target = FeatureSchema("label", "categorical", ("neg", "pos"))
    # uneven group sizes give the root split positive gain
    ds = Dataset(features, target, _xor_rows((4, 2, 3, 3)))
    tree = train_tree(ds, TrainParams(max_depth=2))
    for vals, label in ds.rows:
        case = Case(0, {"p": vals[0], "q": vals[1]})
        assert predict_by_traversal(tree, case) == label


def test_perfectly_balanced_xor_stops_at_the_root():
    # every root split has exactly zero gain, so the stopping rule
    # (only positive-gain splits are accepted) yields a single leaf
    features = (FeatureSchema("p", "categorical", ("false", "true")),
                FeatureSchema("q", "categorical", ("false", "true")))
    target = FeatureSchema("label", "categorical", ("neg", "pos"))
    ds = Dataset(features, target, _xor_rows((3, 3, 3, 3)))
    tree = train_tree(ds, TrainParams(max_depth=2))
    assert len(tree.nodes) == 1


def _root_split_oracle(ds: Dataset, criterion: str):
    """Exhaustive best (feature, condition) by gain; ties keep the first in
    (schema order, ascending bound) order."""
    from dtrules.learn import entropy as ent, gini as gin
    measure = ent if criterion == "entropy" else gin

    def impurity(rows):
        counts = {}
        for _, l in rows:
            counts[l] = counts.get(l, 0) + 1
        return measure(list(counts.values()))

    n = len(ds.rows)
    base = impurity(ds.rows)
    best = None
    for fi, f in enumerate(ds.features):
        col = [vals[fi] for vals, _ in ds.rows]
        if f.kind == "numeric":
            xs = sorted(set(col))
            cands = [(a + b) / 2 for a, b in zip(xs, xs[1:])]
            conds = [Condition(f.name, "le", c) for c in cands]
        else:
            conds = [Condition(f.name, "eq", c) for c in f.categories]
        for cond in conds:
            left = [r for r in ds.rows if cond.holds(r[0][fi])]
            right = [r for r in ds.rows if not cond.holds(r[0][fi])]
            if not left or not right:
                continue
            gain = base - (len(left) * impurity(left)
                           + len(right) * impurity(right)) / n
            if gain > 1e-12 and (best is None or gain > best[0] + 1e-15):
                best = (gain, cond)
    return None if best is None else best[1]


def test_root_split_matches_exhaustive_oracle():
    rng = random.Random(12)
    for criterion in ("entropy", "gini"):
        for _ in range(25):
            ds = make_dataset(rng, n=30, noise=0.2)
            tree = train_tree(ds, TrainParams(max_depth=3,
                                              criterion=criterion))
            want = _root_split_oracle(ds, criterion)
            root = tree.nodes[0]
            if want is None:
                assert isinstance(root, LeafNode)
            else:
                assert isinstance(root, SplitNode)
                assert root.condition == want


def test_depth_never_exceeds_max():
    rng = random.Random(13)
    for depth in (1, 2, 4, 7):
        ds = make_dataset(rng, n=100, noise=0.3)
        tree = train_tree(ds, TrainParams(max_depth=depth))
        assert tree.depth() <= depth


def test_min_samples_leaf_respected():
    rng = random.Random(14)
    ds = make_dataset(rng, n=60, noise=0.3)
    tree = train_tree(ds, TrainParams(max_depth=6, min_samples_leaf=8))
    for leaf in tree.leaves():
        assert sum(leaf.counts) >= 8


def test_max_features_all_is_seed_independent():
    ds = make_dataset(random.Random(15), n=60)
    t1 = train_tree(ds, TrainParams(max_depth=4, rng_seed=1))
    t2 = train_tree(ds, TrainParams(max_depth=4, rng_seed=999))
    assert t1 == t2


def test_max_features_subset_is_seed_deterministic():
    ds = make_dataset(random.Random(16), n=80, numeric=3, categorical=3)
    p = TrainParams(max_depth=4, max_features="sqrt", rng_seed=5)
    assert train_tree(ds, p) == train_tree(ds, p)


def test_accepted_splits_have_positive_gain():
    # every stored split must separate labels: re-check gain directly
    rng = random.Random(17)
    for _ in range(10):
        ds = make_dataset(rng, n=70, noise=0.25)
        tree = train_tree(ds, TrainParams(max_depth=5))
        fi = {f.name: i for i, f in enumerate(ds.features)}

        def rows_at(node_id, rows):
            node = tree.node(node_id)
            if isinstance(node, LeafNode):
                return
            cond = node.condition
            left = [r for r in rows if cond.holds(r[0][fi[cond.feature]])]
            right = [r for r in rows if not cond.holds(r[0][fi[cond.feature]])]
            assert left and right
            labels = lambda rs: set(l for _, l in rs)
            assert labels(left) != labels(rows) or labels(right) != labels(rows) \
                or len(labels(rows)) > 1
            rows_at(node.true_child, left)
            rows_at(node.false_child, right)

        rows_at(0, list(ds.rows))


def test_empty_dataset_rejected():
    features = (FeatureSchema("x", "numeric"),)
    target = FeatureSchema("label", "categorical", ("a", "b"))
    with pytest.raises(DataError):
        Dataset(features, target, ())


# ---------------------------------------------------------------------------
# metrics


def test_accuracy_and_kappa_perfect():
    assert accuracy(["a", "b"], ["a", "b"]) == 1.0
    assert cohen_kappa(["a", "b"], ["a", "b"]) == 1.0


def test_kappa_symmetric_half_agreement():
    assert accuracy(["a", "a", "b", "b"], ["a", "b", "a", "b"]) == 0.5
    assert cohen_kappa(["a", "a", "b", "b"], ["a", "b", "a", "b"]) == 0.0


def test_kappa_matches_confusion_oracle():
    rng = random.Random(18)
    for _ in range(100):
        n = rng.randint(2, 30)
        pred = [rng.choice(["a", "b", "c"]) for _ in range(n)]
        act = [rng.choice(["a", "b", "c"]) for _ in range(n)]
        want = kappa_oracle(pred, act)
        got = cohen_kappa(pred, act)
        if want is None:
            assert got is None
        else:
            assert abs(got - want) < 1e-12


def test_kappa_undefined_on_unanimous_labels():
    assert cohen_kappa(["a", "a"], ["a", "a"]) is None


def test_metric_input_validation():
    with pytest.raises(DataError):
        accuracy(["a"], [])
    with pytest.raises(DataError):
        accuracy([], [])
    with pytest.raises(DataError):
        cohen_kappa(["a"], ["a", "b"])


# ---------------------------------------------------------------------------
# grid search


def test_single_point_grid():
    ds = make_dataset(random.Random(19), n=60)
    grid = {"max_depth": [3], "criterion": ["entropy"], "max_features": ["all"]}
    best, results = grid_search(ds, grid, folds=3, seed=1)
    assert len(results) == 1
    assert best.max_depth == 3 and best.criterion == "entropy"


def test_grid_search_is_reproducible():
    ds = make_dataset(random.Random(20), n=80)
    grid = {"max_depth": [2, 4], "criterion": ["entropy", "gini"],
            "max_features": ["all", "sqrt"]}
    r1 = grid_search(ds, grid, folds=4, seed=7)
    r2 = grid_search(ds, grid, folds=4, seed=7)
    assert r1 == r2


def test_grid_search_best_matches_reevaluation():
    ds = make_dataset(random.Random(21), n=90)
    grid = {"max_depth": [2, 3], "criterion": ["entropy", "gini"],
            "max_features": ["all"]}
    best, results = grid_search(ds, grid, folds=3, seed=2)
    assert len(results) == 4
    # re-evaluate every point independently
    for res in results:
        folds = stratified_kfold(ds, 3, 2)
        accs = []
        for train, val in folds:
            tree = train_tree(train, res.params)
            preds = [predict_by_traversal(tree, Case(0, {
                f.name: v for f, v in zip(ds.features, vals)}))
                for vals, _ in val.rows]
            accs.append(accuracy(preds, [l for _, l in val.rows]))
        assert accs == list(res.fold_accuracies)
        assert abs(res.mean_accuracy - sum(accs) / len(accs)) < 1e-12
    top = max(results, key=lambda r: r.mean_accuracy)
    best_res = [r for r in results if r.params == best][0]
    assert best_res.mean_accuracy == top.mean_accuracy


def test_grid_tie_breaks_prefer_smaller_depth_then_entropy():
    # a pure-signal dataset where every depth ties at accuracy 1.0
    features = (FeatureSchema("x", "numeric"),)
    target = FeatureSchema("label", "categorical", ("neg", "pos"))
    rows = tuple(((float(i),), "neg" if i < 10 else "pos") for i in range(20))
    ds = Dataset(features, target, rows)
    grid = {"max_depth": [5, 2, 9], "criterion": ["gini", "entropy"],
            "max_features": ["all"]}
    best, results = grid_search(ds, grid, folds=4, seed=1)
    means = {r.params.max_depth for r in results
             if r.mean_accuracy == max(x.mean_accuracy for x in results)}
    assert best.max_depth == min(means)
    assert best.criterion == "entropy"


def test_cv_result_mean_invariant():
    ds = make_dataset(random.Random(22), n=60)
    _, results = grid_search(ds, {"max_depth": [3], "criterion": ["gini"],
                                  "max_features": ["all"]}, folds=3, seed=3)
    for r in results:
        assert isinstance(r, CVResult)
        assert abs(r.mean_accuracy
                   - sum(r.fold_accuracies) / len(r.fold_accuracies)) < 1e-12
