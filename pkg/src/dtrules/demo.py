"""A hand-built transplant-survival demo model.

Seven recipient/donor features, two outcome classes, and a tree deep enough
to exercise interval merging (rec_afp is tested three times on one path).
Useful for documentation, service fixtures, and a quick tour:

    python -m dtrules.demo model.json
"""
from __future__ import annotations

import sys

from .model import (CATEGORICAL, NUMERIC, Case, Condition, DecisionTree,
                    FeatureSchema, LeafNode, SplitNode, save_tree)

_BOOL = ("false", "true")


def demo_tree() -> DecisionTree:
    features = (
        FeatureSchema("rec_vhc", CATEGORICAL, _BOOL),
        FeatureSchema("rec_afp", NUMERIC),
        FeatureSchema("rec_abdominal_surgery", CATEGORICAL, _BOOL),
        FeatureSchema("don_microesteatosis", NUMERIC),
        FeatureSchema("rec_hypertension", CATEGORICAL, _BOOL),
        FeatureSchema("rec_provenance", CATEGORICAL, ("home", "other")),
        FeatureSchema("don_acv", CATEGORICAL, _BOOL),
    )
    target = FeatureSchema("goal_death", CATEGORICAL, ("alive", "not_alive"))

    def split(nid, feature, op, bound, t, f):
        return SplitNode(nid, Condition(feature, op, bound), t, f)

    nodes = (
        split(0, "rec_hypertension", "eq", "false", 1, 20),
        split(1, "rec_vhc", "eq", "false", 2, 5),
        split(2, "rec_provenance", "eq", "home", 3, 4),
        LeafNode(3, "alive", (9, 2)),
        LeafNode(4, "not_alive", (3, 11)),
        split(5, "rec_afp", "le", 1244.0, 6, 19),
        split(6, "don_acv", "eq", "true", 7, 18),
        split(7, "rec_abdominal_surgery", "eq", "false", 8, 17),
        split(8, "rec_afp", "le", 635.0, 9, 16),
        split(9, "don_microesteatosis", "le", 50.0, 10, 13),
        split(10, "rec_afp", "le", 509.0, 11, 12),
        LeafNode(11, "alive", (14, 3)),
        LeafNode(12, "not_alive", (2, 9)),
        split(13, "rec_afp", "le", 509.0, 14, 15),
        LeafNode(14, "alive", (6, 1)),
        LeafNode(15, "not_alive", (1, 7)),
        LeafNode(16, "not_alive", (4, 18)),
        LeafNode(17, "alive", (11, 4)),
        LeafNode(18, "not_alive", (2, 13)),
        LeafNode(19, "not_alive", (5, 21)),
        LeafNode(20, "not_alive", (8, 40)),
    )
    return DecisionTree(features, target, nodes)


def demo_case(case_id: int = 14) -> Case:
    """A patient whose path hits the triple rec_afp test (ends not_alive)."""
    return Case(case_id, {
        "rec_vhc": "true",
        "rec_afp": 600.0,
        "rec_abdominal_surgery": "false",
        "don_microesteatosis": 30.0,
        "rec_hypertension": "false",
        "rec_provenance": "home",
        "don_acv": "true",
    })


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m dtrules.demo MODEL_OUT.json", file=sys.stderr)
        return 1
    save_tree(demo_tree(), args[0])
    return 0


if __name__ == "__main__":
    sys.exit(main())
