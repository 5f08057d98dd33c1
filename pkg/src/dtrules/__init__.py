"""Decision trees compiled to traced rule programs with readable explanations."""

from .model import (CATEGORICAL, NUMERIC, Case, Condition, DataError, Dataset,
                    DecisionTree, FeatureSchema, LeafNode, ModelError,
                    SplitNode, TrainParams, load_dataset, load_tree, save_tree)
from .learn import (accuracy, chi_square_test, cohen_kappa, discretize_feature,
                    entropy, gini, grid_search, select_features,
                    stratified_kfold, stratified_split, train_tree)
from .rules import (Atom, AtomTrace, ParseError, ProgramError, Rule,
                    RuleProgram, TraceAnnotation, Var, case_to_facts, evaluate,
                    fact, make_program, merge_programs, parse_program, query)
from .compiler import (InfeasiblePathError, cases_program,
                       compile_node_encoding, compile_path_encoding,
                       extract_paths, predict_by_traversal, prediction_program,
                       serialize_program, simplify_conditions)
from .explain import ExplanationTree, build_explanations, render_ascii
from .pipeline import LoadedModel, explain_case, run_compile, run_train

__version__ = "0.1.0"

__all__ = [
    "Atom", "AtomTrace", "CATEGORICAL", "Case", "Condition", "DataError",
    "Dataset", "DecisionTree", "ExplanationTree", "FeatureSchema",
    "InfeasiblePathError", "LeafNode", "LoadedModel", "ModelError", "NUMERIC",
    "ParseError", "ProgramError", "Rule", "RuleProgram", "SplitNode",
    "TraceAnnotation", "TrainParams", "Var", "accuracy", "build_explanations",
    "case_to_facts", "cases_program", "chi_square_test", "cohen_kappa",
    "compile_node_encoding", "compile_path_encoding", "discretize_feature",
    "entropy", "evaluate", "explain_case", "extract_paths", "fact", "gini",
    "grid_search", "load_dataset", "load_tree", "make_program",
    "merge_programs", "parse_program", "predict_by_traversal",
    "prediction_program", "query", "render_ascii", "run_compile", "run_train",
    "save_tree", "select_features", "serialize_program", "simplify_conditions",
    "stratified_kfold", "stratified_split", "train_tree",
]
