"""Tree-shaped explanations assembled from recorded rule firings.

Each firing of a trace-annotated rule becomes a node labeled by the rule's
text; a firing of an untraced rule is transparent and hands its children
through. Atoms matching an atom-trace pattern get a node even when the rule
that derived them carries no annotation. Untraced facts disappear, which is
what keeps explanations human-sized.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import DataError
from .rules import (Atom, DerivationGraph, RuleProgram, atom_text, match_atom)


@dataclass(frozen=True)
class ExplanationTree:
    label: str
    children: tuple["ExplanationTree", ...] = ()


def substitute(template: str, values: list[str]) -> str:
    """Fill ``%`` placeholders left to right."""
    parts = template.split("%")
    if len(values) != len(parts) - 1:
        raise DataError(f"template {template!r} takes {len(parts) - 1} "
                        f"value(s), got {len(values)}")
    out = [parts[0]]
    for value, part in zip(values, parts[1:]):
        out.append(value)
        out.append(part)
    return "".join(out)


def build_explanations(graph: DerivationGraph, program: RuleProgram,
                       atom: Atom) -> list[ExplanationTree]:
    """All explanations of a derived ground atom.

    One candidate per firing: its node label comes from the firing rule's
    trace, else from the first atom trace matching the atom; with neither,
    the firing is transparent and contributes its children directly.
    """
    if not atom.is_ground():
        raise DataError(f"cannot explain non-ground atom {atom_text(atom)}")
    if atom not in graph.firings:
        raise DataError(f"atom {atom_text(atom)} was not derived")

    memo: dict[Atom, tuple[ExplanationTree, ...]] = {}

    def atom_trace_label(a: Atom):
        for trace in program.atom_traces:
            binding = match_atom(trace.pattern, a)
            if binding is not None:
                return substitute(trace.template,
                                  [binding[v] for v in trace.bound_vars])
        return None

    def explain(a: Atom) -> tuple[ExplanationTree, ...]:
        cached = memo.get(a)
        if cached is not None:
            return cached
        out: list[ExplanationTree] = []
        for firing in graph.firings.get(a, ()):
            children: list[ExplanationTree] = []
            for b in firing.body:
                children.extend(explain(b))
            rule = graph.rules[firing.rule_id]
            if rule.trace is not None:
                binding = dict(firing.binding)
                label = substitute(rule.trace.template,
                                   [binding[v] for v in rule.trace.bound_vars])
                out.append(ExplanationTree(label, tuple(children)))
                continue
            label = atom_trace_label(a)
            if label is not None:
                out.append(ExplanationTree(label, tuple(children)))
            else:
                out.extend(children)
        memo[a] = tuple(out)
        return memo[a]

    return list(explain(atom))


def explanation_to_dict(tree: ExplanationTree) -> dict:
    return {"label": tree.label,
            "children": [explanation_to_dict(c) for c in tree.children]}


def render_ascii(atom: Atom, explanations: list[ExplanationTree]) -> str:
    """Render explanations in the standard text layout::

        >> prediction(14)\t[1]
          *
          |__"Bad (<5years)"
          |  |__"rec_afp > 509"

    Header: atom text, a tab, the explanation count in brackets. Each
    explanation starts at ``  *``; a node at depth d is indented by the
    two-space margin plus d-1 ``|  `` runs.
    """
    lines = [f">> {atom_text(atom)}\t[{len(explanations)}]"]

    def walk(node: ExplanationTree, depth: int) -> None:
        lines.append("  " + "|  " * (depth - 1) + f'|__"{node.label}"')
        for child in node.children:
            walk(child, depth + 1)

    for e in explanations:
        lines.append("  *")
        walk(e, 1)
    return "\n".join(lines)
