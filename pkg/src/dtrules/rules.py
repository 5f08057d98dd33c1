"""Acyclic definite rule programs: syntax, parsing, and forward-chaining
evaluation that records every rule firing for explanation.

The language is deliberately tiny. A program is a list of rules
``head :- b1, ..., bn.`` (facts drop the body), atoms are ``pred(t1, ..., tk)``
over constants (identifiers or numbers) and variables (capitalized), ``%``
starts a comment, and ``%!`` starts a trace directive:

    %!trace_rule "TEXT" V1 V2 ...      annotates the next rule
    %!trace ATOM "TEXT" V1 V2 ...      annotates every atom matching ATOM

Each ``%`` placeholder in TEXT is substituted by the corresponding variable's
value, left to right.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .model import Case, DataError, FeatureSchema, NUMERIC, fmt_number, is_numeric_token


class ParseError(DataError):
    """Syntax or well-formedness error in rule-program text."""

    def __init__(self, message: str, line: int, col: int = 0):
        super().__init__(f"line {line}: {message}" if not col
                         else f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ProgramError(DataError):
    """Structural error in a rule program (unsafe rule, cycle, bad trace)."""


_IDENT_TOKEN = re.compile(r"[a-z][A-Za-z0-9_]*")
_VAR_TOKEN = re.compile(r"[A-Z][A-Za-z0-9_]*")
_NUMBER_TOKEN = re.compile(r"-?([0-9]+(\.[0-9]+)?|\.[0-9]+)([eE][+-]?[0-9]+)?")
_STRING_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"')
_CONST_OK = re.compile(r"([a-z][A-Za-z0-9_]*|-?([0-9]+(\.[0-9]+)?|\.[0-9]+)"
                       r"([eE][+-]?[0-9]+)?)\Z")


# ---------------------------------------------------------------------------
# terms, atoms, rules


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not _VAR_TOKEN.fullmatch(self.name):
            raise ProgramError(f"invalid variable name {self.name!r}")


Term = Union[str, Var]  # constants are canonical token text


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if not _IDENT_TOKEN.fullmatch(self.predicate):
            raise ProgramError(f"invalid predicate name {self.predicate!r}")
        for a in self.args:
            if isinstance(a, str) and not _CONST_OK.match(a):
                raise ProgramError(f"invalid constant {a!r} in {self.predicate}")

    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)

    def variables(self) -> list[str]:
        """Variable names in first-occurrence order."""
        seen: list[str] = []
        for a in self.args:
            if isinstance(a, Var) and a.name not in seen:
                seen.append(a.name)
        return seen


def atom_text(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    args = ",".join(a.name if isinstance(a, Var) else a for a in atom.args)
    return f"{atom.predicate}({args})"


def _placeholders(template: str) -> int:
    return template.count("%")


@dataclass(frozen=True)
class TraceAnnotation:
    """Human text attached to a rule; bound_vars fill the % placeholders."""

    template: str
    bound_vars: tuple[str, ...] = ()

    def __post_init__(self):
        if _placeholders(self.template) != len(self.bound_vars):
            raise ProgramError(
                f"trace text {self.template!r} has {_placeholders(self.template)} "
                f"placeholder(s) for {len(self.bound_vars)} variable(s)")


@dataclass(frozen=True)
class AtomTrace:
    """Human text attached to every derived atom matching ``pattern``."""

    pattern: Atom
    template: str
    bound_vars: tuple[str, ...] = ()

    def __post_init__(self):
        if _placeholders(self.template) != len(self.bound_vars):
            raise ProgramError(
                f"trace text {self.template!r} has {_placeholders(self.template)} "
                f"placeholder(s) for {len(self.bound_vars)} variable(s)")
        pattern_vars = set(self.pattern.variables())
        for v in self.bound_vars:
            if v not in pattern_vars:
                raise ProgramError(f"trace variable {v} does not occur in "
                                   f"{atom_text(self.pattern)}")


@dataclass(frozen=True)
class Rule:
    """``head :- body.`` Facts have an empty body. Safety: every head variable
    must occur in the body."""

    head: Atom
    body: tuple[Atom, ...] = ()
    trace: Optional[TraceAnnotation] = None
    id: int = -1

    def __post_init__(self):
        body_vars = {v for b in self.body for v in b.variables()}
        for v in self.head.variables():
            if v not in body_vars:
                raise ProgramError(f"unsafe rule: variable {v} appears in the "
                                   f"head of {atom_text(self.head)} but not in the body")
        if self.trace:
            rule_vars = set(self.head.variables()) | body_vars
            for v in self.trace.bound_vars:
                if v not in rule_vars:
                    raise ProgramError(f"trace variable {v} does not occur in "
                                       f"the rule for {atom_text(self.head)}")

    def variables(self) -> list[str]:
        """All rule variables, head first, in first-occurrence order."""
        seen: list[str] = []
        for atom in (self.head, *self.body):
            for v in atom.variables():
                if v not in seen:
                    seen.append(v)
        return seen


def fact(atom: Atom) -> Rule:
    if not atom.is_ground():
        raise ProgramError(f"fact {atom_text(atom)} is not ground")
    return Rule(atom)


def rule_text(rule: Rule) -> str:
    head = atom_text(rule.head)
    if not rule.body:
        return f"{head}."
    return f"{head} :- " + ", ".join(atom_text(b) for b in rule.body) + "."


@dataclass(frozen=True)
class RuleProgram:
    """An ordered rule list plus atom traces. Construction rejects cyclic
    predicate dependencies and out-of-order rule ids."""

    rules: tuple[Rule, ...] = ()
    atom_traces: tuple[AtomTrace, ...] = ()

    def __post_init__(self):
        for i, rule in enumerate(self.rules):
            if rule.id != i:
                raise ProgramError("rule ids must be sequential from 0 "
                                   "(build programs with make_program)")
        cycle = _find_cycle(self.rules)
        if cycle:
            raise ProgramError("cyclic program: " + " -> ".join(cycle))

    def predicates(self) -> list[str]:
        seen: list[str] = []
        for rule in self.rules:
            if rule.head.predicate not in seen:
                seen.append(rule.head.predicate)
        return seen


def make_program(rules: Iterable[Rule],
                 atom_traces: Iterable[AtomTrace] = ()) -> RuleProgram:
    """Build a program, assigning sequential rule ids."""
    numbered = tuple(replace(r, id=i) for i, r in enumerate(rules))
    return RuleProgram(numbered, tuple(atom_traces))


def merge_programs(*programs: RuleProgram) -> RuleProgram:
    """Concatenate programs into one (ids reassigned, traces in order)."""
    rules = [r for p in programs for r in p.rules]
    traces = [t for p in programs for t in p.atom_traces]
    return make_program(rules, traces)


DepKey = tuple[str, Optional[str]]


def _dependency_key_fn(rules: Sequence[Rule]):
    """Build the atom -> dependency-node mapping for cycle and level checks.

    An atom's node is normally its predicate. When every occurrence of a
    predicate (head or body, any rule) carries a constant first argument, the
    node is refined to (predicate, that constant): a chain of rules walking
    distinct constants (node 1 depends on node 0) is then acyclic, while
    genuine recursion through a shared variable position still collapses to a
    self-loop and is rejected."""
    all_const: dict[str, bool] = {}
    for rule in rules:
        for atom in (rule.head, *rule.body):
            const = bool(atom.args) and not isinstance(atom.args[0], Var)
            all_const[atom.predicate] = all_const.get(atom.predicate,
                                                      True) and const

    def key(atom: Atom) -> DepKey:
        if all_const.get(atom.predicate):
            return (atom.predicate, atom.args[0])
        return (atom.predicate, None)

    return key


def _key_text(key: DepKey) -> str:
    name, const = key
    return name if const is None else f"{name}({const})"


def _find_cycle(rules: Sequence[Rule]) -> Optional[list[str]]:
    key = _dependency_key_fn(rules)
    deps: dict[DepKey, set[DepKey]] = {}
    for rule in rules:
        if rule.body:
            deps.setdefault(key(rule.head), set()).update(
                key(b) for b in rule.body)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {p: WHITE for p in deps}
    stack: list[DepKey] = []

    def dfs(p: DepKey) -> Optional[list[DepKey]]:
        color[p] = GRAY
        stack.append(p)
        for q in sorted(deps.get(p, ()), key=_key_text):
            if q not in color:
                continue
            if color[q] == GRAY:
                return stack[stack.index(q):] + [q]
            if color[q] == WHITE:
                found = dfs(q)
                if found:
                    return found
        stack.pop()
        color[p] = BLACK
        return None

    for p in sorted(deps, key=_key_text):
        if color[p] == WHITE:
            found = dfs(p)
            if found:
                return [_key_text(k) for k in found]
    return None


# ---------------------------------------------------------------------------
# parsing


_SYMBOLS = ((":-", "IMPL"), ("(", "LPAR"), (")", "RPAR"), (",", "COMMA"),
            (".", "DOT"))


def _canonical_number(text: str) -> str:
    if re.fullmatch(r"-?[0-9]+", text):
        return str(int(text))
    return fmt_number(float(text))


def _code_token(line: str, i: int, lineno: int) -> tuple[tuple, int]:
    """Match one code token at position i; returns (token, end)."""
    ch = line[i]
    m = _NUMBER_TOKEN.match(line, i)
    if m and (ch.isdigit() or (ch in "-." and m.end() > i + 1)):
        return ("NUMBER", _canonical_number(m.group()), lineno, i + 1), m.end()
    m = _IDENT_TOKEN.match(line, i)
    if m:
        return ("IDENT", m.group(), lineno, i + 1), m.end()
    m = _VAR_TOKEN.match(line, i)
    if m:
        return ("VAR", m.group(), lineno, i + 1), m.end()
    for sym, kind in _SYMBOLS:
        if line.startswith(sym, i):
            return (kind, sym, lineno, i + 1), i + len(sym)
    raise ParseError(f"unexpected character {ch!r}", lineno, i + 1)


def _tokenize_code(line: str, lineno: int) -> list[tuple[str, str, int, int]]:
    """Tokenize one rule-text line (no strings here)."""
    out = []
    i = 0
    while i < len(line):
        if line[i] in " \t\r":
            i += 1
            continue
        tok, i = _code_token(line, i, lineno)
        out.append(tok)
    return out


def _unescape(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        if raw[i] == "\\" and i + 1 < len(raw):
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(raw[i])
            i += 1
    return "".join(out)


def _tokenize_directive(line: str, lineno: int) -> list[tuple[str, str, int, int]]:
    out = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch in " \t\r":
            i += 1
            continue
        if ch == '"':
            m = _STRING_TOKEN.match(line, i)
            if not m:
                raise ParseError("unterminated string", lineno, i + 1)
            out.append(("STRING", _unescape(m.group()[1:-1]), lineno, i + 1))
            i = m.end()
            continue
        tok, i = _code_token(line, i, lineno)
        out.append(tok)
    return out


class _TokenStream:
    def __init__(self, tokens, lineno):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: Optional[str] = None):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of statement"
                             + (f", expected {expected}" if expected else ""),
                             self.lineno)
        if expected and tok[0] != expected:
            raise ParseError(f"expected {expected}, got {tok[1]!r}", tok[2], tok[3])
        self.pos += 1
        return tok

    def done(self) -> bool:
        return self.pos >= len(self.tokens)


def _parse_atom(ts: _TokenStream) -> Atom:
    kind, name, line, col = ts.next("IDENT")
    args: list[Term] = []
    nxt = ts.peek()
    if nxt and nxt[0] == "LPAR":
        ts.next()
        while True:
            k, text, l, c = ts.next()
            if k == "IDENT" or k == "NUMBER":
                args.append(text)
            elif k == "VAR":
                args.append(Var(text))
            else:
                raise ParseError(f"expected a term, got {text!r}", l, c)
            k2, t2, l2, c2 = ts.next()
            if k2 == "RPAR":
                break
            if k2 != "COMMA":
                raise ParseError(f"expected ',' or ')', got {t2!r}", l2, c2)
    return Atom(name, tuple(args))


def _parse_rule_tokens(tokens, lineno, trace) -> Rule:
    ts = _TokenStream(tokens, lineno)
    head = _parse_atom(ts)
    body: list[Atom] = []
    tok = ts.next()
    if tok[0] == "IMPL":
        while True:
            body.append(_parse_atom(ts))
            tok = ts.next()
            if tok[0] == "DOT":
                break
            if tok[0] != "COMMA":
                raise ParseError(f"expected ',' or '.', got {tok[1]!r}",
                                 tok[2], tok[3])
    elif tok[0] != "DOT":
        raise ParseError(f"expected ':-' or '.', got {tok[1]!r}", tok[2], tok[3])
    if not ts.done():
        extra = ts.peek()
        raise ParseError(f"unexpected {extra[1]!r} after '.'", extra[2], extra[3])
    try:
        return Rule(head, tuple(body), trace)
    except ProgramError as exc:
        raise ParseError(str(exc), lineno) from None


def _parse_directive(line: str, lineno: int):
    """Returns ('rule', TraceAnnotation) or ('atom', AtomTrace)."""
    stripped = line.strip()
    if stripped.startswith("%!trace_rule"):
        rest = stripped[len("%!trace_rule"):]
        kind = "rule"
    elif stripped.startswith("%!trace"):
        rest = stripped[len("%!trace"):]
        kind = "atom"
    else:
        raise ParseError(f"unknown directive {stripped.split()[0]!r}", lineno)
    if rest and not rest[0].isspace():
        raise ParseError(f"unknown directive {stripped.split()[0]!r}", lineno)
    tokens = _tokenize_directive(rest, lineno)
    ts = _TokenStream(tokens, lineno)
    pattern = None
    if kind == "atom":
        nxt = ts.peek()
        if nxt is None or nxt[0] != "IDENT":
            raise ParseError("%!trace needs an atom pattern", lineno)
        pattern = _parse_atom(ts)
    tok = ts.next("STRING")
    template = tok[1]
    bound: list[str] = []
    while not ts.done():
        v = ts.next("VAR")
        bound.append(v[1])
    try:
        if kind == "rule":
            return "rule", TraceAnnotation(template, tuple(bound))
        return "atom", AtomTrace(pattern, template, tuple(bound))
    except ProgramError as exc:
        raise ParseError(str(exc), lineno) from None


def parse_program(text: str) -> RuleProgram:
    """Parse program text into a RuleProgram.

    Directives occupy whole lines; rules may wrap across lines and end at '.'.
    """
    rules: list[Rule] = []
    atom_traces: list[AtomTrace] = []
    pending_tokens: list = []
    pending_trace: Optional[TraceAnnotation] = None
    pending_trace_line = 0

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.lstrip()
        if stripped.startswith("%!"):
            if pending_tokens:
                raise ParseError("directive inside a rule", lineno)
            kind, ann = _parse_directive(raw_line, lineno)
            if kind == "atom":
                atom_traces.append(ann)
            else:
                if pending_trace is not None:
                    raise ParseError("trace_rule directive not followed by a rule",
                                     pending_trace_line)
                pending_trace = ann
                pending_trace_line = lineno
            continue
        cut = raw_line.find("%")
        if cut != -1:
            if raw_line.startswith("%!", cut):
                raise ParseError("directives must start their own line", lineno,
                                 cut + 1)
            raw_line = raw_line[:cut]
        pending_tokens.extend(_tokenize_code(raw_line, lineno))
        while any(t[0] == "DOT" for t in pending_tokens):
            dot = next(i for i, t in enumerate(pending_tokens) if t[0] == "DOT")
            stmt = pending_tokens[:dot + 1]
            pending_tokens = pending_tokens[dot + 1:]
            rule = _parse_rule_tokens(stmt, stmt[0][2], pending_trace)
            pending_trace = None
            rules.append(replace(rule, id=len(rules)))

    if pending_tokens:
        raise ParseError("unterminated rule", pending_tokens[0][2])
    if pending_trace is not None:
        raise ParseError("trace_rule directive not followed by a rule",
                         pending_trace_line)
    try:
        return RuleProgram(tuple(rules), tuple(atom_traces))
    except ProgramError as exc:
        raise ParseError(str(exc), len(text.splitlines())) from None


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Firing:
    """One rule application: which rule, with which variable binding, on which
    ground body atoms (in body order)."""

    rule_id: int
    binding: tuple[tuple[str, str], ...]
    body: tuple[Atom, ...]


@dataclass(frozen=True)
class DerivationGraph:
    """Everything derivable from a program plus facts, with firing records.

    ``rules`` holds the program rules followed by the external facts (ids
    continue the program's numbering), so ``rules[f.rule_id]`` resolves any
    firing. ``derived`` preserves derivation order.
    """

    rules: tuple[Rule, ...]
    derived: tuple[Atom, ...]
    firings: dict[Atom, tuple[Firing, ...]]

    def has(self, atom: Atom) -> bool:
        return atom in self.firings

    def query(self, pattern: Atom) -> list[Atom]:
        return [a for a in self.derived if match_atom(pattern, a) is not None]


def match_atom(pattern: Atom, ground: Atom) -> Optional[dict[str, str]]:
    """Unify a (possibly variable-bearing) pattern with a ground atom."""
    if pattern.predicate != ground.predicate:
        return None
    if len(pattern.args) != len(ground.args):
        return None
    binding: dict[str, str] = {}
    for p, g in zip(pattern.args, ground.args):
        if isinstance(p, Var):
            bound = binding.get(p.name)
            if bound is None:
                binding[p.name] = g
            elif bound != g:
                return None
        elif p != g:
            return None
    return binding


def ground_atom(atom: Atom, binding: dict[str, str]) -> Atom:
    if atom.is_ground():
        return atom
    args = tuple(binding[a.name] if isinstance(a, Var) else a for a in atom.args)
    return Atom(atom.predicate, args)


def _extend_binding(binding: dict, atom: Atom, ground: Atom) -> Optional[dict]:
    if len(atom.args) != len(ground.args):
        return None
    out = binding
    copied = False
    for a, g in zip(atom.args, ground.args):
        if isinstance(a, Var):
            bound = out.get(a.name)
            if bound is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[a.name] = g
            elif bound != g:
                return None
        elif a != g:
            return None
    return out


def _dependency_levels(rules: Sequence[Rule], key) -> dict[DepKey, int]:
    deps: dict[DepKey, set[DepKey]] = {}
    for rule in rules:
        deps.setdefault(key(rule.head), set()).update(
            key(b) for b in rule.body)
    levels: dict[DepKey, int] = {}

    def level(p: DepKey) -> int:
        if p in levels:
            return levels[p]
        ds = deps.get(p)
        levels[p] = 0 if not ds else 1 + max(level(q) for q in ds)
        return levels[p]

    for p in deps:
        level(p)
    return levels


def evaluate(program: RuleProgram, facts: Iterable[Rule] = ()) -> DerivationGraph:
    """Forward-chain to the least fixpoint, recording firings.

    Firing order is deterministic: dependency nodes by (level, name), rules
    by id, bindings sorted by their value tuples. Duplicate facts for the
    same atom collapse to the first.
    """
    fact_rules = []
    for f in facts:
        if f.body:
            raise DataError(f"external fact {atom_text(f.head)} must have an "
                            "empty body")
        if not f.head.is_ground():
            raise DataError(f"external fact {atom_text(f.head)} is not ground")
        fact_rules.append(f)
    combined = tuple(program.rules) + tuple(
        replace(f, id=len(program.rules) + i) for i, f in enumerate(fact_rules))

    key = _dependency_key_fn(combined)
    levels = _dependency_levels(combined, key)
    by_key: dict[DepKey, list[Rule]] = {}
    for rule in combined:
        by_key.setdefault(key(rule.head), []).append(rule)

    derived_order: list[Atom] = []
    derived_by_pred: dict[str, list[Atom]] = {}
    derived_by_arg: dict[tuple[str, int, str], list[Atom]] = {}
    derived_set: set[Atom] = set()
    firings: dict[Atom, list[Firing]] = {}

    def candidates_for(atom: Atom, binding: dict) -> list[Atom]:
        # narrow by the most selective determined argument position
        best = derived_by_pred.get(atom.predicate, [])
        for pos, a in enumerate(atom.args):
            val = binding.get(a.name) if isinstance(a, Var) else a
            if val is None:
                continue
            indexed = derived_by_arg.get((atom.predicate, pos, val), [])
            if len(indexed) < len(best):
                best = indexed
        return best

    for k in sorted(by_key, key=lambda k: (levels.get(k, 0), _key_text(k))):
        for rule in sorted(by_key[k], key=lambda r: r.id):
            bindings: list[dict] = [{}]
            for atom in rule.body:
                bindings = [nb for b in bindings
                            for g in candidates_for(atom, b)
                            if (nb := _extend_binding(b, atom, g)) is not None]
                if not bindings:
                    break
            var_order = rule.variables()
            seen_keys: set[tuple] = set()
            ordered = []
            for b in sorted(bindings,
                            key=lambda b: tuple(b.get(v, "") for v in var_order)):
                key = tuple(b.get(v, "") for v in var_order)
                if key not in seen_keys:
                    seen_keys.add(key)
                    ordered.append(b)
            for b in ordered:
                head_atom = ground_atom(rule.head, b)
                if not rule.body:
                    prior = firings.get(head_atom)
                    if prior and any(not f.body for f in prior):
                        continue  # duplicate fact
                firing = Firing(rule.id,
                                tuple((v, b[v]) for v in var_order if v in b),
                                tuple(ground_atom(a, b) for a in rule.body))
                firings.setdefault(head_atom, []).append(firing)
                if head_atom not in derived_set:
                    derived_set.add(head_atom)
                    derived_by_pred.setdefault(head_atom.predicate,
                                               []).append(head_atom)
                    for pos, arg in enumerate(head_atom.args):
                        derived_by_arg.setdefault(
                            (head_atom.predicate, pos, arg),
                            []).append(head_atom)
                    derived_order.append(head_atom)

    return DerivationGraph(combined, tuple(derived_order),
                           {a: tuple(fs) for a, fs in firings.items()})


def query(graph: DerivationGraph, pattern: Atom) -> list[Atom]:
    """Derived atoms matching the pattern, in derivation order."""
    return graph.query(pattern)


# ---------------------------------------------------------------------------
# case grounding


def case_to_facts(case: Case, features: Sequence[FeatureSchema],
                  thresholds: dict[str, Sequence[float]]) -> list[Rule]:
    """Ground a case into facts: ``case(id).``, one ``holds(id, f, v).`` per
    categorical feature, and one ``le``/``gt`` fact per model threshold of
    each numeric feature."""
    cid = str(case.id)
    known = {f.name for f in features}
    for name in case.values:
        if name not in known:
            raise DataError(f"case {case.id}: unknown feature {name!r}")
    facts = [fact(Atom("case", (cid,)))]
    for feat in features:
        if feat.name not in case.values:
            raise DataError(f"case {case.id}: missing value for feature "
                            f"{feat.name!r}")
        value = case.values[feat.name]
        if feat.kind == NUMERIC:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DataError(f"case {case.id}: feature {feat.name!r} "
                                "expects a number")
            x = float(value)
            for t in thresholds.get(feat.name, ()):
                op = "le" if x <= t else "gt"
                facts.append(fact(Atom(op, (cid, feat.name, fmt_number(t)))))
        else:
            if not isinstance(value, str):
                raise DataError(f"case {case.id}: feature {feat.name!r} "
                                "expects a category")
            tokens = feat.atom_values()
            if value not in tokens:
                raise DataError(f"case {case.id}: {value!r} is not a category "
                                f"of {feat.name!r}")
            facts.append(fact(Atom("holds", (cid, feat.name, tokens[value]))))
    return facts
