"""The eleven executable fallacy rule schemas and instance derivation.

Each schema pairs a ``pd/N`` query head with the rule body that makes a
tuple of arguments a guaranteed instance of that fallacy, over a fixed
24-predicate fact vocabulary.  Body literals are ordered so that every
negated literal is ground by the time it is selected.

Two auxiliaries are not plain clauses:

* ``im_t/2`` (transitive closure of ``im/2``) is a clause pair; the solver's
  ground-goal visited set keeps it terminating on cyclic graphs.
* ``oc/2`` (X is the only recorded cause of P) needs negation over a
  conjunction, which the engine's literals cannot express; it is evaluated
  natively and registered as a derived predicate.

``derive_instances`` re-checks every tuple it returns literal by literal
against the fact store, independent of the solver, before handing it out.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .engine import (
    Clause,
    DerivedMap,
    Goal,
    Literal,
    NotEqual,
    Struct,
    Term,
    TermLess,
    Var,
    compare_terms,
    findall,
    is_ground,
)
from .errors import SignatureError, UnknownSchemaError
from .kb import KnowledgeBase
from .labels import SCHEMA_CODES, FallacyCode
from .parser import parse_program, serialize_clause, serialize_term

# Fact vocabulary: predicate name -> (arity, gloss).  The glosses double as
# prompt annotations.
PREDICATE_VOCABULARY: dict[str, tuple[int, str]] = {
    "he": (3, "he(A, D, E): action A lasting D results in E"),
    "vc": (3, "vc(U, R, T): repeating a duration U so that R holds accumulates to T"),
    "ef": (2, "ef(X, F): condition X establishes fact F"),
    "fp": (2, "fp(F, P): fact F has a false premise P"),
    "po": (2, "po(O, P): valid observation O can incorrectly justify P"),
    "fplc": (3, "fplc(P, O, G): false premise P plus observation O leads to conclusion G"),
    "hr": (2, "hr(O, R): object O carries instruction or rule R"),
    "rui": (2, "rui(R, I): rule R could be unreasonably interpreted as I"),
    "rri": (2, "rri(R, I): rule R could be reasonably interpreted as I"),
    "hp": (2, "hp(X, P): component X has property P"),
    "ipo": (2, "ipo(X, W): component X is part of whole W"),
    "lp": (2, "lp(W, P): whole W lacks property P"),
    "ca": (2, "ca(X, A): argument A is used to support claim X"),
    "ema": (2, "ema(A, E): argument A explicitly means E"),
    "emrc": (2, "emrc(E, X): explicit meaning E relies on claim X"),
    "qc": (2, "qc(Q, M): original meaning M of quote Q"),
    "qoc": (2, "qoc(Q, M): quote Q misinterpreted as M"),
    "froc": (2, "froc(M, F): misinterpretation M improperly related to fact F"),
    "ifqoc": (2, "ifqoc(F, G): fact F improperly leads to conclusion G"),
    "cc": (2, "cc(A, B): cases A and B complement each other"),
    "im": (2, "im(A, B): condition A logically implies B"),
    "cs": (2, "cs(A, B): A directly causes B"),
    "ha": (2, "ha(S, E): event E happens in scenario S"),
    "rc": (2, "rc(X, E): observed effect E is actually caused by X"),
}

_DERIVED_GLOSSES = {
    "im_t": "im_t(A, B): B is reachable from A through one or more im/2 steps",
    "oc": "oc(X, P): X is the only recorded cause of P "
    "(cs(X, P) holds and no other Z has cs(Z, P))",
}

# Rule sources.  Body literal order is load-bearing: positives first so each
# negation and comparison is ground when reached.
_SCHEMA_SOURCES: dict[FallacyCode, str] = {
    FallacyCode.ID: (
        "pd(A, D, E, U) :- he(X, A, E), he(X, D, U), vc(A, R, D), \\+ vc(E, R, U)."
    ),
    FallacyCode.FA: (
        "pd(E, P, X, F) :- hp(E, X), hp(P, X), hp(E, F), E \\= P, \\+ hp(P, F)."
    ),
    FallacyCode.FP: (
        "pd(X, F, P, O, G) :- ef(X, F), fp(F, P), po(O, P), fplc(P, O, G)."
    ),
    FallacyCode.AF: (
        "pd(O, R, I, K) :- hr(O, R), rri(R, I), rui(R, K), I \\= K."
    ),
    FallacyCode.FC: (
        "pd(X, P, W) :- hp(X, P), ipo(X, W), lp(W, P)."
    ),
    FallacyCode.BQ: (
        "pd(X, A) :- ca(X, A), ema(A, E), emrc(E, X)."
    ),
    FallacyCode.CT: (
        "pd(T, G) :- qc(T, M), qoc(T, D), froc(D, F), ifqoc(F, G)."
    ),
    FallacyCode.IE: (
        "pd(D, E) :- cc(A, D), cc(B, E), im(A, B), \\+ im(B, A)."
    ),
    FallacyCode.IT: (
        "pd(A, B) :- im(A, B), im(X, B), X \\= A, \\+ im_t(A, X), \\+ im_t(X, A).\n"
        "im_t(P, Q) :- im(P, Q).\n"
        "im_t(P, Q) :- im(P, H), im_t(H, Q)."
    ),
    FallacyCode.WD: (
        "pd(P, X) :- oc(X, P), \\+ cs(P, X)."
    ),
    FallacyCode.FS: (
        "pd(T, E) :- ha(U, T), ha(U, E), rc(X, E), X \\= T, T @< E."
    ),
}

_SIGNATURES: dict[FallacyCode, tuple[str, ...]] = {
    FallacyCode.ID: ("he", "vc"),
    FallacyCode.FA: ("hp",),
    FallacyCode.FP: ("ef", "fp", "po", "fplc"),
    FallacyCode.AF: ("hr", "rri", "rui"),
    FallacyCode.FC: ("hp", "ipo", "lp"),
    FallacyCode.BQ: ("ca", "ema", "emrc"),
    FallacyCode.CT: ("qc", "qoc", "froc", "ifqoc"),
    FallacyCode.IE: ("cc", "im"),
    FallacyCode.IT: ("im",),
    FallacyCode.WD: ("cs",),
    FallacyCode.FS: ("ha", "rc"),
}


def _solve_only_cause(kb, args: tuple[Term, ...]) -> Iterator[tuple[Term, ...]]:
    """Derived oc/2: yield (X, P) once per cs(X, P) occurrence whose cause is
    unique for P."""
    causes: dict[Term, set[Term]] = {}
    occurrences: list[tuple[Term, Term]] = []
    for fact_args in kb.fact_args("cs", 2):
        x, p = fact_args
        causes.setdefault(p, set()).add(x)
        occurrences.append((x, p))
    for x, p in occurrences:
        if len(causes[p]) == 1:
            yield (x, p)


@dataclass(frozen=True)
class FallacySchema:
    code: FallacyCode
    rules: tuple[Clause, ...]
    signatures: tuple[tuple[str, int], ...]
    derived: DerivedMap = field(default_factory=dict)

    @property
    def query_head(self) -> Struct:
        return self.rules[0].head  # type: ignore[return-value]

    @property
    def arity(self) -> int:
        return len(self.query_head.args)

    @property
    def required_predicates(self) -> tuple[tuple[str, int], ...]:
        return self.signatures

    def source(self) -> str:
        """The schema as canonical rule text, with auxiliary glosses."""
        lines = [serialize_clause(rule) for rule in self.rules]
        for (name, _arity) in self.derived:
            lines.append(f"% {_DERIVED_GLOSSES[name]}")
        return "\n".join(lines)


def _build_schema(code: FallacyCode) -> FallacySchema:
    parsed = parse_program(_SCHEMA_SOURCES[code])
    rules = tuple(item.clause for item in parsed)
    signatures = tuple((name, PREDICATE_VOCABULARY[name][0]) for name in _SIGNATURES[code])
    derived: DerivedMap = {}
    if code is FallacyCode.WD:
        derived = {("oc", 2): _solve_only_cause}
    return FallacySchema(code, rules, signatures, derived)


_SCHEMAS: dict[FallacyCode, FallacySchema] = {
    code: _build_schema(code) for code in SCHEMA_CODES
}


def schema_for(code: FallacyCode) -> FallacySchema:
    """The schema for a code; EC, NF, and FD have none."""
    try:
        return _SCHEMAS[code]
    except KeyError:
        raise UnknownSchemaError(
            f"no rule schema for {code}: generated by direct prompting only"
        ) from None


def schema_catalog() -> str:
    """Every schema as rule text, for documentation and prompt embedding."""
    parts = []
    for code in SCHEMA_CODES:
        schema = _SCHEMAS[code]
        parts.append(f"% {code.value}: {code.display_name}\n{schema.source()}")
    return "\n\n".join(parts)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    kind: str  # unknown_predicate | arity_mismatch | non_ground_fact | missing_required
    message: str


@dataclass(frozen=True)
class ValidationReport:
    code: FallacyCode
    findings: tuple[Finding, ...]

    @property
    def clean(self) -> bool:
        return not self.findings

    def render(self) -> str:
        if self.clean:
            return f"{self.code.value}: ok"
        lines = [f"{self.code.value}: {len(self.findings)} finding(s)"]
        for finding in self.findings:
            lines.append(f"  [{finding.kind}] {finding.message}")
        return "\n".join(lines)


def validate_kb_against_schema(
    code: FallacyCode, kb: KnowledgeBase | Iterable[Clause]
) -> ValidationReport:
    """Check facts against a schema's signatures.

    Reports unknown predicates, arity mismatches, non-ground facts, and
    required predicates with zero facts.  Never raises; the report carries
    the findings.
    """
    schema = schema_for(code)
    expected = dict(schema.signatures)
    findings: list[Finding] = []
    counts: dict[str, int] = {name: 0 for name in expected}

    if isinstance(kb, KnowledgeBase):
        fact_clauses = [record.clause for record in kb.facts]
    else:
        fact_clauses = [c for c in kb if c.is_fact]

    for clause in fact_clauses:
        head = clause.head
        name, arity = (
            (head.functor, len(head.args)) if isinstance(head, Struct) else (head.name, 0)
        )
        text = serialize_clause(clause)
        if not is_ground(head):
            findings.append(Finding("non_ground_fact", text))
        if name not in expected:
            findings.append(
                Finding("unknown_predicate", f"{name}/{arity} not used by {code.value}: {text}")
            )
            continue
        if arity != expected[name]:
            findings.append(
                Finding(
                    "arity_mismatch",
                    f"{name} expects arity {expected[name]}, found {arity}: {text}",
                )
            )
            continue
        counts[name] += 1

    for name, arity in schema.signatures:
        if counts[name] == 0:
            findings.append(
                Finding("missing_required", f"{name}/{arity} required by {code.value}, empty")
            )
    return ValidationReport(code, tuple(findings))


# ---------------------------------------------------------------------------
# Instance derivation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidTuple:
    code: FallacyCode
    args: tuple[Term, ...]

    def render(self) -> str:
        return serialize_term(Struct("pd", self.args))


def derive_instances(code: FallacyCode, kb: KnowledgeBase) -> list[ValidTuple]:
    """All ground ``pd`` instantiations of the schema over a sealed base.

    Solutions are deduplicated preserving first occurrence.  Raises
    SignatureError when the base holds an arity-mismatched fact for a schema
    predicate; engine errors propagate.
    """
    schema = schema_for(code)
    if not kb.sealed:
        raise ValueError("knowledge base must be sealed before derivation")
    _check_signatures(schema, kb)

    program = kb.extended(schema.rules)
    head = schema.query_head
    results = findall(head, [Goal(head)], program, derived=schema.derived)

    seen: set[tuple[Term, ...]] = set()
    out: list[ValidTuple] = []
    for term in results:
        if not isinstance(term, Struct) or not is_ground(term):
            continue
        if term.args in seen:
            continue
        seen.add(term.args)
        if not confirm_instance(code, kb, term.args):
            raise AssertionError(
                f"soundness recheck failed for {serialize_term(term)}"
            )
        out.append(ValidTuple(code, term.args))
    return out


def _check_signatures(schema: FallacySchema, kb: KnowledgeBase) -> None:
    expected = dict(schema.signatures)
    for name, arity in kb.fact_indicators():
        if name in expected and arity != expected[name]:
            raise SignatureError(
                f"{name} facts must have arity {expected[name]}, found {arity}"
            )


# -- direct-lookup recheck, independent of the solver ------------------------


def confirm_instance(code: FallacyCode, kb: KnowledgeBase, args: Sequence[Term]) -> bool:
    """Re-check one candidate tuple literal by literal via fact lookup."""
    schema = schema_for(code)
    main = schema.rules[0]
    head_names = [v.name for v in main.head.args]  # heads use distinct variables
    if len(head_names) != len(args):
        return False
    binding = dict(zip(head_names, args))
    return _check_body(list(main.body), binding, kb)


def _check_body(body: list[Literal], binding: dict[str, Term], kb: KnowledgeBase) -> bool:
    if not body:
        return True
    lit, rest = body[0], body[1:]
    if isinstance(lit, NotEqual):
        return _lookup_value(lit.lhs, binding) != _lookup_value(lit.rhs, binding) and _check_body(
            rest, binding, kb
        )
    if isinstance(lit, TermLess):
        lhs = _lookup_value(lit.lhs, binding)
        rhs = _lookup_value(lit.rhs, binding)
        return compare_terms(lhs, rhs) < 0 and _check_body(rest, binding, kb)
    assert isinstance(lit, Goal)
    name, arity = (
        (lit.term.functor, len(lit.term.args))
        if isinstance(lit.term, Struct)
        else (lit.term.name, 0)
    )
    pattern = lit.term.args if isinstance(lit.term, Struct) else ()
    if lit.negated:
        return not _goal_holds(name, arity, pattern, binding, kb) and _check_body(
            rest, binding, kb
        )
    for extended in _goal_matches(name, arity, pattern, binding, kb):
        if _check_body(rest, extended, kb):
            return True
    return False


def _goal_matches(name, arity, pattern, binding, kb) -> Iterator[dict[str, Term]]:
    if name == "im_t" and arity == 2:
        pair = tuple(_lookup_value(p, binding) for p in pattern)
        if any(isinstance(v, Var) for v in pair):
            raise AssertionError("recheck expects ground im_t goals")
        if pair in _im_closure(kb):
            yield binding
        return
    if name == "oc" and arity == 2:
        for out_args in _solve_only_cause(kb, pattern):
            extended = _match_args(pattern, out_args, binding)
            if extended is not None:
                yield extended
        return
    for fact_args in kb.fact_args(name, arity):
        extended = _match_args(pattern, fact_args, binding)
        if extended is not None:
            yield extended


def _goal_holds(name, arity, pattern, binding, kb) -> bool:
    for _ in _goal_matches(name, arity, pattern, binding, kb):
        return True
    return False


def _match_args(pattern, values, binding):
    extended = dict(binding)
    for pat, val in zip(pattern, values):
        resolved = _lookup_value(pat, extended)
        if isinstance(resolved, Var):
            extended[resolved.name] = val
        elif resolved != val:
            return None
    return extended


def _lookup_value(term: Term, binding: dict[str, Term]) -> Term:
    if isinstance(term, Var):
        return binding.get(term.name, term)
    return term


def _im_closure(kb: KnowledgeBase) -> set[tuple[Term, Term]]:
    edges: dict[Term, set[Term]] = {}
    for a, b in kb.fact_args("im", 2):
        edges.setdefault(a, set()).add(b)
    closure: set[tuple[Term, Term]] = set()
    for start in list(edges):
        stack = list(edges[start])
        visited: set[Term] = set()
        while stack:
            node = stack.pop()
            if node in visited:
                continue
            visited.add(node)
            closure.add((start, node))
            stack.extend(edges.get(node, ()))
    return closure


# ---------------------------------------------------------------------------
# Ordering diagnostic
# ---------------------------------------------------------------------------


def ordering_diagnostic(code: FallacyCode, kb: KnowledgeBase) -> str | None:
    """Explain an empty derivation caused solely by the term-order builtin.

    Returns a message when the schema body uses ``@<``, the derivation is
    empty, and dropping the order constraints would make it non-empty.
    The atom spellings then sort against the intended reading; the seed facts
    must be respelled rather than the order redefined.
    """
    schema = schema_for(code)
    main = schema.rules[0]
    order_lits = [l for l in main.body if isinstance(l, TermLess)]
    if not order_lits:
        return None
    if derive_instances(code, kb):
        return None

    relaxed_main = Clause(
        main.head, tuple(l for l in main.body if not isinstance(l, TermLess))
    )
    relaxed = kb.extended((relaxed_main,) + schema.rules[1:])
    head = schema.query_head
    candidates = findall(head, [Goal(head)], relaxed, derived=schema.derived)
    distinct: list[Struct] = []
    for term in candidates:
        if isinstance(term, Struct) and term not in distinct:
            distinct.append(term)
    if not distinct:
        return None
    shown = "; ".join(serialize_term(t) for t in distinct[:5])
    constraint = ", ".join(
        f"{serialize_term(l.lhs)} @< {serialize_term(l.rhs)}" for l in order_lits
    )
    return (
        f"{code.value}: derivation is empty only because of the term-order "
        f"constraint ({constraint}); without it the candidates would be: {shown}. "
        "Standard order compares atoms lexicographically, so respell the seed "
        "atoms if these candidates are intended."
    )
