"""Prolog-subset inference engine.

Terms, unification with an occurs check, depth-first SLD resolution over an
insertion-ordered clause store, negation as failure, the two builtin
comparisons (``\\=`` and ``@<``), and findall.

The solver is deliberately small: no cut, no assert during solving, no
arithmetic evaluation, no general tabling.  A ground-goal visited set makes
the one recursive construct used downstream (transitive closure) terminate on
cyclic graphs; everything else is plain SLD resolution.

Solver runs are single-use generators confined to one thread.  A sealed
knowledge base is immutable and may back any number of concurrent runs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Protocol, Sequence, Union

from .errors import DepthLimitError, FlounderError

# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    """Logic variable.  Source-level names start with an uppercase letter or
    underscore; names containing ``#`` are reserved for internal renaming."""

    name: str


@dataclass(frozen=True)
class Atom:
    """Constant symbol, written as a snake_case identifier."""

    name: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Struct:
    """Compound term ``functor(arg1, ..., argN)`` with N >= 1."""

    functor: str
    args: "tuple[Term, ...]"

    def __post_init__(self):
        if len(self.args) < 1:
            raise ValueError("compound terms need at least one argument")


Term = Union[Var, Atom, Int, Struct]

#: Goal-position terms: an atom or a compound.
GoalTerm = Union[Atom, Struct]


def indicator(term: GoalTerm) -> tuple[str, int]:
    """(name, arity) of a callable term; atoms have arity 0."""
    if isinstance(term, Struct):
        return term.functor, len(term.args)
    return term.name, 0


def term_vars(term: Term) -> set[str]:
    """Names of all variables occurring in a term."""
    if isinstance(term, Var):
        return {term.name}
    if isinstance(term, Struct):
        out: set[str] = set()
        for arg in term.args:
            out |= term_vars(arg)
        return out
    return set()


def is_ground(term: Term) -> bool:
    if isinstance(term, Var):
        return False
    if isinstance(term, Struct):
        return all(is_ground(a) for a in term.args)
    return True


# ---------------------------------------------------------------------------
# Literals and clauses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Goal:
    """Positive or negated predicate call."""

    term: GoalTerm
    negated: bool = False


@dataclass(frozen=True)
class NotEqual:
    """Builtin ``\\=``: succeeds when the two sides do not unify."""

    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class TermLess:
    """Builtin ``@<``: strict standard order of terms."""

    lhs: Term
    rhs: Term


Literal = Union[Goal, NotEqual, TermLess]


@dataclass(frozen=True)
class Clause:
    """``head :- body``; an empty body makes the clause a fact."""

    head: GoalTerm
    body: tuple[Literal, ...] = ()

    @property
    def is_fact(self) -> bool:
        return not self.body


def literal_vars(lit: Literal) -> set[str]:
    if isinstance(lit, Goal):
        return term_vars(lit.term)
    return term_vars(lit.lhs) | term_vars(lit.rhs)


def clause_vars(clause: Clause) -> set[str]:
    out = term_vars(clause.head)
    for lit in clause.body:
        out |= literal_vars(lit)
    return out


# ---------------------------------------------------------------------------
# Substitutions and unification
# ---------------------------------------------------------------------------

#: A substitution maps variable names to terms.  Treated as immutable:
#: extension copies.  ``resolve`` applies a substitution exhaustively, so
#: application is idempotent.
Substitution = Mapping[str, Term]


def walk(term: Term, subst: Substitution) -> Term:
    """Follow variable bindings until a non-variable or unbound variable."""
    while isinstance(term, Var) and term.name in subst:
        term = subst[term.name]
    return term


def resolve(term: Term, subst: Substitution) -> Term:
    """Apply a substitution throughout a term."""
    term = walk(term, subst)
    if isinstance(term, Struct):
        return Struct(term.functor, tuple(resolve(a, subst) for a in term.args))
    return term


def _occurs(var: Var, term: Term, subst: Substitution) -> bool:
    term = walk(term, subst)
    if isinstance(term, Var):
        return term.name == var.name
    if isinstance(term, Struct):
        return any(_occurs(var, a, subst) for a in term.args)
    return False


def unify(t1: Term, t2: Term, subst: Substitution | None = None):
    """Most general unifier extending ``subst``, or None.

    The occurs check is always on: a variable never binds to a term
    containing itself.
    """
    s: Substitution = {} if subst is None else subst
    t1 = walk(t1, s)
    t2 = walk(t2, s)
    if t1 == t2:
        return s
    if isinstance(t1, Var):
        return _bind(t1, t2, s)
    if isinstance(t2, Var):
        return _bind(t2, t1, s)
    if (
        isinstance(t1, Struct)
        and isinstance(t2, Struct)
        and t1.functor == t2.functor
        and len(t1.args) == len(t2.args)
    ):
        for a, b in zip(t1.args, t2.args):
            s = unify(a, b, s)
            if s is None:
                return None
        return s
    return None


def _bind(var: Var, term: Term, subst: Substitution):
    if _occurs(var, term, subst):
        return None
    extended = dict(subst)
    extended[var.name] = term
    return extended


# ---------------------------------------------------------------------------
# Standard order of terms
# ---------------------------------------------------------------------------

def order_key(term: Term):
    """Sort key realizing the standard order Var < Int < Atom < Compound."""
    if isinstance(term, Var):
        return (0, term.name)
    if isinstance(term, Int):
        return (1, term.value)
    if isinstance(term, Atom):
        return (2, term.name)
    return (3, len(term.args), term.functor, tuple(order_key(a) for a in term.args))


def compare_terms(t1: Term, t2: Term) -> int:
    """-1, 0, or 1 as t1 precedes, equals, or follows t2 in standard order.

    Integers compare by value, atoms lexicographically, compounds by arity,
    then functor name, then arguments left to right.
    """
    k1, k2 = order_key(t1), order_key(t2)
    if k1 < k2:
        return -1
    if k1 > k2:
        return 1
    return 0


# ---------------------------------------------------------------------------
# Clause sources and derived predicates
# ---------------------------------------------------------------------------


class ClauseSource(Protocol):
    """What the solver needs from a knowledge base."""

    def clauses(self, name: str, arity: int) -> Sequence[Clause]: ...


#: A derived predicate computes ground argument tuples natively instead of
#: resolving against clauses.  It receives the clause source and the (possibly
#: partially bound) call arguments and yields one ground tuple per derivation.
DerivedPredicate = Callable[[ClauseSource, tuple[Term, ...]], Iterable[tuple[Term, ...]]]

DerivedMap = Mapping[tuple[str, int], DerivedPredicate]


# ---------------------------------------------------------------------------
# SLD resolution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Scope:
    """Stack marker: the resolution of ``goal`` is complete past this point."""

    goal: Term


def _rename_clause(clause: Clause, counter) -> Clause:
    mapping = {name: Var(f"{name}#{next(counter)}") for name in clause_vars(clause)}
    if not mapping:
        return clause

    def ren_term(t: Term) -> Term:
        if isinstance(t, Var):
            return mapping.get(t.name, t)
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(ren_term(a) for a in t.args))
        return t

    def ren_lit(lit: Literal) -> Literal:
        if isinstance(lit, Goal):
            return Goal(ren_term(lit.term), lit.negated)
        if isinstance(lit, NotEqual):
            return NotEqual(ren_term(lit.lhs), ren_term(lit.rhs))
        return TermLess(ren_term(lit.lhs), ren_term(lit.rhs))

    return Clause(ren_term(clause.head), tuple(ren_lit(l) for l in clause.body))


def _query_var_names(goals: Iterable[Literal]) -> tuple[str, ...]:
    """Named (non-anonymous, non-internal) variables, first occurrence order."""
    ordered: list[str] = []
    for lit in goals:
        for name in _ordered_names(lit):
            if "#" not in name and name not in ordered:
                ordered.append(name)
    return tuple(ordered)


def _ordered_names(lit: Literal) -> list[str]:
    def of_term(t: Term) -> list[str]:
        if isinstance(t, Var):
            return [t.name]
        if isinstance(t, Struct):
            out: list[str] = []
            for a in t.args:
                out.extend(of_term(a))
            return out
        return []

    if isinstance(lit, Goal):
        return of_term(lit.term)
    return of_term(lit.lhs) + of_term(lit.rhs)


def solve(
    goals: Sequence[Literal],
    kb: ClauseSource,
    *,
    depth_limit: int = 10_000,
    derived: DerivedMap | None = None,
) -> Iterator[dict[str, Term]]:
    """Depth-first, left-to-right SLD resolution.

    Clauses are tried in knowledge-base insertion order.  Yields one
    substitution per solution, restricted to the query's named variables.

    A negated literal must be ground when selected, except for variables
    that occur nowhere outside it (those are read existentially).  Violations
    raise FlounderError.  Branches deeper than ``depth_limit`` resolution
    steps raise DepthLimitError.  A ground goal identical to one still being
    resolved on the same branch fails that branch, which makes ground
    transitive-closure queries terminate on cyclic fact graphs.
    """
    derived_map: DerivedMap = derived or {}
    goals = tuple(goals)
    projection = _query_var_names(goals)
    counter = itertools.count()

    frames: list[tuple[tuple, Substitution, int, frozenset]] = [
        (goals, {}, 0, frozenset())
    ]
    while frames:
        pending, subst, depth, visited = frames.pop()
        if not pending:
            yield {name: resolve(Var(name), subst) for name in projection}
            continue
        lit, rest = pending[0], pending[1:]

        if isinstance(lit, _Scope):
            frames.append((rest, subst, depth, visited - {lit.goal}))
            continue
        if depth >= depth_limit:
            raise DepthLimitError(f"resolution depth exceeded {depth_limit}")

        if isinstance(lit, NotEqual):
            if unify(lit.lhs, lit.rhs, subst) is None:
                frames.append((rest, subst, depth + 1, visited))
            continue
        if isinstance(lit, TermLess):
            lhs = resolve(lit.lhs, subst)
            rhs = resolve(lit.rhs, subst)
            if compare_terms(lhs, rhs) < 0:
                frames.append((rest, subst, depth + 1, visited))
            continue

        goal_term = resolve(lit.term, subst)

        if lit.negated:
            free = term_vars(goal_term)
            if free:
                outer = set(projection)
                for other in rest:
                    if isinstance(other, _Scope):
                        continue
                    outer |= _resolved_literal_vars(other, subst)
                leaked = free & outer
                if leaked:
                    raise FlounderError(
                        "negated goal selected with unbound shared variable(s): "
                        + ", ".join(sorted(leaked))
                    )
            if not _provable(goal_term, kb, depth_limit, derived_map):
                frames.append((rest, subst, depth + 1, visited))
            continue

        name, arity = indicator(goal_term)
        hook = derived_map.get((name, arity))
        if hook is not None:
            alternatives = []
            call_args = goal_term.args if isinstance(goal_term, Struct) else ()
            for out_args in hook(kb, call_args):
                candidate = Struct(name, tuple(out_args)) if out_args else Atom(name)
                extended = unify(goal_term, candidate, subst)
                if extended is not None:
                    alternatives.append((rest, extended, depth + 1, visited))
            frames.extend(reversed(alternatives))
            continue

        ground_goal = is_ground(goal_term)
        if ground_goal and goal_term in visited:
            continue
        branch_visited = visited | {goal_term} if ground_goal else visited
        alternatives = []
        for clause in kb.clauses(name, arity):
            renamed = _rename_clause(clause, counter)
            extended = unify(goal_term, renamed.head, subst)
            if extended is None:
                continue
            alternatives.append(
                (
                    renamed.body + (_Scope(goal_term),) + rest,
                    extended,
                    depth + 1,
                    branch_visited,
                )
            )
        frames.extend(reversed(alternatives))


def _resolved_literal_vars(lit: Literal, subst: Substitution) -> set[str]:
    if isinstance(lit, Goal):
        return term_vars(resolve(lit.term, subst))
    return term_vars(resolve(lit.lhs, subst)) | term_vars(resolve(lit.rhs, subst))


def _provable(
    goal_term: GoalTerm, kb: ClauseSource, depth_limit: int, derived: DerivedMap
) -> bool:
    for _ in solve([Goal(goal_term)], kb, depth_limit=depth_limit, derived=derived):
        return True
    return False


def findall(
    template: Term,
    goals: Sequence[Literal],
    kb: ClauseSource,
    *,
    depth_limit: int = 10_000,
    derived: DerivedMap | None = None,
) -> list[Term]:
    """``template`` instantiated under every solution, in solution order.

    Duplicates are preserved; deduplication is the caller's concern.
    """
    out = []
    for solution in solve(goals, kb, depth_limit=depth_limit, derived=derived):
        out.append(resolve(template, solution))
    return out
