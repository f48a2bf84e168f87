"""Delayed matching constraints.

    C ::= F | I | t << u | C and C | C or C | Next(C) | <t, u, s>

``And``/``Or`` are n-ary and kept flat (both connectives are associative).
:func:`conj` and :func:`disj` are the normalizing constructors: ``conj`` also
drops ``I`` (neutral for and) and collapses to ``F`` (absorbing for and).
``F`` is *not* neutral for ``or``; a failed disjunct is consumed by the
``fail_next`` rule of the lazy engine, never by a constructor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .surjections import surjection_count
from .terms import App, Term, Var, ac_equal


class Constraint:
    __slots__ = ()

    def __str__(self):
        return show(self)


@dataclass(frozen=True, slots=True)
class Fail(Constraint):
    pass


@dataclass(frozen=True, slots=True)
class Id(Constraint):
    pass


FAIL = Fail()
ID = Id()


@dataclass(frozen=True, slots=True)
class Match(Constraint):
    pattern: Term
    subject: Term


@dataclass(frozen=True, slots=True)
class And(Constraint):
    items: tuple

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("And needs at least two items; use conj()")


@dataclass(frozen=True, slots=True)
class Or(Constraint):
    items: tuple

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("Or needs at least two items; use disj()")


@dataclass(frozen=True, slots=True)
class Next(Constraint):
    body: Constraint


@dataclass(frozen=True, slots=True)
class Triplet(Constraint):
    """Suspended AC matching of ``pattern`` against ``subject`` from surjection ``rank`` on."""

    pattern: App
    subject: App
    rank: int

    def __post_init__(self):
        t, u = self.pattern, self.subject
        if not (isinstance(t, App) and isinstance(u, App) and t.symbol.ac and t.symbol == u.symbol):
            raise ValueError(f"triplet needs two terms with the same AC root: {t}, {u}")
        k, n = len(t.args), len(u.args)
        if k > n or not 1 <= self.rank <= surjection_count(n, k):
            raise ValueError(f"rank {self.rank} invalid for S({n},{k})")


def conj(*cs: Constraint) -> Constraint:
    items = []
    for c in cs:
        if isinstance(c, Fail):
            return FAIL
        if isinstance(c, Id):
            continue
        if isinstance(c, And):
            items.extend(c.items)
        else:
            items.append(c)
    if not items:
        return ID
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(*cs: Constraint) -> Constraint:
    items = []
    for c in cs:
        if isinstance(c, Or):
            items.extend(c.items)
        else:
            items.append(c)
    if not items:
        raise ValueError("empty disjunction")
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def simplify_algebraic(c: Constraint) -> Constraint:
    """Flatten connectives, drop ``I`` from conjunctions, let ``F`` absorb them."""
    match c:
        case And(items):
            return conj(*(simplify_algebraic(i) for i in items))
        case Or(items):
            return disj(*(simplify_algebraic(i) for i in items))
        case Next(body):
            return Next(simplify_algebraic(body))
    return c


def is_binding(c: Constraint) -> bool:
    return isinstance(c, Match) and isinstance(c.pattern, Var)


def has_conflict(items: Iterable[Constraint]) -> bool:
    """True if two bindings ``x << t`` and ``x << t'`` have AC-unequal images.

    This is the side condition of ``fail_gen``, shared by both engines.
    """
    first: dict[str, Term] = {}
    for c in items:
        if is_binding(c):
            seen = first.setdefault(c.pattern.name, c.subject)
            if seen is not c.subject and not ac_equal(seen, c.subject):
                return True
    return False


def conjuncts(c: Constraint) -> tuple:
    return c.items if isinstance(c, And) else (c,)


def is_land_substitution(c: Constraint) -> bool:
    return all(is_binding(i) for i in conjuncts(c))


def is_irreducible_substitution(c: Constraint) -> bool:
    return is_land_substitution(c) and not has_conflict(conjuncts(c))


def substitution_constraint(sigma: Mapping[str, Term]) -> Constraint:
    """The and-substitution ``x1 << t1 and ...`` for a substitution, ``I`` if empty."""
    return conj(*(Match(Var(x), t) for x, t in sigma.items()))


def extract_substitution(c: Constraint) -> dict:
    """Turn ``I`` or an irreducible and-substitution into a substitution.

    Trivial ``x << x`` entries are dropped and repeated (AC-equal) bindings of
    a variable collapse to the first one.
    """
    if isinstance(c, Id):
        return {}
    if not is_land_substitution(c):
        raise ValueError(f"not an and-substitution: {c}")
    sigma: dict[str, Term] = {}
    for m in conjuncts(c):
        x, t = m.pattern.name, m.subject
        if isinstance(t, Var) and t.name == x:
            continue
        if x in sigma:
            if not ac_equal(sigma[x], t):
                raise ValueError(f"conflicting bindings for {x}: {sigma[x]} and {t}")
            continue
        sigma[x] = t
    # x << x next to x << t with t != x is a fail_gen redex
    for m in conjuncts(c):
        x, t = m.pattern.name, m.subject
        if isinstance(t, Var) and t.name == x and x in sigma:
            raise ValueError(f"conflicting bindings for {x}: {x} and {sigma[x]}")
    return sigma


# -- normal-form grammars ----------------------------------------------------
#
#   G ::= G and G | G or <T,T,N*> | x << T | I
#   K ::= K and K | x << T | <T,T,N*>
#   F ::= F or F | K
#   S ::= S and S | x << T
#   H ::= S or F | S | I or F | I


def _in_g(c) -> bool:
    match c:
        case Id():
            return True
        case Match():
            return is_binding(c)
        case And(items):
            return all(_in_g(i) for i in items)
        case Or(items):
            return _in_g(items[0]) and all(isinstance(i, Triplet) for i in items[1:])
    return False


def _in_k(c) -> bool:
    return all(is_binding(i) or isinstance(i, Triplet) for i in conjuncts(c))


def _in_f(c) -> bool:
    items = c.items if isinstance(c, Or) else (c,)
    return all(not isinstance(i, Or) and _in_k(i) for i in items)


def _in_s(c) -> bool:
    return is_land_substitution(c)


def _in_h(c) -> bool:
    if isinstance(c, Id) or _in_s(c):
        return True
    if isinstance(c, Or):
        head, rest = c.items[0], c.items[1:]
        return (isinstance(head, Id) or _in_s(head)) and all(_in_k(i) for i in rest)
    return False


GRAMMARS: dict[str, Callable[[Constraint], bool]] = {
    "G": _in_g,
    "K": _in_k,
    "F": _in_f,
    "S": _in_s,
    "H": _in_h,
}


def matches_grammar(c: Constraint, grammar: str) -> bool:
    try:
        check = GRAMMARS[grammar]
    except KeyError:
        raise ValueError(f"unknown grammar {grammar!r}; expected one of {sorted(GRAMMARS)}") from None
    return check(c)


def is_lazy_list(c: Constraint, force: Callable[[Constraint], Constraint]) -> bool:
    """Check the lazy-list shape of ``c`` and, recursively, of every forced tail.

    ``force`` maps a constraint to its normal form; it is applied to
    ``Next(tail)``. The walk is iterative, so long streams are fine.
    """
    while True:
        if isinstance(c, (Fail, Id)) or is_irreducible_substitution(c):
            return True
        if not isinstance(c, Or):
            return False
        head = c.items[0]
        if not (isinstance(head, Id) or is_irreducible_substitution(head)):
            return False
        c = force(Next(disj(*c.items[1:])))


# -- printing ------------------------------------------------------------------


def show(c: Constraint) -> str:
    match c:
        case Fail():
            return "F"
        case Id():
            return "I"
        case Match(p, s):
            return f"{p} ≪ {s}"
        case And(items):
            return " ∧ ".join(f"({show(i)})" if isinstance(i, Or) else show(i) for i in items)
        case Or(items):
            return " ∨ ".join(show(i) for i in items)
        case Next(body):
            return f"Next({show(body)})"
        case Triplet(t, u, s):
            return f"⟨{t}, {u}, {s}⟩"
    raise TypeError(f"not a constraint: {c!r}")
