"""Lazy lists of terms and strategy application on top of lazy AC-matching.

A :class:`TermList` is an explicit, immutable object::

    L ::= Empty | L :: L | t | C(t)

``C(t)`` (:class:`Pending`) is a suspended constraint applied to a term: its
elements are ``sigma(t)`` for each solution ``sigma`` still to be produced by
``NF(Next(C))``. Two more suspended forms keep strategy application lazy:
:class:`Applied` is ``[s] . L`` not yet reduced and :class:`Lifted` is a
decorated term waiting to be turned into a list.

Forcing is memoized per node, so a list can be traversed several times (the
tuple iterator of a decorated term needs that) without redoing work. Lists are
not safe to force from several threads at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .constraints import Constraint, Fail, Id, Match, Next, Or, disj, extract_substitution, is_irreducible_substitution
from .lazy import LazyMatcher, StreamExhausted
from .terms import Term, Var, flatten, replace_at, subst_apply, subterm_at, variables

_UNFORCED = object()


class TermList:
    __slots__ = ()

    def __iter__(self) -> Iterator[Term]:
        return iter_terms(self)


@dataclass(frozen=True, eq=False)
class Empty(TermList):
    def __repr__(self):
        return "⊥"


EMPTY = Empty()


@dataclass(frozen=True, eq=False)
class Leaf(TermList):
    term: Term

    def __repr__(self):
        return str(self.term)


@dataclass(frozen=True, eq=False)
class Concat(TermList):
    items: tuple
    _cell: object = field(default=_UNFORCED, repr=False, compare=False)

    def __repr__(self):
        return " :: ".join(map(repr, self.items))


@dataclass(frozen=True, eq=False)
class Pending(TermList):
    constraint: Constraint
    target: Term
    matcher: LazyMatcher | None = field(default=None, repr=False)
    _cell: object = field(default=_UNFORCED, repr=False, compare=False)

    def __repr__(self):
        return f"({self.constraint})({self.target})"


@dataclass(frozen=True, eq=False)
class Applied(TermList):
    strategy: "Strategy"
    operand: TermList
    matcher: LazyMatcher | None = field(default=None, repr=False)
    _cell: object = field(default=_UNFORCED, repr=False, compare=False)

    def __repr__(self):
        return f"[{self.strategy}]·({self.operand!r})"


@dataclass(frozen=True)
class DecoratedTerm:
    """A term with lazy lists of terms at pairwise incomparable positions."""

    term: Term
    positions: tuple
    lists: tuple

    def __post_init__(self):
        if len(self.positions) != len(self.lists):
            raise ValueError("one lazy list per decorated position")
        for i, p in enumerate(self.positions):
            subterm_at(self.term, p)
            for q in self.positions[i + 1 :]:
                if p[: len(q)] == q or q[: len(p)] == p:
                    raise ValueError(f"decorated positions {p} and {q} are nested")

    @property
    def k(self) -> int:
        return len(self.positions)


@dataclass(frozen=True, eq=False)
class Lifted(TermList):
    decorated: DecoratedTerm
    _cell: object = field(default=_UNFORCED, repr=False, compare=False)

    def __repr__(self):
        return f"↑{self.decorated.term}"


def concat(*parts: TermList) -> TermList:
    items = []
    for p in parts:
        if isinstance(p, Empty):
            continue
        items.extend(p.items if isinstance(p, Concat) else (p,))
    if not items:
        return EMPTY
    if len(items) == 1:
        return items[0]
    return Concat(tuple(items))


# -- strategies ------------------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    name: str | None = None

    def __post_init__(self):
        extra = set(variables(self.rhs)) - set(variables(self.lhs))
        if extra:
            raise ValueError(f"rule {self}: variables {sorted(extra)} of the right side are unbound")

    def __str__(self):
        return self.name or f"{self.lhs} -> {self.rhs}"


class Strategy:
    __slots__ = ()


@dataclass(frozen=True)
class Identity(Strategy):
    def __str__(self):
        return "id"


@dataclass(frozen=True)
class Failure(Strategy):
    def __str__(self):
        return "fail"


@dataclass(frozen=True)
class TopRule(Strategy):
    rule: Rule

    def __str__(self):
        return f"top({self.rule})"


@dataclass(frozen=True)
class Seq(Strategy):
    """``first ; second``: ``second`` is applied first, ``first`` to its results."""

    first: Strategy
    second: Strategy

    def __str__(self):
        return f"{self.first} ; {self.second}"


TRAVERSALS = ("lo", "li", "po", "pi")


@dataclass(frozen=True)
class Traverse(Strategy):
    kind: str
    rule: Rule

    def __post_init__(self):
        if self.kind not in TRAVERSALS:
            raise ValueError(f"unknown traversal {self.kind!r}")

    def __str__(self):
        return f"{self.kind}({self.rule})"


# -- forcing ---------------------------------------------------------------------


def _matcher(m: LazyMatcher | None) -> LazyMatcher:
    return m if m is not None else LazyMatcher()


def apply_constraint_to_term(c: Constraint, t: Term, matcher: LazyMatcher | None = None) -> TermList:
    """Apply a lazy-list normal form to ``t``: ``F(t)``, ``I(t)``, ``sigma(t)``, ``(sigma or C)(t)``."""
    if isinstance(c, Fail):
        return EMPTY
    if isinstance(c, Id):
        return Leaf(t)
    if isinstance(c, Or):
        head, tail = c.items[0], disj(*c.items[1:])
    else:
        head, tail = c, None
    if not (isinstance(head, Id) or is_irreducible_substitution(head)):
        raise ValueError(f"not a lazy list: {c}")
    first = Leaf(subst_apply(extract_substitution(head), t))
    if tail is None:
        return first
    return concat(first, Pending(tail, t, matcher))


def top_rewrite(rule: Rule, t: Term, matcher: LazyMatcher | None = None) -> TermList:
    """``(l << t)(r)``: the lazy list of results of ``rule`` at the root of ``t``."""
    m = _matcher(matcher)
    return apply_constraint_to_term(m.normal_form(Match(rule.lhs, t)), rule.rhs, m)


def uncons(lst: TermList):
    """``(head, rest)`` of a lazy list, or None when it is empty. Memoized per node."""
    cell = getattr(lst, "_cell", _UNFORCED)
    if cell is not _UNFORCED:
        return cell
    result = _uncons(lst)
    if hasattr(lst, "_cell"):
        object.__setattr__(lst, "_cell", result)
    return result


def _uncons(lst: TermList):
    match lst:
        case Empty():
            return None
        case Leaf(t):
            return t, EMPTY
        case Concat(items):
            for i, item in enumerate(items):
                got = uncons(item)
                if got is not None:
                    head, rest = got
                    return head, concat(rest, *items[i + 1 :])
            return None
        case Pending(c, t, m):
            mm = _matcher(m)
            return uncons(apply_constraint_to_term(mm.normal_form(Next(c)), t, mm))
        case Applied(s, operand, m):
            return uncons(_reduce(s, operand, m))
        case Lifted(d):
            return _uncons_lifted(d)
    raise TypeError(f"not a term list: {lst!r}")


def _reduce(s: Strategy, operand: TermList, m: LazyMatcher | None) -> TermList:
    """One reduction step of ``[s] . operand`` that exposes its structure."""
    match s:
        case Identity():
            return operand
        case Failure():
            return EMPTY
        case Seq(first, second):
            return applied(first, applied(second, operand, m), m)
    got = uncons(operand)
    if got is None:
        return EMPTY
    t, rest = got
    if isinstance(s, TopRule):
        here = top_rewrite(s.rule, t, m)
    else:
        here = apply_traversal(s.kind, s.rule, t, m)
    return concat(here, applied(s, rest, m))


def applied(s: Strategy, operand: TermList, matcher: LazyMatcher | None = None) -> TermList:
    if isinstance(operand, Empty) or isinstance(s, Failure):
        return EMPTY
    if isinstance(s, Identity):
        return operand
    return Applied(s, operand, matcher)


def _uncons_lifted(d: DecoratedTerm):
    if d.k == 0:
        return flatten(d.term), EMPTY
    firsts = [uncons(lst) for lst in d.lists]
    if any(f is None for f in firsts):
        return None
    s1, rest1 = firsts[0]
    p1 = d.positions[0]
    with_first = Lifted(DecoratedTerm(replace_at(d.term, p1, s1), d.positions[1:], d.lists[1:]))
    others = Lifted(DecoratedTerm(d.term, d.positions, (rest1,) + d.lists[1:]))
    return uncons(concat(with_first, others))


def lift_decorated(d: DecoratedTerm) -> TermList:
    """Lazy list of all instances of ``d.term`` with one element of each list plugged in.

    Tuples are enumerated in lexicographic order of element indices.
    """
    return Lifted(d)


# -- public operations ---------------------------------------------------------------


def apply_strategy(s: Strategy, operand: TermList | Term, matcher: LazyMatcher | None = None) -> TermList:
    """``[s] . operand`` with its first element computed: ``EMPTY`` or ``head :: rest``."""
    if not isinstance(operand, TermList):
        operand = Leaf(operand)
    lst = applied(s, operand, matcher)
    got = uncons(lst)
    if got is None:
        return EMPTY
    head, rest = got
    return concat(Leaf(head), rest)


def force_next_termlist(lst: TermList) -> TermList:
    """Force the leftmost suspended computation once.

    ``Next(L1 :: L2) = Next(L1) :: L2``, ``Next(t) = t``, ``Next(EMPTY) = EMPTY``
    and ``Next(C(t)) = NF(Next(C))(t)``. Suspended strategy applications and
    decorated terms are reduced to expose their first element.
    """
    match lst:
        case Empty() | Leaf():
            return lst
        case Concat(items):
            return concat(force_next_termlist(items[0]), *items[1:])
        case Pending(c, t, m):
            mm = _matcher(m)
            return apply_constraint_to_term(mm.normal_form(Next(c)), t, mm)
    got = uncons(lst)
    if got is None:
        return EMPTY
    head, rest = got
    return concat(Leaf(head), rest)


def termlist_head(lst: TermList) -> Term | None:
    got = uncons(lst)
    return None if got is None else got[0]


def termlist_next(lst: TermList) -> TermList:
    got = uncons(lst)
    if got is None:
        raise StreamExhausted("next on an empty term list")
    return got[1]


def iter_terms(lst: TermList) -> Iterator[Term]:
    while True:
        got = uncons(lst)
        if got is None:
            return
        head, lst = got
        yield head


def is_empty(lst: TermList) -> bool:
    return uncons(lst) is None


def apply_traversal(kind: str, rule: Rule, t: Term, matcher: LazyMatcher | None = None) -> TermList:
    """Apply ``rule`` at positions of ``t`` chosen by a traversal scheme.

    ``po`` tries the root, otherwise descends into *all* arguments in parallel;
    a leaf without a redex yields ``EMPTY``, so one redex-free argument empties
    the whole product. ``lo``/``li`` rewrite at the first position found
    (outermost/innermost, left to right). ``pi`` rewrites every argument that
    has a redex, leaving the others unchanged, and tries the root only when no
    argument has one.
    """
    m = matcher
    strat = Traverse(kind, rule)
    leaf = isinstance(t, Var) or not t.args

    def children():
        return [(i, applied(strat, Leaf(a), m)) for i, a in enumerate(t.args)]

    def decorate(found):
        return Lifted(DecoratedTerm(t, tuple((i,) for i, _ in found), tuple(lst for _, lst in found)))

    if kind in ("po", "lo"):
        here = top_rewrite(rule, t, m)
        if leaf or not is_empty(here):
            return here
        if kind == "po":
            return decorate(children())
        for i, lst in children():
            if not is_empty(lst):
                return decorate([(i, lst)])
        return EMPTY

    if leaf:
        return top_rewrite(rule, t, m)
    if kind == "li":
        for i, lst in children():
            if not is_empty(lst):
                return decorate([(i, lst)])
        return top_rewrite(rule, t, m)
    found = [(i, lst) for i, lst in children() if not is_empty(lst)]
    if found:
        return decorate(found)
    return top_rewrite(rule, t, m)
