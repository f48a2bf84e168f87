"""Lazy AC-matching: solutions computed one substitution at a time.

A matching problem ``p << s`` is reduced to a *lazy list*: ``F``, ``I``, an
and-substitution, or ``sigma or C`` where ``sigma`` is the first solution and
``C`` a suspended remainder. Forcing ``Next(C)`` yields the next lazy list.

Normalization alternates two saturations until nothing changes:

1. the matching rules and the ``Next`` rules (R1 + R2), run here by a
   recursive inner-first normalizer that counts every rule it fires;
2. the DNF rules under the head-first strategy (R3 down), which keeps the
   first disjunct built from the heads of all disjunctions.

With ``trace=True`` the R1 + R2 phase is run by small-step rewriting
(:mod:`lazyac.rules`) and every step is recorded, so a trace can be replayed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from . import rules
from .constraints import (
    FAIL,
    ID,
    And,
    Constraint,
    Fail,
    Id,
    Match,
    Next,
    Or,
    Triplet,
    conj,
    disj,
    extract_substitution,
    has_conflict,
    is_irreducible_substitution,
)
from .surjections import apply_surjection, surjection_count, unrank
from .terms import Term, canonical, check_compatible

DEFAULT_BUDGET = 10_000_000

# normalizations that ran out of budget, process-wide; the termination
# theorems say this stays 0
budget_exhaustions = 0


class BudgetExceeded(RuntimeError):
    """Normalization took more rule applications than the budget allows."""


class StreamExhausted(LookupError):
    pass


@dataclass(frozen=True, slots=True)
class Step:
    rule: str
    position: tuple
    before: Constraint
    after: Constraint
    index: int | None = None


@dataclass
class Stats:
    steps: int = 0
    ranks_expanded: int = 0
    iterations: int = 0
    rules: dict = field(default_factory=dict)


class LazyMatcher:
    """Normalizer for delayed matching constraints.

    ``budget`` bounds rule applications per call of :meth:`normal_form`.
    ``next_or_guard`` decides when ``Next(C1 or C2)`` may become
    ``Next(C1) or C2``; the default blocks it only for a literal ``F``. It is
    a parameter so test harnesses can inject a fault.
    """

    def __init__(self, budget: int = DEFAULT_BUDGET, trace: bool = False, next_or_guard=None):
        self.budget = budget
        self.trace = trace
        self.guard = next_or_guard or rules.default_next_or_guard
        self.stats = Stats()
        self.steps: list[Step] = []
        self._spent = 0

    # -- bookkeeping ---------------------------------------------------------

    def _tick(self, rule: str, n: int = 1):
        self._spent += n
        self.stats.steps += n
        self.stats.rules[rule] = self.stats.rules.get(rule, 0) + n
        if self._spent > self.budget:
            global budget_exhaustions
            budget_exhaustions += 1
            raise BudgetExceeded(f"more than {self.budget} rule applications")

    # -- R1 + R2 -------------------------------------------------------------

    def normalize_r12(self, c: Constraint) -> Constraint:
        if self.trace:
            return self._small_step(c)
        return self._nf(c)

    def _nf(self, c: Constraint) -> Constraint:
        match c:
            case Match(p, s):
                return self._match(p, s)
            case And(items):
                return self._conj([self._nf(i) for i in items])
            case Or(items):
                return self._disj([self._nf(i) for i in items])
            case Next(body):
                return self._next(self._nf(body))
        return c

    def _match(self, p: Term, s: Term) -> Constraint:
        rule = rules.match_rule(Match(p, s))
        if rule is None:
            return Match(p, s)
        self._tick(rule)
        if rule == "match_AC":
            return self._expand(Triplet(p, s, 1))
        if rule == "match":
            return self._match_all(zip(p.args, s.args))
        return FAIL

    def _match_all(self, pairs) -> Constraint:
        parts = []
        for a, b in pairs:
            part = self._match(a, b)
            if isinstance(part, Fail):
                return FAIL  # absorbing for and
            parts.append(part)
        return self._conj(parts)

    def _conj(self, parts: list) -> Constraint:
        c = conj(*parts)
        if isinstance(c, And) and has_conflict(c.items):
            self._tick("fail_gen")
            return FAIL
        return c

    def _disj(self, items: list) -> Constraint:
        """Disjunction of normal forms; a failed non-last disjunct activates the rest."""
        out = []
        rest = list(itertools.chain.from_iterable(i.items if isinstance(i, Or) else (i,) for i in items))
        while rest:
            head = rest.pop(0)
            if isinstance(head, Fail) and rest:
                self._tick("fail_next")
                nxt = self._next(disj(*rest))
                rest = list(nxt.items) if isinstance(nxt, Or) else [nxt]
                continue
            out.append(head)
        return disj(*out)

    def _next(self, c: Constraint) -> Constraint:
        """Normal form of ``Next(c)`` for ``c`` already in R1 + R2 normal form."""
        match c:
            case Fail():
                self._tick("next_fail")
                return FAIL
            case Id():
                self._tick("next_id")
                return ID
            case Match():
                self._tick("next_basic")
                return c
            case And(items):
                self._tick("next_and")
                return self._conj([self._next(i) for i in items])
            case Triplet():
                return self._expand(c)
            case Or(items):
                items = list(items)
                while True:
                    if isinstance(items[0], Fail):
                        # fail_next below the Next: Next(F or C) -> Next(Next(C))
                        self._tick("fail_next")
                        return self._next(self._next(disj(*items[1:])))
                    if not self.guard(items[0]):
                        return Next(Or(tuple(items)))
                    self._tick("next_or")
                    head = self._next(items[0])
                    if not isinstance(head, Fail):
                        return self._disj([head, *items[1:]])
                    self._tick("fail_next")
                    items = items[1:]
                    if len(items) == 1:
                        return self._next(items[0])
            case Next():
                return Next(c)
        raise TypeError(f"not a constraint: {c!r}")

    def _expand(self, c: Triplet) -> Constraint:
        """Normal form of ``Next(<t, u, s>)``; consecutive failed ranks are skipped in a loop."""
        t, u, s = c.pattern, c.subject, c.rank
        n, k = len(u.args), len(t.args)
        total = surjection_count(n, k)
        while True:
            alphas = apply_surjection(unrank(n, k, s), u)
            self.stats.ranks_expanded += 1
            body = self._match_all(zip(t.args, alphas))
            if s == total:
                self._tick("match_surj_last")
                return body
            self._tick("match_surj_next")
            if isinstance(body, Fail):
                self._tick("fail_next")
                s += 1
                continue
            return self._disj([body, Triplet(t, u, s + 1)])

    def _small_step(self, c: Constraint) -> Constraint:
        while True:
            found = rules.redexes(c, self.guard)
            if not found:
                return c
            redex = _innermost(found)
            old = rules.subconstraint(c, redex.position)
            new = rules.contract(old, redex.rule, redex.index)
            self._tick(redex.rule)
            if redex.rule.startswith("match_surj"):
                self.stats.ranks_expanded += 1
            self.steps.append(Step(redex.rule, redex.position, old, new, redex.index))
            c = rules.replace(c, redex.position, new)

    # -- R3 down -------------------------------------------------------------

    def normalize_r3(self, c: Constraint) -> Constraint:
        """DNF under the head-first strategy.

        ``(A1 or ... or Am) and B`` becomes ``(A1 and B) or ((A2 or ...) and B)``
        after ``B`` itself is in DNF, so disjuncts come out in lexicographic
        order of the chosen heads.
        """
        return disj(*(conj(*d) for d in _dnf(c)))

    # -- driver --------------------------------------------------------------

    def normal_form(self, c: Constraint) -> Constraint:
        self._spent = 0
        while True:
            self.stats.iterations += 1
            c = self.normalize_r12(c)
            if not _needs_dnf(c):
                return c
            after = self.normalize_r3(c)
            if self.trace:
                self.steps.append(Step("R3", (), c, after))
            c = after

    def match(self, pattern: Term, subject: Term) -> "SolutionStream":
        check_compatible(pattern, subject)
        return SolutionStream(self.normal_form(Match(pattern, subject)), self)


def _innermost(found: list) -> rules.Redex:
    for r in found:
        if not any(o.position[: len(r.position)] == r.position and o.position != r.position for o in found):
            return r
    return found[0]


def _dnf(c: Constraint) -> list:
    match c:
        case Or(items):
            return [d for i in items for d in _dnf(i)]
        case And(items):
            return [[x for part in combo for x in part] for combo in itertools.product(*(_dnf(i) for i in items))]
        case Next(body) if _needs_dnf(body):
            return [[Next(disj(*(conj(*d) for d in _dnf(body))))]]
    return [[c]]


def _needs_dnf(c: Constraint) -> bool:
    match c:
        case And(items):
            return any(isinstance(i, Or) or _needs_dnf(i) for i in items)
        case Or(items):
            return any(_needs_dnf(i) for i in items)
        case Next(body):
            return _needs_dnf(body)
    return False


def replay(initial: Constraint, steps: list[Step], matcher: LazyMatcher | None = None) -> Constraint:
    """Re-run a recorded trace from ``initial``; each step is checked against its record."""
    m = matcher or LazyMatcher()
    c = initial
    for step in steps:
        if step.rule == "R3":
            if c != step.before:
                raise AssertionError(f"trace diverged before R3 step: {c} != {step.before}")
            c = m.normalize_r3(c)
        else:
            old = rules.subconstraint(c, step.position)
            if old != step.before:
                raise AssertionError(f"trace diverged at {step.rule}{step.position}: {old} != {step.before}")
            c = rules.replace(c, step.position, rules.contract(old, step.rule, step.index))
    return c


class SolutionStream:
    """A lazy list of substitutions.

    ``current`` is a lazy-list normal form. :meth:`head` reads the first
    substitution, :meth:`next` forces the suspended remainder and returns a
    new stream; the stream itself is never mutated.
    """

    __slots__ = ("current", "matcher")

    def __init__(self, current: Constraint, matcher: LazyMatcher):
        self.current = current
        self.matcher = matcher

    @property
    def exhausted(self) -> bool:
        return isinstance(self.current, Fail)

    def _split(self) -> tuple[Constraint, Constraint | None]:
        c = self.current
        if isinstance(c, Or):
            return c.items[0], disj(*c.items[1:])
        return c, None

    def head(self) -> dict | None:
        if self.exhausted:
            return None
        first, _ = self._split()
        if not (isinstance(first, Id) or is_irreducible_substitution(first)):
            raise ValueError(f"stream state is not a lazy list: {self.current}")
        return extract_substitution(first)

    def next(self) -> "SolutionStream":
        if self.exhausted:
            raise StreamExhausted("next() on an exhausted solution stream")
        _, tail = self._split()
        if tail is None:
            return SolutionStream(FAIL, self.matcher)
        return SolutionStream(self.matcher.normal_form(Next(tail)), self.matcher)

    def states(self) -> Iterator["SolutionStream"]:
        """This stream and every successor, ending with the exhausted one."""
        s = self
        while True:
            yield s
            if s.exhausted:
                return
            s = s.next()

    def __iter__(self) -> Iterator[dict]:
        for s in self.states():
            if not s.exhausted:
                yield s.head()

    def take(self, n: int) -> list[dict]:
        return list(itertools.islice(self, n))

    def __repr__(self):
        return f"SolutionStream({self.current})"


def unique(solutions) -> Iterator[dict]:
    """Drop substitutions equal modulo AC to one already produced."""
    seen = set()
    for sigma in solutions:
        key = substitution_key(sigma)
        if key not in seen:
            seen.add(key)
            yield sigma


def substitution_key(sigma: dict) -> frozenset:
    return frozenset((x, canonical(t)) for x, t in sigma.items())


_default = LazyMatcher()


def normalize_r12(c: Constraint) -> Constraint:
    return _default.normalize_r12(c)


def normalize_r3_down(c: Constraint) -> Constraint:
    return _default.normalize_r3(c)


def lazy_normal_form(c: Constraint, matcher: LazyMatcher | None = None) -> Constraint:
    return (matcher or _default).normal_form(c)


def match_lazy(pattern: Term, subject: Term, matcher: LazyMatcher | None = None) -> SolutionStream:
    return (matcher or LazyMatcher()).match(pattern, subject)


def stream_head(s: SolutionStream) -> dict | None:
    return s.head()


def stream_next(s: SolutionStream) -> SolutionStream:
    return s.next()
