"""Single-step rewriting with the matching rules (R1) and the Next rules (R2).

A redex is addressed by a :class:`Redex`: the path to a constraint node
(indices into ``And``/``Or`` items, ``0`` for the body of ``Next``), the rule
name, and for ``fail_next`` the index of the failed disjunct. Rebuilding after
a step goes through :func:`conj`/:func:`disj`, so the result stays flat.

The fast normalizer in :mod:`lazyac.lazy` does not use this module; it exists
for traces, trace replay, and random-order confluence checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator

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
    has_conflict,
    is_binding,
)
from .surjections import apply_surjection, surjection_count, unrank
from .terms import Var

R1 = frozenset({"match_AC", "match", "match_AC_fail", "match_fail", "fail_gen", "var_clash"})
R2 = frozenset(
    {"fail_next", "next_fail", "next_id", "next_basic", "next_and", "next_or", "match_surj_next", "match_surj_last"}
)

Guard = Callable[[Constraint], bool]


def default_next_or_guard(head: Constraint) -> bool:
    # syntactic: only the literal F blocks next_or
    return not isinstance(head, Fail)


@dataclass(frozen=True, slots=True)
class Redex:
    position: tuple
    rule: str
    index: int | None = None


def match_rule(c: Match) -> str | None:
    """Name of the R1 rule that applies to the matching problem ``c``, if any."""
    t, u = c.pattern, c.subject
    if isinstance(t, Var):
        return None
    if isinstance(u, Var):
        return "var_clash"
    if t.symbol != u.symbol:
        return "match_fail"
    if t.symbol.ac:
        return "match_AC" if len(t.args) <= len(u.args) else "match_AC_fail"
    return "match"


def expand_triplet(c: Triplet) -> tuple[Constraint, Constraint | None]:
    """Matching problems for surjection ``c.rank`` and the follow-up triplet (None if last)."""
    t, u, s = c.pattern, c.subject, c.rank
    n, k = len(u.args), len(t.args)
    alphas = apply_surjection(unrank(n, k, s), u)
    body = conj(*(Match(ti, ai) for ti, ai in zip(t.args, alphas)))
    if s < surjection_count(n, k):
        return body, Triplet(t, u, s + 1)
    return body, None


def node_redexes(c: Constraint, guard: Guard = default_next_or_guard) -> Iterator[Redex]:
    match c:
        case Match():
            rule = match_rule(c)
            if rule:
                yield Redex((), rule)
        case And(items):
            if has_conflict(items):
                yield Redex((), "fail_gen")
        case Or(items):
            for i, item in enumerate(items[:-1]):
                if isinstance(item, Fail):
                    yield Redex((), "fail_next", i)
        case Next(body):
            match body:
                case Fail():
                    yield Redex((), "next_fail")
                case Id():
                    yield Redex((), "next_id")
                case Match() if is_binding(body):
                    yield Redex((), "next_basic")
                case And():
                    yield Redex((), "next_and")
                case Or(items) if guard(items[0]):
                    yield Redex((), "next_or")
                case Triplet(t, u, s):
                    last = s == surjection_count(len(u.args), len(t.args))
                    yield Redex((), "match_surj_last" if last else "match_surj_next")


def redexes(c: Constraint, guard: Guard = default_next_or_guard) -> list[Redex]:
    """All R1/R2 redexes in ``c``, in pre-order (outer before inner, left to right)."""
    out = list(node_redexes(c, guard))
    match c:
        case And(items) | Or(items):
            for i, item in enumerate(items):
                out.extend(Redex((i,) + r.position, r.rule, r.index) for r in redexes(item, guard))
        case Next(body):
            out.extend(Redex((0,) + r.position, r.rule, r.index) for r in redexes(body, guard))
    return out


def contract(c: Constraint, rule: str, index: int | None = None) -> Constraint:
    """Apply ``rule`` at the root of ``c``."""
    match rule:
        case "var_clash" | "match_fail" | "match_AC_fail" | "fail_gen" | "next_fail":
            return FAIL
        case "match":
            return conj(*(Match(a, b) for a, b in zip(c.pattern.args, c.subject.args)))
        case "match_AC":
            return Next(Triplet(c.pattern, c.subject, 1))
        case "fail_next":
            items = c.items
            return disj(*items[:index], Next(disj(*items[index + 1 :])))
        case "next_id":
            return ID
        case "next_basic":
            return c.body
        case "next_and":
            return conj(*(Next(i) for i in c.body.items))
        case "next_or":
            head, *rest = c.body.items
            return disj(Next(head), *rest)
        case "match_surj_next":
            body, tail = expand_triplet(c.body)
            return disj(body, tail)
        case "match_surj_last":
            body, _ = expand_triplet(c.body)
            return body
    raise ValueError(f"unknown rule {rule!r}")


def subconstraint(c: Constraint, position: tuple) -> Constraint:
    for i in position:
        c = c.body if isinstance(c, Next) else c.items[i]
    return c


def replace(c: Constraint, position: tuple, new: Constraint) -> Constraint:
    if not position:
        return new
    i, rest = position[0], position[1:]
    match c:
        case Next(body):
            return Next(replace(body, rest, new))
        case And(items):
            return conj(*items[:i], replace(items[i], rest, new), *items[i + 1 :])
        case Or(items):
            return disj(*items[:i], replace(items[i], rest, new), *items[i + 1 :])
    raise ValueError(f"no position {position} in {c}")


def rewrite(c: Constraint, redex: Redex) -> Constraint:
    old = subconstraint(c, redex.position)
    return replace(c, redex.position, contract(old, redex.rule, redex.index))


def normalize_random(
    c: Constraint, rng: random.Random, guard: Guard = default_next_or_guard, budget: int = 100_000
) -> Constraint:
    """R1 + R2 normal form, contracting a uniformly random redex at every step."""
    for _ in range(budget):
        found = redexes(c, guard)
        if not found:
            return c
        c = rewrite(c, rng.choice(found))
    raise RuntimeError(f"no normal form within {budget} steps")
