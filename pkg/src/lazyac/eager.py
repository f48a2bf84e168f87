"""Reference backends that compute every solution at once.

:func:`eager_match` runs the eager rule system (all surjections expanded in
one disjunction, DNF, ``fail_gen``) followed by the post-processing that
turns the DNF into a set of substitutions. :func:`brute_force_match` is an
independent recursive enumerator that never builds constraints. Both are
exponential and meant for small instances.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .constraints import (
    FAIL,
    Constraint,
    Fail,
    Id,
    Match,
    Next,
    Or,
    Triplet,
    And,
    conj,
    disj,
    extract_substitution,
    has_conflict,
)
from .lazy import substitution_key
from .rules import match_rule
from .surjections import apply_surjection, iter_surjections
from .terms import Term, Var, ac_equal, check_compatible


class SolutionSet:
    """Substitutions compared as maps, with range terms taken modulo AC."""

    def __init__(self, substitutions: Iterable[dict] = ()):
        self._items: dict[frozenset, dict] = {}
        for sigma in substitutions:
            self.add(sigma)

    def add(self, sigma: dict) -> None:
        self._items.setdefault(substitution_key(sigma), dict(sigma))

    def __len__(self):
        return len(self._items)

    def __iter__(self) -> Iterator[dict]:
        return iter(self._items.values())

    def __contains__(self, sigma) -> bool:
        return substitution_key(sigma) in self._items

    def __eq__(self, other):
        if not isinstance(other, SolutionSet):
            return NotImplemented
        return self._items.keys() == other._items.keys()

    def keys(self) -> set:
        return set(self._items)

    def __repr__(self):
        from .terms import format_substitution

        return "SolutionSet([" + ", ".join(format_substitution(s) for s in self) + "])"


# -- eager rule system -----------------------------------------------------------
#
# A DNF is a list of disjuncts, each a list of atomic constraints. [] is F
# (F is neutral for "or" here), [[]] is I.


def _product(dnfs: list) -> list:
    """Distribute a conjunction of DNFs (E_DNF_1/2), pruning fail_gen disjuncts."""
    out = [[]]
    for d in dnfs:
        if not d:
            return []
        out = [left + right for left in out for right in d]
        out = [x for x in out if not has_conflict(x)]
        if not out:
            return []
    return out


def _eager(c: Constraint) -> list:
    match c:
        case Fail():
            return []
        case Id():
            return [[]]
        case Or(items):
            return [d for i in items for d in _eager(i)]
        case And(items):
            return _product([_eager(i) for i in items])
        case Match(p, s):
            rule = match_rule(c)
            if rule is None:
                return [[c]]
            if rule == "match":
                return _product([_eager(Match(a, b)) for a, b in zip(p.args, s.args)])
            if rule == "match_AC":
                out = []
                for surj in iter_surjections(len(s.args), len(p.args)):
                    alphas = apply_surjection(surj, s)
                    out.extend(_product([_eager(Match(a, b)) for a, b in zip(p.args, alphas)]))
                return out
            return []
        case Next() | Triplet():
            raise ValueError(f"not an eager constraint: {c}")
    raise TypeError(f"not a constraint: {c!r}")


def eager_normal_form(c: Constraint) -> Constraint:
    """Normal form of an eager constraint (no ``Next``, no triplets): ``F`` or a DNF."""
    dnf = _eager(c)
    if not dnf:
        return FAIL
    return disj(*(conj(*d) for d in dnf))


def post_process(c: Constraint) -> SolutionSet:
    """Turn an eager normal form into its set of substitutions (empty for ``F``)."""
    if isinstance(c, Fail):
        return SolutionSet()
    disjuncts = c.items if isinstance(c, Or) else (c,)
    return SolutionSet(extract_substitution(d) for d in disjuncts)


def eager_solve(c: Constraint) -> SolutionSet:
    return post_process(eager_normal_form(c))


def eager_match(pattern: Term, subject: Term) -> SolutionSet:
    check_compatible(pattern, subject)
    return eager_solve(Match(pattern, subject))


# -- brute force -----------------------------------------------------------------


def _bind(t: Term, u: Term, env: dict) -> Iterator[dict]:
    if isinstance(t, Var):
        bound = env.get(t.name)
        if bound is None:
            yield {**env, t.name: u}
        elif ac_equal(bound, u):
            yield env
        return
    if isinstance(u, Var) or t.symbol != u.symbol:
        return
    if not t.symbol.ac:
        yield from _bind_all(t.args, u.args, env)
        return
    if len(t.args) > len(u.args):
        return
    for surj in iter_surjections(len(u.args), len(t.args)):
        yield from _bind_all(t.args, apply_surjection(surj, u), env)


def _bind_all(ts, us, env: dict) -> Iterator[dict]:
    if not ts:
        yield env
        return
    for env2 in _bind(ts[0], us[0], env):
        yield from _bind_all(ts[1:], us[1:], env2)


def brute_force_match(pattern: Term, subject: Term) -> SolutionSet:
    """All matchers, by enumerating every surjection at every AC node."""
    check_compatible(pattern, subject)
    out = SolutionSet()
    for env in _bind(pattern, subject, {}):
        out.add({x: t for x, t in env.items() if not (isinstance(t, Var) and t.name == x)})
    return out

