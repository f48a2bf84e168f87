"""Random matching instances and the three-way differential check.

Every instance is solved by the lazy stream (drained, deduplicated), the
eager rule system and the brute-force enumerator; the three solution sets must
be equal. A disagreement is shrunk greedily before it is reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .eager import SolutionSet, brute_force_match, eager_match
from .lazy import LazyMatcher
from .terms import App, Signature, Term, Var, flatten, size, subst_apply

VARIABLES = ("X", "Y", "Z", "W")
CONSTANTS = ("a", "b", "c", "d")


def default_signature() -> Signature:
    sig = Signature()
    sig.ac("+")
    sig.ac("*")
    sig.free("f", 2)
    sig.free("g", 1)
    for c in CONSTANTS:
        sig.free(c, 0)
    return sig


@dataclass
class Bounds:
    max_pattern: int = 9  # symbols and variables in the pattern
    max_subject: int = 14
    max_arity: int = 5  # of any AC application
    max_vars: int = 4


def max_ac_arity(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    own = len(t.args) if t.symbol.ac else 0
    return max([own] + [max_ac_arity(a) for a in t.args])


def _random_term(rng: random.Random, sig: Signature, budget: int, arity: int, leaves: list) -> Term:
    """Random flat-able term with at most ``budget`` symbols."""
    if budget <= 1 or rng.random() < 0.35:
        return rng.choice(leaves)
    choices = ["+", "*", "g"] + (["f"] if budget >= 3 else [])
    name = rng.choice(choices)
    sym = sig[name]
    if sym.ac:
        n = rng.randint(2, max(2, min(arity, budget - 1)))
    else:
        n = sym.arity
    args = []
    left = budget - 1
    for i in range(n):
        share = max(1, left // (n - i))
        sub = _random_term(rng, sig, share, arity, leaves)
        left -= size(sub)
        args.append(sub)
    return App(sym, tuple(args))


def _shuffle_ac(rng: random.Random, t: Term) -> Term:
    if isinstance(t, Var) or not t.args:
        return t
    args = [_shuffle_ac(rng, a) for a in t.args]
    if t.symbol.ac:
        rng.shuffle(args)
    return App(t.symbol, tuple(args))


def random_instance(rng: random.Random, sig: Signature, bounds: Bounds = Bounds()) -> tuple[Term, Term]:
    """A random (pattern, subject) pair within ``bounds``.

    Most subjects are AC-shuffled instances of the pattern, so that matching
    succeeds often; the rest are unrelated random terms.
    """
    names = list(VARIABLES[: bounds.max_vars])
    consts = [App(sig[c]) for c in CONSTANTS]
    while True:
        pvars = [Var(x) for x in rng.sample(names, rng.randint(1, len(names)))]
        pattern = flatten(_random_term(rng, sig, bounds.max_pattern, bounds.max_arity, pvars + consts[:2]))
        if size(pattern) > bounds.max_pattern or max_ac_arity(pattern) > bounds.max_arity:
            continue
        if rng.random() < 0.75:
            sigma = {x: flatten(_random_term(rng, sig, rng.randint(1, 3), 3, consts)) for x in names}
            if rng.random() < 0.1:
                del sigma[rng.choice(names)]  # leave a variable in the subject
            subject = _shuffle_ac(rng, subst_apply(sigma, pattern))
        else:
            subject = flatten(_random_term(rng, sig, bounds.max_subject, bounds.max_arity, consts))
        if size(subject) <= bounds.max_subject and max_ac_arity(subject) <= bounds.max_arity:
            return pattern, subject


@dataclass
class Outcome:
    pattern: Term
    subject: Term
    lazy: SolutionSet | None
    eager: SolutionSet | None
    brute: SolutionSet | None
    error: str | None = None

    @property
    def agree(self) -> bool:
        return self.error is None and self.lazy == self.eager == self.brute

    def describe(self) -> str:
        if self.error:
            return f"{self.pattern} << {self.subject}: {self.error}"
        return (
            f"{self.pattern} << {self.subject}: lazy={len(self.lazy)} eager={len(self.eager)} "
            f"brute={len(self.brute)} solutions"
        )


def three_way(pattern: Term, subject: Term, matcher_factory: Callable[[], LazyMatcher] = LazyMatcher) -> Outcome:
    brute = brute_force_match(pattern, subject)
    eager = eager_match(pattern, subject)
    try:
        lazy = SolutionSet(matcher_factory().match(pattern, subject))
    except Exception as e:  # a crashing engine is a disagreement, not a harness error
        return Outcome(pattern, subject, None, eager, brute, f"lazy engine raised {type(e).__name__}: {e}")
    return Outcome(pattern, subject, lazy, eager, brute)


def _smaller(t: Term) -> Iterator[Term]:
    """One-step reductions of ``t``: subterms, constants, dropped AC arguments."""
    if isinstance(t, Var):
        return
    for a in t.args:
        yield a
    if t.symbol.ac and len(t.args) > 2:
        for i in range(len(t.args)):
            yield App(t.symbol, t.args[:i] + t.args[i + 1 :])
    for i, a in enumerate(t.args):
        for b in _smaller(a):
            yield flatten(App(t.symbol, t.args[:i] + (b,) + t.args[i + 1 :]))


def shrink(pattern: Term, subject: Term, fails: Callable[[Term, Term], bool], limit: int = 500) -> tuple[Term, Term]:
    """Greedy shrinking while ``fails(pattern, subject)`` stays true."""
    tries = 0
    improved = True
    while improved and tries < limit:
        improved = False
        candidates = [(p, subject) for p in _smaller(pattern)] + [(pattern, s) for s in _smaller(subject)]
        for p, s in candidates:
            tries += 1
            if fails(p, s):
                pattern, subject = p, s
                improved = True
                break
            if tries >= limit:
                break
    return pattern, subject


@dataclass
class CompareReport:
    seed: int
    instances: int
    log: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def run_compare(
    instances: int = 500,
    seed: int = 0,
    bounds: Bounds = Bounds(),
    matcher_factory: Callable[[], LazyMatcher] = LazyMatcher,
    sig: Signature | None = None,
) -> CompareReport:
    rng = random.Random(seed)
    sig = sig or default_signature()
    report = CompareReport(seed, instances)
    for _ in range(instances):
        pattern, subject = random_instance(rng, sig, bounds)
        report.log.append(f"{pattern} << {subject}")
        outcome = three_way(pattern, subject, matcher_factory)
        if not outcome.agree:
            p, s = shrink(pattern, subject, lambda p, s: not three_way(p, s, matcher_factory).agree)
            report.disagreements.append((outcome, three_way(p, s, matcher_factory)))
    return report
