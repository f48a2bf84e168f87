"""Surjections [n] -> [k]: counting, lexicographic rank/unrank, term application.

Ranks are 1-based and follow lexicographic order of the value tuple
``(s(1), ..., s(n))``. For ``S(3, 2)`` that order is::

    (1,1,2) (1,2,1) (1,2,2) (2,1,1) (2,1,2) (2,2,1)

Counts are exact Python integers, so large arities cannot overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

from .terms import App, Term


class DomainError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Surjection:
    values: tuple
    k: int

    def __post_init__(self):
        if not self.values:
            raise DomainError("a surjection needs n >= 1")
        if set(self.values) != set(range(1, self.k + 1)):
            raise DomainError(f"{self.values} is not a surjection onto [{self.k}]")

    @classmethod
    def of(cls, *values: int) -> "Surjection":
        return cls(tuple(values), max(values))

    @property
    def n(self) -> int:
        return len(self.values)

    def preimage(self, i: int) -> list[int]:
        """1-based indices j with s(j) = i, increasing."""
        return [j for j, v in enumerate(self.values, 1) if v == i]


@lru_cache(maxsize=None)
def _covering(length: int, k: int, missing: int) -> int:
    # functions [length] -> [k] whose image contains `missing` fixed values
    return sum((-1) ** j * comb(missing, j) * (k - j) ** length for j in range(missing + 1))


def surjection_count(n: int, k: int) -> int:
    if not 1 <= k <= n:
        raise DomainError(f"no surjection count for n={n}, k={k}")
    return _covering(n, k, k)


def unrank(n: int, k: int, i: int) -> Surjection:
    total = surjection_count(n, k)
    if not 1 <= i <= total:
        raise DomainError(f"rank {i} outside [1, {total}]")
    values = []
    used = set()
    i -= 1
    for m in range(1, n + 1):
        for v in range(1, k + 1):
            missing = k - len(used | {v})
            c = _covering(n - m, k, missing)
            if i < c:
                values.append(v)
                used.add(v)
                break
            i -= c
    return Surjection(tuple(values), k)


def rank(s: Surjection) -> int:
    k, n = s.k, s.n
    r = 0
    used = set()
    for m, value in enumerate(s.values, 1):
        for v in range(1, value):
            r += _covering(n - m, k, k - len(used | {v}))
        used.add(value)
    return r + 1


def iter_surjections(n: int, k: int, start: int = 1) -> Iterator[Surjection]:
    for i in range(start, surjection_count(n, k) + 1):
        yield unrank(n, k, i)


def apply_surjection(s: Surjection, u: Term) -> tuple:
    """Regroup the arguments of the AC term ``u`` into ``s.k`` terms.

    Group ``i`` collects the arguments whose index maps to ``i``, in their
    original order; a singleton group is the argument itself.
    """
    if not isinstance(u, App) or not u.symbol.ac:
        raise DomainError(f"{u} is not an AC application")
    if len(u.args) != s.n:
        raise DomainError(f"surjection has domain [{s.n}] but {u} has {len(u.args)} arguments")
    groups = [[] for _ in range(s.k)]
    for arg, v in zip(u.args, s.values):
        groups[v - 1].append(arg)
    return tuple(g[0] if len(g) == 1 else App(u.symbol, tuple(g)) for g in groups)
