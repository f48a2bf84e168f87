"""Flat first-order terms over a signature with associative-commutative symbols.

Terms are immutable. An application of an AC symbol is variadic (at least two
arguments); a free symbol always carries exactly its declared arity. Most
functions here assume *flat* input: no argument of an AC application has the
same AC symbol at its root. :func:`flatten` establishes that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union


class SignatureError(ValueError):
    """Symbol declared twice, used with the wrong arity, or unknown."""


@dataclass(frozen=True, slots=True)
class Symbol:
    name: str
    arity: int | None = None
    ac: bool = False

    def __post_init__(self):
        if self.ac:
            if self.arity is not None:
                raise SignatureError(f"AC symbol {self.name!r} is variadic")
        elif self.arity is None or self.arity < 0:
            raise SignatureError(f"free symbol {self.name!r} needs an arity >= 0")

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    symbol: Symbol
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.symbol.name
        return f"{self.symbol.name}({','.join(map(str, self.args))})"

    @property
    def is_ac(self) -> bool:
        return self.symbol.ac


Term = Union[Var, App]
Substitution = dict  # variable name -> Term
Position = tuple  # path of 0-based argument indices


class Signature:
    """A set of symbols with unique names.

    >>> sig = Signature()
    >>> plus = sig.ac("+")
    >>> f = sig.free("f", 2)
    >>> str(sig("f", sig("a"), Var("x")))
    'f(a,x)'
    """

    def __init__(self, symbols=()):
        self._symbols: dict[str, Symbol] = {}
        for sym in symbols:
            self.add(sym)

    def add(self, sym: Symbol) -> Symbol:
        old = self._symbols.get(sym.name)
        if old is not None and old != sym:
            raise SignatureError(f"symbol {sym.name!r} already declared as {old!r}")
        self._symbols[sym.name] = sym
        return sym

    def ac(self, name: str) -> Symbol:
        return self.add(Symbol(name, None, True))

    def free(self, name: str, arity: int) -> Symbol:
        return self.add(Symbol(name, arity, False))

    def __getitem__(self, name: str) -> Symbol:
        try:
            return self._symbols[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._symbols

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self._symbols.values())

    def __len__(self):
        return len(self._symbols)

    @property
    def ac_symbols(self) -> list[Symbol]:
        return [s for s in self if s.ac]

    def __call__(self, name: str, *args: Term) -> Term:
        """Build the flattened application ``name(args...)``.

        Constants not yet declared are added with arity 0.
        """
        if name not in self._symbols and not args:
            self.free(name, 0)
        return flatten(App(self[name], tuple(args)))

    def __repr__(self):
        return f"Signature({list(self._symbols.values())!r})"


def check_arity(t: App) -> None:
    sym = t.symbol
    if sym.ac:
        if len(t.args) < 2:
            raise SignatureError(f"AC symbol {sym.name!r} needs at least 2 arguments, got {len(t.args)}")
    elif len(t.args) != sym.arity:
        raise SignatureError(f"{sym.name!r} expects {sym.arity} arguments, got {len(t.args)}")


def flatten(t: Term) -> Term:
    """Merge nested applications of the same AC symbol, keeping argument order."""
    if isinstance(t, Var):
        return t
    check_arity(t)
    args = tuple(flatten(a) for a in t.args)
    if t.symbol.ac and any(isinstance(a, App) and a.symbol == t.symbol for a in args):
        merged = []
        for a in args:
            if isinstance(a, App) and a.symbol == t.symbol:
                merged.extend(a.args)
            else:
                merged.append(a)
        args = tuple(merged)
    if args == t.args:
        return t
    return App(t.symbol, args)


def is_flat(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    for a in t.args:
        if t.symbol.ac and isinstance(a, App) and a.symbol == t.symbol:
            return False
        if not is_flat(a):
            return False
    return True


def ac_equal(t: Term, u: Term) -> bool:
    """Equality modulo AC of two flat terms.

    Arguments under an AC root are compared as multisets, elsewhere in order.
    """
    if t is u or t == u:
        return True
    if isinstance(t, Var) or isinstance(u, Var):
        return False
    if t.symbol != u.symbol or len(t.args) != len(u.args):
        return False
    if not t.symbol.ac:
        return all(ac_equal(a, b) for a, b in zip(t.args, u.args))
    # ac_equal is an equivalence, so greedy pairing is exact
    remaining = list(u.args)
    for a in t.args:
        for i, b in enumerate(remaining):
            if ac_equal(a, b):
                del remaining[i]
                break
        else:
            return False
    return True


def order_key(t: Term):
    """Total order on terms: variables first, then (name, arity, children)."""
    if isinstance(t, Var):
        return (0, t.name)
    return (1, t.symbol.name, len(t.args), tuple(order_key(a) for a in t.args))


def canonical(t: Term) -> Term:
    """AC-canonical representative: AC arguments sorted by :func:`order_key`.

    Two flat terms are AC-equal iff their canonical forms are identical. Only
    used to key sets of solutions; subject terms are never reordered.
    """
    if isinstance(t, Var) or not t.args:
        return t
    args = tuple(canonical(a) for a in t.args)
    if t.symbol.ac:
        args = tuple(sorted(args, key=order_key))
    return App(t.symbol, args)


def subst_apply(sigma: Mapping[str, Term], t: Term) -> Term:
    """Apply ``sigma`` to ``t`` and re-flatten the result."""
    if not sigma:
        return t

    def go(s):
        if isinstance(s, Var):
            return sigma.get(s.name, s)
        if not s.args:
            return s
        return App(s.symbol, tuple(go(a) for a in s.args))

    return flatten(go(t))


def count_ac_symbols(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return int(t.symbol.ac) + sum(count_ac_symbols(a) for a in t.args)


def size(t: Term) -> int:
    """Number of symbol and variable occurrences."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def variables(t: Term) -> list[str]:
    """Variable names in first-occurrence order."""
    seen: dict[str, None] = {}

    def go(s):
        if isinstance(s, Var):
            seen.setdefault(s.name)
        else:
            for a in s.args:
                go(a)

    go(t)
    return list(seen)


def symbols(t: Term) -> Iterator[Symbol]:
    if isinstance(t, App):
        yield t.symbol
        for a in t.args:
            yield from symbols(a)


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        t = t.args[i]
    return t


def replace_at(t: Term, pos: Position, s: Term) -> Term:
    """Replace the subterm at ``pos``. The result is *not* re-flattened."""
    if not pos:
        return s
    i, rest = pos[0], pos[1:]
    args = list(t.args)
    args[i] = replace_at(args[i], rest, s)
    return App(t.symbol, tuple(args))


def format_substitution(sigma: Mapping[str, Term]) -> str:
    return "{" + ", ".join(f"{x} -> {t}" for x, t in sigma.items()) + "}"


def check_compatible(*terms: Term) -> None:
    """Raise SignatureError if two symbols share a name but not a declaration."""
    seen: dict[str, Symbol] = {}
    for t in terms:
        for sym in symbols(t):
            old = seen.setdefault(sym.name, sym)
            if old != sym:
                raise SignatureError(f"symbol {sym.name!r} used as {old!r} and {sym!r}")
