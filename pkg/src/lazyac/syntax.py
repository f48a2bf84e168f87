"""Concrete syntax for terms, rules and strategies.

Terms use prefix notation ``f(t1, ..., tn)``; identifiers starting with an
uppercase letter are variables. AC symbols spelled with operator characters
(``+``, ``*``, ...) may also be written infix; later-declared operators bind
tighter, and parentheses group. ``a + b + c`` and ``+(a, +(b, c))`` both parse
to the flat ``+(a,b,c)``.

Rules: ``[name:] lhs -> rhs``. Strategies::

    S ::= id | fail | top(NAME) | lo(NAME) | li(NAME) | po(NAME) | pi(NAME) | S ; S

with ``;`` right-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .strategies import TRAVERSALS, Failure, Identity, Rule, Seq, Strategy, TopRule, Traverse
from .terms import App, Signature, SignatureError, Symbol, Term, Var, flatten

OPERATOR_CHARS = "+*&|^.@%~<>=!?/-"


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", offset: int = 0):
        line = text.count("\n", 0, offset) + 1
        column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "op", "punct", "end"
    text: str
    offset: int


_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*)|(?P<punct>[(),])|(?P<op>[%s]+))" % re.escape(OPERATOR_CHARS))


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            tokens.append(Token("end", "", pos))
            return tokens
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()


def is_operator(name: str) -> bool:
    return bool(name) and all(ch in OPERATOR_CHARS for ch in name)


class _TermParser:
    def __init__(self, text: str, sig: Signature, declare: bool):
        self.text = text
        self.sig = sig
        self.declare = declare
        self.tokens = tokenize(text)
        self.i = 0
        # infix operators, loosest first
        self.infix = [s.name for s in sig.ac_symbols if is_operator(s.name)]

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: Token | None = None):
        raise ParseError(message, self.text, (tok or self.tok).offset)

    def expect(self, text: str):
        if self.tok.text != text:
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        self.i += 1

    def parse(self) -> Term:
        t = self.expr(0)
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return flatten(t)

    def expr(self, level: int) -> Term:
        if level == len(self.infix):
            return self.atom()
        op = self.infix[level]
        args = [self.expr(level + 1)]
        while self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            args.append(self.expr(level + 1))
        if len(args) == 1:
            return args[0]
        return App(self.sig[op], tuple(args))

    def atom(self) -> Term:
        tok = self.tok
        if tok.text == "(":
            self.i += 1
            t = self.expr(0)
            self.expect(")")
            return t
        if tok.kind not in ("ident", "op"):
            self.fail(f"expected a term, found {tok.text or 'end of input'!r}")
        self.i += 1
        name = tok.text
        args = []
        if self.tok.text == "(":
            self.i += 1
            if self.tok.text != ")":
                args.append(self.expr(0))
                while self.tok.text == ",":
                    self.i += 1
                    args.append(self.expr(0))
            self.expect(")")
        elif tok.kind == "op":
            self.fail(f"operator {name!r} needs arguments", tok)
        if tok.kind == "ident" and name[0].isupper():
            if args:
                self.fail(f"variable {name} cannot take arguments", tok)
            return Var(name)
        return App(self.symbol(name, len(args), tok), tuple(args))

    def symbol(self, name: str, arity: int, tok: Token) -> Symbol:
        if name not in self.sig:
            if not self.declare:
                self.fail(f"unknown symbol {name!r}", tok)
            return self.sig.free(name, arity)
        sym = self.sig[name]
        if sym.ac and arity < 2 or not sym.ac and arity != sym.arity:
            expected = "at least 2" if sym.ac else str(sym.arity)
            self.fail(f"{name!r} expects {expected} arguments, got {arity}", tok)
        return sym


def parse_term(text: str, sig: Signature, declare: bool = False) -> Term:
    """Parse, arity-check and flatten a term.

    With ``declare=True`` unknown lowercase symbols are added to ``sig`` as
    free symbols with the arity of their first use.
    """
    try:
        return _TermParser(text, sig, declare).parse()
    except SignatureError as e:
        raise ParseError(str(e), text, 0) from None


def parse_rule(text: str, sig: Signature, declare: bool = False, name: str | None = None) -> Rule:
    m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:(?!-)", text)
    if m:
        name = m.group(1)
        text_body = text[m.end() :]
    else:
        text_body = text
    if "->" not in text_body:
        raise ParseError("expected 'lhs -> rhs'", text, len(text))
    lhs, rhs = text_body.split("->", 1)
    try:
        return Rule(parse_term(lhs, sig, declare), parse_term(rhs, sig, declare), name)
    except ValueError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(str(e), text, 0) from None


def parse_rules(text: str, sig: Signature, declare: bool = False) -> dict[str, Rule]:
    """Parse a rules file: one rule per line, ``#`` comments; unnamed rules get ``r<line>``."""
    out: dict[str, Rule] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rule = parse_rule(line, sig, declare, name=f"r{len(out) + 1}")
        except ParseError as e:
            raise ParseError(f"{e} (rules line {lineno})") from None
        if rule.name in out:
            raise ParseError(f"duplicate rule name {rule.name!r} (rules line {lineno})")
        out[rule.name] = rule
    return out


def parse_strategy(text: str, rules: dict[str, Rule]) -> Strategy:
    parts = [p.strip() for p in text.split(";")]
    strategies = [_parse_simple(p, rules, text) for p in parts]
    s = strategies[-1]
    for left in reversed(strategies[:-1]):
        s = Seq(left, s)
    return s


def _parse_simple(part: str, rules: dict[str, Rule], text: str) -> Strategy:
    if part == "id":
        return Identity()
    if part == "fail":
        return Failure()
    m = re.fullmatch(r"(top|lo|li|po|pi)\s*\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*\)", part)
    if not m:
        raise ParseError(f"cannot parse strategy {part!r}", text, max(text.find(part), 0))
    kind, name = m.groups()
    if name not in rules:
        raise ParseError(f"unknown rule {name!r}", text, text.find(name))
    if kind == "top":
        return TopRule(rules[name])
    assert kind in TRAVERSALS
    return Traverse(kind, rules[name])


def parse_signature(ac: str = "", free: str = "") -> Signature:
    """Build a signature from ``"+,*"`` and ``"f/2,g/1,a/0"`` specs."""
    sig = Signature()
    for item in filter(None, (s.strip() for s in ac.split(","))):
        name, _, minimum = item.partition("/")
        if minimum and minimum != "2":
            raise ParseError(f"AC symbol {name!r}: only minimum arity 2 is supported")
        sig.ac(name)
    for item in filter(None, (s.strip() for s in free.split(","))):
        name, sep, arity = item.partition("/")
        if not sep or not arity.isdigit():
            raise ParseError(f"free symbol {item!r} must be written name/arity")
        try:
            sig.free(name, int(arity))
        except SignatureError as e:
            raise ParseError(str(e)) from None
    return sig
