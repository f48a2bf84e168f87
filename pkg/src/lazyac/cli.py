"""Command line interface: ``lazyac match|rewrite|compare|bench``.

Exit codes: 0 solutions found / success, 1 no solution, 2 usage or parse
error, 3 the differential comparison found a disagreement.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import fuzz
from .lazy import LazyMatcher, unique
from .rules import default_next_or_guard
from .strategies import Leaf, applied, iter_terms
from .syntax import ParseError, parse_rule, parse_rules, parse_signature, parse_strategy, parse_term
from .terms import App, Signature, SignatureError, Var, canonical, format_substitution

EXIT_OK, EXIT_NONE, EXIT_USAGE, EXIT_DISAGREE = 0, 1, 2, 3


@dataclass
class SessionConfig:
    signature: Signature
    declare: bool = True  # unknown symbols are declared on first use
    rules_path: str | None = None
    budget: int = 10_000_000
    dedup: bool = False
    limit: int | None = None
    fmt: str = "text"
    seed: int = 0
    trace: bool = False


def _config(args) -> SessionConfig:
    return SessionConfig(
        signature=parse_signature(args.ac, args.free or ""),
        declare=args.free is None,
        rules_path=args.rules,
        budget=args.budget,
        dedup=args.dedup,
        limit=args.limit,
        fmt=args.format,
        seed=args.seed,
        trace=args.trace,
    )


class _Emitter:
    def __init__(self, fmt: str, out):
        self.fmt = fmt
        self.out = out or sys.stdout
        self.count = 0
        self.last = time.perf_counter()

    def emit(self, text: str, payload_key: str, payload):
        now = time.perf_counter()
        micros = int((now - self.last) * 1e6)
        self.last = now
        self.count += 1
        if self.fmt == "records":
            record = {"index": self.count, payload_key: payload, "micros_since_previous": micros}
            print(json.dumps(record), file=self.out, flush=True)
        else:
            print(text, file=self.out, flush=True)


def _limited(items, limit):
    for i, item in enumerate(items):
        if limit is not None and i >= limit:
            return
        yield item


def _print_trace(matcher: LazyMatcher):
    for step in matcher.steps:
        print(f"{step.rule} @{list(step.position)}: {step.before}  ~>  {step.after}", file=sys.stderr)
    print(f"# sat iterations: {matcher.stats.iterations}, rule applications: {matcher.stats.steps}", file=sys.stderr)


def cmd_match(pattern: str, subject: str, config: SessionConfig, out=None) -> int:
    sig = config.signature
    p = parse_term(pattern, sig, config.declare)
    s = parse_term(subject, sig, config.declare)
    matcher = LazyMatcher(budget=config.budget, trace=config.trace)
    solutions = iter(matcher.match(p, s))
    if config.dedup:
        solutions = unique(solutions)
    emitter = _Emitter(config.fmt, out)
    for sigma in _limited(solutions, config.limit):
        emitter.emit(format_substitution(sigma), "substitution", {x: str(t) for x, t in sigma.items()})
    if config.trace:
        _print_trace(matcher)
    return EXIT_OK if emitter.count else EXIT_NONE


def load_rules(config: SessionConfig, inline: list[str] = ()) -> dict:
    rules = {}
    if config.rules_path:
        rules.update(parse_rules(Path(config.rules_path).read_text(), config.signature, config.declare))
    for i, text in enumerate(inline, len(rules) + 1):
        rule = parse_rule(text, config.signature, config.declare, name=f"r{i}")
        rules[rule.name] = rule
    return rules


def cmd_rewrite(strategy: str, subject: str, config: SessionConfig, inline_rules=(), out=None) -> int:
    rules = load_rules(config, inline_rules)
    strat = parse_strategy(strategy, rules)
    t = parse_term(subject, config.signature, config.declare)
    matcher = LazyMatcher(budget=config.budget, trace=config.trace)
    terms = iter_terms(applied(strat, Leaf(t), matcher))
    if config.dedup:
        terms = _unique_terms(terms)
    emitter = _Emitter(config.fmt, out)
    for u in _limited(terms, config.limit):
        emitter.emit(str(u), "term", str(u))
    if config.trace:
        _print_trace(matcher)
    return EXIT_OK if emitter.count else EXIT_NONE


def _unique_terms(terms):
    seen = set()
    for t in terms:
        key = canonical(t)
        if key not in seen:
            seen.add(key)
            yield t


def cmd_compare(
    config: SessionConfig, instances: int = 500, bounds: fuzz.Bounds | None = None, fault: str | None = None, out=None
) -> int:
    def factory():
        if fault == "next_or":
            return LazyMatcher(budget=config.budget, next_or_guard=lambda head: not default_next_or_guard(head))
        return LazyMatcher(budget=config.budget)

    out = out or sys.stdout
    report = fuzz.run_compare(instances, config.seed, bounds or fuzz.Bounds(), factory)
    for original, shrunk in report.disagreements:
        print(f"DISAGREEMENT {original.describe()}", file=out)
        print(f"  shrunk: {shrunk.describe()}", file=out)
        print(f"  reproduce: lazyac match '{shrunk.pattern}' '{shrunk.subject}'", file=out)
    print(f"{len(report.disagreements)} disagreements in {report.instances} instances (seed {report.seed})", file=out)
    return EXIT_OK if report.ok else EXIT_DISAGREE


def bench(n: int, k: int, count: int | None, budget: int = 10_000_000) -> dict:
    """Stream ``count`` solutions (all if None) of ``X1+...+Xk << a1+...+an`` and time them."""
    sig = Signature()
    plus = sig.ac("+")
    consts = [App(sig.free(f"a{i}", 0)) for i in range(1, n + 1)]
    xs = [Var(f"X{i}") for i in range(1, k + 1)]
    pattern = App(plus, tuple(xs)) if k > 1 else xs[0]
    subject = App(plus, tuple(consts)) if n > 1 else consts[0]
    matcher = LazyMatcher(budget=budget)
    stamps = []
    start = time.perf_counter()
    stream = matcher.match(pattern, subject)
    solutions = 0
    while not stream.exhausted and (count is None or solutions < count):
        stream.head()
        stamps.append(time.perf_counter())
        solutions += 1
        if count is not None and solutions == count:
            break
        stream = stream.next()
    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    mean = statistics.fmean(gaps) if gaps else 0.0
    std = statistics.pstdev(gaps) if len(gaps) > 1 else 0.0
    return {
        "n": n,
        "k": k,
        "solutions": solutions,
        "ranks_expanded": matcher.stats.ranks_expanded,
        "first_s": (stamps[0] - start) if stamps else None,
        "total_s": (stamps[-1] - start) if stamps else 0.0,
        "mean_s": mean,
        "median_s": statistics.median(gaps) if gaps else 0.0,
        "std_s": std,
        "cv": (std / mean) if mean else 0.0,
    }


BENCH_FIELDS = ("n", "k", "solutions", "ranks_expanded", "first_s", "total_s", "mean_s", "median_s", "std_s", "cv")


def cmd_bench(n: int, k: int, count: int | None, config: SessionConfig, out=None) -> int:
    if not 1 <= k <= n:
        raise ParseError(f"bench needs n >= k >= 1, got n={n}, k={k}")
    out = out or sys.stdout
    result = bench(n, k, count, config.budget)
    if config.fmt == "records":
        print(json.dumps({f: result[f] for f in BENCH_FIELDS}), file=out)
    else:
        print(",".join(BENCH_FIELDS), file=out)
        print(",".join(_csv(result[f]) for f in BENCH_FIELDS), file=out)
    return EXIT_OK


def _csv(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _count(text: str) -> int | None:
    if text == "all":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("count must be positive or 'all'")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ac", default="+,*", help='AC symbols, e.g. "+,*" (default: %(default)s)')
    common.add_argument("--free", default=None, help='free symbols, e.g. "f/2,g/1,a/0"; if given, no others are allowed')
    common.add_argument("--rules", default=None, metavar="FILE", help="rules file: one '[name:] lhs -> rhs' per line")
    common.add_argument("--limit", type=int, default=None, metavar="N", help="stop after N results")
    common.add_argument("--dedup", action="store_true", help="drop results equal modulo AC to earlier ones")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=10_000_000, help="rule applications per normalization")
    common.add_argument("--format", choices=("text", "records"), default="text")
    common.add_argument("--trace", action="store_true", help="print every rule application to stderr")

    parser = argparse.ArgumentParser(prog="lazyac", description="Lazy AC-matching and AC-rewriting.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", parents=[common], help="stream the solutions of PATTERN << SUBJECT")
    p.add_argument("pattern")
    p.add_argument("subject")

    p = sub.add_parser("rewrite", parents=[common], help="stream the results of a strategy on a term")
    p.add_argument("strategy")
    p.add_argument("subject")
    p.add_argument("--rule", action="append", default=[], help="inline rule, may be repeated")

    p = sub.add_parser("compare", parents=[common], help="differential test: lazy vs eager vs brute force")
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--max-arity", type=int, default=4)
    p.add_argument("--max-pattern", type=int, default=9)
    p.add_argument("--max-subject", type=int, default=14)
    p.add_argument("--max-vars", type=int, default=4)
    p.add_argument("--inject-fault", choices=("next_or",), default=None, help="self-check: break the engine on purpose")

    p = sub.add_parser("bench", parents=[common], help="time the solutions of X1+...+Xk << a1+...+an")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--count", type=_count, default=100, help="solutions to stream, or 'all' (default: 100)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
        match args.command:
            case "match":
                return cmd_match(args.pattern, args.subject, config)
            case "rewrite":
                return cmd_rewrite(args.strategy, args.subject, config, args.rule)
            case "compare":
                bounds = fuzz.Bounds(args.max_pattern, args.max_subject, args.max_arity, args.max_vars)
                return cmd_compare(config, args.instances, bounds, args.inject_fault)
            case "bench":
                return cmd_bench(args.n, args.k, args.count, config)
    except (ParseError, SignatureError, OSError) as e:
        print(f"lazyac: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
