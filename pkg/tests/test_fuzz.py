import random
from collections import Counter

from lazyac import fuzz
from lazyac.constraints import Fail
from lazyac.lazy import LazyMatcher
from lazyac.terms import Var, count_ac_symbols, is_flat, size, symbols, variables


def test_instances_respect_bounds():
    rng = random.Random(0)
    sig = fuzz.default_signature()
    bounds = fuzz.Bounds()
    seen_solutions = seen_var_subject = 0
    for _ in range(400):
        p, s = fuzz.random_instance(rng, sig, bounds)
        assert is_flat(p) and is_flat(s)
        assert size(p) <= bounds.max_pattern and size(s) <= bounds.max_subject
        assert fuzz.max_ac_arity(p) <= bounds.max_arity and fuzz.max_ac_arity(s) <= bounds.max_arity
        assert len(variables(p)) <= bounds.max_vars
        assert len({x for x in symbols(p) if x.ac} | {x for x in symbols(s) if x.ac}) <= 2
        seen_var_subject += bool(variables(s))
        seen_solutions += bool(fuzz.three_way(p, s).brute)
    # the generator must exercise both outcomes and variables in subjects
    assert 100 < seen_solutions < 400
    assert seen_var_subject > 0


def test_instances_include_nonlinear_and_nested_ac():
    rng = random.Random(1)
    sig = fuzz.default_signature()
    pairs = [fuzz.random_instance(rng, sig) for _ in range(300)]
    assert any(_nonlinear(p) for p, _ in pairs)
    assert any(count_ac_symbols(p) >= 2 for p, _ in pairs)


def _nonlinear(t):
    counts = Counter()

    def walk(u):
        if isinstance(u, Var):
            counts[u.name] += 1
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return any(c > 1 for c in counts.values())


def test_three_way_agrees_on_simple_case(T):
    outcome = fuzz.three_way(T("+(X,Y)"), T("+(a,b,c)"))
    assert outcome.agree and len(outcome.lazy) == 6
    assert "lazy=6 eager=6 brute=6" in outcome.describe()


def test_engine_exception_is_a_disagreement(T):
    broken = lambda: LazyMatcher(next_or_guard=lambda head: isinstance(head, Fail))  # noqa: E731
    outcome = fuzz.three_way(T("f(+(X,Y), +(Z,W))"), T("f(+(a,b,c), +(d,e))"), broken)
    assert not outcome.agree and "raised" in outcome.error


def test_shrinking_keeps_the_failure(T):
    def fails(p, s):
        return size(s) >= 3 and "g" in str(s)

    start = T("f(+(a,b,g(c)), *(c,d))")
    p, s = fuzz.shrink(T("f(X, Y)"), start, fails)
    assert fails(p, s)
    assert size(s) < size(start) and size(p) == 1


def test_compare_report_shrinks_disagreements():
    broken = lambda: LazyMatcher(next_or_guard=lambda head: isinstance(head, Fail))  # noqa: E731
    report = fuzz.run_compare(60, seed=0, matcher_factory=broken)
    assert not report.ok
    for original, shrunk in report.disagreements:
        assert not shrunk.agree
        assert size(shrunk.pattern) + size(shrunk.subject) <= size(original.pattern) + size(original.subject)
