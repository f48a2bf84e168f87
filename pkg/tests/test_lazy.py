import random

import pytest

import lazyac.lazy as lazy
from lazyac import fuzz
from lazyac.constraints import FAIL, ID, Fail, Match, Next, Or, Triplet, conj, disj, is_lazy_list
from lazyac.lazy import (
    BudgetExceeded,
    LazyMatcher,
    SolutionStream,
    StreamExhausted,
    lazy_normal_form,
    match_lazy,
    normalize_r3_down,
    normalize_r12,
    replay,
    stream_head,
    stream_next,
    unique,
)
from lazyac.rules import R1, R2, normalize_random
from lazyac.surjections import surjection_count
from lazyac.terms import App, Signature, Var, ac_equal, subst_apply
from oracles import all_surjections, same_mod_ac


def show_all(stream):
    return [{x: str(t) for x, t in s.items()} for s in stream]


@pytest.fixture
def m(T):
    return lambda p, s: Match(T(p), T(s))


class TestR12:
    def test_arity_excess(self, m):
        assert normalize_r12(m("+(X1,X2,X3)", "+(a,b)")) == FAIL

    def test_symbol_clash(self, m):
        assert normalize_r12(m("g(X)", "f(a,b)")) == FAIL

    def test_first_surjection(self, m, T):
        got = normalize_r12(m("+(X,Y)", "+(a,b)"))
        assert got == disj(conj(m("X", "a"), m("Y", "b")), Triplet(T("+(X,Y)"), T("+(a,b)"), 2))

    def test_small_step_agrees(self, m):
        c = m("+(X,Y)", "+(a,b)")
        traced = LazyMatcher(trace=True)
        assert traced.normalize_r12(c) == normalize_r12(c)
        assert [s.rule for s in traced.steps] == ["match_AC", "match_surj_next"]

    def test_var_clash(self, m):
        assert normalize_r12(m("f(a,b)", "Y")) == FAIL

    def test_variable_subjects_bind(self, m):
        assert show_all(match_lazy(Var("X"), Var("Y"))) == [{"X": "Y"}]
        assert normalize_r12(m("g(X)", "g(Y)")) == m("X", "Y")

    def test_rule_sets(self):
        assert "fail_gen" in R1 and "next_or" in R2 and not R1 & R2

    def test_fail_under_next_activates_tail(self, m, T):
        tail = disj(conj(m("X", "a"), Triplet(T("+(Y,Z)"), T("+(b,c,d)"), 3)), Triplet(T("+(X,Y)"), T("+(a,b)"), 2))
        c = Next(disj(FAIL, tail))
        assert normalize_r12(c) == normalize_r12(Next(tail))
        for seed in range(20):
            assert normalize_random(c, random.Random(seed)) == normalize_r12(Next(tail))


class TestR3:
    def test_distribution(self, m):
        a, b, c = m("X", "a"), m("Y", "b"), m("Z", "c")
        assert normalize_r3_down(conj(disj(a, b), c)) == disj(conj(a, c), conj(b, c))

    def test_no_disjunction(self, m):
        a, b = m("X", "a"), m("Y", "b")
        assert normalize_r3_down(conj(a, b)) == conj(a, b)

    def test_head_first_order(self, m):
        a1, a2, b1, b2 = m("X", "a"), m("X", "b"), m("Y", "c"), m("Y", "d")
        got = normalize_r3_down(conj(disj(a1, a2), disj(b1, b2)))
        assert got == disj(conj(a1, b1), conj(a1, b2), conj(a2, b1), conj(a2, b2))


class TestNormalForm:
    def test_ground_identity(self, m):
        assert lazy_normal_form(m("a", "a")) == ID

    def test_nonlinear_failure(self, m):
        assert lazy_normal_form(m("+(X,X)", "+(a,b)")) == FAIL

    def test_free_and_ac(self, T):
        stream = match_lazy(T("f(X, +(Y,Z))"), T("f(a, +(b,c))"))
        assert isinstance(stream.current, Or)
        assert show_all(stream) == [{"X": "a", "Y": "b", "Z": "c"}, {"X": "a", "Y": "c", "Z": "b"}]

    def test_sat_iterations_are_counted(self, T):
        matcher = LazyMatcher()
        matcher.match(T("*(+(X,Y), +(Z,W))"), T("*(+(a,b), +(c,d))"))
        assert matcher.stats.iterations >= 2  # a product of two streams needs the DNF phase


class TestStream:
    def test_variable_pattern(self, T):
        assert show_all(match_lazy(T("X"), T("+(a,b)"))) == [{"X": "+(a,b)"}]

    def test_two_variables(self, T):
        assert show_all(match_lazy(T("+(X,Y)"), T("+(a,b)"))) == [{"X": "a", "Y": "b"}, {"X": "b", "Y": "a"}]

    def test_groups(self, T):
        sols = show_all(match_lazy(T("+(X,Y)"), T("+(a,b,c)")))
        assert sols[0] == {"X": "+(a,b)", "Y": "c"}
        assert len(sols) == 6

    def test_head_of_fail_and_id(self):
        matcher = LazyMatcher()
        assert stream_head(SolutionStream(FAIL, matcher)) is None
        assert stream_head(SolutionStream(ID, matcher)) == {}

    def test_next_of_id_exhausts(self):
        s = stream_next(SolutionStream(ID, LazyMatcher()))
        assert s.exhausted
        with pytest.raises(StreamExhausted):
            stream_next(s)

    def test_last_surjection(self, T, m):
        c = disj(conj(m("X", "a"), m("Y", "b")), Triplet(T("+(X,Y)"), T("+(a,b)"), 2))
        s = SolutionStream(c, LazyMatcher())
        assert {x: str(t) for x, t in stream_head(s).items()} == {"X": "a", "Y": "b"}
        s = stream_next(s)
        assert {x: str(t) for x, t in stream_head(s).items()} == {"X": "b", "Y": "a"}
        assert stream_next(s).exhausted

    def test_duplicates_are_emitted(self, T, sig):
        pattern, subject = T("+(X,X)"), T("+(a,a,b,b)")
        sols = list(match_lazy(pattern, subject))
        # oracle: surjections whose two groups are equal multisets
        args = subject.args
        expected = sum(
            1
            for s in all_surjections(4, 2)
            if sorted(str(args[j]) for j in range(4) if s[j] == 1) == sorted(str(args[j]) for j in range(4) if s[j] == 2)
        )
        assert expected == 4
        assert len(sols) == expected
        assert all(str(s["X"]) == "+(a,b)" for s in sols)
        assert len(list(unique(sols))) == 1

    def test_take_and_iterate_twice(self, T):
        stream = match_lazy(T("+(X,Y,Z)"), T("+(a,b,c)"))
        assert stream.take(2) == list(stream)[:2]
        assert len(list(stream)) == 6

    def test_head_of_malformed_state(self, m):
        with pytest.raises(ValueError):
            SolutionStream(m("f(X)", "f(a)"), LazyMatcher()).head()


def corpus(count, seed, bounds=fuzz.Bounds()):
    rng = random.Random(seed)
    sig = fuzz.default_signature()
    return [fuzz.random_instance(rng, sig, bounds) for _ in range(count)]


class TestProperties:
    @pytest.mark.parametrize("seed", range(3))
    def test_soundness(self, seed):
        for pattern, subject in corpus(100, seed):
            for sigma in match_lazy(pattern, subject):
                assert ac_equal(subst_apply(sigma, pattern), subject)
                assert same_mod_ac(subst_apply(sigma, pattern), subject)

    def test_trace_replay(self):
        """Each normalization along a drain replays from its own trace and equals the fast result."""
        for pattern, subject in corpus(60, 11):
            fast = LazyMatcher().match(pattern, subject)
            start = Match(pattern, subject)
            for state in fast.states():
                traced = LazyMatcher(trace=True)
                assert traced.normal_form(start) == state.current
                assert replay(start, traced.steps) == state.current
                if state.exhausted or not isinstance(state.current, Or):
                    break
                start = Next(disj(*state.current.items[1:]))

    def test_trace_replays_to_normal_form(self, T):
        for p, s in [("+(X,Y)", "+(a,b,c)"), ("f(X, +(Y,Z))", "f(a, +(b,c))"), ("*(+(X,Y), +(X,Z))", "*(+(a,b), +(a,c))")]:
            matcher = LazyMatcher(trace=True)
            c0 = Match(T(p), T(s))
            nf = matcher.normal_form(c0)
            assert replay(c0, matcher.steps) == nf
            assert all(step.rule in R1 | R2 | {"R3"} for step in matcher.steps)

    def test_replay_detects_tampering(self, T):
        matcher = LazyMatcher(trace=True)
        c0 = Match(T("+(X,Y)"), T("+(a,b)"))
        matcher.normal_form(c0)
        with pytest.raises(AssertionError):
            replay(Match(T("+(X,Y)"), T("+(a,c)")), matcher.steps)

    def test_random_orders_agree(self):
        for pattern, subject in corpus(20, 5, fuzz.Bounds(6, 8, 4, 3)):
            c = Next(disj(Match(pattern, subject), Match(subject, pattern)))
            expected = normalize_r12(c)
            for seed in range(10):
                assert normalize_random(c, random.Random(seed)) == expected

    def test_every_state_is_a_lazy_list(self):
        for pattern, subject in corpus(50, 9):
            matcher = LazyMatcher()
            for state in matcher.match(pattern, subject).states():
                assert is_lazy_list(state.current, matcher.normal_form)


class TestLaziness:
    @staticmethod
    def problem(n, k):
        sig = Signature()
        plus = sig.ac("+")
        xs = tuple(Var(f"X{i}") for i in range(k))
        subject = App(plus, tuple(App(sig.free(f"a{i}", 0)) for i in range(n)))
        return App(plus, xs), subject

    @pytest.mark.parametrize("n,k", [(4, 2), (6, 3), (8, 8), (9, 4)])
    def test_one_rank_per_solution(self, n, k):
        pattern, subject = self.problem(n, k)
        matcher = LazyMatcher()
        stream = matcher.match(pattern, subject)
        assert matcher.stats.ranks_expanded == 1
        for produced in range(2, min(30, surjection_count(n, k)) + 1):
            stream = stream.next()
            assert not stream.exhausted
            assert matcher.stats.ranks_expanded == produced


class TestBudget:
    def test_exceeding_the_budget_raises(self, T):
        before = lazy.budget_exhaustions
        try:
            with pytest.raises(BudgetExceeded):
                LazyMatcher(budget=1).match(T("+(X,Y,Z)"), T("+(a,b,c,d)"))
            assert lazy.budget_exhaustions == before + 1
        finally:
            # a deliberately tiny budget is not a termination failure of the corpus
            lazy.budget_exhaustions = before

    def test_budget_is_per_normalization(self, T):
        matcher = LazyMatcher(budget=5)
        stream = matcher.match(T("+(X,Y,Z)"), T("+(a,b,c,d,e)"))
        assert len(list(stream)) == 150
        assert matcher.stats.steps > 5


class TestFaultInjection:
    def test_flipped_guard_leaves_next_stuck(self, T):
        broken = LazyMatcher(next_or_guard=lambda head: isinstance(head, Fail))
        stream = broken.match(T("f(+(X,Y), +(Z,W))"), T("f(+(a,b,c), +(d,e))"))
        assert stream.head() is not None
        nxt = stream.next()
        assert isinstance(nxt.current, Next)
        with pytest.raises(ValueError):
            nxt.head()
