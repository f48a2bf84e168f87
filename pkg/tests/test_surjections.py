import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_surjections, multiset
from lazyac.surjections import (
    DomainError,
    Surjection,
    apply_surjection,
    iter_surjections,
    rank,
    surjection_count,
    unrank,
)
from lazyac.terms import App

SMALL = [(n, k) for n in range(1, 8) for k in range(1, n + 1)]


@pytest.mark.parametrize("n,k", SMALL)
def test_count_matches_enumeration(n, k):
    assert surjection_count(n, k) == len(all_surjections(n, k))


@pytest.mark.parametrize("n,k,expected", [(1, 1, 1), (5, 5, 120), (3, 2, 6), (6, 3, 540)])
def test_count_values(n, k, expected):
    assert surjection_count(n, k) == expected


def test_count_is_exact_beyond_64_bits():
    assert surjection_count(18, 18) == math.factorial(18)
    assert surjection_count(25, 25) == math.factorial(25)


@pytest.mark.parametrize("n,k", [(2, 3), (3, 0), (0, 0), (-1, 1)])
def test_count_domain(n, k):
    with pytest.raises(DomainError):
        surjection_count(n, k)


@pytest.mark.parametrize("n,k", SMALL)
def test_unrank_enumerates_in_lexicographic_order(n, k):
    expected = all_surjections(n, k)
    got = [unrank(n, k, i).values for i in range(1, len(expected) + 1)]
    assert got == expected
    assert [rank(unrank(n, k, i)) for i in range(1, len(expected) + 1)] == list(range(1, len(expected) + 1))


@pytest.mark.parametrize(
    "n,k,i,values",
    [(3, 2, 1, (1, 1, 2)), (3, 2, 6, (2, 2, 1)), (2, 2, 2, (2, 1))],
)
def test_unrank_values(n, k, i, values):
    assert unrank(n, k, i).values == values


@pytest.mark.parametrize("values,expected", [((1, 2), 1), ((1, 1, 2), 1), ((2, 1, 1), 4)])
def test_rank_values(values, expected):
    assert rank(Surjection.of(*values)) == expected


def test_unrank_out_of_range():
    with pytest.raises(DomainError):
        unrank(3, 2, 0)
    with pytest.raises(DomainError):
        unrank(3, 2, 7)


def test_non_surjective_rejected():
    with pytest.raises(DomainError):
        Surjection((1, 1, 3), 3)
    with pytest.raises(DomainError):
        Surjection((), 0)


def test_iter_from_rank():
    assert [s.values for s in iter_surjections(3, 2, start=5)] == [(2, 1, 2), (2, 2, 1)]


def test_preimage():
    assert Surjection.of(2, 2, 3, 1).preimage(2) == [1, 2]


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))).flatmap(
    lambda nk: st.tuples(st.just(nk[0]), st.just(nk[1]), st.integers(1, surjection_count(*nk)))
))
def test_rank_inverts_unrank_larger(nki):
    n, k, i = nki
    s = unrank(n, k, i)
    assert s.n == n and s.k == k
    assert rank(s) == i


class TestApply:
    def test_documented_example(self, T):
        u = T("+(u1,u2,u3,u4)")
        got = apply_surjection(Surjection.of(2, 2, 3, 1), u)
        assert [str(x) for x in got] == ["u4", "+(u1,u2)", "u3"]

    def test_identity(self, T):
        u = T("+(a,b,c,d)")
        assert apply_surjection(Surjection.of(1, 2, 3, 4), u) == u.args

    def test_grouping(self, T):
        got = apply_surjection(Surjection.of(1, 1, 2), T("+(a,b,c)"))
        assert [str(x) for x in got] == ["+(a,b)", "c"]

    def test_arity_mismatch(self, T):
        with pytest.raises(DomainError):
            apply_surjection(Surjection.of(1, 2), T("+(a,b,c)"))
        with pytest.raises(DomainError):
            apply_surjection(Surjection.of(1, 2), T("f(a,b)"))

    @pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (5, 5), (6, 2)])
    def test_partition_properties(self, sig, n, k):
        atoms = [App(sig.free(f"w{j}", 0)) for j in range(1, n + 1)]
        u = App(sig["+"], tuple(atoms))
        for s in iter_surjections(n, k):
            alphas = apply_surjection(s, u)
            assert len(alphas) == k
            expanded = []
            for i, alpha in enumerate(alphas, 1):
                group = list(alpha.args) if alpha.symbol == sig["+"] else [alpha]
                expanded += group
                # original indices stay increasing inside each group
                assert [atoms.index(x) + 1 for x in group] == s.preimage(i)
            assert multiset(expanded) == multiset(atoms)
