from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from primecover.errors import DomainError, StructuralError, TheoremViolation
from primecover.groups import GroupSubset, Subgroup, enumerate_subgroups_of_index, make_group
from primecover.selfcheck import groups_up_to
from primecover.sumsets import (
    cosets_met,
    is_coset_union,
    iterated_sumset,
    kneser_audit,
    lambda_threshold,
    stabilizer,
    sumset,
)

Z5 = make_group([5])
Z6 = make_group([6])
Z8 = make_group([8])


def naive_sumset(A, B):
    G = A.group
    return G.subset({G.add(a, b) for a in A for b in B})


def test_sumset_examples():
    A = Z5.subset([2, 3])
    assert sumset(A, A).elements() == [0, 1, 4]
    assert sumset(A, Z5.empty()).is_empty()
    assert sumset(Z5.subset([0]), A) == A
    with pytest.raises(StructuralError):
        sumset(A, Z6.subset([1]))


def test_iterated_sumset_examples():
    assert iterated_sumset(Z5.subset([2, 3]), 3).elements() == [1, 2, 3, 4]
    assert iterated_sumset(Z5.whole(), 2).is_full()
    assert iterated_sumset(Z8.subset([1, 4, 7]), 2).elements() == [0, 2, 3, 5, 6]
    with pytest.raises(DomainError):
        iterated_sumset(Z5.subset([1]), 0)


def test_stabilizer_examples():
    assert stabilizer(Z6.subset([0, 1, 3, 4])).elements() == [0, 3]
    assert stabilizer(Z6.whole()).order == 6
    assert stabilizer(Z5.subset([0, 1, 4])).order == 1
    assert stabilizer(Z6.empty()).order == 6


def test_cosets_met_examples():
    trivial = Subgroup(Z5.subset([0]))
    assert cosets_met(Z5.subset([2, 3]), trivial) == 2
    G = make_group([2, 4])
    for H in enumerate_subgroups_of_index(G, 4):
        assert cosets_met(G.whole(), H) == 4
    assert cosets_met(Z6.subset([0, 1, 3, 4]), Subgroup(Z6.subset([0, 3]))) == 2


def test_is_coset_union_examples():
    C = Z6.subset([0, 1, 3, 4])
    assert is_coset_union(C, stabilizer(C))
    assert not is_coset_union(Z6.subset([0, 1]), Subgroup(Z6.subset([0, 3])))
    assert is_coset_union(Z6.empty(), Subgroup(Z6.subset([0, 3])))


def test_kneser_examples():
    a = kneser_audit(Z5.subset([2, 3]))
    assert (a.stabilizer.order, a.lam, a.bound, a.double_size, a.holds) == (1, 2, 3, 3, True)
    a = kneser_audit(Z8.subset([1, 4, 7]))
    assert (a.stabilizer.order, a.lam, a.bound, a.double_size) == (1, 3, 5, 5)
    S = Z8.subset([0, 2, 4, 6])
    a = kneser_audit(S)
    assert a.lam == 1 and a.stabilizer.membership == S and a.double_size == a.bound == 4
    with pytest.raises(DomainError):
        kneser_audit(Z5.empty())


def test_lambda_threshold_examples():
    assert lambda_threshold(Fraction(3, 8) + Fraction(1, 100), 5) == 3
    assert lambda_threshold(Fraction(13, 32), 5) == 3
    assert lambda_threshold(Fraction(2, 5) + Fraction(1, 100), 4) == 2
    with pytest.raises(DomainError):
        lambda_threshold(Fraction(1, 3), 5)


def test_lambda_threshold_boundary_included():
    # 1/(3*eta - 1) = 5 exactly: Y = 5 takes the +1 branch
    assert lambda_threshold(Fraction(2, 5), 5) == 3
    # Y = 8 = 1/(3*3/8 - 1)
    assert lambda_threshold(Fraction(3, 8), 8) == 4
    assert lambda_threshold(Fraction(3, 8), 11) == 5


def random_subset(G, rng, p=None):
    p = rng.uniform(0.05, 0.8) if p is None else p
    return G.subset_from_bool(rng.random(G.order) < p)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 9), min_size=1, max_size=3), st.integers(0, 10**6))
def test_sumset_matches_naive_and_is_commutative_associative(orders, seed):
    G = make_group(orders)
    rng = np.random.default_rng(seed)
    A, B, C = (random_subset(G, rng) for _ in range(3))
    assert sumset(A, B) == naive_sumset(A, B) == sumset(B, A)
    assert sumset(sumset(A, B), C) == sumset(A, sumset(B, C))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 9), min_size=1, max_size=3), st.integers(0, 10**6))
def test_stabilizer_is_subgroup_and_coset_union(orders, seed):
    G = make_group(orders)
    C = random_subset(G, np.random.default_rng(seed))
    H = stabilizer(C)
    assert H.order == sum(1 for g in range(G.order) if C.translate(g) == C)
    assert is_coset_union(C, H)


def test_kneser_and_follow_exhaustive_small():
    for G in groups_up_to(10):
        for bits in range(1, 1 << G.order):
            kneser_audit(GroupSubset(G, bits))


def test_speindices_consequence_small():
    # |A| >= eta*|G| and A meets >= lambda(Y) cosets of every index-Y subgroup
    # (Y = index of stab(2A)) forces 3A = G
    for G in groups_up_to(12):
        n = G.order
        for bits in range(1, 1 << n):
            A = GroupSubset(G, bits)
            eta = Fraction(len(A), n)
            if eta <= Fraction(1, 3):
                continue
            H = stabilizer(sumset(A, A))
            Y = H.index
            if Y == 1:
                assert iterated_sumset(A, 3).is_full()
                continue
            if all(cosets_met(A, K) >= lambda_threshold(eta, Y) for K in enumerate_subgroups_of_index(G, Y)):
                assert iterated_sumset(A, 3).is_full(), A


def test_kneser_fault_is_reported(monkeypatch):
    from primecover.groups import FiniteAbelianGroup

    orig = FiniteAbelianGroup.translate
    monkeypatch.setattr(FiniteAbelianGroup, "translate", lambda self, bits, g: orig(self, bits, g) & ~1)
    with pytest.raises(TheoremViolation) as e:
        kneser_audit(Z5.subset([2, 3]))
    assert e.value.check == "kneser_audit"
