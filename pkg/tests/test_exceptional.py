import json
from fractions import Fraction
from math import gcd

import pytest

from primecover.errors import DomainError, HypothesisError, LimitError
from primecover.exceptional import (
    ExceptionalCertificate,
    brute_force_exceptional,
    canonical_dilation,
    certificate_failures,
    certify,
    classify_exceptional,
    compare_with_published_table,
    exceptional_table,
    feasible_indices,
    search_exceptional,
    table_csv,
    trouble_index_report,
    verify_certificate,
)
from primecover.fixtures import MOD71, MOD71_HALF, PUBLISHED_TABLE
from primecover.groups import GroupSubset, make_group
from primecover.selfcheck import groups_up_to
from primecover.sumsets import iterated_sumset

# sets found by classifying every subset of Z/l
BRUTE_ORACLE = {
    5: [(1, 4), (2, 3)],
    8: [(1, 4, 7), (3, 4, 5)],
    12: [(2, 3, 9, 10)],
    13: [(1, 5, 8, 12), (2, 3, 10, 11), (4, 6, 7, 9)],
    14: [(1, 4, 7, 10, 13), (2, 3, 7, 11, 12), (5, 6, 7, 8, 9)],
}
EMPTY = (3, 4, 6, 7, 9, 10, 15)
# symmetric search counts {size: number of sets}
SEARCH_COUNTS = {
    17: {6: 8}, 18: {6: 3}, 19: {6: 9}, 20: {6: 5, 7: 4}, 21: {6: 9}, 22: {7: 5}, 23: {8: 11},
    24: {7: 6, 8: 2}, 25: {8: 10}, 26: {7: 6, 8: 12, 9: 6}, 27: {8: 9}, 28: {8: 25, 9: 6}, 29: {8: 21, 10: 14},
}


def cyc(n, elems):
    return make_group([n]).subset(elems)


def test_classify_examples():
    d = classify_exceptional(cyc(5, [2, 3]))
    assert not d.covers and d.triple.elements() == [1, 2, 3, 4]
    assert classify_exceptional(cyc(7, [1, 2, 6])).covers
    d = classify_exceptional(cyc(8, [1, 4, 7]))
    assert not d.covers and d.certificate.size == 3


def test_classify_hypothesis_errors():
    with pytest.raises(HypothesisError) as e:
        classify_exceptional(cyc(7, [1]))
    assert e.value.hypothesis == "union_covers"
    with pytest.raises(HypothesisError) as e:
        # A | 2A = Z/4 but 2A = Z/4 has full stabilizer
        classify_exceptional(cyc(4, [0, 1, 2, 3]))
    assert e.value.hypothesis == "double_stabilizer_trivial"


def test_search_examples():
    assert {c.size for c in search_exceptional(8)} == {3}
    assert [c.elements for c in search_exceptional(5)] == [(1, 4), (2, 3)]
    assert search_exceptional(7) == []
    with pytest.raises(LimitError):
        search_exceptional(81)
    with pytest.raises(DomainError):
        search_exceptional(1)


def test_search_matches_brute_force_oracle():
    for ell, sets in BRUTE_ORACLE.items():
        assert sorted(c.elements for c in search_exceptional(ell)) == sets
    for ell in EMPTY:
        assert search_exceptional(ell) == []


def test_restricted_search_sound_up_to_12():
    for ell in range(2, 13):
        brute = [c.elements for c in brute_force_exceptional(ell)]
        if ell == 2:
            # {1} in Z/2: 4A = {0} is allowed since |G| = 2
            assert brute == [(1,)]
            continue
        assert brute == [c.elements for c in search_exceptional(ell)], ell


def test_search_counts_up_to_29():
    for ell, counts in SEARCH_COUNTS.items():
        got = {}
        for c in search_exceptional(ell):
            got[c.size] = got.get(c.size, 0) + 1
        assert got == counts, ell


def test_every_search_certificate_verifies():
    for ell in range(3, 30):
        for c in search_exceptional(ell):
            assert verify_certificate(c)
            assert c.four_fold


def test_dilation_closure():
    for ell in range(3, 30):
        sets = {c.elements for c in search_exceptional(ell)}
        for A in sets:
            for u in range(1, ell):
                if gcd(u, ell) == 1:
                    assert tuple(sorted(u * a % ell for a in A)) in sets
        for c in search_exceptional(ell):
            assert c.canonical in sets
            assert c.canonical <= c.elements


def test_mod71_certificate():
    elems = set(MOD71_HALF) | {MOD71 - c for c in MOD71_HALF}
    cert = certify(cyc(MOD71, elems))
    assert cert.size == 14 and verify_certificate(cert)


def test_basic_example_four_fold_and_corruption():
    cert = certify(cyc(5, [2, 3]))
    assert cert.four_fold and verify_certificate(cert)
    elems = set(MOD71_HALF) | {MOD71 - c for c in MOD71_HALF}
    elems.discard(1)
    broken = certify(cyc(MOD71, elems))
    assert not verify_certificate(broken)
    assert "symmetric" in certificate_failures(broken)


def test_dichotomy_exhaustive_up_to_12():
    for G in groups_up_to(12):
        for bits in range(1, 1 << G.order):
            A = GroupSubset(G, bits)
            try:
                d = classify_exceptional(A)
            except HypothesisError:
                continue
            if d.covers:
                assert iterated_sumset(A, 3).is_full()
            else:
                assert all(d.certificate.checks().values())
            if G.order > 2:
                assert iterated_sumset(A, 4).is_full()


def test_table_matches_published_rows():
    rows = exceptional_table(29)
    assert compare_with_published_table(rows, 29)["mismatches"] == []
    for ell, sizes in PUBLISHED_TABLE.items():
        assert rows[ell] == sizes
    unlisted = {r["ell"] for r in compare_with_published_table(rows, 29)["unlisted"]}
    assert unlisted == {5, 12, 13, 14, 16}
    csv = table_csv(rows)
    assert '20,"6,7"' in csv and csv.startswith("ell,sizes\n")
    assert exceptional_table(4) == {}
    assert exceptional_table(5) == {5: (2,)}


def test_feasible_indices_examples():
    eta = Fraction(11, 32)
    assert feasible_indices(eta, 32, "arithmetic") == [5, 8, 11, 14, 17, 20, 23, 26, 29]
    # Z/14 has exceptional sets of size 5 = floor(154/32) + 1
    assert feasible_indices(eta, 32, "search") == [5, 8, 11, 14, 17, 20, 23, 26, 29]
    assert feasible_indices(eta, 32, "arithmetic", strict=False)[-1] == 32
    assert feasible_indices(Fraction(2, 5), 10, "arithmetic") == []
    with pytest.raises(DomainError):
        feasible_indices(Fraction(1, 3), 32)


def test_trouble_report_flags():
    rep = trouble_index_report()
    kinds = {(d["Y"], d["kind"]) for d in rep["discrepancies"]}
    assert (5, "computed_not_in_published_list") in kinds
    assert (14, "published_table_omits_row") in kinds
    assert (32, "published_list_not_strictly_feasible") in kinds
    assert (26, "gcd_condition_does_not_exclude") in kinds
    assert rep["search_nonstrict"][-1] == 32


def test_certificate_json():
    (c, _) = search_exceptional(5)
    assert json.loads(json.dumps(c.to_json())) == {"ell": 5, "elements": [1, 4], "size": 2}
    assert isinstance(c, ExceptionalCertificate)
    assert canonical_dilation(make_group([2, 2]).subset([1])) is None


def test_parallel_search_is_identical():
    assert [c.elements for c in search_exceptional(26, jobs=2)] == [c.elements for c in search_exceptional(26)]
