"""Exhaustive small-group suites and oracle cross-checks behind ``selftest``.

Every suite walks its instances in a fixed order (group order, then subset
size, then bit pattern) and stops at the first failure, so the failure it
reports is the minimal one in that order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisError, PrimeCoverError, TheoremViolation
from .exceptional import classify_exceptional
from .groups import (
    GroupSubset,
    Subgroup,
    _subgroups_of_small_group,
    abelian_groups_of_order,
    enumerate_subgroups_of_index,
    is_closed,
    make_group,
    unit_group,
)
from .hypotheses import THRESHOLDS, apply_cover_theorem
from .sieve import segmented_primes, sieve_primes
from .subgroup_primes import naive_big_omega
from .sumsets import iterated_sumset, kneser_audit, stabilizer, sumset

DEFAULT_MAX_ORDER = 16
DEFAULT_RANDOM = 10_000
RANDOM_MAX_ORDER = 512
SEED = 20240601


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failure: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.failure is None

    def line(self):
        if self.passed:
            return f"{self.name}: pass ({self.cases} cases)"
        return f"{self.name}: FAIL {self.failure}"


def groups_up_to(max_order):
    for n in range(1, max_order + 1):
        for orders in abelian_groups_of_order(n):
            yield make_group(orders)


def subsets_by_size(G, nonempty=True):
    """All subsets of ``G`` ordered by size, then bit pattern."""
    n = G.order
    start = 1 if nonempty else 0
    for bits in sorted(range(start, 1 << n), key=lambda b: (b.bit_count(), b)):
        yield GroupSubset(G, bits)


def _failure(check, A, detail):
    return {"check": check, "group": list(A.group.cyclic_orders), "elements": A.elements(), "detail": str(detail)}


def _error_check(exc, default):
    return exc.check if isinstance(exc, TheoremViolation) else default


def random_instances(n, max_order=RANDOM_MAX_ORDER, seed=SEED):
    """``n`` reproducible (group, subset) pairs with group order in ``[17, max_order]``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        orders = []
        total = 1
        for _ in range(int(rng.integers(1, 4))):
            o = int(rng.integers(2, 33))
            if total * o <= max_order:
                orders.append(o)
                total *= o
        if total < 17:
            continue
        G = make_group(orders)
        p = float(rng.uniform(0.02, 0.7))
        mask = rng.random(G.order) < p
        if not mask.any():
            mask[int(rng.integers(G.order))] = True
        out.append(G.subset_from_bool(mask))
    return out


def kneser_suite(max_order=DEFAULT_MAX_ORDER, n_random=DEFAULT_RANDOM, seed=SEED):
    res = SuiteResult("kneser")
    cases = [A for G in groups_up_to(max_order) for A in subsets_by_size(G)]
    cases += random_instances(n_random, seed=seed)
    for A in cases:
        try:
            kneser_audit(A)
        except PrimeCoverError as e:
            res.failure = _failure(_error_check(e, "kneser_audit"), A, e)
            return res
        res.cases += 1
    return res


def overcount_suite(max_order=DEFAULT_MAX_ORDER, pair_order=8, n_random=DEFAULT_RANDOM, seed=SEED):
    """``|A| + |B| > |G|`` forces ``A + B = G``.

    Pairs are enumerated exhaustively up to ``pair_order``.  Up to
    ``max_order`` the statement is reduced to its pigeonhole core: ``g`` is
    missed exactly when ``B`` avoids ``g - A``, which is impossible when
    ``|g - A| = |A|``; so each translate of ``-A`` must keep its size and
    ``g`` must lie in ``A + B`` for the largest ``B`` avoiding it plus any
    one more element.
    """
    res = SuiteResult("overcount")
    for G in groups_up_to(max_order):
        n = G.order
        for A in subsets_by_size(G):
            if n <= pair_order:
                for bbits in range(1, 1 << n):
                    if len(A) + bbits.bit_count() > n:
                        res.cases += 1
                        if not sumset(A, GroupSubset(G, bbits)).is_full():
                            res.failure = _failure("overcount", A, f"B={GroupSubset(G, bbits).elements()}")
                            return res
                continue
            negA = A.negate()
            for g in range(n):
                T = negA.translate(g)
                res.cases += 1
                if len(T) != len(A):
                    res.failure = _failure("overcount", A, f"translate by {g} changes the size")
                    return res
            if len(A) < n:
                g = n - 1
                T = negA.translate(g)
                B = T.complement()
                if g in sumset(A, B):
                    res.failure = _failure("overcount", A, f"{g} reached from a set avoiding g - A")
                    return res
                h = next(iter(T))
                if g not in sumset(A, B | G.subset([h])):
                    res.failure = _failure("overcount", A, f"{g} missed with |A|+|B| > |G|")
                    return res
    rng = np.random.default_rng(seed + 1)
    for A in random_instances(n_random, seed=seed + 2):
        G = A.group
        need = G.order - len(A) + 1
        if need <= 0:
            continue
        extra = int(rng.integers(0, G.order - need + 1))
        pick = rng.permutation(G.order)[: need + extra]
        B = G.subset(pick.tolist())
        res.cases += 1
        if not sumset(A, B).is_full():
            res.failure = _failure("overcount", A, f"B={B.elements()}")
            return res
    return res


def dichotomy_suite(max_order=DEFAULT_MAX_ORDER):
    res = SuiteResult("dichotomy")
    for G in groups_up_to(max_order):
        for A in subsets_by_size(G):
            try:
                d = classify_exceptional(A)
            except HypothesisError:
                continue
            except PrimeCoverError as e:
                res.failure = _failure(_error_check(e, "classify_exceptional"), A, e)
                return res
            res.cases += 1
            if G.order > 2 and not iterated_sumset(A, 4).is_full():
                res.failure = _failure("four_fold", A, "4A != G")
                return res
            if not d.covers and 0 in d.triple:
                res.failure = _failure("classify_exceptional", A, "exceptional with 0 in 3A")
                return res
    return res


def cover_suite(max_order=DEFAULT_MAX_ORDER):
    """Every subset meeting a variant's hypotheses has ``3A = G``.

    A subset with ``3A = G`` cannot contradict any variant, so the
    hypotheses are evaluated only on the subsets with ``3A != G``.
    """
    res = SuiteResult("cover_theorems")
    for G in groups_up_to(max_order):
        n = G.order
        for A in subsets_by_size(G):
            variants = [v for v, t in THRESHOLDS.items() if len(A) * t.denominator > t.numerator * n]
            if not G.two_part_is_elementary() and "fourth" in variants:
                variants.remove("fourth")
            if not variants:
                continue
            res.cases += len(variants)
            if iterated_sumset(A, 3).is_full():
                continue
            for v in variants:
                try:
                    verdict = apply_cover_theorem(A, v)
                except PrimeCoverError as e:
                    res.failure = _failure(_error_check(e, f"{v}_cover"), A, e)
                    return res
                if verdict.hypotheses_met:
                    res.failure = _failure(f"{v}_cover", A, "hypotheses hold but 3A != G")
                    return res
    return res


def _brute_subgroups(G):
    """All subgroups of ``G`` by testing every subset containing 0 (small orders only)."""
    out = []
    for bits in range(1, 1 << G.order, 2):
        S = GroupSubset(G, bits)
        if is_closed(S):
            out.append(bits)
    return sorted(out)


def subgroup_suite(brute_order=DEFAULT_MAX_ORDER, bfs_order=64):
    res = SuiteResult("subgroups")
    for G in groups_up_to(bfs_order):
        n = G.order
        enumerated = []
        for Y in range(1, n + 1):
            if n % Y:
                continue
            subs = enumerate_subgroups_of_index(G, Y, max_index=max(64, n))
            for H in subs:
                res.cases += 1
                if not is_closed(H.membership) or H.index != Y:
                    res.failure = {"check": "subgroups", "group": list(G.cyclic_orders), "Y": Y,
                                   "detail": f"not a subgroup of index {Y}: {H.elements()}"}
                    return res
                lab = H.coset_label
                for c in range(Y):
                    coset = H.coset(c)
                    if len(coset) != H.order or sumset(coset, H.membership) != coset:
                        res.failure = {"check": "coset_labels", "group": list(G.cyclic_orders), "Y": Y,
                                       "detail": f"label {c} is not a coset"}
                        return res
                if lab.min() != 0 or lab.max() != Y - 1:
                    res.failure = {"check": "coset_labels", "group": list(G.cyclic_orders), "Y": Y, "detail": "labels"}
                    return res
            enumerated.extend(H.membership.bits for H in subs)
        if n <= brute_order:
            oracle = _brute_subgroups(G)
        else:
            oracle = []
            for Y in range(1, n + 1):
                if n % Y == 0:
                    oracle.extend(_subgroups_of_small_group(G.cyclic_orders, n // Y)[1])
        if sorted(enumerated) != sorted(oracle):
            res.failure = {"check": "subgroups", "group": list(G.cyclic_orders),
                           "detail": f"{len(enumerated)} enumerated vs {len(oracle)} by oracle"}
            return res
    return res


def unit_group_suite(q_max=200):
    res = SuiteResult("unit_group")
    for q in range(3, q_max + 1):
        U = unit_group(q)
        units = [a for a in range(q) if math.gcd(a, q) == 1]
        if U.group.order != len(units):
            res.failure = {"check": "unit_group", "q": q, "detail": "order differs from phi(q)"}
            return res
        idx = U.to_index[units]
        if sorted(idx.tolist()) != list(range(len(units))):
            res.failure = {"check": "unit_group", "q": q, "detail": "not a bijection"}
            return res
        a = np.array(units, dtype=np.int64)
        prod = (a[:, None] * a[None, :]) % q
        lhs = U.to_index[prod]
        rhs = U.group.add_array(np.broadcast_to(idx[:, None], lhs.shape).ravel(),
                                np.broadcast_to(idx[None, :], lhs.shape).ravel()).reshape(lhs.shape)
        res.cases += 1
        if not np.array_equal(lhs, rhs):
            res.failure = {"check": "unit_group", "q": q, "detail": "index map is not a homomorphism"}
            return res
    return res


def sieve_suite(limit=10**6, omega_limit=10**5):
    res = SuiteResult("sieve")
    table = sieve_primes(limit)
    if not np.array_equal(table.primes, segmented_primes(limit)):
        res.failure = {"check": "sieve", "detail": f"sieves disagree below {limit}"}
        return res
    res.cases += 1
    omega = table.big_omega_array()
    for n in range(2, omega_limit + 1):
        if omega[n] != naive_big_omega(n) or n % int(table.spf[n]):
            res.failure = {"check": "sieve", "detail": f"Omega or spf wrong at {n}"}
            return res
    res.cases += omega_limit - 1
    return res


def run_selftest(max_order=DEFAULT_MAX_ORDER, n_random=DEFAULT_RANDOM, suites=None):
    """Run the suites in a fixed order, stopping at the first failing one."""
    plan = [
        ("kneser", lambda: kneser_suite(max_order, n_random)),
        ("overcount", lambda: overcount_suite(max_order, min(8, max_order), n_random)),
        ("dichotomy", lambda: dichotomy_suite(max_order)),
        ("cover_theorems", lambda: cover_suite(max_order)),
        ("subgroups", lambda: subgroup_suite(max_order, max(max_order, 64 if max_order >= 16 else max_order))),
        ("unit_group", lambda: unit_group_suite()),
        ("sieve", lambda: sieve_suite()),
    ]
    out = []
    for name, run in plan:
        if suites is not None and name not in suites:
            continue
        out.append(run())
        if not out[-1].passed:
            break
    return out
