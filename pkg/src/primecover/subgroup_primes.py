"""Least primes in a subgroup of (Z/qZ)* and least P2-numbers in each of its cosets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import factorint

from .errors import DomainError
from .fixtures import P2_EXPONENT, P2_EXPONENT_CUBE_FREE
from .sieve import iter_primes, omega_segment, squarefree_segment

BLOCK = 1 << 14


def is_cube_free(q):
    return all(e < 3 for e in factorint(q).values())


def _log_q(n, q):
    return math.log(n) / math.log(q)


def _residue_labels(U, H):
    """Coset label of each residue mod q (``-1`` for non-units)."""
    labels = np.full(U.q, -1, dtype=np.int64)
    units = U.to_index >= 0
    labels[units] = H.coset_label[U.to_index[units]]
    return labels


@dataclass(frozen=True)
class SubgroupPrimeAudit:
    q: int
    index: int
    least_prime: int | None
    exponent: float | None
    theorem_exponent: Fraction
    cube_free: bool
    ceiling: int
    exceeded: bool

    def to_json(self):
        return {
            "kind": "t1",
            "q": self.q,
            "params": {"Y": self.index, "ceiling": self.ceiling},
            "verdict": "exceeded" if self.exceeded else "found",
            "witnesses": {"least_prime": self.least_prime},
            "exponents": {"observed": self.exponent,
                          "theorem": {"num": self.theorem_exponent.numerator,
                                      "den": self.theorem_exponent.denominator}},
        }


def t1_exponent(Y, cube_free):
    return Fraction(Y - 1, 4 if cube_free else 3)


def least_prime_in_subgroup(U, H, ceiling=None):
    """Scan primes upwards until one reduces into ``H``; ceiling defaults to ``q**3``."""
    q = U.q
    if H.group != U.group:
        raise DomainError("subgroup does not live in the unit group")
    if ceiling is None:
        ceiling = q**3
    member = np.zeros(q, dtype=bool)
    member[U.from_index[H.membership.indices()]] = True
    cf = is_cube_free(q)
    theo = t1_exponent(H.index, cf)
    for p in iter_primes(2, ceiling):
        if member[p % q]:
            return SubgroupPrimeAudit(q, H.index, p, _log_q(p, q), theo, cf, ceiling, False)
    return SubgroupPrimeAudit(q, H.index, None, None, theo, cf, ceiling, True)


@dataclass(frozen=True)
class P2Audit:
    q: int
    index: int
    least: dict  # coset label -> least P2-number (None if the ceiling was hit)
    representatives: dict  # coset label -> least residue in the coset
    exponents: dict
    reference_exponent: float
    squarefree_only: bool
    ceiling: int
    exceeded: list = field(default_factory=list)

    @property
    def max_exponent(self):
        vals = [e for e in self.exponents.values() if e is not None]
        return max(vals) if vals else None

    def to_json(self):
        return {
            "kind": "p2",
            "q": self.q,
            "params": {"Y": self.index, "ceiling": self.ceiling, "squarefree_only": self.squarefree_only},
            "verdict": "exceeded" if self.exceeded else "found",
            "witnesses": {str(self.representatives[c]): self.least[c] for c in sorted(self.least)},
            "exponents": {"max": self.max_exponent, "reference": self.reference_exponent},
        }


def least_P2_in_cosets(U, H, ceiling=None, squarefree_only=False):
    """For every coset of ``H``, the least ``n >= 2`` coprime to ``q`` with ``Omega(n) <= 2`` in it.

    ``Omega`` counts prime factors with multiplicity, so ``p**2`` qualifies
    unless ``squarefree_only`` is set.  ``n = 1`` is never taken.
    """
    q = U.q
    if H.group != U.group:
        raise DomainError("subgroup does not live in the unit group")
    if ceiling is None:
        ceiling = q * q
    labels = _residue_labels(U, H)
    Y = H.index
    reps = {}
    for r in range(q):
        if labels[r] >= 0 and labels[r] not in reps:
            reps[int(labels[r])] = r
    least = {}
    lo = 2
    block = BLOCK
    while len(least) < Y and lo <= ceiling:
        hi = min(lo + block, ceiling + 1)
        ok = omega_segment(lo, hi) <= 2
        if squarefree_only:
            ok &= squarefree_segment(lo, hi)
        n = np.arange(lo, hi, dtype=np.int64)
        lab = labels[n % q]
        ok &= lab >= 0
        cand_lab, first = np.unique(lab[ok], return_index=True)
        for c, f in zip(cand_lab.tolist(), first.tolist()):
            if c not in least:
                least[c] = int(n[ok][f])
        lo = hi
        block = min(block * 2, 1 << 20)
    exceeded = sorted(c for c in reps if c not in least)
    full = {c: least.get(c) for c in sorted(reps)}
    exps = {c: (_log_q(v, q) if v else None) for c, v in full.items()}
    ref = P2_EXPONENT_CUBE_FREE if is_cube_free(q) else P2_EXPONENT
    return P2Audit(q, Y, full, reps, exps, ref, squarefree_only, ceiling, exceeded)


def naive_big_omega(n):
    count, p = 0, 2
    while p * p <= n:
        while n % p == 0:
            n //= p
            count += 1
        p += 1
    return count + (n > 1)
