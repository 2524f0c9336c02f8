"""Products of exactly k primes below y covering the invertible residues modulo q."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from threading import Lock

import numpy as np

from .errors import DomainError
from .groups import GroupSubset, unit_group
from .sieve import iter_primes, segmented_primes
from .sumsets import sumset

_cache = {"limit": 1, "primes": np.zeros(0, dtype=np.int64)}
_lock = Lock()


def primes_upto(y):
    """Sorted primes ``<= y`` from a process-wide cache grown by doubling."""
    with _lock:
        if y > _cache["limit"]:
            limit = max(y, 2 * _cache["limit"], 1 << 16)
            _cache["primes"] = segmented_primes(limit)
            _cache["limit"] = limit
        primes = _cache["primes"]
    return primes[: np.searchsorted(primes, y, side="right")]


def prime_residues(q, y):
    """Image of the primes ``p <= y``, ``p`` coprime to ``q``, in ``(Z/qZ)*`` and its density."""
    if y < 2:
        raise DomainError("prime_residues needs y >= 2")
    U = unit_group(q)
    primes = primes_upto(y)
    r = primes % q
    idx = U.to_index[r]
    idx = np.unique(idx[idx >= 0])
    A = U.group.subset(idx.tolist())
    return A, Fraction(len(A), U.group.order)


def _least_prime_per_index(U, y):
    """``(indices, primes)``: each reachable element with its least prime, by increasing prime."""
    primes = primes_upto(y)
    idx = U.to_index[primes % U.q]
    keep = idx >= 0
    primes, idx = primes[keep], idx[keep]
    uniq, first = np.unique(idx, return_index=True)
    order = np.argsort(first)
    return uniq[order], primes[first[order]]


@dataclass(frozen=True)
class CoverReport:
    q: int
    y: int
    k: int
    covered: bool
    witnesses: dict = field(repr=False)
    uncovered: list = field(default_factory=list)
    min_exponent: float | None = None
    density: Fraction | None = None

    def to_json(self, with_witnesses=False):
        out = {
            "kind": "cover",
            "q": self.q,
            "params": {"y": self.y, "k": self.k},
            "verdict": "covered" if self.covered else "uncovered",
            "uncovered": self.uncovered,
            "density": {"num": self.density.numerator, "den": self.density.denominator} if self.density is not None else None,
        }
        if with_witnesses:
            out["witnesses"] = {str(a): list(w) for a, w in sorted(self.witnesses.items())}
        return out


def _levels(A, k):
    levels = [A]
    for _ in range(k - 1):
        levels.append(sumset(levels[-1], A))
    return levels


def _backtrack(G, levels, elems, primes, targets):
    """For each target in ``levels[-1]`` pick the smallest prime leaving a feasible remainder."""
    k = len(levels)
    chosen = np.zeros((len(targets), k), dtype=np.int64)
    current = targets.copy()
    for j in range(k - 1, -1, -1):
        pending = np.ones(len(targets), dtype=bool)
        if j == 0:
            lookup = {int(e): int(p) for e, p in zip(elems, primes)}
            chosen[:, 0] = [lookup[int(t)] for t in current]
            break
        prev = levels[j - 1].as_bool()
        nxt = current.copy()
        for e, p in zip(elems.tolist(), primes.tolist()):
            rest = G.sub_array(current, e)
            ok = pending & prev[rest]
            chosen[ok, j] = p
            nxt[ok] = rest[ok]
            pending &= ~ok
            if not pending.any():
                break
        current = nxt
    return chosen


def verify_product_cover(q, y, k, witnesses=True):
    """Decide whether every unit mod ``q`` is a product of exactly ``k`` primes ``<= y``.

    Primes dividing ``q`` are excluded; repetition is allowed.  Witness tuples
    are reconstructed greedily from the smallest prime downwards, so each tuple
    uses the least first factor that still admits a completion.
    """
    if k not in (3, 4):
        raise DomainError("verify_product_cover needs k in {3, 4}")
    if y < 2:
        raise DomainError("verify_product_cover needs y >= 2")
    U = unit_group(q)
    G = U.group
    elems, primes = _least_prime_per_index(U, y)
    A = G.subset(elems.tolist())
    levels = _levels(A, k)
    top = levels[-1]
    uncovered = sorted(U.residues(top.complement()))
    wit = {}
    if witnesses and len(top):
        targets = np.array(top.indices(), dtype=np.int64)
        chosen = _backtrack(G, levels, elems, primes, targets)
        for t, row in zip(targets.tolist(), chosen.tolist()):
            wit[U.residue(t)] = tuple(sorted(row))
    return CoverReport(q, y, k, top.is_full(), wit, uncovered, None, Fraction(len(A), G.order))


def check_witnesses(report):
    """Independent re-check of every witness: primality, bound, coprimality, product."""
    from sympy import isprime

    bad = []
    for a, tup in report.witnesses.items():
        ok = len(tup) == report.k and all(isprime(p) and p <= report.y and report.q % p for p in tup)
        ok = ok and math.prod(tup) % report.q == a
        if not ok:
            bad.append(a)
    return bad


def brute_force_cover(q, y, k):
    """Residues reachable as products of ``k`` primes ``<= y`` (direct modular products)."""
    res = {int(p) % q for p in primes_upto(y) if q % p}
    reach = {1 % q}
    for _ in range(k):
        reach = {a * r % q for a in reach for r in res}
    return reach


@dataclass(frozen=True)
class MinCover:
    q: int
    k: int
    y_star: int | None
    exponent: float | None
    ceiling: int
    exceeded: bool

    def to_json(self):
        return {"kind": "min_cover", "q": self.q, "params": {"k": self.k, "ceiling": self.ceiling},
                "verdict": "exceeded" if self.exceeded else "found",
                "y_star": self.y_star, "exponents": {"min_exponent": self.exponent}}


def min_cover_exponent(q, k, ceiling=None):
    """Least prime ``y*`` with products of ``k`` primes ``<= y*`` covering ``(Z/qZ)*``.

    The k-fold sumsets are updated one new residue at a time:
    ``S_j' = S_j | (a + S_{j-1}')``, so coverage is monotone in ``y`` by construction.
    """
    if k not in (3, 4):
        raise DomainError("min_cover_exponent needs k in {3, 4}")
    if ceiling is None:
        ceiling = q * q
    U = unit_group(q)
    G = U.group
    S = [G.subset([0]).bits] + [0] * k
    seen = 0
    for p in iter_primes(2, ceiling):
        i = int(U.to_index[p % q])
        if i < 0 or (seen >> i) & 1:
            continue
        seen |= 1 << i
        for j in range(1, k + 1):
            S[j] |= G.translate(S[j - 1], i)
        if S[k] == G.full:
            return MinCover(q, k, p, math.log(p) / math.log(q), ceiling, False)
    return MinCover(q, k, None, None, ceiling, True)


def four_prime_bound(q, ceiling=None):
    """``min(ceil(q (log q)^6), ceiling)`` with the ceiling defaulting to ``q**2``."""
    if ceiling is None:
        ceiling = q * q
    return min(math.ceil(q * math.log(q) ** 6), ceiling)


def three_prime_bound(q):
    """``ceil(q^{3/2})`` computed exactly."""
    r = math.isqrt(q**3)
    return r if r * r == q**3 else r + 1
