"""Prime sieves: a numpy smallest-prime-factor table and an independent segmented sieve."""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import DomainError, LimitError

MAX_SIEVE_LIMIT = 10**8
MEMORY_BUDGET = 1 << 30  # bytes
SEGMENT = 1 << 18


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primes ``<= limit`` together with their smallest-prime-factor table."""

    limit: int
    primes: np.ndarray
    spf: np.ndarray

    def __len__(self):
        return len(self.primes)

    def primes_upto(self, y):
        return self.primes[: np.searchsorted(self.primes, y, side="right")]

    def is_prime(self, n):
        return 2 <= n <= self.limit and self.spf[n] == n

    def factor(self, n):
        """Prime factors of ``n`` with multiplicity, ascending."""
        if not 1 <= n <= self.limit:
            raise DomainError(f"{n} outside the table range")
        out = []
        while n > 1:
            p = int(self.spf[n])
            out.append(p)
            n //= p
        return out

    def big_omega(self, n):
        return len(self.factor(n))

    def big_omega_array(self):
        """``Omega(n)`` for ``0 <= n <= limit`` (0 and 1 get 0)."""
        omega = np.zeros(self.limit + 1, dtype=np.int8)
        rest = np.arange(self.limit + 1, dtype=np.int64)
        active = np.arange(2, self.limit + 1)
        while active.size:
            rest[active] //= self.spf[rest[active]]
            omega[active] += 1
            active = active[rest[active] > 1]
        return omega


def sieve_primes(limit, max_limit=MAX_SIEVE_LIMIT, memory_budget=MEMORY_BUDGET):
    if limit < 0:
        raise DomainError("sieve limit must be nonnegative")
    if limit > max_limit:
        raise LimitError(f"sieve limit {limit} exceeds the maximum {max_limit}")
    if 5 * (limit + 1) > memory_budget:
        raise LimitError(f"sieve limit {limit} exceeds the memory budget of {memory_budget} bytes")
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, isqrt(limit) + 1):
        if spf[p]:
            continue
        block = spf[p * p :: p]
        block[block == 0] = p
    spf[spf == 0] = np.arange(limit + 1, dtype=np.int32)[spf == 0]
    spf[:2] = 0
    idx = np.arange(limit + 1)
    primes = idx[(spf == idx) & (idx >= 2)].astype(np.int64)
    return PrimeTable(limit, primes, spf)


def _base_primes(n):
    flags = bytearray([1]) * (n + 1)
    flags[:2] = b"\x00\x00"[: min(2, n + 1)]
    for p in range(2, isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i in range(n + 1) if flags[i]]


def prime_segments(lo, hi, segment=SEGMENT):
    """Yield sorted numpy arrays of the primes in ``[lo, hi)``, one segment at a time."""
    lo = max(lo, 2)
    if hi <= lo:
        return
    base = _base_primes(isqrt(hi - 1) + 1)
    for start in range(lo, hi, segment):
        stop = min(start + segment, hi)
        flags = bytearray([1]) * (stop - start)
        for p in base:
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            flags[first - start :: p] = bytes(len(range(first, stop, p)))
        arr = np.frombuffer(bytes(flags), dtype=np.uint8)
        yield np.nonzero(arr)[0].astype(np.int64) + start


def segmented_primes(limit):
    """All primes ``<= limit`` from the bytearray segmented sieve (independent of :func:`sieve_primes`)."""
    parts = list(prime_segments(2, limit + 1))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def iter_primes(start=2, ceiling=None, segment=SEGMENT):
    """Primes ``>= start`` in increasing order, up to ``ceiling`` inclusive when given."""
    lo = start
    while ceiling is None or lo <= ceiling:
        hi = lo + segment if ceiling is None else min(lo + segment, ceiling + 1)
        for arr in prime_segments(lo, hi, segment):
            yield from arr.tolist()
        lo = hi
        segment = min(segment * 2, 1 << 22)


def omega_segment(lo, hi):
    """``Omega(n)`` (with multiplicity) for ``lo <= n < hi`` by dividing out small primes."""
    lo = max(lo, 1)
    if hi <= lo:
        return np.zeros(0, dtype=np.int8)
    rest = np.arange(lo, hi, dtype=np.int64)
    omega = np.zeros(hi - lo, dtype=np.int8)
    for p in _base_primes(isqrt(hi - 1) + 1):
        pe = p
        while pe < hi:
            first = -(-lo // pe) * pe
            omega[first - lo :: pe] += 1
            rest[first - lo :: pe] //= p
            pe *= p
    omega[rest > 1] += 1
    return omega


def squarefree_segment(lo, hi):
    """Boolean squarefree flags for ``lo <= n < hi``."""
    lo = max(lo, 1)
    flags = np.ones(max(hi - lo, 0), dtype=bool)
    for p in _base_primes(isqrt(max(hi - 1, 1)) + 1):
        p2 = p * p
        if p2 >= hi:
            break
        first = -(-lo // p2) * p2
        flags[first - lo :: p2] = False
    return flags
