"""The multiplicative indicator g of primes in a subgroup and its Y-fold convolution."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cover import primes_upto
from .errors import DomainError, LimitError

MAX_X = 10**6
REL_TOL = 1e-9


def g_values(U, H, x):
    """``g(n)`` for ``0 <= n <= x``: 1 on squarefree ``n`` whose primes all lie in ``H``."""
    member = np.zeros(U.q, dtype=bool)
    member[U.from_index[H.membership.indices()]] = True
    bad = np.zeros(x + 1, dtype=bool)
    for p in primes_upto(x).tolist():
        if not member[p % U.q]:
            bad[p::p] = True
        bad[p * p :: p * p] = True
    g = (~bad).astype(np.int64)
    g[0] = 0
    return g


def dirichlet_convolve(f, g):
    x = len(f) - 1
    h = np.zeros(x + 1, dtype=np.int64)
    for d in np.nonzero(f)[0].tolist():
        if d == 0:
            continue
        m = x // d
        h[d::d][:m] += f[d] * g[1 : m + 1]
    return h


@dataclass(frozen=True)
class ConvolutionCheckResult:
    q: int
    index: int
    x: int
    hypothesis_ok: bool
    offending_prime: int | None
    identity_ok: bool
    S: float
    S_expected: float
    g: np.ndarray = field(repr=False)
    g_tilde: np.ndarray = field(repr=False)

    @property
    def relative_error(self):
        return abs(self.S - self.S_expected) / self.S_expected if self.S_expected else abs(self.S)

    def to_json(self):
        return {
            "kind": "convolution",
            "q": self.q,
            "params": {"Y": self.index, "x": self.x},
            "verdict": "identity_ok" if self.identity_ok else ("hypothesis_fails" if not self.hypothesis_ok else "identity_fails"),
            "witnesses": {"offending_prime": self.offending_prime},
            "exponents": {"S": self.S, "S_expected": self.S_expected, "relative_error": self.relative_error},
        }


def convolution_identity_check(U, H, x):
    """Build ``g``, its ``Y``-fold convolution, and the weighted sum with ``l = Y + 1``."""
    if x < 2:
        raise DomainError("convolution check needs x >= 2")
    if x > MAX_X:
        raise LimitError(f"x={x} exceeds the maximum {MAX_X}")
    Y = H.index
    member = np.zeros(U.q, dtype=bool)
    member[U.from_index[H.membership.indices()]] = True
    primes = primes_upto(x)
    in_h = primes[member[primes % U.q]]
    offending = int(in_h[0]) if len(in_h) else None
    g = g_values(U, H, x)
    gt = g.copy()
    for _ in range(Y - 1):
        gt = dirichlet_convolve(gt, g)
    identity_ok = gt[1] == 1 and not gt[2:].any()
    ell = Y + 1
    lx = math.log(x)
    nz = np.nonzero(gt)[0]
    S = math.fsum(int(gt[n]) * (lx - math.log(n)) ** ell for n in nz.tolist()) / math.factorial(ell)
    expected = lx**ell / math.factorial(ell)
    if offending is None and identity_ok and abs(S - expected) > REL_TOL * expected:
        from .errors import TheoremViolation

        raise TheoremViolation("convolution_identity", f"S={S!r} differs from {expected!r}")
    return ConvolutionCheckResult(U.q, Y, x, offending is None, offending, bool(identity_ok), S, expected, g, gt)
