"""Density arithmetic of the three- and four-prime arguments, and an empirical probe.

The upper bounds for pi(x; q, a) are only evaluated as formulas here; they
hold for almost all classes, so the probe reports how many classes exceed
them without asserting anything.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cover import primes_upto
from .errors import DomainError, LimitError
from .groups import unit_group

MAX_PROBE_X = 10**8

THRESHOLDS = {
    "3/8": Fraction(3, 8),
    "4/11": Fraction(4, 11),
    "11/32": Fraction(11, 32),
    "5/18": Fraction(5, 18),
}


def exponent_ratio(theta):
    """``log(X / q^{3/8}) / (2 log X)`` for ``X = q^theta``, i.e. ``(theta - 3/8) / (2 theta)``."""
    theta = Fraction(theta)
    if theta <= 0:
        raise DomainError("theta must be positive")
    return (theta - Fraction(3, 8)) / (2 * theta)


def three_prime_ratio(eps):
    """Closed form ``3/8 + eps/(12 + 8 eps)`` for ``theta = 3/2 + eps``."""
    eps = Fraction(eps)
    return Fraction(3, 8) + eps / (12 + 8 * eps)


def four_prime_ratio(eps):
    """Closed form ``4/11 + 12 eps/(121 + 88 eps)`` for ``theta = 11/8 + eps``."""
    eps = Fraction(eps)
    return Fraction(4, 11) + 12 * eps / (121 + 88 * eps)


def three_prime_lower_density(eps, eps1, eps2):
    """``3/(8(1+eps1)) + (eps/(1+eps1))/(12+8 eps) - eps2``, the guaranteed share of classes."""
    eps, eps1, eps2 = Fraction(eps), Fraction(eps1), Fraction(eps2)
    return Fraction(3, 8) / (1 + eps1) + (eps / (1 + eps1)) / (12 + 8 * eps) - eps2


def mika_density(q, X, eps_prime=0.0):
    """``log(X^{2/3} / q^{1/9}) / ((2 + eps') log X)``."""
    lx = math.log(X)
    return (2 * lx / 3 - math.log(q) / 9) / ((2 + eps_prime) * lx)


def mika_default_X(q, A=6, max_x=MAX_PROBE_X):
    """Least integer ``X`` with ``X / (log X)^A >= q``."""
    X = max(q, 3)
    while X / math.log(X) ** A < q:
        X = math.ceil(q * math.log(X) ** A)
        if X > max_x:
            raise LimitError(f"mika regime needs X > {max_x} for q={q}, A={A}")
    lo = max(q, 3)
    hi = X
    while lo < hi:
        mid = (lo + hi) // 2
        if mid / math.log(mid) ** A >= q:
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class DensityProbe:
    q: int
    X: int
    regime: str
    eps_prime: float
    bound: float
    mean: float
    max: int
    violating: int
    classes: int
    eta_empirical: Fraction
    eta_formula: float
    flags: dict

    @property
    def violating_fraction(self):
        return Fraction(self.violating, self.classes)

    def to_json(self):
        return {
            "kind": "density",
            "q": self.q,
            "params": {"X": self.X, "regime": self.regime, "eps_prime": self.eps_prime},
            "verdict": "ok",
            "exponents": {
                "bound": self.bound,
                "mean": self.mean,
                "max": self.max,
                "violating": self.violating,
                "classes": self.classes,
                "eta_formula": self.eta_formula,
                "eta_empirical": {"num": self.eta_empirical.numerator, "den": self.eta_empirical.denominator},
            },
            "discrepancies": self.flags,
        }


def density_probe(q, X, regime, eps_prime=0.0, A=6, max_x=MAX_PROBE_X):
    """Count ``pi(X; q, a)`` for every unit ``a`` and compare with the stated bound."""
    if regime not in ("iwa", "mika"):
        raise DomainError(f"unknown regime {regime!r}")
    if X > max_x:
        raise LimitError(f"X={X} exceeds the probe maximum {max_x}")
    flags = {}
    if regime == "iwa":
        # X >= q^{6/5}, exactly
        if X**5 < q**6:
            raise DomainError(f"iwa regime needs X >= q^(6/5); got q={q}, X={X}")
        denom = math.log(X) - 3 * math.log(q) / 8
        bound = 2 * (1 + eps_prime) * X / denom
        eta_formula = denom / (2 * (1 + eps_prime) * math.log(X))
    else:
        if A <= 5:
            raise DomainError("mika regime needs A > 5")
        if q > X / math.log(X) ** A:
            raise DomainError(f"mika regime needs q <= X/(log X)^{A}; got q={q}, X={X}")
        flags["below_lower_range"] = q < X ** (6 / 7)
        denom = 2 * math.log(X) / 3 - math.log(q) / 9
        bound = (2 + eps_prime) * X / denom
        eta_formula = denom / ((2 + eps_prime) * math.log(X))
    U = unit_group(q)
    phi = U.group.order
    bound /= phi
    primes = primes_upto(X)
    counts = np.bincount(primes % q, minlength=q)
    unit_mask = U.to_index >= 0
    unit_counts = counts[unit_mask]
    eta_emp = Fraction(int(np.count_nonzero(unit_counts)), phi)
    for name, thr in THRESHOLDS.items():
        flags[f"eta_empirical>{name}"] = eta_emp > thr
        flags[f"eta_formula>{name}"] = eta_formula > float(thr)
    return DensityProbe(
        q, X, regime, eps_prime, bound, float(unit_counts.mean()), int(unit_counts.max()),
        int(np.count_nonzero(unit_counts > bound)), phi, eta_emp, eta_formula, flags,
    )
