"""Hypotheses [C0]-[C3] and the gates deciding when ``3A = G`` (or ``4A = G``)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, InvariantViolation, StructuralError, TheoremViolation
from .groups import enumerate_subgroups_of_index
from .sumsets import cosets_met, iterated_sumset, stabilizer, sumset

THRESHOLDS = {
    "first": Fraction(2, 5),
    "second": Fraction(3, 8),
    "third": Fraction(1, 3),
    "fourth": Fraction(4, 11),
}
FOUR_PRIME_DENSITY = Fraction(5, 18)
# the numerical constant used for large indices in the four-prime argument
FOUR_PRIME_CONSTANT = Fraction(2777, 10000)
FOUR_PRIME_LARGE_INDEX = 55


@dataclass(frozen=True)
class HypothesisFlags:
    c0: bool
    c1: bool
    c2: bool
    c3: bool
    y0: int
    witness: dict | None = None

    def as_dict(self):
        return {"c0": self.c0, "c1": self.c1, "c2": self.c2, "c3": self.c3, "y0": self.y0}


@dataclass(frozen=True)
class CoverVerdict:
    variant: str
    order: int
    density: Fraction
    hypotheses_met: bool
    conclusion_3A_eq_G: bool
    flags: HypothesisFlags | None = None
    failure_witness: dict | None = None
    conclusion_4A_eq_G: bool | None = None
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "variant": self.variant,
            "order": self.order,
            "density": {"num": self.density.numerator, "den": self.density.denominator},
            "flags": self.flags.as_dict() if self.flags else None,
            "covered": self.conclusion_3A_eq_G,
            "covered_4": self.conclusion_4A_eq_G,
            "witness": self.failure_witness,
            "details": self.details,
        }


def generates(A):
    """True iff ``A`` generates its parent group (repeated doubling of ``A | {0}``)."""
    G = A.group
    T = A | G.subset([0])
    # the span is reached after at most log2|G| + 1 doublings
    for _ in range(G.order.bit_length() + 1):
        T2 = sumset(T, T)
        if T2 == T:
            return T.is_full()
        T = T2
    raise InvariantViolation(f"doubling of {A!r} did not stabilize")


def _uncovered_coset(B, K):
    """Witness for the first coset of ``K`` that ``B`` misses."""
    missed = (sumset(B, K.membership) if B.bits else B).complement()
    g = next(iter(missed))
    return {"Y": K.index, "subgroup": K.membership.elements(), "coset_representative": g}


def _flags(A, y0):
    G = A.group
    witness = None
    c0 = generates(A)
    if not c0:
        witness = {"hypothesis": "c0"}
    c1 = True
    for K in enumerate_subgroups_of_index(G, 2):
        if cosets_met(A, K) < 2:
            c1 = False
            if witness is None:
                witness = {"hypothesis": "c1", **_uncovered_coset(A, K)}
            break
    c2 = c3 = True
    B = A | sumset(A, A)
    for Y in range(2, y0 + 1):
        if Y % 3 != 2:
            continue
        for K in enumerate_subgroups_of_index(G, Y):
            if c2 and (A & K.membership).is_empty():
                c2 = False
                if witness is None:
                    witness = {"hypothesis": "c2", "Y": Y, "subgroup": K.membership.elements()}
            if c3 and cosets_met(B, K) < Y:
                c3 = False
                if witness is None:
                    witness = {"hypothesis": "c3", **_uncovered_coset(B, K)}
    return HypothesisFlags(c0, c1, c2, c3, y0, witness)


def check_hypotheses(A, y0):
    """Evaluate [C0], [C1], [C2(y0)] and [C3(y0)] by full subgroup enumeration."""
    if y0 < 2:
        raise DomainError("check_hypotheses needs Y0 >= 2")
    return _flags(A, y0)


def _density(A):
    return Fraction(len(A), A.group.order)


def third_variant_y0(eta):
    """``floor(1/(3*eta - 1))``, exact."""
    eta = Fraction(eta)
    return eta.denominator // (3 * eta.numerator - eta.denominator)


def two_part_elementary(G):
    return G.two_part_is_elementary()


def apply_cover_theorem(A, variant):
    """Evaluate one of the four cover theorems on ``A`` and compute ``3A``.

    Raises :class:`TheoremViolation` if the hypotheses hold while ``3A != G``.
    """
    if variant not in THRESHOLDS:
        raise DomainError(f"unknown variant {variant!r}")
    G = A.group
    eta = _density(A)
    if eta <= THRESHOLDS[variant]:
        raise DomainError(f"variant {variant} needs density > {THRESHOLDS[variant]}, got {eta}")
    if variant == "fourth" and not two_part_elementary(G):
        raise StructuralError(f"2-part of {G.cyclic_orders} is not elementary abelian")
    if variant == "first":
        flags = _flags(A, 0)
        met = flags.c0 and flags.c1
    elif variant == "second":
        flags = _flags(A, 5)
        met = flags.c0 and flags.c1 and flags.c2 and flags.c3
    elif variant == "third":
        flags = _flags(A, third_variant_y0(eta))
        met = flags.c0 and flags.c1 and flags.c2 and flags.c3
    else:
        f5 = _flags(A, 5)
        f8 = _flags(A, 8)
        flags = HypothesisFlags(f5.c0, f5.c1, f5.c2, f8.c3, 8, f5.witness or (f8.witness if not f8.c3 else None))
        met = flags.c0 and flags.c1 and flags.c2 and flags.c3
    A3 = iterated_sumset(A, 3)
    covered = A3.is_full()
    witness = None if met else flags.witness
    if not covered:
        missing = next(iter(A3.complement()))
        witness = {**(witness or {}), "uncovered": missing}
    if met and not covered:
        raise TheoremViolation(f"{variant}_cover", f"hypotheses hold but 3A misses {missing} for {A!r}")
    return CoverVerdict(variant, G.order, eta, met, covered, flags, witness)


def covers(A, k):
    """True iff ``kA = G`` for ``k`` in {2, 3, 4}."""
    if k not in (2, 3, 4):
        raise DomainError("covers needs k in {2, 3, 4}")
    return iterated_sumset(A, k).is_full()


def four_prime_gate(A, threshold=FOUR_PRIME_DENSITY, constant=FOUR_PRIME_CONSTANT):
    """Replay the four-fold argument: large index by Kneser, small index by ``max(2n-1, Y-n)``.

    ``H`` is the stabilizer of ``2A``, ``Y`` its index, ``n`` the number of
    ``H``-cosets met by ``A`` and ``m`` those met by ``2A``.  When the gate
    passes, ``2|2A| > |G|`` so ``4A = G``; this is checked against the
    computed ``4A``.
    """
    G = A.group
    eta = _density(A)
    threshold = Fraction(threshold)
    if eta < threshold:
        raise DomainError(f"four-prime gate needs density >= {threshold}, got {eta}")
    A2 = sumset(A, A)
    H = stabilizer(A2)
    Y = H.index
    n = cosets_met(A, H)
    m = len(A2) // H.order
    c = Fraction(constant)
    details = {"Y": Y, "n": n, "m": m, "margin": {"num": (eta - threshold).numerator,
                                                "den": (eta - threshold).denominator}}
    if Y >= FOUR_PRIME_LARGE_INDEX:
        cy = -((-c.numerator * Y) // c.denominator)
        passed = 2 * (2 * cy - 1) > Y
        details["route"] = "large_index"
        details["bound"] = 2 * cy - 1
    else:
        if n + m >= Y:
            bound = max(2 * n - 1, Y - n)
            details["route"] = "max(2n-1,Y-n)"
        else:
            bound = 2 * n - 1
            details["route"] = "kneser_only"
        passed = 2 * bound > Y
        details["bound"] = bound
    covered4 = iterated_sumset(A, 4).is_full()
    if passed and not covered4:
        raise TheoremViolation("four_prime_gate", f"gate passed but 4A != G for {A!r}")
    witness = None
    if not passed:
        witness = {"Y": Y, "n": n, "m": m, "bound": details["bound"], "subgroup": H.membership.elements()}
    covered3 = iterated_sumset(A, 3).is_full()
    return CoverVerdict("four_prime", G.order, eta, passed, covered3, None, witness, covered4, details)
