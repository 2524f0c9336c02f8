"""Sumsets, stabilizers and the Kneser-type audits built on them."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InvariantViolation, StructuralError, TheoremViolation
from .groups import GroupSubset, Subgroup


def _parent(A, B):
    if A.group != B.group:
        raise StructuralError("sumset of subsets of different groups")
    return A.group


def sumset(A, B):
    """``{a + b : a in A, b in B}`` (representation counts are not tracked)."""
    G = _parent(A, B)
    if not A.bits or not B.bits:
        return G.empty()
    small, large = (A, B) if len(A) <= len(B) else (B, A)
    acc = 0
    full = G.full
    for a in small:
        acc |= G.translate(large.bits, a)
        if acc == full:
            break
    return GroupSubset(G, acc)


def iterated_sumset(A, k):
    """``kA = A + ... + A`` (k copies); ``k >= 1``."""
    if k < 1:
        raise DomainError("iterated sumset needs k >= 1")
    out = A
    for _ in range(k - 1):
        out = sumset(out, A)
    return out


def stabilizer(C):
    """``{g : g + C = C}``; the stabilizer of the empty set is the whole group."""
    G = C.group
    if not C.bits:
        return Subgroup(G.whole())
    c0 = (C.bits & -C.bits).bit_length() - 1
    # g + c0 must land in C, so candidates are C - c0
    candidates = G.translate(C.bits, G.neg(c0))
    members = 0
    for g in GroupSubset(G, candidates):
        if G.translate(C.bits, g) == C.bits:
            members |= 1 << g
    return Subgroup(GroupSubset(G, members))


def cosets_met(A, H):
    """Number of cosets of ``H`` containing an element of ``A``."""
    _parent(A, H.membership)
    return len(sumset(A, H.membership)) // H.order


def is_coset_union(C, H):
    """True iff ``C + H = C``."""
    _parent(C, H.membership)
    if not C.bits:
        return True
    return sumset(C, H.membership).bits == C.bits


@dataclass(frozen=True)
class KneserAudit:
    stabilizer: Subgroup
    lam: int
    double_size: int
    bound: int
    holds: bool


def kneser_audit(A):
    """Check ``|2A| >= (2*lambda - 1)|H|`` with ``H`` the stabilizer of ``2A``.

    Also checks that ``3A`` is a union of ``H``-cosets.  Both statements are
    theorems, so a failure raises :class:`TheoremViolation`.
    """
    if not A.bits:
        raise DomainError("Kneser audit needs a nonempty set")
    A2 = sumset(A, A)
    try:
        H = stabilizer(A2)
    except InvariantViolation as e:
        raise TheoremViolation("kneser_audit", f"stabilizer of 2A is not a subgroup for {A!r}: {e}") from e
    lam = cosets_met(A, H)
    bound = (2 * lam - 1) * H.order
    audit = KneserAudit(H, lam, len(A2), bound, len(A2) >= bound)
    if not audit.holds:
        raise TheoremViolation("kneser_audit", f"|2A|={len(A2)} < {bound} for {A!r}")
    if not is_coset_union(sumset(A2, A), H):
        raise TheoremViolation("kneser_audit", f"3A is not a union of cosets of stab(2A) for {A!r}")
    return audit


def _ceil_pos(num, den):
    return (num - 1) // den + 1


def lambda_threshold(eta, Y):
    """Number of cosets of an index-``Y`` subgroup that forces ``3A = G``.

    ``ceil(eta*Y) + 1`` when ``Y = 2 (mod 3)`` and ``2 <= Y <= 1/(3*eta - 1)``,
    otherwise ``ceil(eta*Y)``.  Exact rational arithmetic throughout.
    """
    eta = Fraction(eta)
    if eta <= Fraction(1, 3):
        raise DomainError(f"lambda(Y) needs eta > 1/3, got {eta}")
    if Y < 2:
        raise DomainError("lambda(Y) needs Y >= 2")
    num, den = eta.numerator, eta.denominator
    lam = _ceil_pos(num * Y, den)
    # Y <= 1/(3*eta - 1)  <=>  Y * (3*num - den) <= den
    if Y % 3 == 2 and Y * (3 * num - den) <= den:
        lam += 1
    return lam
