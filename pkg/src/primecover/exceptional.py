"""Sum-free exceptional sets: the 3A dichotomy, exhaustive search in Z/l, trouble indices."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DomainError, HypothesisError, LimitError, TheoremViolation
from .fixtures import PUBLISHED_GCD_MODULUS, PUBLISHED_TABLE, PUBLISHED_TABLE_MAX_ELL, PUBLISHED_TROUBLE_INDICES
from .groups import GroupSubset, make_group
from .sumsets import iterated_sumset, stabilizer, sumset

MAX_SEARCH_ELL = 80

CONDITIONS = (
    "zero_excluded",
    "symmetric",
    "trivial_stabilizer",
    "disjoint",
    "size_bound",
    "punctured_cover",
)


@dataclass(frozen=True)
class ExceptionalCertificate:
    """Witness that a set satisfies the six exceptional conditions."""

    subset: GroupSubset
    zero_excluded: bool
    symmetric: bool
    trivial_stabilizer: bool
    disjoint: bool
    size_bound: bool
    punctured_cover: bool
    four_fold: bool
    canonical: tuple | None = None

    @property
    def ell(self):
        return self.subset.group.order

    @property
    def elements(self):
        return tuple(self.subset.elements())

    @property
    def size(self):
        return len(self.subset)

    def checks(self):
        return {name: getattr(self, name) for name in CONDITIONS}

    def to_json(self):
        return {"ell": self.ell, "elements": list(self.elements), "size": self.size}


@dataclass(frozen=True)
class Dichotomy:
    """Outcome of the dichotomy: ``3A = G`` or an exceptional certificate."""

    triple: GroupSubset
    certificate: ExceptionalCertificate | None = None

    @property
    def covers(self):
        return self.certificate is None

    @property
    def kind(self):
        return "covers" if self.covers else "exceptional"


def canonical_dilation(subset):
    """Lexicographically least image of a subset of a cyclic group under unit dilations.

    Dilation by -1 is the reflection, so reflections are included.  Returns
    ``None`` for non-cyclic groups.
    """
    G = subset.group
    if G.rank != 1:
        return None
    n = G.order
    elems = subset.elements()
    return min(tuple(sorted(u * a % n for a in elems)) for u in range(1, n) if gcd(u, n) == 1)


def certify(A):
    """Compute every exceptional condition for ``A`` (nothing is assumed)."""
    G = A.group
    A2 = sumset(A, A)
    A3 = sumset(A2, A)
    punctured = G.whole() - G.subset([0])
    return ExceptionalCertificate(
        subset=A,
        zero_excluded=0 not in A,
        symmetric=A.negate() == A,
        trivial_stabilizer=stabilizer(A).order == 1,
        disjoint=(A & A2).is_empty(),
        size_bound=3 * len(A) <= G.order + 1,
        punctured_cover=A3 == punctured,
        four_fold=sumset(A2, A2).is_full(),
        canonical=canonical_dilation(A),
    )


def classify_exceptional(A):
    """Decide between ``3A = G`` and the six exceptional conditions.

    The hypotheses ``A | 2A = G`` and ``stab(2A) = {0}`` are checked and a
    :class:`HypothesisError` is raised when one fails.
    """
    G = A.group
    A2 = sumset(A, A)
    if not (A | A2).is_full():
        raise HypothesisError("union_covers", "A | 2A does not cover the group")
    if stabilizer(A2).order != 1:
        raise HypothesisError("double_stabilizer_trivial", "stabilizer of 2A is not trivial")
    A3 = sumset(A2, A)
    if A3.is_full():
        if G.order > 2 and not sumset(A2, A2).is_full():
            raise TheoremViolation("classify_exceptional", f"4A != G for {A!r}")
        return Dichotomy(A3)
    cert = certify(A)
    failed = [name for name, ok in cert.checks().items() if not ok]
    if G.order > 2 and not cert.four_fold:
        failed.append("four_fold")
    if failed:
        raise TheoremViolation("classify_exceptional", f"{A!r} fails {failed}")
    return Dichotomy(A3, cert)


def certificate_failures(cert):
    """Names of the conditions that fail when recomputed from the stored set."""
    A = cert.subset
    G = A.group
    fresh = certify(A)
    failed = [name for name, ok in fresh.checks().items() if not ok]
    if G.order > 2 and not fresh.four_fold:
        failed.append("four_fold")
    A2 = sumset(A, A)
    if not (A | A2).is_full():
        failed.append("union_covers")
    if stabilizer(A2).order != 1:
        failed.append("double_stabilizer_trivial")
    return failed


def verify_certificate(cert):
    return not certificate_failures(cert)


# -- exhaustive search in Z/l -------------------------------------------------


def _symmetric_pairs(ell):
    pairs = []
    for x in range(1, ell // 2 + 1):
        pairs.append((1 << x) | (1 << (ell - x)))
    return pairs


def _search_branch(ell, first):
    """Exceptional sets of Z/ell whose smallest symmetric pair is ``pairs[first]``."""
    G = make_group([ell])
    full = G.full
    pairs = _symmetric_pairs(ell)
    found = []

    def double_with(A, A2, P):
        for p in GroupSubset(G, P):
            A2 |= G.translate(A, p)
        return A2

    def extend(j, A, A2, size):
        if A | A2 == full and stabilizer(GroupSubset(G, A2)).order == 1:
            if sumset(GroupSubset(G, A), GroupSubset(G, A2)).bits != full:
                found.append(A)
        for i in range(j, len(pairs)):
            P = pairs[i]
            s = size + P.bit_count()
            if 3 * s > ell + 1:
                continue
            B = A | P
            B2 = double_with(B, A2, P)
            if B & B2:
                continue
            extend(i + 1, B, B2, s)

    P = pairs[first]
    P2 = double_with(P, 0, P)
    if 3 * P.bit_count() <= ell + 1 and not P & P2:
        extend(first + 1, P, P2, P.bit_count())
    return found


def search_exceptional(ell, max_ell=MAX_SEARCH_ELL, jobs=1):
    """Every exceptional subset of Z/ell, canonically ordered.

    Only symmetric, 0-free, sum-free sets with ``|A| <= (ell+1)/3`` are
    visited; those properties are necessary for exceptional sets.
    """
    if ell < 2:
        raise DomainError("search needs ell >= 2")
    if ell > max_ell:
        raise LimitError(f"ell={ell} exceeds the search maximum {max_ell}")
    branches = range(len(_symmetric_pairs(ell)))
    if jobs > 1 and len(branches) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_search_branch, [ell] * len(branches), branches))
    else:
        parts = [_search_branch(ell, b) for b in branches]
    G = make_group([ell])
    sets = sorted({b for part in parts for b in part},
                  key=lambda b: (b.bit_count(), GroupSubset(G, b).elements()))
    certs = []
    for bits in sets:
        cert = certify(GroupSubset(G, bits))
        if not verify_certificate(cert):
            raise TheoremViolation("search_exceptional", f"search produced a non-exceptional set {cert.elements}")
        certs.append(cert)
    return certs


def brute_force_exceptional(ell):
    """Exceptional subsets of Z/ell by classifying every subset (small ell only)."""
    if ell > 20:
        raise LimitError("unrestricted search is limited to ell <= 20")
    G = make_group([ell])
    out = []
    for bits in range(1, 1 << ell):
        try:
            d = classify_exceptional(GroupSubset(G, bits))
        except HypothesisError:
            continue
        if not d.covers:
            out.append(d.certificate)
    out.sort(key=lambda c: (c.size, c.elements))
    return out


def achievable_sizes(ell, max_ell=MAX_SEARCH_ELL, jobs=1):
    return tuple(sorted({c.size for c in search_exceptional(ell, max_ell, jobs)}))


def exceptional_table(ell_max, max_ell=MAX_SEARCH_ELL, jobs=1):
    """``{ell: sizes}`` for ``3 <= ell <= ell_max`` with at least one exceptional set.

    ``ell = 2`` is left out: ``{1}`` in Z/2 is the degenerate case where the
    four-fold conclusion does not apply.
    """
    if ell_max > max_ell:
        raise LimitError(f"ell_max={ell_max} exceeds the search maximum {max_ell}")
    rows = {}
    for ell in range(3, ell_max + 1):
        sizes = achievable_sizes(ell, max_ell, jobs)
        if sizes:
            rows[ell] = sizes
    return rows


def compare_with_published_table(rows, ell_max):
    """Differences between computed rows and the published table.

    ``mismatches`` covers the published rows (these decide pass/fail);
    ``unlisted`` are computed rows the published table does not show.
    """
    mismatches = []
    for ell, sizes in sorted(PUBLISHED_TABLE.items()):
        if ell > ell_max:
            continue
        got = rows.get(ell, ())
        if tuple(got) != tuple(sizes):
            mismatches.append({"ell": ell, "published": list(sizes), "computed": list(got)})
    unlisted = [{"ell": ell, "computed": list(sizes)} for ell, sizes in sorted(rows.items())
                if ell not in PUBLISHED_TABLE and ell <= max(ell_max, PUBLISHED_TABLE_MAX_ELL)]
    return {"mismatches": mismatches, "unlisted": unlisted}


def table_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ell", "sizes"])
    for ell, sizes in sorted(rows.items()):
        w.writerow([ell, ",".join(map(str, sizes))])
    return buf.getvalue()


# -- trouble indices ------------------------------------------------------------


def _min_cosets(eta, Y, strict):
    num, den = eta.numerator, eta.denominator
    if strict:
        return num * Y // den + 1
    return -(-num * Y // den)


def feasible_indices(eta, y_max, mode="arithmetic", strict=True, max_ell=MAX_SEARCH_ELL, jobs=1):
    """Indices ``Y = 2 (mod 3)``, ``3 <= Y <= y_max``, where an exceptional quotient can occur.

    ``arithmetic``: the least number of cosets a set of density ``eta`` meets
    (``floor(eta*Y) + 1`` for a strict density bound) is at most ``(Y+1)/3``.
    ``search``: additionally Z/Y has an exceptional set that large.
    """
    eta = Fraction(eta)
    if eta <= Fraction(1, 3):
        raise DomainError(f"feasible indices need eta > 1/3, got {eta}")
    if mode not in ("arithmetic", "search"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "search" and y_max > max_ell:
        raise LimitError(f"y_max={y_max} exceeds the search maximum {max_ell}")
    out = []
    for Y in range(5, y_max + 1, 3):
        need = _min_cosets(eta, Y, strict)
        if 3 * need > Y + 1:
            continue
        if mode == "search" and not any(s >= need for s in achievable_sizes(Y, max_ell, jobs)):
            continue
        out.append(Y)
    return out


def trouble_index_report(eta=Fraction(11, 32), y_max=32, published=PUBLISHED_TROUBLE_INDICES,
                         gcd_modulus=PUBLISHED_GCD_MODULUS, max_ell=MAX_SEARCH_ELL, jobs=1):
    """Compare computed trouble indices with the published list and its gcd argument."""
    eta = Fraction(eta)
    arith = feasible_indices(eta, y_max, "arithmetic", True, max_ell, jobs)
    arith_ns = feasible_indices(eta, y_max, "arithmetic", False, max_ell, jobs)
    search = feasible_indices(eta, y_max, "search", True, max_ell, jobs)
    search_ns = feasible_indices(eta, y_max, "search", False, max_ell, jobs)
    sizes = {Y: list(achievable_sizes(Y, max_ell, jobs)) for Y in sorted(set(arith_ns) | set(published)) if Y <= max_ell}
    discrepancies = []
    for Y in sorted(set(search) - set(published)):
        discrepancies.append({"Y": Y, "kind": "computed_not_in_published_list",
                              "detail": f"search admits Y={Y} (sizes {sizes.get(Y)}) but the published list omits it"})
    for Y in sorted(set(published) - set(arith)):
        note = "non-strict density admits it" if Y in arith_ns else "non-strict density also rejects it"
        discrepancies.append({"Y": Y, "kind": "published_list_not_strictly_feasible",
                              "detail": f"floor(eta*Y)+1 > (Y+1)/3 at Y={Y}; {note}"})
    for Y in sorted(set(published) - set(search)):
        if Y in arith:
            discrepancies.append({"Y": Y, "kind": "published_list_without_exceptional_sets",
                                  "detail": f"no exceptional set of size >= floor(eta*Y)+1 in Z/{Y}"})
    for Y in sorted((set(published) | set(search)) & set(sizes)):
        if sizes[Y] and Y not in PUBLISHED_TABLE and Y <= PUBLISHED_TABLE_MAX_ELL:
            discrepancies.append({"Y": Y, "kind": "published_table_omits_row",
                                  "detail": f"Z/{Y} has exceptional sets of sizes {sizes[Y]} but the published table has no row for {Y}"})
    for Y in sorted(set(published) | set(search)):
        g = gcd(Y, gcd_modulus)
        if g <= 2:
            discrepancies.append({"Y": Y, "kind": "gcd_condition_does_not_exclude",
                                  "detail": f"gcd({Y}, {gcd_modulus}) = {g}, so Y can divide p-1 under the gcd hypothesis"})
    discrepancies.sort(key=lambda d: (d["Y"], d["kind"]))
    return {
        "eta": {"num": eta.numerator, "den": eta.denominator},
        "y_max": y_max,
        "published": list(published),
        "arithmetic_strict": arith,
        "arithmetic_nonstrict": arith_ns,
        "search_strict": search,
        "search_nonstrict": search_ns,
        "sizes": {str(k): v for k, v in sizes.items()},
        "discrepancies": discrepancies,
    }
