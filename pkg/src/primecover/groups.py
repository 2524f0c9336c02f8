"""Finite abelian groups in mixed-radix coordinates.

A group ``Z/o_0 x ... x Z/o_{r-1}`` numbers its elements ``0..order-1`` with the
last factor varying fastest (C order).  Subsets are Python integers used as
bitsets, so translations are a handful of shifts and masks per cyclic factor.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, prod

import numpy as np
from sympy import factorint
from sympy.utilities.iterables import partitions

from .errors import InvariantViolation, LimitError, StructuralError, UnsupportedModulus

MAX_GROUP_ORDER = 1 << 22
MAX_SUBGROUP_INDEX = 64


def bits_to_indices(bits, n):
    """Sorted element indices of a bitset over ``n`` elements."""
    if bits == 0:
        return np.zeros(0, dtype=np.int64)
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")[:n]).astype(np.int64)


def bool_to_bits(mask):
    """Bitset of a boolean numpy vector."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return 0
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def bits_to_bool(bits, n):
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


class FiniteAbelianGroup:
    """A product of cyclic groups with a fixed element numbering.

    Build instances with :func:`make_group`; the constructor trusts its input.
    """

    def __init__(self, cyclic_orders):
        self.cyclic_orders = tuple(cyclic_orders)
        self.order = prod(self.cyclic_orders)
        strides = []
        step = 1
        for o in reversed(self.cyclic_orders):
            strides.append(step)
            step *= o
        self.strides = tuple(reversed(strides))
        self.full = (1 << self.order) - 1
        self._masks = {}

    def __repr__(self):
        return f"FiniteAbelianGroup({list(self.cyclic_orders)})"

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and other.cyclic_orders == self.cyclic_orders

    def __hash__(self):
        return hash(("FiniteAbelianGroup", self.cyclic_orders))

    def __getstate__(self):
        return {"cyclic_orders": self.cyclic_orders}

    def __setstate__(self, state):
        self.__init__(state["cyclic_orders"])

    @property
    def rank(self):
        return len(self.cyclic_orders)

    @property
    def exponent(self):
        e = 1
        for o in self.cyclic_orders:
            e = e * o // gcd(e, o)
        return e

    # -- coordinates -------------------------------------------------------

    def element_coords(self, g):
        return tuple((g // s) % o for s, o in zip(self.strides, self.cyclic_orders))

    def element_index(self, coords):
        return sum((c % o) * s for c, o, s in zip(coords, self.cyclic_orders, self.strides))

    @cached_property
    def _orders_arr(self):
        return np.array(self.cyclic_orders, dtype=np.int64)

    @cached_property
    def _strides_arr(self):
        return np.array(self.strides, dtype=np.int64)

    @cached_property
    def all_coords(self):
        """``(order, rank)`` array of coordinates of every element."""
        return self.coords(np.arange(self.order, dtype=np.int64))

    def coords(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self._strides_arr) % self._orders_arr

    def index(self, coords):
        coords = np.asarray(coords, dtype=np.int64) % self._orders_arr
        return coords @ self._strides_arr

    # -- group law ---------------------------------------------------------

    def add(self, x, y):
        return self.element_index(a + b for a, b in zip(self.element_coords(x), self.element_coords(y)))

    def neg(self, x):
        return self.element_index(-c for c in self.element_coords(x))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def multiple(self, k, x):
        return self.element_index(k * c for c in self.element_coords(x))

    def add_array(self, x, y):
        return self.index(self.coords(x) + self.coords(y))

    def sub_array(self, x, y):
        return self.index(self.coords(x) - self.coords(y))

    def neg_array(self, x):
        return self.index(-self.coords(x))

    def element_order(self, g):
        n = 1
        for c, o in zip(self.element_coords(g), self.cyclic_orders):
            k = o // gcd(c, o)
            n = n * k // gcd(n, k)
        return n

    # -- bitset translation ------------------------------------------------

    def _axis_masks(self, axis, s):
        key = (axis, s)
        masks = self._masks.get(key)
        if masks is None:
            o = self.cyclic_orders[axis]
            low = self.all_coords[:, axis] < (o - s)
            lo = bool_to_bits(low)
            masks = (lo, self.full ^ lo)
            if len(self._masks) > 4096:
                self._masks.clear()
            self._masks[key] = masks
        return masks

    def shift_axis(self, bits, axis, s):
        """Translate a bitset by ``s`` along one cyclic factor."""
        o = self.cyclic_orders[axis]
        s %= o
        if s == 0 or bits == 0:
            return bits
        st = self.strides[axis]
        if axis == 0:
            k = s * st
            return ((bits << k) | (bits >> (self.order - k))) & self.full
        lo, hi = self._axis_masks(axis, s)
        return ((bits & lo) << (s * st)) | ((bits & hi) >> ((o - s) * st))

    def translate(self, bits, g):
        """Bitset of ``g + S`` for the bitset ``S``."""
        if g == 0 or bits == 0:
            return bits
        for axis, c in enumerate(self.element_coords(g)):
            if c:
                bits = self.shift_axis(bits, axis, c)
        return bits

    # -- subsets -----------------------------------------------------------

    def subset(self, elements=()):
        bits = 0
        for e in elements:
            e = int(e)
            if not 0 <= e < self.order:
                raise StructuralError(f"element {e} outside group of order {self.order}")
            bits |= 1 << e
        return GroupSubset(self, bits)

    def subset_from_bool(self, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.order,):
            raise StructuralError("mask length does not match group order")
        return GroupSubset(self, bool_to_bits(mask))

    def empty(self):
        return GroupSubset(self, 0)

    def whole(self):
        return GroupSubset(self, self.full)

    def two_part_is_elementary(self):
        return all(o % 4 for o in self.cyclic_orders)


@dataclass(frozen=True)
class GroupSubset:
    """A subset of a finite abelian group stored as a bitset."""

    group: FiniteAbelianGroup
    bits: int

    def __len__(self):
        return self.bits.bit_count()

    def __contains__(self, g):
        return 0 <= g < self.group.order and (self.bits >> g) & 1 == 1

    def __iter__(self):
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __repr__(self):
        elems = list(itertools.islice(self, 12))
        more = ", ..." if len(self) > 12 else ""
        return f"GroupSubset({list(self.group.cyclic_orders)}, {{{', '.join(map(str, elems))}{more}}})"

    def _same(self, other):
        if not isinstance(other, GroupSubset):
            return NotImplemented
        if other.group != self.group:
            raise StructuralError("subsets live in different groups")
        return True

    def __or__(self, other):
        self._same(other)
        return GroupSubset(self.group, self.bits | other.bits)

    def __and__(self, other):
        self._same(other)
        return GroupSubset(self.group, self.bits & other.bits)

    def __sub__(self, other):
        self._same(other)
        return GroupSubset(self.group, self.bits & ~other.bits)

    def __le__(self, other):
        self._same(other)
        return self.bits & ~other.bits == 0

    def complement(self):
        return GroupSubset(self.group, self.group.full ^ self.bits)

    def is_empty(self):
        return self.bits == 0

    def is_full(self):
        return self.bits == self.group.full

    def indices(self):
        return bits_to_indices(self.bits, self.group.order)

    def as_bool(self):
        return bits_to_bool(self.bits, self.group.order)

    def elements(self):
        return [int(i) for i in self.indices()]

    def translate(self, g):
        return GroupSubset(self.group, self.group.translate(self.bits, g))

    def negate(self):
        G = self.group
        if not self.bits:
            return self
        return GroupSubset(G, bool_to_bits(np.isin(np.arange(G.order), G.neg_array(self.indices()))))


class Subgroup:
    """A subgroup together with its index and a coset labelling.

    ``coset_label[g]`` lies in ``0..index-1`` and is ``0`` exactly on members.
    """

    def __init__(self, membership, coset_label=None):
        self.membership = membership
        self.group = membership.group
        self.order = len(membership)
        if self.order == 0 or self.group.order % self.order:
            raise InvariantViolation(f"a subgroup cannot have {self.order} elements in a group of order {self.group.order}")
        self.index = self.group.order // self.order
        if coset_label is not None:
            self.__dict__["coset_label"] = np.asarray(coset_label, dtype=np.int64)

    @classmethod
    def from_elements(cls, group, elements):
        sub = group.subset(elements)
        if not is_closed(sub):
            raise InvariantViolation("subset is not closed under the group law")
        return cls(sub)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.membership == self.membership

    def __hash__(self):
        return hash(self.membership)

    def __repr__(self):
        return f"Subgroup(index={self.index}, order={self.order}, in {self.group!r})"

    def __contains__(self, g):
        return g in self.membership

    def elements(self):
        return self.membership.elements()

    @cached_property
    def coset_label(self):
        G = self.group
        labels = np.full(G.order, -1, dtype=np.int64)
        members = self.membership.indices()
        nxt = 0
        for x in range(G.order):
            if labels[x] < 0:
                labels[G.add_array(np.full(members.shape, x), members)] = nxt
                nxt += 1
        return labels

    def coset(self, label):
        return self.group.subset_from_bool(self.coset_label == label)


def is_closed(subset):
    """True iff the subset contains 0 and is closed under addition."""
    if 0 not in subset:
        return False
    G, bits = subset.group, subset.bits
    return all(G.translate(bits, g) == bits for g in subset)


def make_group(cyclic_orders, max_order=MAX_GROUP_ORDER):
    """Product of cyclic groups of the given orders (factors of order 1 are dropped)."""
    orders = []
    for o in cyclic_orders:
        if int(o) != o or o < 1:
            raise ValueError(f"cyclic orders must be integers >= 1, got {o!r}")
        if o > 1:
            orders.append(int(o))
    n = prod(orders)
    if n > max_order:
        raise LimitError(f"group order {n} exceeds the configured maximum {max_order}")
    return FiniteAbelianGroup(sorted(orders))


def abelian_groups_of_order(n):
    """One representative per isomorphism class, as primary cyclic orders."""
    per_prime = []
    for p, k in sorted(factorint(n).items()):
        shapes = []
        for part in partitions(k):
            shapes.append(sorted(p**size for size, mult in part.items() for _ in range(mult)))
        per_prime.append(shapes)
    out = []
    for combo in itertools.product(*per_prime):
        out.append(tuple(sorted(o for shape in combo for o in shape)))
    return sorted(out)


@lru_cache(maxsize=256)
def _subgroups_of_small_group(orders, Y):
    """Subgroups of order ``Y`` of ``prod Z/orders`` as bitsets (breadth-first joins)."""
    T = FiniteAbelianGroup(orders)
    cyclic = []
    for g in range(T.order):
        bits, x = 0, 0
        while True:
            bits |= 1 << x
            x = T.add(x, g)
            if x == 0:
                break
        cyclic.append(bits)
    found = {1}
    frontier = [1]
    while frontier:
        nxt = []
        for S in frontier:
            if S.bit_count() == Y:
                continue
            for g in range(T.order):
                if (S >> g) & 1:
                    continue
                J = 0
                for c in GroupSubset(T, cyclic[g]):
                    J |= T.translate(S, c)
                if J not in found and Y % J.bit_count() == 0:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return T, tuple(sorted(S for S in found if S.bit_count() == Y))


@lru_cache(maxsize=512)
def _subgroups_of_index(G, Y):
    if Y == 1:
        return (Subgroup(G.whole(), np.zeros(G.order, dtype=np.int64)),)
    # Characters of G killed by Y form prod Z/gcd(o_i, Y); a subgroup K of
    # them of order Y has annihilator of index Y, the kernel of G -> dual(K).
    t = tuple(gcd(o, Y) for o in G.cyclic_orders)
    T, duals = _subgroups_of_small_group(t, Y)
    weights = np.array([Y // ti for ti in t], dtype=np.int64)
    coords = G.all_coords
    out = []
    for K in duals:
        gens = _generating_set(Subgroup(GroupSubset(T, K)))
        chi = np.array([T.element_coords(x) for x in gens], dtype=np.int64)
        values = (coords @ (chi * weights).T) % Y
        _, labels = np.unique(values, axis=0, return_inverse=True)
        labels = labels.reshape(-1).astype(np.int64)
        if np.count_nonzero(labels == 0) * Y != G.order:
            raise InvariantViolation("annihilator has the wrong index")
        out.append(Subgroup(G.subset_from_bool(labels == 0), labels))
    out.sort(key=lambda H: H.membership.bits)
    return tuple(out)


def enumerate_subgroups_of_index(G, Y, max_index=MAX_SUBGROUP_INDEX):
    """All subgroups of index exactly ``Y``, each with coset labels.

    Each subgroup is the kernel of a surjection of ``G`` onto an abelian group
    of order ``Y``, obtained from a subgroup of order ``Y`` of the character
    group; the duality makes the list duplicate-free.
    """
    if Y < 1:
        raise ValueError("index must be >= 1")
    if Y > max_index:
        raise LimitError(f"index {Y} exceeds the configured maximum {max_index}")
    if G.order % Y:
        return []
    return list(_subgroups_of_index(G, Y))


def all_subgroups(G, max_index=MAX_SUBGROUP_INDEX):
    out = []
    for Y in range(1, min(G.order, max_index) + 1):
        out.extend(enumerate_subgroups_of_index(G, Y, max_index))
    return out


def _generating_set(H):
    G = H.group
    gens = []
    span = 1  # bitset of {0}
    for h in H.membership:
        if not (span >> h) & 1:
            gens.append(h)
            cyc = 0
            x = 0
            while True:
                cyc |= 1 << x
                x = G.add(x, h)
                if x == 0:
                    break
            acc = 0
            for c in GroupSubset(G, cyc):
                acc |= G.translate(span, c)
            span = acc
    return gens


def _diagonalize(rows, ncols):
    """Reduce an integer relation matrix to diagonal form by row and column moves.

    Returns the diagonal and the accumulated column transform ``T`` such that
    ``P @ rows @ T`` is diagonal for some unimodular ``P``.
    """
    A = [list(r) for r in rows]
    m = len(A)
    T = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def swap_cols(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in T:
            row[a], row[b] = row[b], row[a]

    def addmul_col(dst, src, f):
        for row in A:
            row[dst] -= f * row[src]
        for row in T:
            row[dst] -= f * row[src]

    diag = []
    for t in range(min(m, ncols)):
        while True:
            cand = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, ncols) if A[i][j]]
            if not cand:
                break
            _, i, j = min(cand)
            A[t], A[i] = A[i], A[t]
            if j != t:
                swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    f = A[i][t] // p
                    A[i] = [a - f * b for a, b in zip(A[i], A[t])]
                    clean &= A[i][t] == 0
            for j in range(t + 1, ncols):
                if A[t][j]:
                    addmul_col(j, t, A[t][j] // p)
                    clean &= A[t][j] == 0
            if clean:
                break
        diag.append(abs(A[t][t]) if t < m else 0)
    return diag, T


def quotient_map(G, H):
    """The quotient ``G/H`` and the projection as an index array."""
    if H.group != G:
        raise StructuralError("subgroup belongs to a different group")
    if not is_closed(H.membership):
        raise InvariantViolation("H is not a subgroup (not closed)")
    rows = [[o if i == j else 0 for j in range(G.rank)] for i, o in enumerate(G.cyclic_orders)]
    rows += [list(G.element_coords(h)) for h in _generating_set(H)]
    if G.rank == 0:
        return make_group([]), np.zeros(G.order, dtype=np.int64)
    diag, T = _diagonalize(rows, G.rank)
    keep = [j for j, d in enumerate(diag) if d > 1]
    keep.sort(key=lambda j: diag[j])
    Q = make_group([diag[j] for j in keep])
    if not keep:
        return Q, np.zeros(G.order, dtype=np.int64)
    mods = np.array([diag[j] for j in keep], dtype=np.int64)
    Tk = np.array([[T[i][j] % diag[j] for j in keep] for i in range(G.rank)], dtype=np.int64)
    projection = Q.index((G.all_coords @ Tk) % mods)
    return Q, projection


# -- unit groups --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnitGroupMap:
    """``(Z/qZ)*`` written additively.

    ``to_index[a]`` is the element index of the residue ``a`` (``-1`` when
    ``gcd(a, q) > 1``); ``from_index`` is its inverse.
    """

    q: int
    group: FiniteAbelianGroup
    to_index: np.ndarray
    from_index: np.ndarray
    generators: tuple

    def index_of(self, a):
        i = int(self.to_index[a % self.q])
        if i < 0:
            raise ValueError(f"{a} is not invertible modulo {self.q}")
        return i

    def residue(self, i):
        return int(self.from_index[i])

    def subset(self, residues):
        return self.group.subset(self.index_of(a) for a in residues)

    def residues(self, subset):
        return sorted(int(r) for r in self.from_index[subset.indices()])

    def subgroup(self, residues):
        return Subgroup.from_elements(self.group, [self.index_of(a) for a in residues])


def _prime_factors(n):
    return sorted(factorint(n))


def primitive_root(p, k=1):
    """Least primitive root modulo the odd prime power ``p**k``."""
    m = p**k
    phi = m - m // p
    rs = _prime_factors(phi)
    for g in range(2, m):
        if g % p and all(pow(g, phi // r, m) != 1 for r in rs):
            return g
    raise ValueError(f"no primitive root modulo {m}")


def _crt_lift(g, m, q):
    """The residue mod q that is g mod m and 1 mod q/m (m, q/m coprime)."""
    rest = q // m
    if rest == 1:
        return g % q
    # x = 1 + rest * t with x = g (mod m)
    t = ((g - 1) * pow(rest, -1, m)) % m
    return (1 + rest * t) % q


@lru_cache(maxsize=4096)
def unit_group(q, max_order=MAX_GROUP_ORDER):
    """Build ``(Z/qZ)*`` as a product of cyclic groups via explicit generators."""
    if q <= 2:
        raise UnsupportedModulus(f"unit groups are built for q >= 3, got {q}")
    if q >= 1 << 31:
        raise LimitError("modulus too large for table discrete logarithms")
    comps = []  # (order, generator mod q)
    for p, k in sorted(factorint(q).items()):
        m = p**k
        if p == 2:
            if k == 2:
                comps.append((2, _crt_lift(m - 1, m, q)))
            elif k >= 3:
                comps.append((2, _crt_lift(m - 1, m, q)))
                comps.append((m // 4, _crt_lift(5, m, q)))
        else:
            comps.append((m - m // p, _crt_lift(primitive_root(p, k), m, q)))
    comps.sort(key=lambda c: c[0])
    G = make_group([o for o, _ in comps], max_order=max_order)
    table = np.ones(1, dtype=np.int64)
    for o, g in comps:
        pw = np.empty(o, dtype=np.int64)
        x = 1
        for e in range(o):
            pw[e] = x
            x = x * g % q
        table = ((table[:, None] * pw[None, :]) % q).ravel()
    to_index = np.full(q, -1, dtype=np.int64)
    to_index[table] = np.arange(G.order, dtype=np.int64)
    if np.count_nonzero(to_index >= 0) != G.order:
        raise InvariantViolation(f"discrete log table for q={q} is not a bijection")
    unit = UnitGroupMap(q, G, to_index, table, tuple(g for _, g in comps))
    _check_generators(unit)
    return unit


def _check_generators(unit):
    G, q = unit.group, unit.q
    idx = np.arange(G.order, dtype=np.int64)
    for axis, g in enumerate(unit.generators):
        e = [0] * G.rank
        e[axis] = 1
        step = np.full(G.order, G.element_index(e), dtype=np.int64)
        lhs = unit.to_index[(unit.from_index * g) % q]
        if not np.array_equal(lhs, G.add_array(idx, step)):
            raise InvariantViolation(f"discrete log for q={q} is not a homomorphism")


def euler_phi(q):
    return prod(p**(k - 1) * (p - 1) for p, k in factorint(q).items())


def rational_density(num, den=None):
    """Exact density in ``[0, 1]``."""
    eta = Fraction(num) if den is None else Fraction(num, den)
    if not 0 <= eta <= 1:
        raise ValueError(f"density {eta} outside [0, 1]")
    return eta


def density(A):
    return Fraction(len(A), A.group.order)
