"""Dense subsets of F_p^n and their additive arithmetic.

A GroupSet wraps a Python int used as a bitset: bit ``i`` is set iff the
element with index ``i`` belongs to the set. Translation by a vector is an
index permutation that factors into one rotation per nonzero digit, so it
costs O(n) word-parallel mask/shift operations (see GroupSpec.translate_bits).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Union

from .errors import TheoremViolation, UsageError
from .group import GroupSpec, Subspace, Vector, full_space, mat_vec, rref


def iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class GroupSet:
    """Immutable subset of F_p^n backed by an integer bitset."""

    __slots__ = ("spec", "bits", "card")

    def __init__(self, spec: GroupSpec, bits: int = 0):
        if bits < 0 or bits >> spec.order:
            raise UsageError("bitset has members outside the group")
        self.spec = spec
        self.bits = bits
        self.card = bits.bit_count()

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_indices(cls, spec: GroupSpec, indices: Iterable[int]) -> "GroupSet":
        bits = 0
        for i in indices:
            if not 0 <= i < spec.order:
                raise UsageError(f"index {i} out of range for {spec}")
            bits |= 1 << i
        return cls(spec, bits)

    @classmethod
    def from_coords(cls, spec: GroupSpec, points: Iterable[Sequence[int]]) -> "GroupSet":
        idx = []
        for pt in points:
            if len(pt) != spec.n or any(not 0 <= c < spec.p for c in pt):
                raise UsageError(f"point {tuple(pt)} is not an element of F_{spec.p}^{spec.n}")
            idx.append(spec.encode(pt))
        return cls.from_indices(spec, idx)

    @classmethod
    def from_vectors(cls, vs: Iterable[Vector], spec: GroupSpec) -> "GroupSet":
        return cls.from_indices(spec, (v.index for v in vs))

    @classmethod
    def empty(cls, spec: GroupSpec) -> "GroupSet":
        return cls(spec, 0)

    @classmethod
    def full(cls, spec: GroupSpec) -> "GroupSet":
        return cls(spec, spec.universe)

    @classmethod
    def coset(cls, H: Subspace, rep: Vector) -> "GroupSet":
        return cls(H.spec, H.spec.translate_bits(H.mask(), rep.index))

    # -- container protocol -------------------------------------------------

    def __len__(self) -> int:
        return self.card

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, item: Union[Vector, int, Sequence[int]]) -> bool:
        if isinstance(item, Vector):
            if item.spec != self.spec:
                return False
            i = item.index
        elif isinstance(item, int):
            i = item
        else:
            i = self.spec.encode(item)
        return 0 <= i < self.spec.order and bool(self.bits >> i & 1)

    def indices(self) -> List[int]:
        return list(iter_bits(self.bits))

    def __iter__(self) -> Iterator[Vector]:
        spec = self.spec
        for i in iter_bits(self.bits):
            yield Vector(spec, spec.digits[i])

    def coords(self) -> List[tuple]:
        return [self.spec.digits[i] for i in iter_bits(self.bits)]

    def min_element(self) -> Vector:
        if not self.bits:
            raise UsageError("empty set has no minimum")
        i = (self.bits & -self.bits).bit_length() - 1
        return self.spec.element(i)

    # -- comparisons and boolean algebra ------------------------------------

    def _check(self, other: "GroupSet") -> None:
        if not isinstance(other, GroupSet) or other.spec != self.spec:
            raise UsageError("sets live in different groups")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupSet) and other.spec == self.spec and other.bits == self.bits

    def __hash__(self) -> int:
        return hash((self.spec, self.bits))

    def __or__(self, other: "GroupSet") -> "GroupSet":
        self._check(other)
        return GroupSet(self.spec, self.bits | other.bits)

    def __and__(self, other: "GroupSet") -> "GroupSet":
        self._check(other)
        return GroupSet(self.spec, self.bits & other.bits)

    def __sub__(self, other: "GroupSet") -> "GroupSet":
        self._check(other)
        return GroupSet(self.spec, self.bits & ~other.bits)

    def complement(self) -> "GroupSet":
        return GroupSet(self.spec, self.spec.universe ^ self.bits)

    def issubset(self, other: "GroupSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "GroupSet") -> bool:
        self._check(other)
        return self.bits & other.bits == 0

    def __repr__(self) -> str:
        pts = ", ".join(str(c) for c in self.coords()[:8])
        more = ", ..." if self.card > 8 else ""
        return f"GroupSet(p={self.spec.p}, n={self.spec.n}, card={self.card}, {{{pts}{more}}})"


# -- pointwise maps ---------------------------------------------------------


def negate_bits(spec: GroupSpec, bits: int) -> int:
    neg = spec.neg_table
    out = 0
    for i in iter_bits(bits):
        out |= 1 << neg[i]
    return out


def negate(A: GroupSet) -> GroupSet:
    return GroupSet(A.spec, negate_bits(A.spec, A.bits))


def translate(A: GroupSet, t: Vector) -> GroupSet:
    if t.spec != A.spec:
        raise UsageError("translation vector belongs to a different group")
    return GroupSet(A.spec, A.spec.translate_bits(A.bits, t.index))


def dilate(A: GroupSet, c: int) -> GroupSet:
    spec = A.spec
    c %= spec.p
    if c == 0:
        raise UsageError("dilation factor must be nonzero mod p")
    return GroupSet.from_indices(spec, (spec.scale(c, i) for i in iter_bits(A.bits)))


def linear_image(A: GroupSet, M: Sequence[Sequence[int]]) -> GroupSet:
    """``{M a : a in A}`` for a matrix ``M`` given as rows."""
    spec = A.spec
    return GroupSet.from_indices(spec, (spec.encode(mat_vec(M, d, spec.p)) for d in A.coords()))


def product_with_full(A: GroupSet, extra: int) -> GroupSet:
    """``A x F_p^extra``, new coordinates appended after the existing ones."""
    if extra == 0:
        return A
    spec = GroupSpec(A.spec.p, A.spec.n + extra)
    stride = A.spec.order
    bits = 0
    for hi in range(spec.p**extra):
        bits |= A.bits << (hi * stride)
    return GroupSet(spec, bits)


# -- sumsets ----------------------------------------------------------------


def sumset_bits(spec: GroupSpec, a: int, b: int) -> int:
    if a.bit_count() > b.bit_count():
        a, b = b, a
    out = 0
    for i in iter_bits(a):
        out |= spec.translate_bits(b, i)
    return out


def sumset(A: GroupSet, B: GroupSet) -> GroupSet:
    A._check(B)
    return GroupSet(A.spec, sumset_bits(A.spec, A.bits, B.bits))


def difference_set(A: GroupSet, B: GroupSet) -> GroupSet:
    A._check(B)
    return GroupSet(A.spec, sumset_bits(A.spec, A.bits, negate_bits(A.spec, B.bits)))


# -- periods and Kneser ------------------------------------------------------


def symmetry_group(X: GroupSet) -> Subspace:
    """``{g : g + X = X}`` as a subspace.

    A period g satisfies ``x0 + g in X`` for any fixed ``x0 in X``, so only the
    ``|X|`` candidates in ``X - x0`` are tested.
    """
    spec = X.spec
    if X.bits in (0, spec.universe):
        return full_space(spec)
    x0 = (X.bits & -X.bits).bit_length() - 1
    periods = []
    for x in iter_bits(X.bits):
        g = spec.sub(x, x0)
        if g and spec.translate_bits(X.bits, g) == X.bits:
            periods.append(spec.digits[g])
    return Subspace(spec, tuple(rref(periods, spec.p)))


@dataclass(frozen=True)
class KneserDefect:
    lhs: int
    rhs: int
    sym_dim: int

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def kneser_defect(A: GroupSet, B: GroupSet) -> KneserDefect:
    """Both sides of Kneser's inequality for the pair (A, B)."""
    A._check(B)
    if not A or not B:
        raise UsageError("Kneser's inequality needs non-empty sets")
    S = sumset(A, B)
    H = symmetry_group(S)
    Hset = GroupSet(A.spec, H.mask())
    rhs = len(sumset(A, Hset)) + len(sumset(B, Hset)) - H.size
    return KneserDefect(len(S), rhs, H.dim)


def simple_kneser_sumset(A: GroupSet, B: GroupSet, H: Subspace, a: Vector, b: Vector) -> GroupSet:
    """``A + B`` for ``A in a + H``, ``B in b + H`` with ``|A| + |B| > |H|``.

    The result is checked to be the whole coset ``a + b + H``.
    """
    A._check(B)
    if H.spec != A.spec:
        raise UsageError("subspace belongs to a different group")
    if not A.issubset(GroupSet.coset(H, a)) or not B.issubset(GroupSet.coset(H, b)):
        raise UsageError("A and B must lie in the cosets a + H and b + H")
    if len(A) + len(B) <= H.size:
        raise UsageError("need |A| + |B| > |H|")
    S = sumset(A, B)
    if S != GroupSet.coset(H, a + b):
        raise TheoremViolation(f"A + B is not the full coset a + b + H for {A}, {B}")
    return S
