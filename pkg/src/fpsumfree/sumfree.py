"""Certifiers and structural detectors for sum-free sets in F_p^n.

Positive answers come back as small certificate objects that can be
re-checked independently with their ``verify`` method; negative answers are
``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import TheoremViolation, UsageError
from .group import (
    GroupSpec,
    LinearFunctional,
    Subspace,
    Vector,
    hyperplanes,
    hyperplanes_containing,
    is_prime,
    mat_inverse,
    mat_vec,
    prime_factors,
    span,
)
from .setops import GroupSet, difference_set, iter_bits, sumset


# -- the central interval -----------------------------------------------------


@dataclass(frozen=True)
class IntervalSpec:
    """``I = {m, ..., 2m - 1}`` in F_p with ``m = (p + 1) / 3``."""

    p: int
    m: int = field(init=False)
    interval: FrozenSet[int] = field(init=False)

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.p % 3 != 2:
            raise UsageError(f"the central interval needs a prime p = 2 mod 3, got {self.p}")
        m = (self.p + 1) // 3
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "interval", frozenset(range(m, 2 * m)))
        I, p = self.interval, self.p
        rest = frozenset(range(p)) - I
        sums = frozenset((a + b) % p for a in I for b in I)
        diffs = frozenset((a - b) % p for a in I for b in I)
        if len(I) != m or sums != rest or diffs != rest:
            raise TheoremViolation(f"I + I = I - I = F_p minus I fails for p={p}")

    def shifted(self, t: int) -> FrozenSet[int]:
        return frozenset((t + x) % self.p for x in self.interval)

    def translates_containing(self, J: Iterable[int]) -> List[int]:
        """All t with ``J`` contained in ``t + I``."""
        J = frozenset(x % self.p for x in J)
        return [t for t in range(self.p) if J <= self.shifted(t)]

    def offset_of(self, J: Iterable[int]) -> Optional[int]:
        """The t with ``J == t + I``, if any."""
        J = frozenset(J)
        if len(J) != self.m:
            return None
        for cand in range(self.p):
            if self.shifted(cand) == J:
                return cand
        return None


@lru_cache(maxsize=None)
def interval_spec(p: int) -> IntervalSpec:
    return IntervalSpec(p)


def _normality_spec(spec: GroupSpec) -> IntervalSpec:
    if spec.p == 2 or spec.p % 3 != 2:
        raise UsageError(
            f"normality is only defined for odd p = 2 mod 3 (got p={spec.p}); "
            "use coset_cover or affine_coset_containment instead"
        )
    return interval_spec(spec.p)


def image_residues(phi: LinearFunctional, A: GroupSet) -> FrozenSet[int]:
    return frozenset(r for r, mask in enumerate(phi.level_masks) if A.bits & mask)


# -- sum-freeness -------------------------------------------------------------


@dataclass(frozen=True)
class SumFreeViolation:
    a: Vector
    b: Vector
    c: Vector

    def verify(self, A: GroupSet) -> bool:
        return self.a + self.b == self.c and all(x in A for x in (self.a, self.b, self.c))

    def to_dict(self) -> dict:
        return {"kind": "SumFreeViolation", "a": list(self.a.coords), "b": list(self.b.coords), "c": list(self.c.coords)}


def find_violation(A: GroupSet) -> Optional[SumFreeViolation]:
    """The triple ``a + b = c`` in A with (index a, index b) least, or None."""
    spec = A.spec
    for a in iter_bits(A.bits):
        ok_b = A.bits & spec.translate_bits(A.bits, spec.neg_table[a])
        if ok_b:
            b = (ok_b & -ok_b).bit_length() - 1
            return SumFreeViolation(spec.element(a), spec.element(b), spec.element(spec.add(a, b)))
    return None


def is_sum_free_bits(spec: GroupSpec, bits: int) -> bool:
    for a in iter_bits(bits):
        if spec.translate_bits(bits, a) & bits:
            return False
    return True


def is_sum_free(A: GroupSet) -> bool:
    return is_sum_free_bits(A.spec, A.bits)


# -- maximum size of a sum-free set ----------------------------------------------


def lambda_max(invariant_factors: Sequence[int]) -> int:
    """Largest sum-free subset of the abelian group with these invariant factors."""
    if not invariant_factors:
        raise UsageError("need at least one invariant factor")
    if any(not isinstance(f, int) or f < 2 for f in invariant_factors):
        raise UsageError(f"invariant factors must be integers >= 2, got {list(invariant_factors)}")
    N = math.prod(invariant_factors)
    primes = prime_factors(N)
    two_mod_three = [q for q in primes if q % 3 == 2]
    if two_mod_three:
        q = two_mod_three[0]
        return N * (q + 1) // (3 * q)
    if N % 3 == 0:
        return N // 3
    m = math.lcm(*invariant_factors)
    return (m - 1) * N // (3 * m)


# -- normality and coset covers ---------------------------------------------------


@dataclass(frozen=True)
class NormalityWitness:
    """``scale * functional`` maps the set into the central interval."""

    functional: LinearFunctional
    scale: int

    @property
    def coefficients(self) -> Tuple[int, ...]:
        p = self.functional.spec.p
        return tuple((self.scale * c) % p for c in self.functional.coeffs)

    def verify(self, A: GroupSet) -> bool:
        I = interval_spec(A.spec.p).interval
        return all((self.scale * self.functional(a)) % A.spec.p in I for a in A)

    def to_dict(self) -> dict:
        return {
            "kind": "NormalityWitness",
            "functional": list(self.functional.coeffs),
            "scale": self.scale,
            "coefficients": list(self.coefficients),
        }


@lru_cache(maxsize=None)
def normal_masks(spec: GroupSpec) -> Tuple[int, ...]:
    """Bitmasks of all maximal normal sets ``{x : c*phi(x) in I}`` (deduplicated)."""
    iv = _normality_spec(spec)
    out = []
    for phi in hyperplanes(spec):
        for c in range(1, spec.p):
            mask = 0
            for r in range(spec.p):
                if (c * r) % spec.p in iv.interval:
                    mask |= phi.level_masks[r]
            out.append(mask)
    return tuple(sorted(set(out)))


def normality_witness(A: GroupSet) -> Optional[NormalityWitness]:
    """Lexicographically least raw functional mapping A into the interval."""
    spec = A.spec
    iv = _normality_spec(spec)
    best: Optional[Tuple[Tuple[int, ...], NormalityWitness]] = None
    for phi in hyperplanes(spec):
        img = image_residues(phi, A)
        for c in range(1, spec.p):
            if all((c * r) % spec.p in iv.interval for r in img):
                w = NormalityWitness(phi, c)
                if best is None or w.coefficients < best[0]:
                    best = (w.coefficients, w)
    return None if best is None else best[1]


def is_normal(A: GroupSet) -> bool:
    _normality_spec(A.spec)
    return any(A.bits & ~mask == 0 for mask in normal_masks(A.spec))


@dataclass(frozen=True)
class CoverWitness:
    functional: LinearFunctional
    residues: Tuple[int, ...]

    def verify(self, A: GroupSet, k: int) -> bool:
        return len(self.residues) == min(k, A.spec.p) and image_residues(self.functional, A) <= set(self.residues)

    def to_dict(self) -> dict:
        return {"kind": "CoverWitness", "functional": list(self.functional.coeffs), "residues": list(self.residues)}


def coset_cover(A: GroupSet, k: int) -> Optional[CoverWitness]:
    """A hyperplane whose cosets cover A using k of them, or None.

    The residue set is the image of A padded with the smallest unused residues
    up to size ``min(k, p)``.
    """
    if k < 1:
        raise UsageError("k must be at least 1")
    p = A.spec.p
    for phi in hyperplanes(A.spec):
        img = image_residues(phi, A)
        if len(img) <= k:
            S = set(img)
            for r in range(p):
                if len(S) >= min(k, p):
                    break
                S.add(r)
            return CoverWitness(phi, tuple(sorted(S)))
    return None


@dataclass(frozen=True)
class AffineContainment:
    """A lies in ``base + subspace`` with ``subspace`` proper."""

    subspace: Subspace
    base: Vector

    def verify(self, A: GroupSet) -> bool:
        return self.subspace.dim < A.spec.n and all((a - self.base) in self.subspace for a in A)

    def to_dict(self) -> dict:
        return {"kind": "AffineContainment", "basis": [list(b) for b in self.subspace.basis], "base": list(self.base.coords)}


def affine_coset_containment(A: GroupSet) -> Optional[AffineContainment]:
    if not A:
        raise UsageError("affine containment of the empty set is undefined")
    a0 = A.min_element()
    V = span([a - a0 for a in A], A.spec)
    if V.dim < A.spec.n:
        return AffineContainment(V, a0)
    return None


# -- progressions in F_p -------------------------------------------------------------


@dataclass(frozen=True)
class APWitness:
    step: int
    start: Optional[int]

    def members(self, length: int, p: int) -> FrozenSet[int]:
        if self.start is None:
            return frozenset()
        return frozenset((self.start + k * self.step) % p for k in range(length))


def _residues(A: Iterable[int], p: int) -> FrozenSet[int]:
    return frozenset(x % p for x in A)


def ap_steps(A: Iterable[int], p: int) -> List[int]:
    """Every step d in [1, p-1] for which A is an arithmetic progression."""
    A = _residues(A, p)
    if len(A) <= 1 or len(A) == p:
        return list(range(1, p))
    return [d for d in range(1, p) if len(A & frozenset((x + d) % p for x in A)) == len(A) - 1]


def _ap_start(A: FrozenSet[int], d: int, p: int) -> int:
    if len(A) == p:
        return 0
    return min(x for x in A if (x - d) % p not in A)


def ap_detect(A: Iterable[int], p: int) -> Optional[APWitness]:
    """Smallest-step progression structure of ``A`` in F_p, or None."""
    A = _residues(A, p)
    if not A:
        return APWitness(1, None)
    if len(A) == 1:
        return APWitness(1, next(iter(A)))
    steps = ap_steps(A, p)
    if not steps:
        return None
    return APWitness(steps[0], _ap_start(A, steps[0], p))


@dataclass(frozen=True)
class VosperReport:
    sum_size: int
    equality_holds: bool
    ap_witnesses: Optional[Tuple[APWitness, APWitness]]


def vosper_check(A: Iterable[int], B: Iterable[int], p: int) -> VosperReport:
    A, B = _residues(A, p), _residues(B, p)
    S = frozenset((a + b) % p for a in A for b in B)
    if len(A) < 2 or len(B) < 2 or len(S) > p - 2:
        raise UsageError("Vosper's theorem needs |A|, |B| >= 2 and |A + B| <= p - 2")
    equal = len(S) == len(A) + len(B) - 1
    common = sorted(set(ap_steps(A, p)) & set(ap_steps(B, p)))
    if equal != bool(common):
        raise TheoremViolation(f"Vosper's theorem fails for A={sorted(A)}, B={sorted(B)}, p={p}")
    wit = None
    if common:
        d = common[0]
        wit = (APWitness(d, _ap_start(A, d, p)), APWitness(d, _ap_start(B, d, p)))
    return VosperReport(len(S), equal, wit)


# -- rich subspaces ---------------------------------------------------------------------


def dilation_set(J: Iterable[int], u: Vector) -> GroupSet:
    """``J(u) = {x u : x in J}``."""
    return GroupSet.from_vectors((x * u for x in J), u.spec)


def find_rich_hyperplanes(A: GroupSet, u: Vector) -> List[Tuple[LinearFunctional, int]]:
    """Hyperplanes through u meeting A in at least |A|/p points, richest first."""
    spec = A.spec
    if spec.n < 3:
        raise UsageError("rich hyperplane search needs n >= 3")
    if u.spec != spec or u.is_zero():
        raise UsageError("u must be a nonzero vector of the same group")
    iv = _normality_spec(spec)
    if not dilation_set(iv.interval, u).issubset(A):
        raise UsageError("I(u) is not contained in A")
    if not is_sum_free(A):
        raise UsageError("A is not sum-free")
    rich = []
    for phi in hyperplanes_containing(u):
        k = (A.bits & phi.level_masks[0]).bit_count()
        if spec.p * k >= len(A):
            rich.append((phi, k))
    rich.sort(key=lambda t: -t[1])
    if len(rich) < 2:
        raise TheoremViolation(f"fewer than two rich hyperplanes through {u}")
    return rich


@dataclass(frozen=True)
class RichLine:
    """A coset ``rep + line`` meeting the set in ``members``."""

    line: Subspace
    rep: Vector
    members: Tuple[Vector, ...]
    functional: LinearFunctional

    @property
    def count(self) -> int:
        return len(self.members)


def _require_f52(A: GroupSet) -> None:
    if (A.spec.p, A.spec.n) != (5, 2):
        raise UsageError("this detector is specific to F_5^2")


def find_rich_line(A: GroupSet) -> Optional[RichLine]:
    _require_f52(A)
    spec = A.spec
    for phi in hyperplanes(spec):
        for r, mask in enumerate(phi.level_masks):
            hit = A.bits & mask
            if hit.bit_count() >= 3:
                rep = spec.element((mask & -mask).bit_length() - 1)
                members = tuple(spec.element(i) for i in iter_bits(hit))
                return RichLine(phi.kernel(), rep, members, phi)
    return None


Matrix = Tuple[Tuple[int, ...], ...]

SHAPE_POINTS = ((1, 0), (1, 1), (1, 2))


def normalize_to_shape(A: GroupSet) -> Optional[Matrix]:
    """An invertible M with (1,0), (1,1), (1,2) all in M(A)."""
    _require_f52(A)
    if len(A) < 5 or not is_sum_free(A):
        raise UsageError("normalize_to_shape needs a sum-free set of size >= 5")
    line = find_rich_line(A)
    if line is None:
        return None
    p = 5
    w = line.line.basis[0]
    base = line.rep.coords
    # position of each member along w, measured from base
    xs = {}
    for v in line.members:
        diff = [(a - b) % p for a, b in zip(v.coords, base)]
        x = next(k for k in range(p) if all((k * wi) % p == di for wi, di in zip(w, diff)))
        xs[x] = v
    for d in range(1, p):
        for s in sorted(xs):
            if (s + d) % p in xs and (s + 2 * d) % p in xs:
                start = [(b + s * wi) % p for b, wi in zip(base, w)]
                step = [(d * wi) % p for wi in w]
                B = ((start[0], step[0]), (start[1], step[1]))
                M = mat_inverse(B, p)
                img = {mat_vec(M, v.coords, p) for v in A}
                if all(pt in img for pt in SHAPE_POINTS):
                    return M
    return None


@dataclass(frozen=True)
class TwoCosets:
    functional: LinearFunctional
    residues: Tuple[int, ...]


def find_two_full_cosets(A: GroupSet) -> Optional[TwoCosets]:
    """A hyperplane with two full cosets inside ``(A + A) | (A - A)``."""
    U = (sumset(A, A) | difference_set(A, A)).bits
    for phi in hyperplanes(A.spec):
        full = tuple(r for r, mask in enumerate(phi.level_masks) if mask & ~U == 0)
        if len(full) >= 2:
            return TwoCosets(phi, full)
    return None


# -- the continuity lemma -------------------------------------------------------------


@dataclass(frozen=True)
class GapBound:
    gap: FrozenSet[int]
    bound: FrozenSet[int]
    bound_holds: bool


def interval_gap_bound(p: int, d: int, J: Iterable[int]) -> GapBound:
    """``F_p \\ (I + J)`` against the window ``{|J| - d, ..., d - |J|}``."""
    iv = interval_spec(p)
    m = iv.m
    J = frozenset(J)
    if not 0 <= d <= m - 1:
        raise UsageError(f"d must lie in [0, {m - 1}]")
    if any(not 0 <= x < p for x in J):
        raise UsageError("J must consist of residues in [0, p)")
    if not J <= frozenset(range(m - d, 2 * m + d)):
        raise UsageError(f"J must lie in {{{m - d}, ..., {2 * m - 1 + d}}}")
    if len(J) < d + 1:
        raise UsageError("J needs at least d + 1 elements")
    if not iv.translates_containing(J):
        raise UsageError("J is not contained in a translate of I")
    covered = frozenset((a + b) % p for a in iv.interval for b in J)
    gap = frozenset(range(p)) - covered
    a = len(J) - d
    bound = frozenset(range(a, p - a + 1))
    return GapBound(gap, bound, gap <= bound)


# -- row profiles along a direction -------------------------------------------------------


@dataclass(frozen=True)
class Row:
    v: Vector
    residues: FrozenSet[int]
    good: bool
    offset: Optional[int]


@dataclass(frozen=True)
class RowProfile:
    functional: LinearFunctional
    direction: Vector
    rows: Tuple[Row, ...]
    m: int

    @property
    def _p(self) -> int:
        return self.functional.spec.p

    def good_rows(self) -> List[Row]:
        return [r for r in self.rows if r.good]

    def _in_left(self, t: int) -> bool:
        return t == 0 or t >= self._p - (self.m - 1)

    def _in_right(self, t: int) -> bool:
        return 0 <= t <= self.m - 1

    @property
    def left(self) -> int:
        return sum(1 for r in self.good_rows() if self._in_left(r.offset))

    @property
    def right(self) -> int:
        return sum(1 for r in self.good_rows() if self._in_right(r.offset))

    @property
    def central(self) -> int:
        return sum(1 for r in self.good_rows() if r.offset == 0)

    @property
    def bad(self) -> int:
        return sum(1 for r in self.rows if not r.good)

    @property
    def total(self) -> int:
        return sum(len(r.residues) for r in self.rows)

    def by_index(self) -> Dict[int, Row]:
        return {r.v.index: r for r in self.rows}


def row_profile(A: GroupSet, phi: LinearFunctional, u: Vector) -> RowProfile:
    """Split A along the lines ``v + <u>`` for v in ker(phi)."""
    spec = A.spec
    if phi.spec != spec or u.spec != spec:
        raise UsageError("functional, direction and set must share a group")
    if phi(u) != 1:
        raise UsageError("the direction must satisfy phi(u) = 1")
    iv = _normality_spec(spec)
    p = spec.p
    ui = u.index
    steps = [spec.scale(x, ui) for x in range(p)]
    rows = []
    for vi in iter_bits(phi.level_masks[0]):
        res = frozenset(x for x in range(p) if A.bits >> spec.add(vi, steps[x]) & 1)
        t = iv.offset_of(res)
        rows.append(Row(spec.element(vi), res, t is not None, t))
    return RowProfile(phi, u, tuple(rows), iv.m)


def offset_relation_violations(profile: RowProfile) -> List[Tuple[int, int, str]]:
    """Pairs of good rows (by index) breaking the offset-addition/subtraction rules."""
    spec = profile.functional.spec
    iv = interval_spec(spec.p)
    rows = profile.by_index()
    good = profile.good_rows()
    bad = []
    for r in good:
        for s in good:
            vi, wi = r.v.index, s.v.index
            if not rows[spec.add(vi, wi)].residues <= iv.shifted(r.offset + s.offset):
                bad.append((vi, wi, "+"))
            if not rows[spec.sub(vi, wi)].residues <= iv.shifted(r.offset - s.offset):
                bad.append((vi, wi, "-"))
    return bad


def offset_relation_check(profile: RowProfile) -> bool:
    return not offset_relation_violations(profile)


def all_row_profiles(A: GroupSet) -> List[RowProfile]:
    """One profile per (hyperplane, direction) pair with phi(u) = 1."""
    spec = A.spec
    out = []
    for phi in hyperplanes(spec):
        for ui in iter_bits(phi.level_masks[1]):
            out.append(row_profile(A, phi, spec.element(ui)))
    return out
