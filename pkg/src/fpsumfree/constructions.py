"""Builders for the explicit extremal and near-extremal sets.

Expected properties recorded here are claims, not facts: the test suite and
``verify-paper`` recompute every one of them with the certifiers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .errors import UsageError
from .group import GroupSpec, LinearFunctional, Vector, is_prime
from .setops import GroupSet, negate, product_with_full
from .sumfree import interval_spec


def build_AVw(spec: GroupSpec, phi: LinearFunctional, w: Vector) -> GroupSet:
    """``{m w, ..., (2m - 1) w} + ker(phi)``, a sum-free set of maximum size."""
    if spec.p == 2 or spec.p % 3 != 2:
        raise UsageError("A(V, w) needs an odd prime p = 2 mod 3")
    if phi.spec != spec or w.spec != spec:
        raise UsageError("functional and vector must live in the given group")
    t = phi(w)
    if t == 0:
        raise UsageError("w must lie outside ker(phi)")
    iv = interval_spec(spec.p)
    bits = 0
    for x in iv.interval:
        bits |= phi.level_masks[(x * t) % spec.p]
    return GroupSet(spec, bits)


def _f5_cube_half() -> List[tuple]:
    pts = [(1, x, y) for x in (1, 2) for y in range(5)]
    pts += [(1, 0, y) for y in (1, 2)]
    pts += [(2, 0, 0), (2, 0, 1)]
    return pts


def build_example_nonnormal_F5(n: int) -> GroupSet:
    """``Y x F_5^(n-3)`` with ``Y = X | -X`` the 28-point set in F_5^3."""
    if n < 3:
        raise UsageError("the non-normal F_5 construction needs n >= 3")
    X = GroupSet.from_coords(GroupSpec(5, 3), _f5_cube_half())
    return product_with_full(X | negate(X), n - 3)


def build_example_A2(p: int, n: int = 2) -> GroupSet:
    """The non-normal set of size ``(m - 1) p^(n-1)`` for primes p >= 11, p = 2 mod 3."""
    if not is_prime(p) or p < 11 or p % 3 != 2:
        raise UsageError("A_2 is defined for primes p >= 11 with p = 2 mod 3")
    if n < 2:
        raise UsageError("A_2 needs n >= 2")
    m = (p + 1) // 3
    pts = [(m - 1, 0), (2 * m - 1, p - 1)]
    pts += [(m, y) for y in range(p) if y != p - 1]
    pts += [(2 * m - 2, y) for y in range(p) if y != 0]
    pts += [(x, y) for x in range(m + 1, 2 * m - 2) for y in range(p)]
    return product_with_full(GroupSet.from_coords(GroupSpec(p, 2), pts), n - 2)


F7_POINTS = [
    (3, 0), (4, 0), (3, 1), (4, 1), (3, 2), (4, 2), (2, 3),
    (3, 3), (4, 3), (3, 4), (4, 4), (3, 5), (4, 5), (3, 6),
]


def build_example_F7() -> GroupSet:
    """A 14-point sum-free set in F_7^2 that no three parallel lines cover."""
    return GroupSet.from_coords(GroupSpec(7, 2), F7_POINTS)


def build_F2_extremal(n: int = 4) -> GroupSet:
    if n != 4:
        raise UsageError("only the 4-dimensional witness is provided")
    pts = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 1, 1)]
    return GroupSet.from_coords(GroupSpec(2, 4), pts)


PENTAGON_POINTS = [(0, 1), (1, 2), (2, 2), (3, 2), (4, 3)]


def build_F5_pentagon() -> GroupSet:
    return GroupSet.from_coords(GroupSpec(5, 2), PENTAGON_POINTS)


@dataclass(frozen=True)
class Expected:
    """Claimed properties; ``None`` means not applicable or not claimed."""

    size: int
    sum_free: bool
    normal: Optional[bool] = None
    cover3: Optional[bool] = None
    proper_coset: Optional[bool] = None


@dataclass(frozen=True)
class NamedConstruction:
    name: str
    spec: GroupSpec
    set: GroupSet
    expected: Expected


def fixtures() -> List[NamedConstruction]:
    f5_2 = GroupSpec(5, 2)
    f11_2 = GroupSpec(11, 2)
    f5_3 = GroupSpec(5, 3)
    x1 = LinearFunctional(f5_2, (1, 0))
    out = [
        NamedConstruction("avw_f5_2", f5_2, build_AVw(f5_2, x1, f5_2.unit(0)), Expected(10, True, True, True)),
        NamedConstruction(
            "avw_f5_3",
            f5_3,
            build_AVw(f5_3, LinearFunctional(f5_3, (0, 1, 2)), f5_3.vector((0, 1, 1))),
            Expected(50, True, True, True),
        ),
        NamedConstruction(
            "avw_f11_2",
            f11_2,
            build_AVw(f11_2, LinearFunctional(f11_2, (1, 3)), f11_2.unit(1)),
            Expected(44, True, True),
        ),
        NamedConstruction("nonnormal_f5_3", f5_3, build_example_nonnormal_F5(3), Expected(28, True, False)),
        NamedConstruction("nonnormal_f5_4", GroupSpec(5, 4), build_example_nonnormal_F5(4), Expected(140, True, False)),
        NamedConstruction("a2_f11_2", f11_2, build_example_A2(11, 2), Expected(33, True, False)),
        NamedConstruction("a2_f17_2", GroupSpec(17, 2), build_example_A2(17, 2), Expected(85, True, False)),
        NamedConstruction("f7_full_size", GroupSpec(7, 2), build_example_F7(), Expected(14, True, None, False)),
        NamedConstruction("f2_extremal", GroupSpec(2, 4), build_F2_extremal(4), Expected(5, True, proper_coset=False)),
        NamedConstruction("f5_pentagon", f5_2, build_F5_pentagon(), Expected(5, True, False)),
    ]
    return out


def fixture(name: str) -> NamedConstruction:
    for f in fixtures():
        if f.name == name:
            return f
    raise KeyError(name)
