"""Arithmetic and linear algebra over F_p^n.

Elements are identified with integers in ``[0, p**n)`` through the little-endian
base-p encoding ``index = sum(coords[i] * p**i)``. Everything else in the
package (bitsets, symmetry tables, set files) is built on that encoding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import UsageError

Coords = Tuple[int, ...]

MAX_ORDER = 2**32


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of ``n`` in increasing order (trial division)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _repeat_pattern(block: int, width: int, count: int) -> int:
    # block repeated `count` times at stride `width`
    return block * (((1 << (width * count)) - 1) // ((1 << width) - 1))


@dataclass(frozen=True)
class GroupSpec:
    """The ambient group F_p^n."""

    p: int
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise UsageError(f"p must be prime, got {self.p!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise UsageError(f"n must be a positive integer, got {self.n!r}")
        if self.p**self.n > MAX_ORDER:
            raise UsageError(f"p^n = {self.p}^{self.n} exceeds the 2^32 index cap")

    def __repr__(self) -> str:
        return f"GroupSpec(p={self.p}, n={self.n})"

    @property
    def order(self) -> int:
        return self.p**self.n

    @cached_property
    def powers(self) -> Tuple[int, ...]:
        return tuple(self.p**i for i in range(self.n))

    @cached_property
    def universe(self) -> int:
        """Bitmask with every element set."""
        return (1 << self.order) - 1

    def encode(self, coords: Sequence[int]) -> int:
        if len(coords) != self.n:
            raise UsageError(f"expected {self.n} coordinates, got {len(coords)}")
        idx = 0
        for c, w in zip(coords, self.powers):
            idx += (c % self.p) * w
        return idx

    def decode(self, index: int) -> Coords:
        if not 0 <= index < self.order:
            raise UsageError(f"index {index} out of range for {self}")
        out = []
        for _ in range(self.n):
            index, r = divmod(index, self.p)
            out.append(r)
        return tuple(out)

    @cached_property
    def coords_table(self) -> np.ndarray:
        """``(order, n)`` array whose row ``i`` holds the coordinates of index ``i``."""
        idx = np.arange(self.order, dtype=np.int64)
        return np.stack([(idx // w) % self.p for w in self.powers], axis=1)

    @cached_property
    def digits(self) -> List[Coords]:
        return [tuple(int(c) for c in row) for row in self.coords_table]

    @cached_property
    def _shift_masks(self) -> List[List[Optional[Tuple[int, int, int, int]]]]:
        # For coordinate i and shift s, indices whose i-th digit is < p - s move
        # up by s * p^i; the rest wrap around and move down by (p - s) * p^i.
        p, N = self.p, self.order
        table = []
        for i in range(self.n):
            w = p**i
            block = w * p
            row: List[Optional[Tuple[int, int, int, int]]] = [None]
            for s in range(1, p):
                lo_block = (1 << ((p - s) * w)) - 1
                lo = _repeat_pattern(lo_block, block, N // block)
                hi = self.universe ^ lo
                row.append((lo, s * w, hi, (p - s) * w))
            table.append(row)
        return table

    def translate_bits(self, bits: int, shift: int) -> int:
        """Bitmask of ``{x + shift : x in bits}``; ``shift`` is an element index."""
        if not shift:
            return bits
        masks = self._shift_masks
        for i, s in enumerate(self.digits[shift]):
            if s:
                lo, up, hi, down = masks[i][s]
                bits = ((bits & lo) << up) | ((bits & hi) >> down)
        return bits

    @cached_property
    def neg_table(self) -> List[int]:
        return [self.encode([-c for c in d]) for d in self.digits]

    @cached_property
    def add_table(self) -> np.ndarray:
        """Full ``(order, order)`` addition table; only for small groups."""
        if self.order > 4096:
            raise UsageError("addition table is only built for p^n <= 4096")
        c = self.coords_table
        s = (c[:, None, :] + c[None, :, :]) % self.p
        return s @ np.array(self.powers, dtype=np.int64)

    def add(self, a: int, b: int) -> int:
        p = self.p
        return sum(((x + y) % p) * w for x, y, w in zip(self.digits[a], self.digits[b], self.powers))

    def sub(self, a: int, b: int) -> int:
        p = self.p
        return sum(((x - y) % p) * w for x, y, w in zip(self.digits[a], self.digits[b], self.powers))

    def scale(self, c: int, a: int) -> int:
        p = self.p
        return sum(((c * x) % p) * w for x, w in zip(self.digits[a], self.powers))

    def vector(self, coords: Sequence[int]) -> "Vector":
        return Vector(self, tuple(int(c) % self.p for c in coords))

    def element(self, index: int) -> "Vector":
        return Vector(self, self.decode(index))

    def zero(self) -> "Vector":
        return Vector(self, (0,) * self.n)

    def unit(self, i: int) -> "Vector":
        """The standard basis vector e_{i+1} (0-based ``i``)."""
        c = [0] * self.n
        c[i] = 1
        return Vector(self, tuple(c))

    def vectors(self) -> Iterator["Vector"]:
        for d in self.digits:
            yield Vector(self, d)


@dataclass(frozen=True)
class Vector:
    spec: GroupSpec
    coords: Coords

    def __post_init__(self) -> None:
        if len(self.coords) != self.spec.n:
            raise UsageError(f"expected {self.spec.n} coordinates, got {len(self.coords)}")
        if any(not 0 <= c < self.spec.p for c in self.coords):
            raise UsageError(f"coordinates {self.coords} not reduced mod {self.spec.p}")

    @property
    def index(self) -> int:
        return self.spec.encode(self.coords)

    def _check(self, other: "Vector") -> None:
        if not isinstance(other, Vector) or other.spec != self.spec:
            raise UsageError("vectors belong to different groups")

    def __add__(self, other: "Vector") -> "Vector":
        return vec_add(self, other)

    def __sub__(self, other: "Vector") -> "Vector":
        self._check(other)
        p = self.spec.p
        return Vector(self.spec, tuple((a - b) % p for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Vector":
        p = self.spec.p
        return Vector(self.spec, tuple((-a) % p for a in self.coords))

    def __rmul__(self, c: int) -> "Vector":
        p = self.spec.p
        return Vector(self.spec, tuple((c * a) % p for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self) -> str:
        return f"Vector{self.coords}"


def vec_add(a: Vector, b: Vector) -> Vector:
    a._check(b)
    p = a.spec.p
    return Vector(a.spec, tuple((x + y) % p for x, y in zip(a.coords, b.coords)))


def rref(rows: Iterable[Sequence[int]], p: int) -> List[Coords]:
    """Reduced row-echelon form over F_p, zero rows dropped."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    out: List[List[int]] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][col], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    out = m[:r]
    return [tuple(row) for row in out]


@dataclass(frozen=True)
class Subspace:
    """A subspace given by its RREF basis; equal subspaces have equal bases."""

    spec: GroupSpec
    basis: Tuple[Coords, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.spec.p**self.dim

    @cached_property
    def _pivots(self) -> Tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(row) if x) for row in self.basis)

    def reduce(self, coords: Sequence[int]) -> Coords:
        """Remainder of ``coords`` after eliminating the pivot columns."""
        p = self.spec.p
        v = [c % p for c in coords]
        for row, piv in zip(self.basis, self._pivots):
            f = v[piv]
            if f:
                v = [(x - f * y) % p for x, y in zip(v, row)]
        return tuple(v)

    def __contains__(self, v: object) -> bool:
        if isinstance(v, Vector):
            coords: Sequence[int] = v.coords
        elif isinstance(v, int):
            coords = self.spec.decode(v)
        else:
            coords = tuple(v)  # type: ignore[arg-type]
        return not any(self.reduce(coords))

    def elements(self) -> Iterator[Vector]:
        p = self.spec.p
        for combo in itertools.product(range(p), repeat=self.dim):
            c = [0] * self.spec.n
            for f, row in zip(combo, self.basis):
                if f:
                    c = [(x + f * y) % p for x, y in zip(c, row)]
            yield Vector(self.spec, tuple(c))

    def indices(self) -> List[int]:
        return sorted(v.index for v in self.elements())

    def mask(self) -> int:
        bits = 0
        for i in self.indices():
            bits |= 1 << i
        return bits

    def __repr__(self) -> str:
        return f"Subspace(p={self.spec.p}, n={self.spec.n}, basis={list(self.basis)})"


def span(vs: Sequence[Vector], spec: Optional[GroupSpec] = None) -> Subspace:
    """The linear span of ``vs``; ``spec`` is required when ``vs`` is empty."""
    if spec is None:
        if not vs:
            raise UsageError("span of an empty list needs an explicit spec")
        spec = vs[0].spec
    for v in vs:
        if v.spec != spec:
            raise UsageError("vectors belong to different groups")
    return Subspace(spec, tuple(rref([v.coords for v in vs], spec.p)))


def zero_subspace(spec: GroupSpec) -> Subspace:
    return Subspace(spec, ())


def full_space(spec: GroupSpec) -> Subspace:
    return Subspace(spec, tuple(spec.unit(i).coords for i in range(spec.n)))


def affine_span_dim(A) -> int:
    """Dimension of the span of ``{a - a0 : a in A}``.

    ``A`` is any non-empty iterable of Vectors (typically a GroupSet).
    """
    pts = list(A)
    if not pts:
        raise UsageError("affine span of an empty set is undefined")
    a0 = pts[0]
    return span([a - a0 for a in pts], a0.spec).dim


@dataclass(frozen=True)
class LinearFunctional:
    """A nonzero functional with first nonzero coefficient equal to 1."""

    spec: GroupSpec
    coeffs: Coords

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.spec.n:
            raise UsageError("coefficient count does not match dimension")
        lead = next((c for c in self.coeffs if c), 0)
        if lead != 1 or any(not 0 <= c < self.spec.p for c in self.coeffs):
            raise UsageError(f"coefficients {self.coeffs} are not a normalized functional")

    @classmethod
    def normalize(cls, spec: GroupSpec, coeffs: Sequence[int]) -> Tuple["LinearFunctional", int]:
        """Split raw coefficients into ``(phi, c)`` with ``coeffs == c * phi``."""
        raw = [x % spec.p for x in coeffs]
        lead = next((x for x in raw if x), 0)
        if not lead:
            raise UsageError("the zero functional has no kernel of co-dimension 1")
        inv = pow(lead, -1, spec.p)
        return cls(spec, tuple((x * inv) % spec.p for x in raw)), lead

    def __call__(self, v) -> int:
        coords = v.coords if isinstance(v, Vector) else self.spec.digits[v]
        return sum(a * b for a, b in zip(self.coeffs, coords)) % self.spec.p

    @cached_property
    def values(self) -> np.ndarray:
        """phi evaluated at every index."""
        return (self.spec.coords_table @ np.array(self.coeffs, dtype=np.int64)) % self.spec.p

    @cached_property
    def level_masks(self) -> Tuple[int, ...]:
        """``level_masks[r]`` is the bitmask of the coset ``phi^{-1}(r)``."""
        out = [0] * self.spec.p
        for i, r in enumerate(self.values.tolist()):
            out[r] |= 1 << i
        return tuple(out)

    def kernel(self) -> Subspace:
        spec = self.spec
        j = next(i for i, c in enumerate(self.coeffs) if c)
        gens = []
        for k in range(spec.n):
            if k == j:
                continue
            c = [0] * spec.n
            c[k] = 1
            c[j] = (-self.coeffs[k]) % spec.p
            gens.append(Vector(spec, tuple(c)))
        return span(gens, spec)

    def __repr__(self) -> str:
        return f"LinearFunctional{self.coeffs}"


def hyperplanes(spec: GroupSpec) -> List[LinearFunctional]:
    """All (p^n - 1)/(p - 1) normalized functionals, lexicographic in coeffs."""
    return list(_hyperplanes(spec))


@lru_cache(maxsize=None)
def _hyperplanes(spec: GroupSpec) -> Tuple[LinearFunctional, ...]:
    out = []
    for coeffs in itertools.product(range(spec.p), repeat=spec.n):
        lead = next((c for c in coeffs if c), 0)
        if lead == 1:
            out.append(LinearFunctional(spec, coeffs))
    return tuple(out)


def hyperplanes_containing(u: Vector) -> List[LinearFunctional]:
    if u.is_zero():
        raise UsageError("u must be nonzero")
    return [phi for phi in _hyperplanes(u.spec) if phi(u) == 0]


# -- general linear group ---------------------------------------------------


def gl_order(p: int, n: int) -> int:
    out = 1
    for k in range(n):
        out *= p**n - p**k
    return out


def mat_vec(M: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Coords:
    return tuple(sum(a * b for a, b in zip(row, v)) % p for row in M)


def mat_inverse(M: Sequence[Sequence[int]], p: int) -> Tuple[Coords, ...]:
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    red = rref(aug, p)
    if len(red) < n or any(red[i][i] != 1 for i in range(n)):
        raise UsageError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def is_invertible(M: Sequence[Sequence[int]], p: int) -> bool:
    return len(rref(M, p)) == len(M)


def random_invertible(spec: GroupSpec, rng) -> Tuple[Coords, ...]:
    """Uniform element of GL(n, p) by rejection sampling; ``rng`` is a random.Random."""
    while True:
        M = tuple(tuple(rng.randrange(spec.p) for _ in range(spec.n)) for _ in range(spec.n))
        if is_invertible(M, spec.p):
            return M


def iter_gl(spec: GroupSpec) -> Iterator[Tuple[Coords, ...]]:
    """Every invertible matrix (as a tuple of rows), in a fixed order."""
    for cols in _independent_columns(spec, ()):
        yield tuple(tuple(spec.digits[c][r] for c in cols) for r in range(spec.n))


def _independent_columns(spec: GroupSpec, fixed: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
    p = spec.p
    span_set = {0}
    for c in fixed:
        span_set = {spec.add(s, spec.scale(k, c)) for s in span_set for k in range(p)}

    def rec(cols: Tuple[int, ...], sp: frozenset) -> Iterator[Tuple[int, ...]]:
        if len(cols) == spec.n:
            yield cols
            return
        for v in range(1, spec.order):
            if v in sp:
                continue
            nsp = frozenset(spec.add(s, spec.scale(k, v)) for s in sp for k in range(p))
            yield from rec(cols + (v,), nsp)

    yield from rec(fixed, frozenset(span_set))


def matrix_permutation(spec: GroupSpec, M: Sequence[Sequence[int]]) -> np.ndarray:
    """Index permutation ``i -> index(M @ coords(i))``."""
    A = np.array(M, dtype=np.int64)
    img = (spec.coords_table @ A.T) % spec.p
    return img @ np.array(spec.powers, dtype=np.int64)
