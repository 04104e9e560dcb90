"""GL(n, p) acting on subsets of F_p^n, with lex-leader canonical forms.

The canonical representative of an orbit is the member whose sorted index
tuple is lexicographically smallest. Prefixes (smallest elements) of a
canonical set are canonical, which is what makes orderly generation work.

Every g in GL(n, p) factors uniquely as ``g = s * h_a`` where
``a = g^{-1}(e1)``, ``h_a`` is a fixed map sending a to e1, and s fixes e1.
A lex-smallest image of a set without 0 must contain e1 (index 1), so only
the factorisations with ``a`` in the set need to be inspected. This keeps the
tables at ``|GL| / (p^n - 1)`` rows instead of ``|GL|``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from .errors import UsageError
from .group import GroupSpec, _independent_columns, gl_order, mat_inverse, matrix_permutation, rref

STABILIZER_ROW_LIMIT = 2_000_000


class LinearSymmetry:
    """Permutation tables for GL(n, p) on element indices."""

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self.order = gl_order(spec.p, spec.n)
        n_stab = self.order // (spec.order - 1)
        if n_stab * spec.order > STABILIZER_ROW_LIMIT * 16:
            raise UsageError(f"GL({spec.n},{spec.p}) is too large for symmetry tables")
        N = spec.order
        cols = np.array(list(_independent_columns(spec, (1,))), dtype=np.int64)
        # matrices with column j = coords(cols[:, j]); image of x is sum_j x_j col_j
        colcoords = spec.coords_table[cols]  # (S, n, n) indexed [s, j, coord]
        img = np.einsum("xj,sjc->sxc", spec.coords_table, colcoords) % spec.p
        dtype = np.int16 if N < 2**15 else np.int32
        self.stab_perm = (img @ np.array(spec.powers, dtype=np.int64)).astype(dtype)
        h = np.zeros((N, N), dtype=dtype) if N <= 4096 else None
        if h is None:
            raise UsageError("symmetry tables are limited to p^n <= 4096")
        h[0] = np.arange(N)
        for a in range(1, N):
            h[a] = matrix_permutation(spec, _to_e1(spec, a))
        self.h_perm = h

    def _images(self, T: np.ndarray) -> np.ndarray:
        # all g(T) with g^{-1}(e1) in T, rows sorted
        Ta = self.h_perm[T][:, T]
        imgs = self.stab_perm[:, Ta].reshape(-1, len(T))
        imgs.sort(axis=1)
        return imgs

    def is_canonical(self, T: Sequence[int]) -> bool:
        """Whether the sorted tuple ``T`` is lex-least in its orbit."""
        if not T:
            return True
        if T[0] == 0:
            return self._canonical_nonzero(T[1:])
        return self._canonical_nonzero(T)

    def _canonical_nonzero(self, T: Sequence[int]) -> bool:
        if not T:
            return True
        if T[0] != 1:
            return False
        arr = np.asarray(T, dtype=np.int64)
        diff = self._images(arr) - arr
        nz = diff != 0
        has = nz.any(axis=1)
        first = nz.argmax(axis=1)
        vals = diff[np.arange(len(diff)), first]
        return not bool((has & (vals < 0)).any())

    def canonical_form(self, T: Sequence[int]) -> Tuple[int, ...]:
        T = sorted(T)
        zero = bool(T) and T[0] == 0
        rest = T[1:] if zero else T
        if not rest:
            return tuple(T)
        imgs = self._images(np.asarray(rest, dtype=np.int64))
        order = np.lexsort(imgs.T[::-1])
        best = tuple(int(x) for x in imgs[order[0]])
        return ((0,) if zero else ()) + best

    def stabilizer_size(self, T: Sequence[int]) -> int:
        """Size of the setwise stabilizer of ``T`` in GL(n, p)."""
        T = sorted(T)
        rest = [t for t in T if t]
        if not rest:
            return self.order
        if rest[0] != 1:
            rest = list(self.canonical_form(rest))
        arr = np.asarray(rest, dtype=np.int64)
        return int((self._images(arr) == arr).all(axis=1).sum())

    def orbit_size(self, T: Sequence[int]) -> int:
        return self.order // self.stabilizer_size(T)

    def set_stabilizer(self, T: Sequence[int]) -> np.ndarray:
        """Permutations of the setwise stabilizer of ``T`` (which must contain e1)."""
        T = sorted(t for t in T if t)
        if not T or T[0] != 1:
            raise UsageError("set_stabilizer expects a set containing e1")
        arr = np.asarray(T, dtype=np.int64)
        Ta = self.h_perm[arr][:, arr]
        imgs = np.sort(self.stab_perm[:, Ta], axis=2)  # (S, k, k)
        hit = (imgs == arr).all(axis=2)
        s_idx, a_pos = np.nonzero(hit)
        return self.stab_perm[s_idx][np.arange(len(s_idx))[:, None], self.h_perm[arr[a_pos]]]


def _to_e1(spec: GroupSpec, a: int) -> Tuple[Tuple[int, ...], ...]:
    # matrix with first column a, completed by unit vectors, then inverted
    cols = [spec.digits[a]]
    for i in range(spec.n):
        e = tuple(int(i == j) for j in range(spec.n))
        if len(rref(cols + [e], spec.p)) > len(cols):
            cols.append(e)
        if len(cols) == spec.n:
            break
    B = tuple(tuple(cols[j][r] for j in range(spec.n)) for r in range(spec.n))
    return mat_inverse(B, spec.p)


@lru_cache(maxsize=8)
def linear_symmetry(spec: GroupSpec) -> LinearSymmetry:
    return LinearSymmetry(spec)
