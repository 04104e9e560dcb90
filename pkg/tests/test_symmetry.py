import random

import pytest
from hypothesis import given, strategies as st

from fpsumfree.constructions import build_F5_pentagon, fixture
from fpsumfree.group import GroupSpec, gl_order, iter_gl, matrix_permutation, random_invertible
from fpsumfree.symmetry import linear_symmetry


def image(spec, M, T):
    perm = matrix_permutation(spec, M)
    return sorted(int(perm[t]) for t in T)


def brute_canonical(spec, T):
    return min(tuple(image(spec, M, T)) for M in iter_gl(spec))


@pytest.mark.parametrize("p,n", [(3, 2), (2, 3), (5, 2)])
def test_canonical_form_matches_brute_force(p, n):
    spec = GroupSpec(p, n)
    sym = linear_symmetry(spec)
    rng = random.Random(p + n)
    for _ in range(8 if p < 5 else 3):
        T = sorted(rng.sample(range(1, spec.order), rng.randint(1, 5)))
        c = sym.canonical_form(T)
        assert c == brute_canonical(spec, T)
        assert sym.is_canonical(c)
        assert sym.is_canonical(T) == (tuple(T) == c)


@given(st.data())
def test_canonical_form_is_an_orbit_invariant(data):
    spec = GroupSpec(5, 3)
    sym = linear_symmetry(spec)
    T = sorted(data.draw(st.sets(st.integers(1, spec.order - 1), min_size=1, max_size=12)))
    M = random_invertible(spec, random.Random(data.draw(st.integers(0, 10**6))))
    assert sym.canonical_form(T) == sym.canonical_form(image(spec, M, T))


def test_zero_is_kept_by_canonical_form():
    sym = linear_symmetry(GroupSpec(5, 2))
    assert sym.canonical_form([0, 7]) == (0, 1)
    assert sym.is_canonical([0, 1]) and not sym.is_canonical([0, 2])


def test_stabilizer_sizes():
    spec = GroupSpec(5, 2)
    sym = linear_symmetry(spec)
    assert sym.stabilizer_size([1]) == gl_order(5, 2) // 24
    assert sym.stabilizer_size([1, 5]) == 2  # identity and the swap of e1, e2
    assert sym.stabilizer_size([1, 2]) == 20
    P = build_F5_pentagon().indices()
    perms = [M for M in iter_gl(spec) if image(spec, M, P) == sorted(P)]
    assert sym.stabilizer_size(P) == len(perms)
    assert sym.orbit_size(P) * len(perms) == gl_order(5, 2)


def test_set_stabilizer_fixes_the_set():
    spec = GroupSpec(5, 3)
    sym = linear_symmetry(spec)
    T = sym.canonical_form(fixture("nonnormal_f5_3").set.indices())
    stab = sym.set_stabilizer(T[:3])
    assert len(stab) == sym.stabilizer_size(T[:3])
    for g in stab:
        assert sorted(int(g[t]) for t in T[:3]) == list(T[:3])
