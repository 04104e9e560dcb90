import random

import pytest
from hypothesis import given, strategies as st

from fpsumfree.errors import UsageError
from fpsumfree.group import (
    GroupSpec,
    LinearFunctional,
    Vector,
    affine_span_dim,
    gl_order,
    hyperplanes,
    hyperplanes_containing,
    is_invertible,
    is_prime,
    iter_gl,
    mat_inverse,
    mat_vec,
    matrix_permutation,
    random_invertible,
    rref,
    span,
)
from oracles import add, points
from strategies import groups


@pytest.mark.parametrize("p,n", [(4, 2), (1, 1), (0, 3), (9, 1)])
def test_rejects_non_prime(p, n):
    with pytest.raises(UsageError):
        GroupSpec(p, n)


def test_rejects_bad_dimension_and_huge_orders():
    with pytest.raises(UsageError):
        GroupSpec(5, 0)
    with pytest.raises(UsageError):
        GroupSpec(2, 33)
    assert GroupSpec(2, 32).order == 2**32


def test_is_prime_small_values():
    assert [q for q in range(30) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(groups())
def test_encode_decode_round_trip_in_little_endian_order(spec):
    assert [spec.decode(i) for i in range(spec.order)] == points(spec.p, spec.n)
    for i in range(spec.order):
        assert spec.encode(spec.decode(i)) == i


def test_encode_reduces_coordinates_and_checks_length():
    spec = GroupSpec(5, 2)
    assert spec.encode((6, -1)) == spec.encode((1, 4))
    with pytest.raises(UsageError):
        spec.encode((1, 2, 3))
    with pytest.raises(UsageError):
        spec.decode(25)


@given(groups(), st.data())
def test_translate_bits_matches_pointwise_translation(spec, data):
    members = data.draw(st.sets(st.integers(0, spec.order - 1)))
    t = data.draw(st.integers(0, spec.order - 1))
    bits = sum(1 << i for i in members)
    want = {spec.encode(add(spec.decode(i), spec.decode(t), spec.p)) for i in members}
    assert spec.translate_bits(bits, t) == sum(1 << i for i in want)


@given(groups(), st.data())
def test_index_arithmetic(spec, data):
    a = data.draw(st.integers(0, spec.order - 1))
    b = data.draw(st.integers(0, spec.order - 1))
    c = data.draw(st.integers(0, spec.p - 1))
    va, vb = spec.element(a), spec.element(b)
    assert spec.add(a, b) == (va + vb).index
    assert spec.sub(a, b) == (va - vb).index
    assert spec.scale(c, a) == (c * va).index
    assert spec.neg_table[a] == (-va).index


def test_vector_checks_group_and_range():
    with pytest.raises(UsageError):
        Vector(GroupSpec(5, 2), (5, 1))
    with pytest.raises(UsageError):
        GroupSpec(5, 2).unit(0) + GroupSpec(7, 2).unit(0)


@pytest.mark.parametrize("p,n,count", [(2, 3, 7), (5, 2, 6), (5, 3, 31), (7, 2, 8), (3, 3, 13)])
def test_hyperplane_count(p, n, count):
    hs = hyperplanes(GroupSpec(p, n))
    assert len(hs) == count == (p**n - 1) // (p - 1)
    assert [h.coeffs for h in hs] == sorted(h.coeffs for h in hs)


@pytest.mark.parametrize("p,n", [(5, 3), (3, 3), (2, 4)])
def test_hyperplanes_through_a_vector(p, n):
    spec = GroupSpec(p, n)
    u = spec.vector((1,) * n)
    hs = hyperplanes_containing(u)
    assert len(hs) == (p ** (n - 1) - 1) // (p - 1)
    assert all(u in h.kernel() for h in hs)
    with pytest.raises(UsageError):
        hyperplanes_containing(spec.zero())


def test_functional_normalization():
    spec = GroupSpec(5, 3)
    phi, c = LinearFunctional.normalize(spec, (0, 3, 1))
    assert phi.coeffs == (0, 1, 2) and c == 3
    with pytest.raises(UsageError):
        LinearFunctional.normalize(spec, (0, 0, 0))
    with pytest.raises(UsageError):
        LinearFunctional(spec, (2, 0, 0))


@given(groups())
def test_kernel_and_levels_partition_the_group(spec):
    for phi in hyperplanes(spec)[:5]:
        K = phi.kernel()
        assert K.dim == spec.n - 1
        masks = phi.level_masks
        assert sum(m.bit_count() for m in masks) == spec.order
        assert masks[0] == K.mask()
        for i in range(spec.order):
            assert masks[phi(i)] >> i & 1


def test_span_and_rref():
    spec = GroupSpec(5, 3)
    S = span([spec.vector((1, 2, 0)), spec.vector((2, 4, 0)), spec.vector((0, 0, 3))], spec)
    assert S.dim == 2 and S.size == 25
    assert spec.vector((3, 1, 4)) in S
    assert spec.vector((0, 1, 0)) not in S
    assert rref([(2, 4, 0), (0, 0, 3)], 5) == [(1, 2, 0), (0, 0, 1)]
    assert len({v.index for v in S.elements()}) == 25


def test_affine_span_dim():
    from fpsumfree.setops import GroupSet

    spec = GroupSpec(2, 4)
    pts = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 1, 1)]
    assert affine_span_dim(GroupSet.from_coords(spec, pts)) == 4
    assert affine_span_dim(GroupSet.from_coords(spec, pts[:3])) == 2


@pytest.mark.parametrize("p,n,order", [(2, 2, 6), (5, 2, 480), (2, 4, 20160), (5, 3, 1488000), (3, 3, 11232)])
def test_gl_order(p, n, order):
    assert gl_order(p, n) == order


def test_iter_gl_enumerates_the_group():
    spec = GroupSpec(3, 2)
    mats = list(iter_gl(spec))
    assert len(mats) == len(set(mats)) == gl_order(3, 2)
    assert all(is_invertible(M, 3) for M in mats)


def test_matrix_inverse_and_permutation():
    rng = random.Random(5)
    spec = GroupSpec(5, 3)
    for _ in range(10):
        M = random_invertible(spec, rng)
        Minv = mat_inverse(M, 5)
        perm = matrix_permutation(spec, M)
        assert sorted(perm.tolist()) == list(range(spec.order))
        for i in (1, 7, 99):
            x = spec.decode(i)
            assert perm[i] == spec.encode(mat_vec(M, x, 5))
            assert mat_vec(Minv, mat_vec(M, x, 5), 5) == x
    with pytest.raises(UsageError):
        mat_inverse(((1, 2), (2, 4)), 5)
