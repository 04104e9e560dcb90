import pytest

from fpsumfree.constructions import (
    F7_POINTS,
    PENTAGON_POINTS,
    build_AVw,
    build_example_A2,
    build_example_F7,
    build_example_nonnormal_F5,
    build_F2_extremal,
    build_F5_pentagon,
    fixture,
    fixtures,
)
from fpsumfree.errors import UsageError
from fpsumfree.group import GroupSpec, LinearFunctional
from fpsumfree.setops import negate
from fpsumfree.sumfree import affine_coset_containment, coset_cover, is_normal, is_sum_free, lambda_max
from oracles import naive_is_normal, naive_is_sum_free


@pytest.mark.parametrize("f", fixtures(), ids=lambda f: f.name)
def test_fixture_claims_are_recomputed(f):
    A, exp = f.set, f.expected
    assert A.spec == f.spec
    assert len(A) == exp.size
    assert is_sum_free(A) == exp.sum_free
    if exp.normal is not None:
        assert is_normal(A) == exp.normal
    if exp.proper_coset is not None:
        assert (affine_coset_containment(A) is not None) == exp.proper_coset


@pytest.mark.parametrize("name", ["avw_f5_2", "nonnormal_f5_3", "a2_f11_2", "f5_pentagon"])
def test_fixtures_against_brute_force_oracles(name):
    f = fixture(name)
    pts = f.set.coords()
    assert naive_is_sum_free(pts, f.spec.p)
    assert naive_is_normal(pts, f.spec.p, f.spec.n) == f.expected.normal


def test_f7_fixture_records_the_cover_that_actually_exists():
    f = fixture("f7_full_size")
    assert f.expected.cover3 is False  # the published claim, kept as stated
    assert coset_cover(f.set, 3) is not None  # ... is contradicted by the printed point list
    assert coset_cover(f.set, 2) is None
    assert len(f.set) == lambda_max([7, 7])


def test_avw_is_the_union_of_middle_cosets():
    spec = GroupSpec(5, 2)
    A = build_AVw(spec, LinearFunctional(spec, (1, 0)), spec.unit(0))
    assert set(A.coords()) == {(x, y) for x in (2, 3) for y in range(5)}
    B = build_AVw(spec, LinearFunctional(spec, (1, 0)), spec.vector((2, 1)))
    assert set(B.coords()) == {(x, y) for x in (4, 1) for y in range(5)}


@pytest.mark.parametrize("p,n", [(5, 2), (5, 3), (11, 2), (17, 1)])
def test_avw_reaches_lambda(p, n):
    spec = GroupSpec(p, n)
    phi = LinearFunctional(spec, (1,) + (0,) * (n - 1))
    A = build_AVw(spec, phi, spec.unit(0))
    assert len(A) == lambda_max([p] * n) and is_sum_free(A) and is_normal(A)


def test_avw_errors():
    spec = GroupSpec(5, 2)
    with pytest.raises(UsageError):
        build_AVw(spec, LinearFunctional(spec, (1, 0)), spec.unit(1))
    s7 = GroupSpec(7, 2)
    with pytest.raises(UsageError):
        build_AVw(s7, LinearFunctional(s7, (1, 0)), s7.unit(0))


def test_nonnormal_f5_is_symmetric_and_extends():
    Y = build_example_nonnormal_F5(3)
    assert negate(Y) == Y
    Y4 = build_example_nonnormal_F5(4)
    assert len(Y4) == 140 and not is_normal(Y4) and is_sum_free(Y4)
    with pytest.raises(UsageError):
        build_example_nonnormal_F5(2)


@pytest.mark.parametrize("p", [11, 17, 23])
def test_a2_size_formula(p):
    m = (p + 1) // 3
    A = build_example_A2(p)
    assert len(A) == (m - 1) * p and is_sum_free(A) and not is_normal(A)


@pytest.mark.parametrize("p,n", [(5, 2), (7, 2), (13, 2), (11, 1)])
def test_a2_errors(p, n):
    with pytest.raises(UsageError):
        build_example_A2(p, n)


def test_a2_in_three_dimensions():
    A = build_example_A2(11, 3)
    assert len(A) == 3 * 121 and is_sum_free(A) and not is_normal(A)


def test_literal_point_lists():
    assert set(build_example_F7().coords()) == set(F7_POINTS)
    assert set(build_F5_pentagon().coords()) == set(PENTAGON_POINTS)
    assert len(build_F2_extremal(4)) == 5
    with pytest.raises(UsageError):
        build_F2_extremal(5)


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fixture("nope")
