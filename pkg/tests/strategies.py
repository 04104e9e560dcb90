"""Hypothesis strategies for groups and subsets."""

from hypothesis import strategies as st

from fpsumfree.group import GroupSpec
from fpsumfree.setops import GroupSet

SMALL_GROUPS = [(2, 3), (2, 4), (3, 2), (5, 1), (5, 2), (7, 2), (11, 1), (3, 3), (11, 2)]


@st.composite
def groups(draw, choices=SMALL_GROUPS):
    p, n = draw(st.sampled_from(choices))
    return GroupSpec(p, n)


@st.composite
def subsets(draw, spec, max_size=None):
    k = spec.order if max_size is None else min(max_size, spec.order)
    idx = draw(st.sets(st.integers(0, spec.order - 1), max_size=k))
    return GroupSet.from_indices(spec, idx)


@st.composite
def group_and_sets(draw, count=2, choices=SMALL_GROUPS, max_size=None):
    spec = draw(groups(choices))
    return (spec,) + tuple(draw(subsets(spec, max_size)) for _ in range(count))
