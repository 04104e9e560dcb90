"""Sum-free sets in F_p^n: bitset arithmetic, certifiers, constructions and searches."""

from .errors import TheoremViolation, UsageError
from .group import GroupSpec, LinearFunctional, Subspace, Vector, hyperplanes, span
from .setops import GroupSet, difference_set, kneser_defect, sumset, symmetry_group
from .sumfree import (
    coset_cover,
    find_violation,
    is_normal,
    is_sum_free,
    lambda_max,
    normality_witness,
)

__all__ = [
    "GroupSet",
    "GroupSpec",
    "LinearFunctional",
    "Subspace",
    "TheoremViolation",
    "UsageError",
    "Vector",
    "coset_cover",
    "difference_set",
    "find_violation",
    "hyperplanes",
    "is_normal",
    "is_sum_free",
    "kneser_defect",
    "lambda_max",
    "normality_witness",
    "span",
    "sumset",
    "symmetry_group",
]
