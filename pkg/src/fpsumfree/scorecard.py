"""The ``verify-paper`` suite: every claimed result recomputed, one line each.

Output is deterministic (fixed seeds, no timings unless asked for), so two
runs of the same build can be compared byte for byte.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

from .constructions import fixture, fixtures
from .errors import TheoremViolation, UsageError
from .group import GroupSpec, span
from .search import (
    SearchConfig,
    enumerate_sumfree,
    max_sumfree_size,
    probe_nonnormal_threshold,
    run_search,
    sample_greedy,
    verify_three_point_shape,
)
from .setops import GroupSet, difference_set, kneser_defect, simple_kneser_sumset, sumset
from .sumfree import (
    affine_coset_containment,
    all_row_profiles,
    coset_cover,
    dilation_set,
    find_rich_hyperplanes,
    interval_gap_bound,
    interval_spec,
    is_normal,
    is_sum_free,
    lambda_max,
    offset_relation_check,
    vosper_check,
)

SEED = 20240607


@dataclass
class Check:
    label: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self, timings: bool = False) -> str:
        out = f"{'PASS' if self.passed else 'FAIL'}  {self.label}: {self.detail}"
        if timings:
            out += f" [{self.seconds:.2f}s]"
        return out


def _run(label: str, fn: Callable[[], Tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except (TheoremViolation, UsageError) as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(label, ok, detail, time.perf_counter() - t0)


# -- random instances -------------------------------------------------------------


def random_subset(spec: GroupSpec, rng: random.Random, density: float = None) -> GroupSet:
    q = rng.uniform(0.05, 0.6) if density is None else density
    bits = 0
    for i in range(spec.order):
        if rng.random() < q:
            bits |= 1 << i
    if not bits:
        bits = 1 << rng.randrange(spec.order)
    return GroupSet(spec, bits)


def random_coset_instance(spec: GroupSpec, rng: random.Random):
    """(A, B, H, a, b) with A in a + H, B in b + H and |A| + |B| > |H|."""
    dim = rng.randint(1, spec.n)
    while True:
        H = span([spec.vector(tuple(rng.randrange(spec.p) for _ in range(spec.n))) for _ in range(dim)], spec)
        if H.dim >= 1:
            break
    a = spec.vector(tuple(rng.randrange(spec.p) for _ in range(spec.n)))
    b = spec.vector(tuple(rng.randrange(spec.p) for _ in range(spec.n)))
    Hs = list(H.elements())
    ka = rng.randint(1, len(Hs))
    kb = rng.randint(max(1, len(Hs) - ka + 1), len(Hs))
    A = GroupSet.from_vectors((a + h for h in rng.sample(Hs, ka)), spec)
    B = GroupSet.from_vectors((b + h for h in rng.sample(Hs, kb)), spec)
    return A, B, H, a, b


# -- individual checks ------------------------------------------------------------


LAMBDA_GROUPS = (("F_5", 5, 1), ("F_5^2", 5, 2), ("F_2^3", 2, 3), ("F_2^4", 2, 4), ("Z_7", 7, 1))


def check_lambda() -> Tuple[bool, str]:
    parts, ok = [], True
    for name, p, n in LAMBDA_GROUPS:
        rep = max_sumfree_size(GroupSpec(p, n))
        want = lambda_max([p] * n)
        ok &= rep.exhaustive and rep.best_size == want
        parts.append(f"{name} {rep.best_size}/{want}")
    return ok, "searched maximum / formula " + ", ".join(parts)


def check_f2_sharpness() -> Tuple[bool, str]:
    A = fixture("f2_extremal").set
    cont = affine_coset_containment(A)
    ok = len(A) == 5 and is_sum_free(A) and cont is None
    return ok, f"size {len(A)}, sum-free {is_sum_free(A)}, in a proper coset {cont is not None}"


KNESER_GROUPS = ((5, 2), (2, 4), (7, 2), (11, 2))


def check_kneser(pairs: int = 500) -> Tuple[bool, str]:
    rng = random.Random(SEED)
    bad = 0
    for p, n in KNESER_GROUPS:
        spec = GroupSpec(p, n)
        for _ in range(pairs):
            A, B = random_subset(spec, rng), random_subset(spec, rng)
            if not kneser_defect(A, B).holds:
                bad += 1
    total = pairs * len(KNESER_GROUPS)
    return bad == 0, f"{total} random pairs, {bad} violations"


def check_full_coset(instances: int = 200) -> Tuple[bool, str]:
    rng = random.Random(SEED + 1)
    bad = 0
    for k in range(instances):
        p, n = KNESER_GROUPS[k % len(KNESER_GROUPS)]
        A, B, H, a, b = random_coset_instance(GroupSpec(p, n), rng)
        try:
            simple_kneser_sumset(A, B, H, a, b)
        except TheoremViolation:
            bad += 1
    return bad == 0, f"{instances} instances, {bad} violations"


def check_rich_hyperplanes() -> Tuple[bool, str]:
    spec = GroupSpec(5, 3)
    sets = [fixture("avw_f5_3").set, fixture("nonnormal_f5_3").set]
    sets += list(sample_greedy(SearchConfig(spec, mode="sample_greedy", seed=SEED), count=30))
    I = interval_spec(5).interval
    inst = 0
    for A in sets:
        for u in spec.vectors():
            if u.is_zero() or not dilation_set(I, u).issubset(A):
                continue
            find_rich_hyperplanes(A, u)  # raises on failure
            inst += 1
    return inst > 0, f"{inst} (set, direction) instances in F_5^3, 0 violations"


def check_vosper(pairs: int = 400) -> Tuple[bool, str]:
    rng = random.Random(SEED + 2)
    checked = equal = 0
    for k in range(pairs):
        p = (7, 11, 13, 17)[k % 4]
        if k % 2:
            d, la, lb = rng.randrange(1, p), rng.randint(2, p // 2), rng.randint(2, p // 2)
            s, t = rng.randrange(p), rng.randrange(p)
            A = {(s + i * d) % p for i in range(la)}
            B = {(t + i * d) % p for i in range(lb)}
        else:
            A = set(rng.sample(range(p), rng.randint(2, p // 2)))
            B = set(rng.sample(range(p), rng.randint(2, p // 2)))
        if len({(x + y) % p for x in A for y in B}) > p - 2:
            continue
        rep = vosper_check(A, B, p)  # raises on failure
        checked += 1
        equal += rep.equality_holds
    return checked > 0, f"{checked} pairs, {equal} critical, 0 violations"


def check_shape_and_cosets() -> Tuple[Check, Check]:
    t0 = time.perf_counter()
    rep = verify_three_point_shape()
    dt = time.perf_counter() - t0
    shape = Check(
        "F_5^2 three-point shape",
        rep.exhaustive and not rep.counterexamples and rep.orbits > 0,
        f"{rep.orbits} orbits checked, {len(rep.counterexamples)} counterexamples",
        dt,
    )
    cosets = Check(
        "F_5^2 two full cosets in (A+A)|(A-A)",
        rep.exhaustive and not rep.two_coset_failures,
        f"{rep.orbits} orbits checked, {len(rep.two_coset_failures)} counterexamples",
        0.0,
    )
    return shape, cosets


def check_f5_small_dims() -> Tuple[bool, str]:
    # every sum-free set above the non-normal maximum (1 in F_5, 5 in F_5^2) is normal
    ok = True
    parts = []
    for n, thresh in ((1, 2), (2, 6)):
        spec = GroupSpec(5, n)
        stream = enumerate_sumfree(SearchConfig(spec, min_size=thresh, symmetry_reduction="none" if n == 1 else "full_canonical"))
        sets = list(stream)
        abnormal = sum(1 for A in sets if not is_normal(A))
        ok &= bool(stream.exhaustive) and abnormal == 0
        parts.append(f"n={n}: {len(sets)} sets of size >= {thresh}, {abnormal} not normal")
    rep = run_search(SearchConfig(GroupSpec(5, 2), mode="max_nonnormal"))
    ok &= rep.exhaustive and rep.best_size == 5
    parts.append(f"largest non-normal in F_5^2 = {rep.best_size} (exhaustive {rep.exhaustive})")
    return ok, "; ".join(parts)


def check_construction(name: str) -> Tuple[bool, str]:
    f = fixture(name)
    A, exp = f.set, f.expected
    parts = [f"size {len(A)}"]
    ok = len(A) == exp.size
    sf = is_sum_free(A)
    ok &= sf == exp.sum_free
    parts.append("sum-free" if sf else "not sum-free")
    if exp.normal is not None:
        nr = is_normal(A)
        ok &= nr == exp.normal
        parts.append("normal" if nr else "not normal")
    if exp.cover3 is not None:
        cov = coset_cover(A, 3)
        ok &= (cov is not None) == exp.cover3
        if cov is None:
            parts.append("no cover by three parallel cosets")
        else:
            parts.append(f"covered by cosets {list(cov.residues)} of ker{tuple(cov.functional.coeffs)}")
    return ok, ", ".join(parts)


INTERVAL_PRIMES = (5, 11, 17, 23)


def check_interval_identities() -> Tuple[bool, str]:
    bad = []
    for p in INTERVAL_PRIMES:
        I = interval_spec(p).interval
        plus = {(a + b) % p for a in I for b in I}
        minus = {(a - b) % p for a in I for b in I}
        rest = set(range(p)) - set(I)
        if plus != rest or minus != rest:
            bad.append(p)
    return not bad, f"I+I = I-I = complement for p in {list(INTERVAL_PRIMES)}, failures {bad}"


def gap_grid(p: int):
    """All valid (d, J) pairs for the continuity lemma at prime p."""
    iv = interval_spec(p)
    m = iv.m
    out = []
    for d in range(m):
        window = frozenset(range(m - d, 2 * m + d))
        seen = set()
        for t in range(p):
            base = sorted(iv.shifted(t) & window)
            for r in range(d + 1, len(base) + 1):
                for J in itertools.combinations(base, r):
                    if J not in seen:
                        seen.add(J)
                        out.append((d, J))
    return out


def check_gap_bound() -> Tuple[bool, str]:
    total = bad = 0
    for p in (11, 17):
        for d, J in gap_grid(p):
            total += 1
            if not interval_gap_bound(p, d, J).bound_holds:
                bad += 1
    return bad == 0, f"{total} (d, J) pairs for p in [11, 17], {bad} violations"


def offset_sets() -> List[GroupSet]:
    sets = [f.set for f in fixtures() if f.spec.p % 3 == 2 and f.spec.p != 2 and f.spec.order <= 400]
    spec = GroupSpec(11, 2)
    sets += list(sample_greedy(SearchConfig(spec, mode="sample_greedy", seed=SEED), count=100))
    return sets


def check_offsets() -> Tuple[bool, str]:
    profiles = bad = 0
    for A in offset_sets():
        for prof in all_row_profiles(A):
            if len(prof.good_rows()) < 2:
                continue
            profiles += 1
            bad += not offset_relation_check(prof)
    return bad == 0 and profiles > 0, f"{profiles} row profiles with >= 2 good rows, {bad} violations"


def check_probe(budget: int, threads: int) -> Tuple[bool, str]:
    rep = probe_nonnormal_threshold(3, node_budget=budget, threads=threads)
    s, seeded = rep.search, rep.seed_search
    ok = rep.witnesses_above == 0 and len(seeded.witnesses) > 0 and seeded.best_size == 28
    return ok, (
        f"{rep.witnesses_above} witnesses >= {rep.threshold} within budget "
        f"({s.nodes_expanded} nodes, exhaustive {'yes' if s.exhaustive else 'no'}); "
        f"seeded search found {len(seeded.witnesses)} non-normal witnesses of size {seeded.best_size}"
    )


def run_scorecard(probe_budget: int = 10**6, threads: int = 1) -> List[Check]:
    checks = [
        _run("maximum sum-free size", check_lambda),
        _run("F_2^4 five-point set", check_f2_sharpness),
        _run("Kneser inequality", check_kneser),
        _run("full-coset sums", check_full_coset),
        _run("two rich hyperplanes through I(u)", check_rich_hyperplanes),
        _run("Vosper critical pairs", check_vosper),
    ]
    checks.extend(check_shape_and_cosets())
    checks.append(_run("F_5 and F_5^2 base cases", check_f5_small_dims))
    for name, label in (
        ("nonnormal_f5_3", "28-point non-normal set in F_5^3"),
        ("nonnormal_f5_4", "140-point non-normal set in F_5^4"),
        ("a2_f11_2", "A_2 in F_11^2"),
        ("a2_f17_2", "A_2 in F_17^2"),
        ("f7_full_size", "14-point set in F_7^2"),
        ("f5_pentagon", "pentagon in F_5^2"),
    ):
        checks.append(_run(label, lambda name=name: check_construction(name)))
    checks += [
        _run("central interval identities", check_interval_identities),
        _run("interval gap bound", check_gap_bound),
        _run("row offset relations", check_offsets),
        _run("non-normal probe in F_5^3", lambda: check_probe(probe_budget, threads)),
    ]
    return checks


def format_scorecard(checks: Sequence[Check], timings: bool = False) -> str:
    lines = [c.line(timings) for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
