"""Exhaustive and budgeted searches over sum-free subsets of F_p^n.

The search tree is orderly: a node is a sorted tuple of element indices and
its children append a larger index. Each node carries the forbidden set
``(S + S) | (S - S) | {y : 2y in S} | {0}`` as a bitset, updated with three
translations per insertion, so the legal children are just the unset bits
above the current maximum.

Symmetry reduction keeps only lex-leader nodes (see ``symmetry``). Because the
prefix of a canonical set is canonical, a non-canonical node can be cut with
its whole subtree.

For determinism every budgeted search is split into tasks at a fixed depth.
Each task starts from the same initial incumbent, so a task's result does not
depend on which tasks ran before it, and the serial and parallel schedules
produce identical reports.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .errors import TheoremViolation, UsageError
from .group import GroupSpec, gl_order
from .setops import GroupSet
from .sumfree import (
    find_two_full_cosets,
    is_sum_free,
    lambda_max,
    normal_masks,
    normality_witness,
    normalize_to_shape,
    SHAPE_POINTS,
)
from .symmetry import linear_symmetry

MODES = ("enumerate_all", "max_sumfree", "max_nonnormal", "sample_greedy")
REDUCTIONS = ("none", "stabilizer_prefix", "full_canonical")
FULL_CANONICAL_LIMIT = 10**6

Path = Tuple[int, ...]


@dataclass(frozen=True)
class SearchConfig:
    spec: GroupSpec
    mode: str = "enumerate_all"
    min_size: int = 0
    target: int = 0
    node_budget: int = 10**7
    symmetry_reduction: Optional[str] = None
    seed: int = 0
    checkpoint_path: Optional[str] = None
    threads: int = 1
    incumbents: Tuple[GroupSet, ...] = ()
    root: Path = ()
    prefix_depth: int = 3
    stabilizer_depth: int = 6
    split_depth: int = 2
    max_witnesses: int = 16
    bound_pruning: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.node_budget < 1:
            raise UsageError("node_budget must be at least 1")
        if self.threads < 1:
            raise UsageError("threads must be at least 1")
        if self.symmetry_reduction is None:
            object.__setattr__(self, "symmetry_reduction", "full_canonical" if self.spec.n == 2 else "stabilizer_prefix")
        if self.symmetry_reduction not in REDUCTIONS:
            raise UsageError(f"unknown symmetry reduction {self.symmetry_reduction!r}")
        if self.symmetry_reduction == "full_canonical" and gl_order(self.spec.p, self.spec.n) > FULL_CANONICAL_LIMIT:
            raise UsageError(f"full_canonical needs |GL({self.spec.n},{self.spec.p})| <= 10^6")
        if list(self.root) != sorted(set(self.root)) or any(not 0 < r < self.spec.order for r in self.root):
            raise UsageError("root must be a strictly increasing tuple of nonzero indices")
        for A in self.incumbents:
            if A.spec != self.spec:
                raise UsageError("incumbent lives in a different group")

    def fingerprint(self) -> dict:
        return {
            "p": self.spec.p,
            "n": self.spec.n,
            "mode": self.mode,
            "min_size": self.min_size,
            "target": self.target,
            "node_budget": self.node_budget,
            "symmetry_reduction": self.symmetry_reduction,
            "root": list(self.root),
            "incumbents": [A.indices() for A in self.incumbents],
            "prefix_depth": self.prefix_depth,
            "stabilizer_depth": self.stabilizer_depth,
            "split_depth": self.split_depth,
            "bound_pruning": self.bound_pruning,
        }


@dataclass
class SearchReport:
    spec: GroupSpec
    mode: str
    best_size: int
    witnesses: List[GroupSet]
    nodes_expanded: int
    exhaustive: bool
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self, include_time: bool = False) -> dict:
        out = {
            "p": self.spec.p,
            "n": self.spec.n,
            "mode": self.mode,
            "best_size": self.best_size,
            "exhaustive": self.exhaustive,
            "nodes_expanded": self.nodes_expanded,
            "witnesses": [[list(c) for c in W.coords()] for W in self.witnesses],
        }
        if include_time:
            out["wall_time"] = round(self.wall_time, 3)
        return out


class _BudgetExhausted(Exception):
    pass


@dataclass
class _Node:
    path: Path
    bits: int
    neg: int
    forbidden: int
    stab: Optional[np.ndarray] = None


class _Engine:
    """DFS machinery shared by all modes. Mutable; one per task."""

    def __init__(self, cfg: SearchConfig, budget: int):
        self.cfg = cfg
        spec = self.spec = cfg.spec
        self.tr = spec.translate_bits
        self.negt = spec.neg_table
        self.half = None
        if spec.p != 2:
            inv2 = pow(2, -1, spec.p)
            self.half = [spec.scale(inv2, i) for i in range(spec.order)]
        self.nonzero = spec.universe & ~1
        self.budget = budget
        self.nodes = 0
        self.sym = linear_symmetry(spec) if cfg.symmetry_reduction != "none" else None
        self.masks = normal_masks(spec) if cfg.mode == "max_nonnormal" else ()
        self.best = 0
        self.witnesses: List[Path] = []

    # -- state updates

    def root(self) -> _Node:
        node = _Node((), 0, 0, 1)
        for x in self.cfg.root:
            if node.forbidden >> x & 1:
                raise UsageError("root is not sum-free")
            node = self.child(node, x)
        return node

    def child(self, node: _Node, x: int) -> _Node:
        tr = self.tr
        bits = node.bits | (1 << x)
        neg = node.neg | (1 << self.negt[x])
        f = node.forbidden | tr(bits, x) | tr(bits, self.negt[x]) | tr(neg, x)
        if self.half is not None:
            f |= 1 << self.half[x]
        stab = node.stab
        path = node.path + (x,)
        if self.sym is not None and self.cfg.symmetry_reduction == "stabilizer_prefix" and len(path) == self.cfg.prefix_depth:
            stab = self.sym.set_stabilizer(path)
        return _Node(path, bits, neg, f, stab)

    def candidates(self, node: _Node) -> int:
        top = node.path[-1] if node.path else 0
        return self.nonzero & ~node.forbidden & ~((2 << top) - 1)

    def keep(self, path: Path) -> bool:
        """Lex-leader test for a freshly created node."""
        sym = self.sym
        if sym is None:
            return True
        cfg = self.cfg
        k = len(path)
        if cfg.symmetry_reduction == "full_canonical" or k <= cfg.prefix_depth:
            return sym.is_canonical(path)
        return True

    def keep_stab(self, node: _Node) -> bool:
        stab = node.stab
        k = len(node.path)
        if stab is None or k <= self.cfg.prefix_depth or k > self.cfg.stabilizer_depth or len(stab) <= 1:
            return True
        arr = np.asarray(node.path, dtype=np.int64)
        diff = np.sort(stab[:, arr], axis=1) - arr
        nz = diff != 0
        first = nz.argmax(axis=1)
        vals = diff[np.arange(len(diff)), first]
        return not bool((nz.any(axis=1) & (vals < 0)).any())

    def tick(self) -> None:
        if self.nodes >= self.budget:
            raise _BudgetExhausted
        self.nodes += 1

    # -- objectives

    def threshold(self) -> int:
        cfg = self.cfg
        if cfg.mode == "enumerate_all":
            return cfg.min_size
        return max(self.best, cfg.target, cfg.min_size)

    def is_normal_bits(self, bits: int) -> bool:
        return any(bits & ~m == 0 for m in self.masks)

    def visit(self, node: _Node) -> None:
        """Record a node as a candidate answer (max modes)."""
        k = len(node.path)
        if k < self.threshold() or k == 0:
            return
        if self.cfg.mode == "max_nonnormal" and self.is_normal_bits(node.bits):
            return
        if k > self.best:
            self.best = k
            self.witnesses = [node.path]
        elif len(self.witnesses) < self.cfg.max_witnesses:
            self.witnesses.append(node.path)

    def prunable(self, node: _Node, cand: int) -> bool:
        if self.cfg.mode == "max_nonnormal" and self.is_normal_bits(node.bits | cand):
            return True
        return False

    # -- traversal

    def explore(self, node: _Node, frontier: Optional[List[Path]] = None) -> None:
        """Depth-first search below ``node``; with ``frontier`` stop at split depth."""
        self.visit(node)
        cand = self.candidates(node)
        if self.prunable(node, cand):
            return
        cnt = cand.bit_count()
        k = len(node.path)
        bound = self.cfg.bound_pruning
        j = 0
        while cand:
            if bound and k + cnt - j < self.threshold():
                break
            low = cand & -cand
            cand ^= low
            j += 1
            x = low.bit_length() - 1
            self.tick()
            path = node.path + (x,)
            if not self.keep(path):
                continue
            ch = self.child(node, x)
            if not self.keep_stab(ch):
                continue
            if frontier is not None and len(path) >= self.cfg.split_depth:
                frontier.append(path)
                continue
            self.explore(ch, frontier)

    def enumerate(self, node: _Node) -> Iterator[_Node]:
        if len(node.path) >= self.cfg.min_size:
            yield node
        cand = self.candidates(node)
        cnt = cand.bit_count()
        k = len(node.path)
        j = 0
        while cand:
            if self.cfg.bound_pruning and k + cnt - j < self.cfg.min_size:
                break
            low = cand & -cand
            cand ^= low
            j += 1
            x = low.bit_length() - 1
            self.tick()
            path = node.path + (x,)
            if not self.keep(path):
                continue
            ch = self.child(node, x)
            if not self.keep_stab(ch):
                continue
            yield from self.enumerate(ch)

    def replay(self, path: Path) -> _Node:
        node = self.root()
        for x in path[len(node.path):]:
            node = self.child(node, x)
        return node


# -- enumeration ---------------------------------------------------------------


class SumFreeStream:
    """Iterator over sum-free sets; ``exhaustive`` is set once iteration ends."""

    def __init__(self, cfg: SearchConfig):
        if cfg.mode != "enumerate_all":
            raise UsageError("enumerate_sumfree needs mode='enumerate_all'")
        self.cfg = cfg
        self.nodes_expanded = 0
        self.exhaustive: Optional[bool] = None

    def __iter__(self) -> Iterator[GroupSet]:
        eng = _Engine(self.cfg, self.cfg.node_budget)
        spec = self.cfg.spec
        try:
            for node in eng.enumerate(eng.root()):
                A = GroupSet(spec, node.bits)
                if not is_sum_free(A):
                    raise TheoremViolation(f"search emitted a set that is not sum-free: {A}")
                self.nodes_expanded = eng.nodes
                yield A
            self.exhaustive = True
        except _BudgetExhausted:
            self.exhaustive = False
        finally:
            self.nodes_expanded = eng.nodes


def enumerate_sumfree(cfg: SearchConfig) -> SumFreeStream:
    return SumFreeStream(cfg)


# -- budgeted maximisation -------------------------------------------------------


@dataclass
class _TaskResult:
    nodes: int
    best: int
    witnesses: List[Path]
    completed: bool


def _run_task(cfg: SearchConfig, path: Path, budget: int) -> _TaskResult:
    eng = _Engine(cfg, budget)
    _seed_engine(eng)
    completed = True
    try:
        eng.explore(eng.replay(path))
    except _BudgetExhausted:
        completed = False
    return _TaskResult(eng.nodes, eng.best, eng.witnesses, completed)


def _seed_engine(eng: _Engine) -> None:
    for A in eng.cfg.incumbents:
        if len(A) > eng.best:
            eng.best = len(A)


def _check_incumbents(cfg: SearchConfig) -> None:
    for A in cfg.incumbents:
        if not is_sum_free(A):
            raise UsageError("incumbent is not sum-free")
        if cfg.mode == "max_nonnormal" and normality_witness(A) is not None:
            raise UsageError("incumbent for max_nonnormal is normal")


class _Checkpoint:
    def __init__(self, path: Optional[str], fingerprint: dict):
        self.path = path
        self.fingerprint = fingerprint

    def load(self) -> Optional[dict]:
        if not self.path or not os.path.exists(self.path):
            return None
        last = None
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn write from an interrupted run
                if rec.get("config") != self.fingerprint:
                    raise UsageError(f"checkpoint {self.path} was written for a different configuration")
                last = rec
        return last

    def write(self, make_record: Callable[[], dict]) -> None:
        if not self.path:
            return
        rec = dict(make_record(), config=self.fingerprint)
        with open(self.path, "a+b") as fh:
            lead = b""
            if fh.tell() > 0:
                fh.seek(-1, os.SEEK_END)
                if fh.read(1) != b"\n":
                    lead = b"\n"
            fh.write(lead + (json.dumps(rec, sort_keys=True) + "\n").encode())
            fh.flush()
            os.fsync(fh.fileno())


_CANON_MEMO: Dict[Tuple[GroupSpec, Path], Path] = {}


def _canonical(cfg: SearchConfig, w: Path) -> Path:
    if cfg.symmetry_reduction == "none":
        return tuple(w)
    key = (cfg.spec, tuple(w))
    if key not in _CANON_MEMO:
        c = linear_symmetry(cfg.spec).canonical_form(w)
        _CANON_MEMO[key] = _CANON_MEMO[(cfg.spec, c)] = c
    return _CANON_MEMO[key]


def _merge_witnesses(cfg: SearchConfig, best: int, pools: List[List[Path]]) -> List[Path]:
    seen = {_canonical(cfg, w) for pool in pools for w in pool if len(w) == best}
    return sorted(seen)[: cfg.max_witnesses]


def run_search(cfg: SearchConfig) -> SearchReport:
    """Budgeted maximisation (modes max_sumfree and max_nonnormal)."""
    if cfg.mode not in ("max_sumfree", "max_nonnormal"):
        raise UsageError(f"run_search does not handle mode {cfg.mode!r}")
    if cfg.mode == "max_nonnormal" and (cfg.spec.p == 2 or cfg.spec.p % 3 != 2):
        raise UsageError("max_nonnormal needs an odd prime p = 2 mod 3")
    _check_incumbents(cfg)
    t0 = time.perf_counter()

    # frontier generation is cheap and deterministic; it is redone on resume
    driver = _Engine(cfg, cfg.node_budget)
    _seed_engine(driver)
    frontier: List[Path] = []
    completed = True
    try:
        driver.explore(driver.root(), frontier)
    except _BudgetExhausted:
        completed = False
    nodes = driver.nodes
    best = driver.best
    incumbent_paths = [tuple(A.indices()) for A in cfg.incumbents]
    pools: List[List[Path]] = [incumbent_paths, driver.witnesses]

    ck = _Checkpoint(cfg.checkpoint_path, cfg.fingerprint())
    start = 0
    state = ck.load()
    if state is not None:
        start = state["tasks_done"]
        nodes = state["nodes"]
        best = state["best_size"]
        completed = state["completed"]
        pools = [[tuple(w) for w in state["witnesses"]]]
    elif completed:
        ck.write(lambda: _ck_record(0, frontier, nodes, best, pools, cfg, completed))

    if completed and start < len(frontier):
        results = _schedule(cfg, frontier[start:], cfg.node_budget - nodes)
        for offset, res in enumerate(results):
            nodes += res.nodes
            if res.best > best:
                best = res.best
            pools.append(res.witnesses)
            pools = [_merge_witnesses(cfg, best, pools)] if best else pools
            if not res.completed:
                completed = False
            done = start + offset + 1
            ck.write(lambda: _ck_record(done, frontier, nodes, best, pools, cfg, completed))
            if not completed:
                break

    paths = _merge_witnesses(cfg, best, pools) if best else []
    witnesses = [GroupSet.from_indices(cfg.spec, w) for w in paths]
    for W in witnesses:
        if not is_sum_free(W):
            raise TheoremViolation(f"witness is not sum-free: {W}")
        if cfg.mode == "max_nonnormal" and normality_witness(W) is not None:
            raise TheoremViolation(f"witness is normal: {W}")
    return SearchReport(cfg.spec, cfg.mode, best, witnesses, nodes, completed, time.perf_counter() - t0)


def _ck_record(done, frontier, nodes, best, pools, cfg, completed) -> dict:
    nxt = list(frontier[done]) if done < len(frontier) else None
    wit = _merge_witnesses(cfg, best, pools) if best else []
    return {
        "prefix": nxt,
        "tasks_done": done,
        "nodes": nodes,
        "best_size": best,
        "completed": completed,
        "witnesses": [list(w) for w in wit],
    }


def _schedule(cfg: SearchConfig, tasks: List[Path], budget: int) -> Iterator[_TaskResult]:
    """Run tasks in order against a shared budget; parallel runs give identical output."""
    if cfg.threads == 1 or len(tasks) <= 1:
        for path in tasks:
            res = _run_task(cfg, path, budget)
            budget -= res.nodes
            yield res
            if not res.completed:
                return
        return
    light = replace(cfg, checkpoint_path=None, threads=1)
    with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
        futures = [pool.submit(_run_task, light, path, budget) for path in tasks]
        try:
            for path, fut in zip(tasks, futures):
                res = fut.result()
                if res.nodes > budget or (not res.completed and res.nodes == budget):
                    # this task ran against a larger allowance than it has in the
                    # serial schedule; redo it with the exact remainder
                    res = _run_task(light, path, budget)
                budget -= res.nodes
                yield res
                if not res.completed:
                    return
        finally:
            for fut in futures:
                fut.cancel()


def max_nonnormal(cfg: SearchConfig) -> SearchReport:
    if cfg.mode != "max_nonnormal":
        cfg = replace(cfg, mode="max_nonnormal")
    return run_search(cfg)


def max_sumfree_size(spec: GroupSpec, node_budget: int = 10**7, threads: int = 1) -> SearchReport:
    cfg = SearchConfig(spec, mode="max_sumfree", node_budget=node_budget, threads=threads,
                       symmetry_reduction=_default_reduction(spec))
    return run_search(cfg)


def _default_reduction(spec: GroupSpec) -> str:
    if spec.n == 1 or spec.order <= 64 and gl_order(spec.p, spec.n) > FULL_CANONICAL_LIMIT:
        return "none"
    if gl_order(spec.p, spec.n) <= FULL_CANONICAL_LIMIT:
        return "full_canonical"
    return "stabilizer_prefix"


# -- random greedy ------------------------------------------------------------------


def sample_greedy(cfg: SearchConfig, count: Optional[int] = None) -> Iterator[GroupSet]:
    """Maximal sum-free sets from random insertion orders; deterministic per seed."""
    spec = cfg.spec
    rng = random.Random(cfg.seed)
    eng = _Engine(replace(cfg, symmetry_reduction="none"), cfg.node_budget)
    produced = 0
    while count is None or produced < count:
        order = list(range(1, spec.order))
        rng.shuffle(order)
        node = eng.root()
        for x in order:
            if not node.forbidden >> x & 1:
                node = _greedy_child(eng, node, x)
        A = GroupSet(spec, node.bits)
        if not is_sum_free(A):
            raise TheoremViolation("greedy sampler produced a set that is not sum-free")
        produced += 1
        yield A


def _greedy_child(eng: _Engine, node: _Node, x: int) -> _Node:
    tr = eng.tr
    bits = node.bits | (1 << x)
    neg = node.neg | (1 << eng.negt[x])
    f = node.forbidden | tr(bits, x) | tr(bits, eng.negt[x]) | tr(neg, x)
    if eng.half is not None:
        f |= 1 << eng.half[x]
    return _Node(node.path, bits, neg, f)


# -- exhaustive and probing checks ------------------------------------------------------------------


@dataclass
class ShapeReport:
    orbits: int
    sets_by_size: Dict[int, int]
    counterexamples: List[GroupSet]
    two_coset_failures: List[GroupSet]
    exhaustive: bool

    @property
    def ok(self) -> bool:
        return self.exhaustive and not self.counterexamples and not self.two_coset_failures


def verify_three_point_shape(node_budget: int = 10**7) -> ShapeReport:
    """Check every orbit of sum-free sets of size >= 5 in F_5^2 against the 3-point shape."""
    spec = GroupSpec(5, 2)
    cfg = SearchConfig(spec, min_size=5, node_budget=node_budget, symmetry_reduction="full_canonical")
    stream = enumerate_sumfree(cfg)
    bad, bad2 = [], []
    by_size: Dict[int, int] = {}
    orbits = 0
    for A in stream:
        orbits += 1
        by_size[len(A)] = by_size.get(len(A), 0) + 1
        M = normalize_to_shape(A)
        if M is None or not _shape_ok(A, M):
            bad.append(A)
        if find_two_full_cosets(A) is None:
            bad2.append(A)
    return ShapeReport(orbits, dict(sorted(by_size.items())), bad, bad2, bool(stream.exhaustive))


def _shape_ok(A: GroupSet, M) -> bool:
    from .group import is_invertible
    from .setops import linear_image

    if not is_invertible(M, 5):
        return False
    img = linear_image(A, M)
    return all(pt in img for pt in SHAPE_POINTS)


@dataclass
class ProbeReport:
    threshold: int
    search: SearchReport
    seed_search: SearchReport

    @property
    def witnesses_above(self) -> int:
        return len(self.search.witnesses)


def probe_nonnormal_threshold(n: int = 3, node_budget: int = 10**7, threads: int = 1,
                      checkpoint_path: Optional[str] = None, seed_depth: int = 20,
                      seed_budget: int = 200_000) -> ProbeReport:
    """Look for non-normal sum-free sets above 1.2 * 5^(n-1) in F_5^n.

    A second, small search restarts from the first ``seed_depth`` elements of
    the canonical 28-point non-normal set and collects the size-28 non-normal
    sets it reaches.
    """
    from .constructions import build_example_nonnormal_F5

    if n != 3:
        raise UsageError("the probe is implemented for n = 3")
    spec = GroupSpec(5, n)
    threshold = (6 * 5 ** (n - 1)) // 5 + 1
    cfg = SearchConfig(spec, mode="max_nonnormal", target=threshold, node_budget=node_budget,
                       symmetry_reduction="stabilizer_prefix", threads=threads, checkpoint_path=checkpoint_path)
    main = run_search(cfg)
    seed = build_example_nonnormal_F5(n)
    canon = linear_symmetry(spec).canonical_form(seed.indices())
    scfg = SearchConfig(spec, mode="max_nonnormal", target=len(seed), node_budget=seed_budget,
                        symmetry_reduction="stabilizer_prefix", root=canon[:seed_depth], split_depth=seed_depth)
    seeded = run_search(scfg)
    return ProbeReport(threshold, main, seeded)


# Operation names used by the published interface.
verify_lemma_3_1 = verify_three_point_shape
probe_theorem_1_4 = probe_nonnormal_threshold


def lambda_cross_check(spec: GroupSpec, node_budget: int = 10**7) -> Tuple[int, int, bool]:
    """(searched maximum, formula value, exhaustive) for F_p^n."""
    rep = max_sumfree_size(spec, node_budget)
    return rep.best_size, lambda_max([spec.p] * spec.n), rep.exhaustive
