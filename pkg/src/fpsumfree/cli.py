"""Command-line front end.

Exit codes are shared by every subcommand: 0 when the predicate holds (or all
checks pass), 1 when it fails, 2 on bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .errors import UsageError
from .group import GroupSpec
from .setfile import dumps_setfile, load_setfile, save_setfile
from .setops import difference_set, sumset, symmetry_group
from .sumfree import (
    affine_coset_containment,
    coset_cover,
    find_violation,
    lambda_max,
    normality_witness,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive_int(text: str) -> int:
    try:
        if "^" in text:
            base, exp = text.split("^")
            val = int(base) ** int(exp)
        elif "e" in text.lower():
            val = int(float(text))
        else:
            val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {val}")
    return val


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("SUMFREE_THREADS")
    if env is None:
        return 1
    try:
        val = int(env)
    except ValueError:
        raise UsageError(f"SUMFREE_THREADS must be an integer, got {env!r}") from None
    if val < 1:
        raise UsageError("SUMFREE_THREADS must be at least 1")
    return val


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


# -- subcommands ------------------------------------------------------------------


def cmd_check(args) -> int:
    A = load_setfile(args.file)
    v = find_violation(A)
    if v is None:
        print("SUM-FREE")
        return EXIT_OK
    print(f"NOT SUM-FREE: {list(v.a.coords)} + {list(v.b.coords)} = {list(v.c.coords)}")
    return EXIT_FAIL


def cmd_normal(args) -> int:
    A = load_setfile(args.file)
    w = normality_witness(A)
    _emit({"normal": w is not None, "witness": None if w is None else w.to_dict()})
    return EXIT_OK if w is not None else EXIT_FAIL


def cmd_cover(args) -> int:
    A = load_setfile(args.file)
    w = coset_cover(A, args.k)
    _emit({"k": args.k, "covered": w is not None, "witness": None if w is None else w.to_dict()})
    return EXIT_OK if w is not None else EXIT_FAIL


def cmd_affine(args) -> int:
    A = load_setfile(args.file)
    w = affine_coset_containment(A)
    _emit({"contained": w is not None, "witness": None if w is None else w.to_dict()})
    return EXIT_OK if w is not None else EXIT_FAIL


def cmd_lambda(args) -> int:
    try:
        factors = [int(x) for x in args.factors.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--factors must be a comma-separated list of integers, got {args.factors!r}") from None
    print(lambda_max(factors))
    return EXIT_OK


def cmd_sumset(args) -> int:
    A = load_setfile(args.file)
    B = load_setfile(args.other) if args.other else A
    S = difference_set(A, B) if args.difference else sumset(A, B)
    sys.stdout.write(dumps_setfile(S))
    return EXIT_OK


def cmd_sym(args) -> int:
    A = load_setfile(args.file)
    H = symmetry_group(A)
    _emit({"dim": H.dim, "size": H.size, "basis": [list(b) for b in H.basis]})
    return EXIT_OK


def _search_config(args, mode: str):
    from .constructions import build_example_A2, build_example_nonnormal_F5
    from .search import SearchConfig

    spec = GroupSpec(args.p, args.n)
    incumbents = ()
    if mode == "max_nonnormal" and args.seed_construction:
        if spec.p == 5 and spec.n >= 3:
            incumbents = (build_example_nonnormal_F5(spec.n),)
        elif spec.p >= 11 and spec.p % 3 == 2 and spec.n >= 2:
            incumbents = (build_example_A2(spec.p, spec.n),)
    return SearchConfig(
        spec,
        mode=mode,
        min_size=args.min_size,
        target=args.target,
        node_budget=args.budget,
        symmetry_reduction=args.symmetry,
        seed=args.seed,
        checkpoint_path=args.checkpoint,
        threads=_threads(args),
        incumbents=incumbents,
    )


def _write_witnesses(outdir: Optional[str], sets) -> None:
    if not outdir:
        return
    os.makedirs(outdir, exist_ok=True)
    for k, W in enumerate(sets):
        save_setfile(W, os.path.join(outdir, f"witness_{k:03d}.json"))


def cmd_search(args) -> int:
    from .search import run_search, sample_greedy

    cfg = _search_config(args, args.mode)
    if args.mode == "sample_greedy":
        sets = list(sample_greedy(cfg, count=args.count))
        _write_witnesses(args.output, sets)
        _emit({"mode": "sample_greedy", "seed": args.seed, "sizes": [len(A) for A in sets]})
        return EXIT_OK
    if args.mode == "enumerate_all":
        return _enumerate(cfg, args)
    rep = run_search(cfg)
    _write_witnesses(args.output, rep.witnesses)
    _emit(rep.to_dict(include_time=args.timings))
    return EXIT_OK


def _enumerate(cfg, args) -> int:
    from .search import enumerate_sumfree

    stream = enumerate_sumfree(cfg)
    by_size = {}
    sets = []
    for A in stream:
        by_size[len(A)] = by_size.get(len(A), 0) + 1
        if args.output:
            sets.append(A)
    _write_witnesses(args.output, sets)
    _emit({
        "p": cfg.spec.p,
        "n": cfg.spec.n,
        "symmetry_reduction": cfg.symmetry_reduction,
        "counts_by_size": {str(k): v for k, v in sorted(by_size.items())},
        "total": sum(by_size.values()),
        "nodes_expanded": stream.nodes_expanded,
        "exhaustive": bool(stream.exhaustive),
    })
    return EXIT_OK


def cmd_enumerate(args) -> int:
    return _enumerate(_search_config(args, "enumerate_all"), args)


def cmd_verify_paper(args) -> int:
    from .scorecard import format_scorecard, run_scorecard

    checks = run_scorecard(probe_budget=args.probe_budget, threads=_threads(args))
    sys.stdout.write(format_scorecard(checks, timings=args.timings))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# -- parser -------------------------------------------------------------------------


def _add_search_args(sp, with_mode: bool) -> None:
    if with_mode:
        sp.add_argument("--mode", default="max_nonnormal",
                        choices=["enumerate_all", "max_sumfree", "max_nonnormal", "sample_greedy"])
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=_positive_int, default=10**7, help="node budget (attempted insertions)")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed for sample_greedy")
    sp.add_argument("--count", type=_positive_int, default=10, help="number of greedy samples")
    sp.add_argument("--min-size", type=int, default=0)
    sp.add_argument("--target", type=int, default=0, help="only report sets at least this large")
    sp.add_argument("--symmetry", choices=["none", "stabilizer_prefix", "full_canonical"], default=None)
    sp.add_argument("--checkpoint", help="NDJSON checkpoint file; an existing file is resumed")
    sp.add_argument("--output", help="directory for witness set files")
    sp.add_argument("--no-seed-construction", dest="seed_construction", action="store_false",
                    help="do not seed max_nonnormal with the known non-normal construction")
    sp.add_argument("--timings", action="store_true", help="include wall time in the report")
    sp.add_argument("--threads", type=_positive_int, default=None, help="worker processes (env SUMFREE_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpsumfree", description="Sum-free sets in F_p^n: certifiers and searches.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="is the set sum-free?")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("normal", help="find a functional mapping the set into the central interval")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_normal)

    sp = sub.add_parser("cover", help="cover the set by k parallel cosets of a hyperplane")
    sp.add_argument("file")
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.set_defaults(func=cmd_cover)

    sp = sub.add_parser("affine", help="is the set inside a coset of a proper subspace?")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_affine)

    sp = sub.add_parser("lambda", help="largest sum-free size of an abelian group")
    sp.add_argument("--factors", required=True, help="invariant factors, e.g. 5,5")
    sp.set_defaults(func=cmd_lambda)

    sp = sub.add_parser("sumset", help="print A + B (or A - B) as a set file")
    sp.add_argument("file")
    sp.add_argument("other", nargs="?")
    sp.add_argument("--difference", action="store_true")
    sp.set_defaults(func=cmd_sumset)

    sp = sub.add_parser("sym", help="period group {g : g + A = A}")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_sym)

    sp = sub.add_parser("search", help="budgeted search; prints a JSON report")
    _add_search_args(sp, with_mode=True)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("enumerate", help="count sum-free sets by size")
    _add_search_args(sp, with_mode=False)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("verify-paper", help="recompute every claimed result and print a scorecard")
    sp.add_argument("--probe-budget", type=_positive_int, default=10**6)
    sp.add_argument("--timings", action="store_true")
    sp.add_argument("--threads", type=_positive_int, default=None)
    sp.set_defaults(func=cmd_verify_paper)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors (and --help) this way
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
