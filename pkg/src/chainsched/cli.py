"""Command-line front end.

Exit codes are the same for every command: 0 feasible / yes / all passed,
1 infeasible / no / some failed, 2 usage or input error. Machine-readable
output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from chainsched import baselines, decompose, reduction, solver
from chainsched.errors import EquivalenceViolated, SchedError
from chainsched.generate import PROFILES, generate, random_shuffle_instance
from chainsched.io import (
    FileFormatError,
    parse_instance,
    result_document,
    serialize_instance,
    serialize_result,
)
from chainsched.model import Instance, chain_instance, instance_stats

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2
ALGORITHMS = ("auto", "chain-dp", "width-dp", "edd", "single-window", "oracle")


class UsageError(Exception):
    pass


def _word(text: str) -> str:
    if text in ("ε", "eps"):
        return ""
    if not set(text) <= {"0", "1"}:
        raise argparse.ArgumentTypeError(f"word {text!r} must use only 0 and 1")
    return text


def _load(path: str) -> Instance:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        return parse_instance(text)
    except FileFormatError as exc:
        where = f"{path}:{exc.line}" if exc.line else path
        raise UsageError(f"{where}: {exc}") from None


def pick_algorithm(inst: Instance) -> str:
    if inst.n and len({j.window for j in inst.jobs}) == 1 and decompose.prec_consistent(inst):
        return "single-window"
    if inst.declared_chains is not None:
        return "chain-dp"
    return "width-dp"


def run_algorithm(inst: Instance, algo: str) -> solver.SolveResult:
    if algo == "auto":
        algo = pick_algorithm(inst)
    if algo == "chain-dp":
        chains = decompose.ChainDecomposition(
            inst.declared_chains
            if inst.declared_chains is not None
            else decompose.min_chain_decomposition(inst).chains
        )
        return solver.solve_chain_dp(inst, chains)
    if algo == "width-dp":
        return solver.solve_width_dp(inst)
    if algo == "single-window":
        return baselines.solve_single_window(inst)
    if algo == "oracle":
        return baselines.oracle_solve(inst).as_solve_result(inst)
    if algo == "edd":
        report = baselines.edd_schedule(inst)
        ok = report.lmax_edd is None or report.lmax_edd <= 0
        cmax = max((report.schedule.starts[j.id] + j.processing for j in inst.jobs), default=0)
        return solver.SolveResult(ok, cmax if ok else None, report.schedule if ok else None, "edd", 0, report.lmax_edd)
    raise UsageError(f"unknown algorithm {algo!r}")


def cmd_solve(args) -> int:
    inst = _load(args.file)
    t0 = time.perf_counter()
    res = run_algorithm(inst, args.algo)
    wall = (time.perf_counter() - t0) * 1000
    doc = result_document(
        inst, res.feasible, res.algorithm, res.cmax, res.lmax, res.schedule, res.states_explored, wall
    )
    sys.stdout.write(serialize_result(doc))
    return EXIT_OK if res.feasible else EXIT_NO


def cmd_stats(args) -> int:
    inst = _load(args.file)
    sys.stdout.write(json.dumps(instance_stats(inst).as_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_reduce(args) -> int:
    si = reduction.ShuffleInstance(tuple(args.u or ()), args.v)
    inst = reduction.CONSTRUCTIONS[args.construction](si, args.p, args.q)
    sys.stdout.write(serialize_instance(inst))
    return EXIT_OK


def cmd_shuffle(args) -> int:
    si = reduction.ShuffleInstance(tuple(args.u or ()), args.v)
    ans = reduction.shuffle_member(si)
    doc = {"member": ans.member, "u": list(si.u_words), "v": si.v_word}
    if ans.witness is not None:
        doc["witness"] = [list(f) for f in ans.witness.maps]
    if ans.reason:
        doc["reason"] = ans.reason
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    return EXIT_OK if ans.member else EXIT_NO


def cmd_certify(args) -> int:
    rng = np.random.default_rng(args.seed)
    passed = failed = yes = 0
    for _ in range(args.seeds):
        si = random_shuffle_instance(rng, args.max_v, args.max_l)
        try:
            report = reduction.certify_reduction(si, args.construction, args.p, args.q)
        except EquivalenceViolated as exc:
            failed += 1
            print(f"COUNTEREXAMPLE {json.dumps({'u': list(si.u_words), 'v': si.v_word})}: {exc}")
            continue
        passed += 1
        yes += report.shuffle_member
    print(
        f"construction {args.construction}: {passed} passed, {failed} failed "
        f"({yes} yes-instances) over {args.seeds} seeds"
    )
    return EXIT_OK if failed == 0 else EXIT_NO


def cmd_gen_random(args) -> int:
    inst = generate(args.profile, args.n, args.width, args.seed, args.window_sizes, args.horizon)
    sys.stdout.write(serialize_instance(inst))
    return EXIT_OK


def _timed(fn, repeats: int = 5):
    fn()  # warmup, discarded
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append((time.perf_counter() - t0) * 1000)
    return statistics.median(times), out


def loose_chains(k: int, m: int, seed: int = 0) -> Instance:
    """k chains of m jobs each, all released at 0 with a deadline nobody can miss."""
    rng = np.random.default_rng(seed)
    p = rng.integers(1, 4, size=(k, m))
    horizon = int(p.sum())
    return chain_instance(
        [[(f"c{i}_{j}", 0, int(p[i, j]), horizon) for j in range(m)] for i in range(k)]
    )


def cmd_bench(args) -> int:
    rows = []
    if args.suite == "dp-scaling":
        for k in args.k:
            for m in args.m:
                inst = loose_chains(k, m)
                ms, res = _timed(lambda: solver.solve_width_dp(inst))
                rows.append((f"loose-{k}x{m}", inst.n, k, "width-dp", ms, res.states_explored, (m + 1) ** k))
        header = ("instance", "n", "k", "algorithm", "wall_ms", "states", "(m+1)^k")
    elif args.suite == "edd-vs-opt":
        for seed in range(args.seeds):
            inst = generate("agreeable-queues", 9, 3, seed)
            ms, opt = _timed(lambda: baselines.oracle_solve(inst))
            edd = baselines.edd_schedule(inst, opt.lmax_opt)
            pmax = max(j.processing for j in inst.jobs)
            rows.append((f"agreeable-{seed}", inst.n, decompose.width(inst), "oracle", ms, opt.nodes,
                         edd.lmax_edd, opt.lmax_opt, edd.bound_gap_certificate, pmax - 1))
        header = ("instance", "n", "w", "algorithm", "wall_ms", "states", "lmax_edd", "lmax_opt", "gap", "pmax-1")
    elif args.suite == "reduction":
        rng = np.random.default_rng(0)
        for seed in range(args.seeds):
            si = random_shuffle_instance(rng, 8, 3)
            for which in (1, 2):
                inst = reduction.CONSTRUCTIONS[which](si, 1, 2)
                ms, res = _timed(lambda: solver.solve_width_dp(inst))
                rows.append((f"c{which}-{seed}", inst.n, decompose.width(inst), "width-dp", ms,
                             res.states_explored, res.feasible))
        header = ("instance", "n", "w", "algorithm", "wall_ms", "states", "feasible")
    else:
        raise UsageError(f"unknown suite {args.suite!r}")
    print("\t".join(header))
    for row in rows:
        print("\t".join(f"{x:.3f}" if isinstance(x, float) else str(x) for x in row))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainsched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file ('-' for stdin)")
    p.add_argument("file")
    p.add_argument("--algo", choices=ALGORITHMS, default="auto")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stats", help="structural parameters of an instance")
    p.add_argument("file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("reduce", help="emit the scheduling instance for a shuffle input")
    p.add_argument("--construction", type=int, choices=(1, 2), required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--v", type=_word, required=True)
    p.add_argument("--u", type=_word, action="append")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("shuffle", help="is v an interleaving of the u words?")
    p.add_argument("--v", type=_word, required=True)
    p.add_argument("--u", type=_word, action="append")
    p.set_defaults(func=cmd_shuffle)

    p = sub.add_parser("certify", help="random check of a construction against shuffle membership")
    p.add_argument("--construction", type=int, choices=(1, 2), required=True)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--max-v", type=int, default=8)
    p.add_argument("--max-l", type=int, default=3)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--seed", type=int, default=0, help="master seed of the sweep")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("gen-random", help="emit a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-sizes", type=int, default=3)
    p.add_argument("--profile", choices=PROFILES, default="general")
    p.add_argument("--horizon", type=int, default=30)
    p.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("bench", help="timing tables")
    p.add_argument("--suite", choices=("dp-scaling", "edd-vs-opt", "reduction"), required=True)
    p.add_argument("--k", type=int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--m", type=int, nargs="+", default=[5, 10, 15])
    p.add_argument("--seeds", type=int, default=10)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except SchedError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
