"""Command-line front end: ``fractal-fft points|forward|inverse|verify|bench|search``."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .dita import OpCounter
from .errors import NumericalError, ResourceError, ShapeError, ValidationError
from .formats import load_config, read_signal, write_signal
from .ifs_core import Kind, Ordering, base_digits, generate_point_set
from .search import search_frequencies
from .transform import (
    ORACLE_CAP,
    M1Class,
    adjoint_apply,
    base_op_count,
    build_plan,
    dense_matrix,
    dense_op_count,
    diagonal_phases,
    direct_diagonal_phases,
    forward_apply,
    inverse_apply,
    plan_op_count_bound,
    verify_block_identities,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFICATION = 2
EXIT_RESOURCE = 3
EXIT_SEARCH_EXHAUSTED = 4

VERIFY_TOL = 1e-10
ROUND_TRIP_TOL = 1e-8


def _fmt_vec(vec, fmt) -> str:
    return " ".join(fmt(x) for x in vec)


def cmd_points(args, out) -> int:
    system = load_config(args.config).to_system()
    pts = generate_point_set(system, args.kind, args.ordering, args.level)
    out.write("index\tdigits\texact\tapprox\n")
    for j, p in enumerate(pts.points):
        digits = ",".join(map(str, base_digits(j, system.K, args.level)))
        exact = _fmt_vec(p, lambda x: f"{x.numerator}/{x.denominator}")
        approx = _fmt_vec(p, lambda x: f"{float(x):.17g}")
        out.write(f"{j}\t{digits}\t{exact}\t{approx}\n")
    if pts.has_duplicates:
        out.write("# warning: point set contains duplicate points\n")
    return EXIT_OK


def cmd_transform(args, out) -> int:
    system = load_config(args.config).to_system()
    plan = build_plan(system, args.level, args.ordering)
    signal = read_signal(args.signal)
    if signal.size != plan.size:
        raise ShapeError(f"{args.signal}: {signal.size} samples, expected K**N = {plan.size}")
    counter = OpCounter()
    start = time.perf_counter()
    if args.command == "forward":
        result = forward_apply(plan, signal, counter)
    else:
        result = inverse_apply(plan, signal, counter)
    elapsed = time.perf_counter() - start
    write_signal(args.out, result)
    out.write(f"operations: {counter.total} (multiplications {counter.multiplications}, "
              f"additions {counter.additions})\n")
    out.write(f"wall_time_s: {elapsed:.6f}\n")
    if args.command == "inverse":
        residual = np.max(np.abs(forward_apply(plan, result) - signal), initial=0.0)
        out.write(f"residual: {residual:.3e}\n")
    if args.oracle == "dense":
        dense = dense_matrix(system, args.level, args.ordering)
        expected = dense @ signal if args.command == "forward" else np.linalg.solve(dense, signal)
        out.write(f"dense_max_deviation: {np.max(np.abs(result - expected)):.3e}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    try:
        system = load_config(args.config).to_system()
    except ValidationError as exc:
        out.write(f"FAIL: {exc}\n")
        return EXIT_VALIDATION
    K = system.K
    if K**args.level > ORACLE_CAP:
        raise ResourceError(f"K**N_max = {K**args.level} exceeds oracle cap {ORACLE_CAP}")
    rng = np.random.default_rng(args.seed)
    ok = True

    def report(label: str, value: float, passed: bool) -> None:
        nonlocal ok
        ok &= passed
        out.write(f"  {label}: {value:.3e} {'PASS' if passed else 'FAIL'}\n")

    out.write(f"M1 class: {system.m1_class.value}\n")
    for N in range(1, args.level + 1):
        out.write(f"N={N}\n")
        r = verify_block_identities(system, N)
        report("P M~ P - M", r.permutation_deviation, r.permutation_deviation < VERIFY_TOL)
        report("obverse block form", r.obverse_deviation, r.obverse_deviation < VERIFY_TOL)
        report("reverse block form", r.reverse_deviation, r.reverse_deviation < VERIFY_TOL)
        report("exact phase mismatches", r.phase_mismatches, r.phase_mismatches == 0)
        v = rng.standard_normal(K**N) + 1j * rng.standard_normal(K**N)
        scale = np.max(np.abs(v))
        for ordering in Ordering:
            plan = build_plan(system, N, ordering)
            if N >= 2:
                same = diagonal_phases(plan, N) == direct_diagonal_phases(system, N, ordering)
                report(f"{ordering.value} diagonal recurrence mismatches", 0 if same else 1, same)
            back = inverse_apply(plan, forward_apply(plan, v))
            err = np.max(np.abs(back - v))
            report(f"{ordering.value} round trip", err, err < ROUND_TRIP_TOL * scale)
            if system.m1_class is M1Class.HADAMARD:
                err = np.max(np.abs(adjoint_apply(plan, forward_apply(plan, v)) - K**N * v))
                report(f"{ordering.value} M*M - K^N I", err, err < 1e-8 * K**N * scale)
    out.write("PASS\n" if ok else "FAIL\n")
    return EXIT_OK if ok else EXIT_VERIFICATION


def _levels(spec: str) -> range:
    lo, _, hi = spec.partition(":")
    return range(int(lo), int(hi or lo) + 1)


def cmd_bench(args, out) -> int:
    system = load_config(args.config).to_system()
    K = system.K
    levels = _levels(args.levels) if args.levels else range(1, args.level + 1)
    rng = np.random.default_rng(args.seed)
    out.write("N,measured,bound,ratio,dense_ops\n")
    exceeded = False
    for N in levels:
        plan = build_plan(system, N, args.ordering)
        counter = OpCounter()
        forward_apply(plan, rng.standard_normal(K**N) + 0j, counter)
        bound = plan_op_count_bound(K, N, base_op_count(K))
        exceeded |= counter.total > bound
        out.write(f"{N},{counter.total},{bound},{counter.total / (N * K**N):.6f},{dense_op_count(K, N)}\n")
    return EXIT_VERIFICATION if exceeded else EXIT_OK


def cmd_search(args, out) -> int:
    config = load_config(args.config)
    result = search_frequencies(config.spatial(), args.target, args.bound)
    for note in result.warnings:
        sys.stderr.write(f"warning: {note}\n")
    if not result.found:
        sys.stderr.write(f"{result.message}\n")
        return EXIT_SEARCH_EXHAUSTED
    found = config.with_frequencies(result.frequencies, M1Class(args.target))
    text = found.to_json()
    if args.out:
        Path(args.out).write_text(text)
        out.write(f"wrote {args.out}\n")
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractal-fft", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, level=True, ordering=True):
        p.add_argument("--config", required=True, help="JSON system configuration")
        if level:
            p.add_argument("--level", type=int, required=True, help="level N (K**N points)")
        if ordering:
            p.add_argument("--ordering", choices=[o.value for o in Ordering], default="obverse")

    p = sub.add_parser("points", help="list the points of S_N or T_N")
    common(p)
    p.add_argument("--kind", choices=[k.value for k in Kind], default="spatial")
    p.set_defaults(func=cmd_points)

    for name in ("forward", "inverse"):
        p = sub.add_parser(name, help=f"{name} transform of a signal file")
        common(p)
        p.add_argument("--signal", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--oracle", choices=["dense"], help="also compare with the dense matrix")
        p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="check structural identities up to --level")
    common(p, ordering=False)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="operation counts against the closed-form bound")
    common(p, level=False)
    p.add_argument("--level", type=int, default=10, help="maximum level when --levels is absent")
    p.add_argument("--levels", help="inclusive range LO:HI")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("search", help="find frequency translations c")
    common(p, level=False, ordering=False)
    p.add_argument("--target", choices=[c.value for c in M1Class], default="invertible")
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout if out is None else out
    try:
        return args.func(args, out)
    except ResourceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_RESOURCE
    except (ValidationError, ShapeError, NumericalError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
