"""Acceptance criteria for the build, one test per criterion.

Each criterion prints a single ``[PASS]`` or ``[FAIL]`` line, also when run
as ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from fractal_fft.dita import OpCounter
from fractal_fft.fixtures import FIXTURES, dyadic, quarter_cantor
from fractal_fft.ifs_core import Kind, Ordering, SpatialIfs, compose, digit_reverse
from fractal_fft.search import search_frequencies
from fractal_fft.transform import (
    adjoint_apply,
    base_op_count,
    build_plan,
    dense_matrix,
    diagonal_phases,
    direct_diagonal_phases,
    forward_apply,
    inverse_apply,
    plan_op_count_bound,
    verify_block_identities,
)

SEED = 12345


def _levels(K: int, cap: int) -> range:
    N = 1
    while K ** (N + 1) <= cap:
        N += 1
    return range(1, N + 1)


def _rand(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def criterion_1():
    N = 10
    rng = np.random.default_rng(SEED)
    v = _rand(rng, 2**N)
    plan = build_plan(dyadic(), N, Ordering.OBVERSE)
    start = time.perf_counter()
    fast = forward_apply(plan, v)
    elapsed = time.perf_counter() - start
    # naive DFT of the digit-reversed input, O(4^N), no library FFT
    perm = [digit_reverse(m, 2, N) for m in range(2**N)]
    n = np.arange(2**N)
    naive = np.exp(-2j * np.pi * np.outer(n, n) / 2**N) @ v[perm]
    dev = float(np.max(np.abs(fast - naive)))
    ok = dev < 1e-9 and elapsed < 1.0
    return ok, f"max deviation {dev:.2e} (< 1e-9), fast path {elapsed * 1e3:.1f} ms (< 1 s)"


def criterion_2():
    rng = np.random.default_rng(SEED)
    worst_f = worst_i = 0.0
    cases = 0
    for name, make in FIXTURES.items():
        system = make()
        for ordering in Ordering:
            for N in _levels(system.K, 1024):
                plan = build_plan(system, N, ordering)
                M = dense_matrix(system, N, ordering)
                V = _rand(rng, 20, plan.size)
                worst_f = max(worst_f, float(np.max(np.abs(forward_apply(plan, V) - V @ M.T))))
                expected = np.linalg.solve(M, V.T).T
                worst_i = max(worst_i, float(np.max(np.abs(inverse_apply(plan, V) - expected))))
                cases += 1
    ok = worst_f < 1e-9 and worst_i < 1e-9
    return ok, f"{cases} (fixture, ordering, N) cases x 20 vectors; forward {worst_f:.2e}, inverse {worst_i:.2e} (< 1e-9)"


def criterion_3():
    rng = np.random.default_rng(SEED)
    system = quarter_cantor()
    worst = 0.0
    for ordering in Ordering:
        for N in (6, 7, 8):
            plan = build_plan(system, N, ordering)
            v = _rand(rng, plan.size)
            err = np.max(np.abs(adjoint_apply(plan, forward_apply(plan, v)) - plan.size * v))
            worst = max(worst, float(err / (plan.size * np.max(np.abs(v)))))
    return worst < 1e-8, f"max relative ||M*Mv - K^N v|| = {worst:.2e} (< 1e-8), N = 6..8"


def criterion_4():
    worst = 0.0
    mismatches = 0
    dyadic_exact = 0.0
    for name, make in FIXTURES.items():
        system = make()
        for N in range(1, 6):
            r = verify_block_identities(system, N)
            worst = max(worst, r.permutation_deviation, r.obverse_deviation, r.reverse_deviation,
                        r.obverse_exact_deviation, r.reverse_exact_deviation)
            mismatches += r.phase_mismatches
            if name == "dyadic":
                dyadic_exact = max(dyadic_exact, r.permutation_deviation,
                                   r.obverse_exact_deviation, r.reverse_exact_deviation)
    ok = worst < 1e-10 and mismatches == 0 and dyadic_exact == 0.0
    return ok, (f"max deviation {worst:.2e} (< 1e-10), exact phase mismatches {mismatches}, "
                f"dyadic exact-phase deviation {dyadic_exact:g} (== 0)")


def criterion_5():
    compared = mismatched = 0
    for make in FIXTURES.values():
        system = make()
        for ordering in Ordering:
            for N in range(2, 6):
                fast = diagonal_phases(build_plan(system, N, ordering), N)
                direct = direct_diagonal_phases(system, N, ordering)
                for a, b in zip(fast, direct):
                    compared += len(b)
                    mismatched += sum(x != y for x, y in zip(a, b))
                mismatched += len(fast) != len(direct)
    return mismatched == 0, f"{compared} rational phases compared, {mismatched} mismatches (== 0)"


def criterion_6():
    details = []
    ok = True
    for name, N_max in (("dyadic", 10), ("quarter_cantor", 10), ("middle_third", 10), ("sierpinski", 6)):
        system = FIXTURES[name]()
        K = system.K
        ratios = {}
        for N in range(1, N_max + 1):
            counter = OpCounter()
            forward_apply(build_plan(system, N, Ordering.OBVERSE), np.ones(K**N), counter)
            ok &= counter.total <= plan_op_count_bound(K, N, base_op_count(K))
            ratios[N] = counter.total / (N * K**N)
        growth = ratios[N_max] / ratios[4] - 1
        ok &= growth <= 0.05
        details.append(f"{name} max ratio {max(ratios.values()):.3f} growth {growth * 100:.1f}%")
    return ok, "counts <= bound; " + "; ".join(details) + " (growth <= 5%)"


def criterion_7():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for make in FIXTURES.values():
        system = make()
        N_max = 10 if system.K == 2 else 6
        for ordering in Ordering:
            for N in range(1, N_max + 1):
                plan = build_plan(system, N, ordering)
                v = _rand(rng, plan.size)
                err = np.max(np.abs(inverse_apply(plan, forward_apply(plan, v)) - v)) / np.max(np.abs(v))
                worst = max(worst, float(err))
    return worst < 1e-8, f"max relative round-trip error {worst:.2e} (< 1e-8)"


def criterion_8():
    middle = SpatialIfs([[3]], [[0], [2]])
    quarter = SpatialIfs([[4]], [[0], [2]])
    inv = search_frequencies(middle, "invertible")
    had = search_frequencies(middle, "hadamard", search_bound=50)
    qc = search_frequencies(quarter, "hadamard")
    m1 = None
    if qc.found:
        c = qc.frequencies[1][0]
        m1 = np.array([[1, 1], [1, np.exp(-2j * np.pi * c * 2 / 4)]])
    ok = inv.found and not had.found and qc.found and np.allclose(m1, [[1, 1], [1, -1]])
    return ok, (f"middle-third invertible c={inv.frequencies}; hadamard bound 50 found={had.found}; "
                f"quarter-Cantor hadamard c={qc.frequencies}")


def _mat_power(m, n):
    d = len(m)
    out = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for _ in range(n):
        out = [[sum(out[i][k] * m[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    return out


def _mv(m, x):
    return tuple(sum(Fraction(a) * b for a, b in zip(row, x)) for row in m)


def criterion_9():
    rng = np.random.default_rng(SEED)
    checks = failures = 0
    for make in FIXTURES.values():
        system = make()
        K, d = system.K, system.dim
        A = system.spatial.a_matrix
        A_inv = system.spatial.a_inverse
        B = system.frequency.b_matrix
        b, c = system.spatial.translations_b, system.frequency.translations_c
        for N in range(1, 5):
            powers = {Kind.SPATIAL: _mat_power(A, N), Kind.FREQUENCY: _mat_power(B, N)}
            a_inv_n = _mat_power(A_inv, N)
            for j in range(K**N):
                for kind in Kind:
                    for ordering in Ordering:
                        # translation shift by the linear part
                        x = tuple(int(t) for t in rng.integers(-100, 100, d))
                        y = tuple(int(t) for t in rng.integers(-100, 100, d))
                        lhs = compose(system, kind, ordering, j, N, tuple(p + q for p, q in zip(x, y)))
                        rhs = tuple(p + q for p, q in zip(compose(system, kind, ordering, j, N, x),
                                                          _mv(powers[kind], y)))
                        checks += 1
                        failures += lhs != rhs
                        # lattice membership
                        p0 = compose(system, kind, ordering, j, N)
                        z = _mv(a_inv_n, p0) if kind is Kind.SPATIAL else p0
                        checks += 1
                        failures += any(t.denominator != 1 for t in z)
                if N >= 2:
                    l, rest = divmod(j, K ** (N - 1))
                    prev = {(k, o): compose(system, k, o, rest, N - 1) for k in Kind for o in Ordering}
                    expected = {
                        (Kind.SPATIAL, Ordering.OBVERSE):
                            tuple(p + q for p, q in zip(prev[Kind.SPATIAL, Ordering.OBVERSE], _mv(powers[Kind.SPATIAL], b[l]))),
                        (Kind.SPATIAL, Ordering.REVERSE):
                            tuple(p + q for p, q in zip(_mv(A, prev[Kind.SPATIAL, Ordering.REVERSE]), _mv(A, b[l]))),
                        (Kind.FREQUENCY, Ordering.OBVERSE):
                            tuple(p + q for p, q in zip(prev[Kind.FREQUENCY, Ordering.OBVERSE], _mv(_mat_power(B, N - 1), c[l]))),
                        (Kind.FREQUENCY, Ordering.REVERSE):
                            tuple(p + q for p, q in zip(_mv(B, prev[Kind.FREQUENCY, Ordering.REVERSE]), c[l])),
                    }
                    for (kind, ordering), want in expected.items():
                        checks += 1
                        failures += compose(system, kind, ordering, j, N) != want
    return failures == 0, f"{checks} exact identities checked, {failures} failures (== 0)"


CRITERIA = [
    (1, "classical FFT equivalence, dyadic N=10", criterion_1),
    (2, "dense-oracle equivalence, all fixtures K^N <= 1024", criterion_2),
    (3, "Hadamard scaling M*M = K^N I, quarter-Cantor N=6..8", criterion_3),
    (4, "block identities, N <= 5", criterion_4),
    (5, "diagonal recurrence exact, N <= 5", criterion_5),
    (6, "operation counts within closed-form bound", criterion_6),
    (7, "round trip, both orderings, all fixtures", criterion_7),
    (8, "spectrum search outcomes", criterion_8),
    (9, "orbit identities exact, N <= 4", criterion_9),
]


def _line(number, title, ok, detail) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"


@pytest.mark.acceptance
@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, detail = check()
    line = _line(number, title, ok, detail)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for number, title, check in CRITERIA:
        ok, detail = check()
        results.append(ok)
        print(_line(number, title, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
