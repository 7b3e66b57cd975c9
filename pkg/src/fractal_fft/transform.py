"""Fast forward and inverse fractal Fourier transforms.

``M_N[j, k] = exp(-2 pi i R_j . S_k)`` where rows run over the frequency
points T_N and columns over the spatial points S_N, both in the same
ordering. In the obverse ordering ``M_N`` is a Diţă matrix with outer matrix
``M_1``, inner matrix ``M_{N-1}`` and left diagonals ``D_{N,m}``; in the
reverse ordering block ``(l, m)`` is ``M_1[l, m] * M~_{N-1} @ D~_{N,l}``.
The diagonals factor as Kronecker products of ``K``-entry tables, and the
plan stores only those tables.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from .dita import (
    DitaSpec,
    OpCounter,
    check_invertible,
    dense_inner,
    dita_apply,
    dita_inverse_apply,
    gather_apply,
    scatter_apply,
)
from .errors import NumericalError, ResourceError, ShapeError, ValidationError
from .ifs_core import (
    DEFAULT_SIZE_CAP,
    FrequencyIfs,
    Kind,
    Ordering,
    SpatialIfs,
    digit_reverse_indices,
    dot,
    generate_point_set,
    matvec,
    transpose,
)
from .roots import exp_phase, unit_root

ORACLE_CAP = 4096
HADAMARD_TOL = 1e-9
M1_RESIDUAL_TOL = 1e-12
_INT64_SAFE = 2**61


class M1Class(str, enum.Enum):
    INVERTIBLE = "invertible"
    HADAMARD = "hadamard"


@dataclass(frozen=True, eq=False)
class FractalSystem:
    spatial: SpatialIfs
    frequency: FrequencyIfs
    m1: np.ndarray
    m1_class: M1Class
    m1_phases: tuple[tuple[Fraction, ...], ...]

    @property
    def K(self) -> int:
        return self.spatial.branch_count

    @property
    def dim(self) -> int:
        return self.spatial.dim


def _spatial_of(system) -> SpatialIfs:
    return system if isinstance(system, SpatialIfs) else system.spatial


def phase(system, c_vec, n: int, b_vec) -> Fraction:
    """``c . A**n b`` reduced into ``[0, 1)``, exactly."""
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    num, den = _spatial_of(system).a_power(n)
    return Fraction(dot(c_vec, matvec(num, b_vec)), den) % 1


def is_hadamard(matrix: np.ndarray, tol: float = HADAMARD_TOL) -> bool:
    K = matrix.shape[0]
    gram = matrix.conj().T @ matrix
    return bool(np.max(np.abs(gram - K * np.eye(K))) < tol)


def build_system(spatial: SpatialIfs, frequency: FrequencyIfs, required_class=M1Class.INVERTIBLE) -> FractalSystem:
    """Pair a spatial and frequency IFS and validate the seed matrix ``M_1``.

    The returned ``m1_class`` is the strongest class ``M_1`` satisfies.
    """
    required_class = M1Class(required_class)
    if spatial.dim != frequency.dim:
        raise ValidationError(f"dimension mismatch: spatial {spatial.dim}, frequency {frequency.dim}")
    if spatial.branch_count != frequency.branch_count:
        raise ValidationError(
            f"branch count mismatch: {spatial.branch_count} spatial maps, "
            f"{frequency.branch_count} frequency maps"
        )
    if frequency.b_matrix != transpose(spatial.a_inverse):
        raise ValidationError("b_matrix must equal the transpose of a_inverse, i.e. B = (A^T)^{-1}")
    K = spatial.branch_count
    phases = tuple(
        tuple(phase(spatial, c, 1, b) for b in spatial.translations_b) for c in frequency.translations_c
    )
    m1 = np.array([[exp_phase(t) for t in row] for row in phases])
    try:
        det = check_invertible(m1, "M₁") if K > 1 else 1.0
    except NumericalError as exc:
        raise ValidationError(f"M₁ singular: {exc}; required class {required_class.value}") from None
    cls = M1Class.HADAMARD if is_hadamard(m1) else M1Class.INVERTIBLE
    if required_class is M1Class.HADAMARD and cls is not M1Class.HADAMARD:
        dev = np.max(np.abs(m1.conj().T @ m1 - K * np.eye(K)))
        raise ValidationError(
            f"M₁ is not Hadamard: max |M₁*M₁ - K I| = {dev:.3e} (|det| = {abs(det):.3e}); "
            f"required class hadamard"
        )
    m1.setflags(write=False)
    return FractalSystem(spatial, frequency, m1, cls, phases)


# ---------------------------------------------------------------------------
# plans


@dataclass(frozen=True, eq=False)
class TransformPlan:
    """Everything needed to apply ``M_N`` (or ``M~_N``) and its inverse fast.

    ``diag_factors[n - 2][m][u]`` is the exact phase of the ``u``-th entry of
    ``E_{n,m}`` (obverse) or ``E~_{n,m}`` (reverse), for ``n = 2..N``.
    """

    system: FractalSystem
    level: int
    ordering: Ordering
    diag_factors: tuple[tuple[tuple[Fraction, ...], ...], ...]
    m1_inverse: np.ndarray
    m1_residual: float

    @property
    def K(self) -> int:
        return self.system.K

    @property
    def size(self) -> int:
        return self.system.K**self.level

    def factor(self, n: int, m: int) -> tuple[Fraction, ...]:
        return self.diag_factors[n - 2][m]


def build_plan(system: FractalSystem, N: int, ordering, size_cap: int = DEFAULT_SIZE_CAP) -> TransformPlan:
    ordering = Ordering(ordering)
    if N < 1:
        raise ValueError(f"level must be >= 1, got {N}")
    K = system.K
    if K**N > size_cap:
        raise ResourceError(f"K**N = {K}**{N} = {K**N} exceeds size cap {size_cap}")
    b, c = system.spatial.translations_b, system.frequency.translations_c
    factors = []
    for n in range(2, N + 1):
        if ordering is Ordering.OBVERSE:
            table = tuple(tuple(phase(system, c[u], n, b[m]) for u in range(K)) for m in range(K))
        else:
            table = tuple(tuple(phase(system, c[l], n, b[u]) for u in range(K)) for l in range(K))
        factors.append(table)
    m1_inv = np.linalg.inv(system.m1)
    residual = float(np.max(np.abs(system.m1 @ m1_inv - np.eye(K))))
    m1_inv.setflags(write=False)
    return TransformPlan(system, N, ordering, tuple(factors), m1_inv, residual)


def diagonal_numerators(plan: TransformPlan) -> dict[int, tuple[np.ndarray, int]]:
    """Phase numerators of every level's diagonals via the Kronecker recurrence.

    Returns ``{n: (nums, den)}`` for ``n = 2..N`` where ``nums`` has shape
    ``(K, K**(n-1))`` and row ``m`` holds the phases of ``D_{n,m}`` (or
    ``D~_{n,m}``) over the common denominator ``den = |det A^{-1}|**n``.
    Entry ``p = p_hat*K + u`` at level ``n`` is entry ``p_hat`` at level
    ``n-1`` plus ``E_{n,m}[u]``.
    """
    K, N = plan.K, plan.level
    absdet = abs(plan.system.spatial.determinant)
    dtype = np.int64 if absdet**N < _INT64_SAFE else object
    out = {}
    prev = None
    for n in range(2, N + 1):
        den = absdet**n
        table = np.array(
            [[int(t * den) for t in row] for row in plan.diag_factors[n - 2]], dtype=object
        ).astype(dtype)
        if prev is None:
            nums = table
        else:
            nums = (prev[:, :, None] * absdet + table[:, None, :]).reshape(K, -1) % den
        out[n] = (nums, den)
        prev = nums
    return out


def diagonal_phases(plan: TransformPlan, n: int) -> list[list[Fraction]]:
    """Level-``n`` diagonal phases from the recurrence, as Fractions."""
    nums, den = diagonal_numerators(plan)[n]
    return [[Fraction(int(x), den) for x in row] for row in nums.tolist()]


def direct_diagonal_phases(system: FractalSystem, N: int, ordering) -> list[list[Fraction]]:
    """Level-``N`` diagonal phases straight from the orbit points.

    Obverse: ``R_{p,N-1}(0) . A**N b_m``. Reverse: ``c_l . A Psi~_{p,N-1}(0)``.
    """
    ordering = Ordering(ordering)
    if N < 2:
        raise ValueError("diagonals exist only for N >= 2")
    K = system.K
    b, c = system.spatial.translations_b, system.frequency.translations_c
    if ordering is Ordering.OBVERSE:
        freqs = generate_point_set(system, Kind.FREQUENCY, ordering, N - 1).points
        a_n = system.spatial.a_power_fraction(N)
        return [[dot(r, matvec(a_n, b[m])) % 1 for r in freqs] for m in range(K)]
    pts = generate_point_set(system, Kind.SPATIAL, ordering, N - 1).points
    a_1 = system.spatial.a_matrix
    return [[dot(c[l], matvec(a_1, s)) % 1 for s in pts] for l in range(K)]


def _diagonal_values(plan: TransformPlan, counter: OpCounter) -> dict[int, np.ndarray]:
    vals = {}
    for n, (nums, den) in diagonal_numerators(plan).items():
        vals[n] = unit_root(nums, den)
        counter.twiddles += nums.size
    return vals


def _operators(plan: TransformPlan, counter: OpCounter):
    """Build (forward, inverse, adjoint) callables acting on the last axis."""
    m1 = np.asarray(plan.system.m1)
    m1_inv = np.asarray(plan.m1_inverse)
    m1_adj = m1.conj().T
    fwd, inv, adj = dense_inner(m1), dense_inner(m1_inv), dense_inner(m1_adj)
    for n, diag in sorted(_diagonal_values(plan, counter).items()):
        diag_conj = diag.conj()
        if plan.ordering is Ordering.OBVERSE:
            spec = DitaSpec(m1, diag, fwd, outer_inverse=m1_inv, inverse_diagonals=diag_conj)
            fwd, inv, adj = (
                partial(dita_apply, spec),
                partial(dita_inverse_apply, spec, inv),
                partial(gather_apply, m1_adj, diag_conj, adj),
            )
        else:
            # M~_n is the inverse of the Diţă matrix (M_1^{-1}, conj D~, M~_{n-1}^{-1}).
            spec = DitaSpec(m1_inv, diag_conj, inv, outer_inverse=m1, inverse_diagonals=diag)
            fwd, inv, adj = (
                partial(dita_inverse_apply, spec, fwd),
                partial(dita_apply, spec),
                partial(scatter_apply, m1_adj, diag_conj, adj),
            )
    return fwd, inv, adj


def _prepare(plan: TransformPlan, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim == 0 or v.shape[-1] != plan.size:
        raise ShapeError(f"expected vector of length K**N = {plan.size}, got shape {v.shape}")
    return v


def forward_apply(plan: TransformPlan, v, counter: OpCounter | None = None) -> np.ndarray:
    """``M_N @ v`` (obverse plan) or ``M~_N @ v`` (reverse plan).

    ``counter`` is caller-owned and is not reset here.
    """
    v = _prepare(plan, v)
    counter = OpCounter() if counter is None else counter
    return _operators(plan, counter)[0](v, counter)


def inverse_apply(plan: TransformPlan, w, counter: OpCounter | None = None) -> np.ndarray:
    """Solve ``M_N x = w`` (or ``M~_N x = w``) using the inverse block form."""
    w = _prepare(plan, w)
    if not plan.m1_residual < M1_RESIDUAL_TOL:
        raise NumericalError(
            f"M₁ inverse residual {plan.m1_residual:.3e} exceeds {M1_RESIDUAL_TOL:g}"
        )
    counter = OpCounter() if counter is None else counter
    return _operators(plan, counter)[1](w, counter)


def adjoint_apply(plan: TransformPlan, v, counter: OpCounter | None = None) -> np.ndarray:
    """Conjugate-transpose product ``M_N^* @ v`` with the same fast structure."""
    v = _prepare(plan, v)
    counter = OpCounter() if counter is None else counter
    return _operators(plan, counter)[2](v, counter)


# ---------------------------------------------------------------------------
# dense oracles


def _check_oracle(system: FractalSystem, N: int, cap: int) -> None:
    if N < 1:
        raise ValueError(f"level must be >= 1, got {N}")
    if system.K**N > cap:
        raise ResourceError(f"dense oracle limited to K**N <= {cap}, got {system.K**N}")


def dense_phase_matrix(system: FractalSystem, N: int, ordering, cap: int = ORACLE_CAP) -> tuple[np.ndarray, int]:
    """Exact phases of the dense matrix as ``(numerators, denominator)``.

    Entry ``(j, k)`` is ``R_j . S_k`` mod 1 with frequencies and spatial
    points generated by direct composition in the given ordering.
    """
    _check_oracle(system, N, cap)
    freqs = generate_point_set(system, Kind.FREQUENCY, ordering, N, size_cap=cap)
    spat = generate_point_set(system, Kind.SPATIAL, ordering, N, size_cap=cap)
    r, y, den = freqs.numerators, spat.numerators, spat.denominator
    bound = system.dim * _absmax(r) * _absmax(y)
    if bound >= _INT64_SAFE or r.dtype == object or y.dtype == object:
        num = r.astype(object) @ y.astype(object).T
    else:
        num = r.astype(np.int64) @ y.astype(np.int64).T
    return num % den, den


def _absmax(a: np.ndarray) -> int:
    return max((abs(int(x)) for x in a.reshape(-1).tolist()), default=0)


def dense_matrix(system: FractalSystem, N: int, ordering, cap: int = ORACLE_CAP) -> np.ndarray:
    """Brute-force ``K**N x K**N`` matrix ``M_N`` or ``M~_N``."""
    num, den = dense_phase_matrix(system, N, ordering, cap)
    return unit_root(num, den)


@dataclass(frozen=True)
class BlockIdentityReport:
    """Maximum entrywise deviations for the three structural identities.

    ``*_deviation`` fields compare dense matrices against assemblies built
    with floating-point products. ``*_exact_deviation`` fields assemble the
    phases in exact rational arithmetic first and exponentiate once, so they
    are 0.0 whenever the identity holds exactly; ``phase_mismatches`` counts
    entries whose exact phases differ.
    """

    level: int
    permutation_deviation: float
    obverse_deviation: float
    reverse_deviation: float
    obverse_exact_deviation: float
    reverse_exact_deviation: float
    phase_mismatches: int

    def passed(self, tol: float = 1e-10) -> bool:
        return (
            max(self.permutation_deviation, self.obverse_deviation, self.reverse_deviation,
                self.obverse_exact_deviation, self.reverse_exact_deviation) < tol
            and self.phase_mismatches == 0
        )


def verify_block_identities(system: FractalSystem, N: int, cap: int = ORACLE_CAP) -> BlockIdentityReport:
    """Check the digit-reversal conjugation and both block forms densely."""
    _check_oracle(system, N, cap)
    K = system.K
    ob_num, den = dense_phase_matrix(system, N, Ordering.OBVERSE, cap)
    rv_num, _ = dense_phase_matrix(system, N, Ordering.REVERSE, cap)
    ob, rv = unit_root(ob_num, den), unit_root(rv_num, den)

    perm = digit_reverse_indices(K, N)
    mismatches = int(np.count_nonzero(rv_num[np.ix_(perm, perm)] != ob_num))
    perm_dev = float(np.max(np.abs(rv[np.ix_(perm, perm)] - ob)))
    if N == 1:
        return BlockIdentityReport(N, perm_dev, 0.0, 0.0, 0.0, 0.0, mismatches)

    absdet = abs(system.spatial.determinant)
    size = K ** (N - 1)
    m1 = np.asarray(system.m1)
    m1_num = np.array(
        [[int(t * den) for t in row] for row in system.m1_phases], dtype=object
    ).astype(ob_num.dtype)

    devs = []
    for ordering, num, dense in ((Ordering.OBVERSE, ob_num, ob), (Ordering.REVERSE, rv_num, rv)):
        prev_num, prev_den = dense_phase_matrix(system, N - 1, ordering, cap)
        prev = unit_root(prev_num, prev_den)
        d_num, d_den = diagonal_numerators(build_plan(system, N, ordering))[N]
        assert d_den == den and prev_den * absdet == den
        diag = unit_root(d_num, d_den)
        prev_scaled = prev_num * absdet
        if ordering is Ordering.OBVERSE:
            # block (l, m) = M_1[l, m] * D_{N,m} M_{N-1}
            floats = np.einsum("lm,mp,pq->lpmq", m1, diag, prev)
            exact = (m1_num[:, None, :, None] + d_num.T[None, :, :, None] + prev_scaled[None, :, None, :])
        else:
            # block (l, m) = M_1[l, m] * M~_{N-1} D~_{N,l}
            floats = np.einsum("lm,pq,lq->lpmq", m1, prev, diag)
            exact = (m1_num[:, None, :, None] + prev_scaled[None, :, None, :] + d_num[:, None, None, :])
        floats = floats.reshape(K * size, K * size)
        exact = exact.reshape(K * size, K * size) % den
        mismatches += int(np.count_nonzero(exact != num))
        devs.append(float(np.max(np.abs(floats - dense))))
        devs.append(float(np.max(np.abs(unit_root(exact, den) - dense))))
    return BlockIdentityReport(N, perm_dev, devs[0], devs[2], devs[1], devs[3], mismatches)


# ---------------------------------------------------------------------------
# operation counts


def base_op_count(K: int) -> int:
    """Operations for a dense ``K x K`` product: ``K**2`` mults, ``K**2 - K`` adds."""
    return 2 * K * K - K


def plan_op_count_bound(K: int, N: int, P1: int) -> int:
    """Closed form ``K**(N-1) P1 + 3 (N-1) K**(N+1) - 2 (N-1) K**N``."""
    return K ** (N - 1) * P1 + 3 * (N - 1) * K ** (N + 1) - 2 * (N - 1) * K**N


def dense_op_count(K: int, N: int) -> int:
    size = K**N
    return size * size + size * (size - 1)
