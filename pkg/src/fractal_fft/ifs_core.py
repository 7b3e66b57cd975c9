"""Iterated function systems, exact orbit points and base-K digit utilities.

A spatial system is ``psi_j(x) = A (x + b_j)`` with ``A^{-1}`` an integer
matrix; its dual frequency system is ``rho_j(x) = B x + c_j`` with
``B = (A^T)^{-1} = (A^{-1})^T``. Points of the N-fold orbits of 0 are kept as
exact rationals. Index ``j`` is expanded as ``j = j_0 + j_1 K + ... ``; the
obverse ordering composes ``f_{j_0} o ... o f_{j_{N-1}}`` (so ``j_{N-1}`` acts
first) and the reverse ordering composes ``f_{j_{N-1}} o ... o f_{j_0}``.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
import sympy

from .errors import (
    ContractionWarning,
    IndexRangeError,
    ResourceError,
    ShapeError,
    ValidationError,
)

DEFAULT_SIZE_CAP = 2**20
_INT64_SAFE = 2**62

RationalVector = tuple[Fraction, ...]
IntMatrix = tuple[tuple[int, ...], ...]


class Kind(str, enum.Enum):
    SPATIAL = "spatial"
    FREQUENCY = "frequency"


class Ordering(str, enum.Enum):
    OBVERSE = "obverse"
    REVERSE = "reverse"


# ---------------------------------------------------------------------------
# small exact linear-algebra helpers


def _int_matrix(rows, name: str) -> IntMatrix:
    try:
        out = tuple(tuple(_strict_int(x) for x in row) for row in rows)
    except TypeError as exc:
        raise ValidationError(f"{name} must be a matrix of integers") from exc
    if not out or any(len(r) != len(out) for r in out):
        raise ValidationError(f"{name} must be a non-empty square matrix")
    return out


def _int_vectors(vectors, dim: int, name: str) -> IntMatrix:
    try:
        out = tuple(tuple(_strict_int(x) for x in vec) for vec in vectors)
    except TypeError as exc:
        raise ValidationError(f"{name} must be a list of integer vectors") from exc
    if not out:
        raise ValidationError(f"{name} must contain at least one vector")
    for i, vec in enumerate(out):
        if len(vec) != dim:
            raise ValidationError(f"{name}[{i}] has length {len(vec)}, expected {dim}")
    if any(out[0]):
        raise ValidationError(f"{name}[0] must be the zero vector")
    return out


def _strict_int(x) -> int:
    if isinstance(x, bool):
        raise TypeError("booleans are not integers here")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, Fraction)) and x == int(x):
        return int(x)
    raise TypeError(f"{x!r} is not an integer")


def int_matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def matvec(m, x) -> tuple:
    return tuple(sum(mij * xj for mij, xj in zip(row, x)) for row in m)


def dot(x, y):
    return sum(a * b for a, b in zip(x, y))


def transpose(m) -> tuple:
    return tuple(zip(*m))


def identity(d: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


# ---------------------------------------------------------------------------
# system types


@dataclass(frozen=True)
class SpatialIfs:
    """Contractions ``psi_j(x) = A (x + b_j)``, given through ``A^{-1}``."""

    a_inverse: IntMatrix
    translations_b: IntMatrix

    def __post_init__(self):
        a_inv = _int_matrix(self.a_inverse, "a_inverse")
        object.__setattr__(self, "a_inverse", a_inv)
        object.__setattr__(
            self, "translations_b", _int_vectors(self.translations_b, len(a_inv), "b")
        )
        if self.determinant == 0:
            raise ValidationError("a_inverse is singular (determinant 0)")
        norm = self.contraction_norm
        if norm >= 1:
            warnings.warn(
                f"operator 2-norm of A is {norm:.6g} >= 1; maps are not contractions",
                ContractionWarning,
                stacklevel=3,
            )

    @property
    def dim(self) -> int:
        return len(self.a_inverse)

    @property
    def branch_count(self) -> int:
        return len(self.translations_b)

    @cached_property
    def determinant(self) -> int:
        return int(sympy.Matrix(self.a_inverse).det())

    @cached_property
    def adjugate(self) -> IntMatrix:
        """Integer adjugate, so that ``A = adjugate / determinant``."""
        adj = sympy.Matrix(self.a_inverse).adjugate()
        return tuple(tuple(int(adj[i, j]) for j in range(self.dim)) for i in range(self.dim))

    @cached_property
    def a_matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        det = self.determinant
        return tuple(tuple(Fraction(x, det) for x in row) for row in self.adjugate)

    @cached_property
    def contraction_norm(self) -> float:
        return float(np.linalg.norm(np.linalg.inv(np.array(self.a_inverse, dtype=float)), 2))

    def a_power(self, n: int) -> tuple[IntMatrix, int]:
        """Return ``(adj**n, det**n)`` so that ``A**n = adj**n / det**n``."""
        cache = self.__dict__.setdefault("_a_power_cache", {0: identity(self.dim)})
        if n not in cache:
            prev, _ = self.a_power(n - 1)
            cache[n] = int_matmul(prev, self.adjugate)
        return cache[n], self.determinant**n

    def a_power_fraction(self, n: int) -> tuple[tuple[Fraction, ...], ...]:
        num, den = self.a_power(n)
        return tuple(tuple(Fraction(x, den) for x in row) for row in num)

    def apply(self, j: int, x: Sequence) -> RationalVector:
        """Evaluate ``psi_j(x)`` exactly."""
        shifted = [Fraction(xi) + bi for xi, bi in zip(x, self.translations_b[j])]
        return matvec(self.a_matrix, shifted)


@dataclass(frozen=True)
class FrequencyIfs:
    """Expanding maps ``rho_j(x) = B x + c_j`` with integer ``B``."""

    b_matrix: IntMatrix
    translations_c: IntMatrix

    def __post_init__(self):
        b = _int_matrix(self.b_matrix, "b_matrix")
        object.__setattr__(self, "b_matrix", b)
        object.__setattr__(
            self, "translations_c", _int_vectors(self.translations_c, len(b), "c")
        )

    @classmethod
    def dual_of(cls, spatial: SpatialIfs, translations_c) -> "FrequencyIfs":
        return cls(transpose(spatial.a_inverse), translations_c)

    @property
    def dim(self) -> int:
        return len(self.b_matrix)

    @property
    def branch_count(self) -> int:
        return len(self.translations_c)

    def apply(self, j: int, x: Sequence) -> RationalVector:
        """Evaluate ``rho_j(x)`` exactly."""
        return tuple(
            Fraction(v) + c for v, c in zip(matvec(self.b_matrix, x), self.translations_c[j])
        )


@dataclass(frozen=True, eq=False)
class OrderedPointSet:
    """The ``K**N`` points of S_N or T_N in index order.

    ``numerators / denominator`` holds the same points as an integer array
    over one common positive denominator (``|det A^{-1}|**N`` for spatial
    points, 1 for frequencies); ``points`` holds them as reduced Fractions.
    """

    level: int
    ordering: Ordering
    kind: Kind
    points: tuple[RationalVector, ...]
    numerators: np.ndarray
    denominator: int
    has_duplicates: bool

    def __len__(self) -> int:
        return len(self.points)


# ---------------------------------------------------------------------------
# digits


def _check_index(j: int, K: int, N: int) -> None:
    if K < 2 and not (K == 1 and j == 0):
        raise ValueError(f"base K must be >= 2, got {K}")
    if N < 1:
        raise ValueError(f"length N must be >= 1, got {N}")
    if not 0 <= j < K**N:
        raise IndexRangeError(f"index {j} outside [0, {K}**{N})")


def base_digits(j: int, K: int, N: int) -> list[int]:
    """Digits ``[j_0, ..., j_{N-1}]`` with ``j = sum j_n K**n``."""
    _check_index(j, K, N)
    digits = []
    for _ in range(N):
        j, r = divmod(j, K)
        digits.append(r)
    return digits


def digit_reverse(j: int, K: int, N: int) -> int:
    """The conjugate index with the base-K digits of ``j`` reversed."""
    out = 0
    for d in base_digits(j, K, N):
        out = out * K + d
    return out


def digit_reverse_indices(K: int, N: int) -> np.ndarray:
    """Array ``r`` with ``r[j] = digit_reverse(j, K, N)`` for all j."""
    return np.arange(K**N).reshape((K,) * N).transpose().reshape(-1)


def digit_reversal_permute(v, K: int, N: int) -> np.ndarray:
    """Return ``out`` with ``out[m] = v[digit_reverse(m)]`` along the last axis."""
    v = np.asarray(v)
    if v.ndim == 0 or v.shape[-1] != K**N:
        raise ShapeError(f"expected last axis of length {K}**{N}={K**N}, got {v.shape}")
    lead = v.shape[:-1]
    axes = tuple(range(len(lead))) + tuple(range(len(lead) + N - 1, len(lead) - 1, -1))
    return v.reshape(lead + (K,) * N).transpose(axes).reshape(v.shape)


# ---------------------------------------------------------------------------
# orbits


def _maps(system, kind: Kind):
    kind = Kind(kind)
    return system.spatial if kind is Kind.SPATIAL else system.frequency


def compose(system, kind, ordering, j: int, N: int, x: Sequence | None = None) -> RationalVector:
    """Apply the N-fold composition indexed by ``j`` to ``x`` (default 0).

    This is the literal composition of the affine maps, one map at a time,
    in exact rational arithmetic.
    """
    maps = _maps(system, kind)
    K = maps.branch_count
    digits = base_digits(j, K, N)
    if Ordering(ordering) is Ordering.OBVERSE:
        digits = digits[::-1]
    point = tuple(Fraction(0) for _ in range(maps.dim)) if x is None else tuple(map(Fraction, x))
    for d in digits:
        point = maps.apply(d, point)
    return point


def orbit_point(system, kind, ordering, j: int, N: int) -> RationalVector:
    """Exact coordinates of the ``j``-th point of S_N or T_N."""
    return compose(system, kind, ordering, j, N)


def _integer_orbit(maps, kind: Kind, ordering: Ordering, N: int):
    """All orbit points as (integer numerators, signed common denominator)."""
    K, d = maps.branch_count, maps.dim
    if kind is Kind.SPATIAL:
        lin = np.array(maps.adjugate, dtype=object)
        shifts = np.array(maps.translations_b, dtype=object)
        det = maps.determinant
    else:
        lin = np.array(maps.b_matrix, dtype=object)
        shifts = np.array(maps.translations_c, dtype=object)
        det = 1

    lin_norm = max(sum(abs(x) for x in row) for row in lin.tolist())
    shift_max = max(abs(x) for x in shifts.reshape(-1).tolist())
    bound, scale = 0, 1
    for _ in range(N):
        if kind is Kind.SPATIAL:
            bound = lin_norm * (bound + abs(scale) * shift_max)
            scale *= det
        else:
            bound = lin_norm * bound + shift_max
    dtype = np.int64 if max(bound, abs(scale)) < _INT64_SAFE else object
    lin = lin.astype(dtype)
    shifts = shifts.astype(dtype)

    y = np.zeros((1, d), dtype=dtype)
    scale = 1
    for n in range(1, N + 1):
        idx = np.arange(K**n)
        if ordering is Ordering.OBVERSE:
            prev, digit = y[idx // K], idx % K
        else:
            prev, digit = y[idx % K ** (n - 1)], idx // K ** (n - 1)
        if kind is Kind.SPATIAL:
            y = (prev + scale * shifts[digit]) @ lin.T
            scale *= det
        else:
            y = prev @ lin.T + shifts[digit]
    if scale < 0:
        y, scale = -y, -scale
    return y, scale


def generate_point_set(system, kind, ordering, N: int, size_cap: int = DEFAULT_SIZE_CAP) -> OrderedPointSet:
    """Generate every point of S_N (spatial) or T_N (frequency) in order.

    Points are built level by level, applying one map per index per level
    with integer arithmetic, then reduced to Fractions.
    """
    kind, ordering = Kind(kind), Ordering(ordering)
    if N < 1:
        raise ValueError(f"level must be >= 1, got {N}")
    maps = _maps(system, kind)
    K = maps.branch_count
    if K**N > size_cap:
        raise ResourceError(f"K**N = {K}**{N} = {K**N} exceeds size cap {size_cap}")
    y, den = _integer_orbit(maps, kind, ordering, N)
    rows = y.tolist()
    points = tuple(tuple(Fraction(int(v), den) for v in row) for row in rows)
    distinct = len(set(map(tuple, rows)))
    return OrderedPointSet(
        level=N,
        ordering=ordering,
        kind=kind,
        points=points,
        numerators=y,
        denominator=den,
        has_duplicates=distinct != len(rows),
    )

