"""Matrix-free application of Diţă block matrices and their inverses.

A Diţă matrix of size ``K*M`` is built from a ``K x K`` outer matrix ``a``,
diagonals ``E_0 = I, E_1, ..., E_{K-1}`` of length ``M`` and an ``M x M``
inner operator ``B``; its ``(j, k)`` block is ``a[j, k] * E_k @ B``. The
inverse has ``(k, j)`` block ``c[k, j] * B^{-1} @ E_k^{-1}`` with
``c = a^{-1}``.

Vectors may carry leading batch axes; the block structure acts on the last
axis. Inner operators are callables ``inner(x, counter) -> y`` that act on
the last axis of ``x`` and add their own work to ``counter``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NumericalError, ShapeError, ValidationError

InnerApply = Callable[[np.ndarray, "OpCounter"], np.ndarray]

SINGULAR_RTOL = 1e-9


@dataclass
class OpCounter:
    """Complex multiplications and additions performed on signal data.

    Each complex multiply or add counts as one operation. Building the
    diagonal twiddle entries is tallied separately in ``twiddles`` and is not
    part of ``total``.
    """

    multiplications: int = 0
    additions: int = 0
    twiddles: int = 0

    @property
    def total(self) -> int:
        return self.multiplications + self.additions

    def add(self, multiplications: int = 0, additions: int = 0) -> None:
        self.multiplications += multiplications
        self.additions += additions

    def reset(self) -> None:
        self.multiplications = self.additions = self.twiddles = 0


def check_invertible(matrix: np.ndarray, what: str = "outer matrix") -> complex:
    """Raise NumericalError unless ``|det| > 1e-9 * (max row norm)**K``."""
    matrix = np.asarray(matrix)
    det = np.linalg.det(matrix)
    scale = float(np.max(np.linalg.norm(matrix, axis=1))) ** matrix.shape[0]
    if not abs(det) > SINGULAR_RTOL * scale:
        raise NumericalError(
            f"{what} is singular: |det| = {abs(det):.3e} <= {SINGULAR_RTOL:g} * {scale:.3e}"
        )
    return det


def _batch(x: np.ndarray) -> int:
    return int(np.prod(x.shape[:-1], dtype=np.int64))


def dense_inner(matrix) -> InnerApply:
    """Inner operator multiplying by a dense matrix, with op counting."""
    matrix = np.asarray(matrix, dtype=complex)
    rows, cols = matrix.shape

    def apply(x: np.ndarray, counter: OpCounter) -> np.ndarray:
        if x.shape[-1] != cols:
            raise ShapeError(f"dense operator expects length {cols}, got {x.shape[-1]}")
        n = _batch(x)
        counter.add(n * rows * cols, n * rows * (cols - 1))
        return x @ matrix.T

    return apply


def scatter_apply(outer, diagonals, inner: InnerApply, v, counter: OpCounter) -> np.ndarray:
    """Block ``(j, k)`` = ``outer[j, k] * diag(diagonals[k]) @ inner``.

    Chunk ``k`` of ``v`` goes through ``inner`` then ``diagonals[k]``; output
    chunk ``j`` is ``sum_k outer[j, k] * that``. ``diagonals[0]`` is taken to
    be all ones and skipped.
    """
    K, M = diagonals.shape
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] != K * M:
        raise ShapeError(f"expected last axis of length {K * M}, got {v.shape[-1]}")
    lead = v.shape[:-1]
    y = inner(v.reshape(lead + (K, M)), counter)
    if K > 1:
        y = y.copy()
        y[..., 1:, :] *= diagonals[1:]
    out = np.einsum("jk,...km->...jm", outer, y)
    n = _batch(v)
    counter.add(n * (M * (K - 1) + K * K * M), n * K * (K - 1) * M)
    return out.reshape(v.shape)


def gather_apply(outer, diagonals, inner: InnerApply, v, counter: OpCounter) -> np.ndarray:
    """Block ``(j, k)`` = ``outer[j, k] * inner @ diag(diagonals[j])``.

    Output chunk ``j`` is ``inner(diagonals[j] * sum_k outer[j, k] v_k)``.
    """
    K, M = diagonals.shape
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] != K * M:
        raise ShapeError(f"expected last axis of length {K * M}, got {v.shape[-1]}")
    lead = v.shape[:-1]
    t = np.einsum("jk,...km->...jm", outer, v.reshape(lead + (K, M)))
    if K > 1:
        t[..., 1:, :] *= diagonals[1:]
    n = _batch(v)
    counter.add(n * (K * K * M + M * (K - 1)), n * K * (K - 1) * M)
    return inner(t, counter).reshape(v.shape)


@dataclass(frozen=True, eq=False)
class DitaSpec:
    """Outer matrix, diagonals and inner operator of one Diţă block matrix.

    ``outer_inverse`` and ``inverse_diagonals`` may be supplied when exact
    inverses are known (e.g. from rational phases); otherwise they are
    computed numerically on demand.
    """

    outer: np.ndarray
    diagonals: np.ndarray
    inner_apply: InnerApply
    outer_inverse: Optional[np.ndarray] = None
    inverse_diagonals: Optional[np.ndarray] = None
    determinant: complex = field(init=False)

    def __post_init__(self):
        outer = np.asarray(self.outer, dtype=complex)
        diagonals = np.atleast_2d(np.asarray(self.diagonals, dtype=complex))
        K = outer.shape[0]
        if outer.shape != (K, K):
            raise ValidationError(f"outer matrix must be square, got {outer.shape}")
        if diagonals.shape[0] != K:
            raise ValidationError(f"need {K} diagonals, got {diagonals.shape[0]}")
        if not np.all(diagonals[0] == 1):
            raise ValidationError("diagonal E_0 must be the identity")
        if np.any(diagonals == 0):
            raise ValidationError("diagonal entries must be nonzero")
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "diagonals", diagonals)
        object.__setattr__(self, "determinant", check_invertible(outer))

    @property
    def K(self) -> int:
        return self.outer.shape[0]

    @property
    def M(self) -> int:
        return self.diagonals.shape[1]

    def dense(self, inner_matrix) -> np.ndarray:
        """Assemble the full ``KM x KM`` matrix given the inner matrix."""
        inner_matrix = np.asarray(inner_matrix)
        return np.block(
            [
                [self.outer[j, k] * (self.diagonals[k][:, None] * inner_matrix) for k in range(self.K)]
                for j in range(self.K)
            ]
        )


def dita_apply(spec: DitaSpec, v, counter: OpCounter) -> np.ndarray:
    """Multiply by the Diţă matrix without forming it."""
    return scatter_apply(spec.outer, spec.diagonals, spec.inner_apply, v, counter)


def dita_inverse_apply(spec: DitaSpec, inner_inverse_apply: InnerApply, w, counter: OpCounter) -> np.ndarray:
    """Multiply by the inverse Diţă matrix; ``inner_inverse_apply`` inverts ``B``."""
    outer_inv = spec.outer_inverse
    if outer_inv is None:
        outer_inv = np.linalg.inv(spec.outer)
    diag_inv = spec.inverse_diagonals
    if diag_inv is None:
        diag_inv = 1.0 / spec.diagonals
    return gather_apply(np.asarray(outer_inv), np.asarray(diag_inv), inner_inverse_apply, w, counter)


def dita_op_bound(K: int, M: int, O_M: int) -> int:
    """Upper bound ``K*O_M + 3*M*K**2 - 2*M*K`` on operations for ``H @ v``."""
    return K * O_M + 3 * M * K**2 - 2 * M * K
