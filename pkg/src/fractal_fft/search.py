"""Search for integer frequency translations that make ``M_1`` invertible or Hadamard.

Row ``c`` of ``M_1`` depends only on the class of ``c`` in ``Z^d / B Z^d``,
so the candidates are first the coset representatives of ``B`` and then,
for the Hadamard target, every integer vector in a bounded box.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .errors import ResourceError, ValidationError
from .ifs_core import SpatialIfs, FrequencyIfs, matvec, transpose
from .roots import unit_root
from .transform import HADAMARD_TOL, M1Class, build_system, phase

COSET_CAP = 10**4
_VOLUME_TOL = 1e-9


@dataclass(frozen=True)
class CosetSystem:
    """One representative per class of ``Z^d / B Z^d``."""

    b_matrix: tuple[tuple[int, ...], ...]
    representatives: tuple[tuple[int, ...], ...]
    _inverse: tuple = field(repr=False, compare=False, default=())

    def key(self, x) -> tuple[Fraction, ...]:
        """Fractional parts of ``B^{-1} x``; equal keys mean congruent vectors."""
        return tuple(v % 1 for v in matvec(self._inverse, x))

    def congruent(self, x, y) -> bool:
        return self.key(x) == self.key(y)

    def index_of(self, x) -> int:
        k = self.key(x)
        for i, rep in enumerate(self.representatives):
            if self.key(rep) == k:
                return i
        raise AssertionError("representatives do not cover Z^d / B Z^d")


def _exact_inverse(matrix) -> tuple:
    inv = sympy.Matrix(matrix).inv()
    d = len(matrix)
    return tuple(tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(d)) for i in range(d))


def coset_representatives(b_matrix, cap: int = COSET_CAP) -> CosetSystem:
    """Scan ``[0, L)^d`` with ``L = |det B|`` and keep the first vector of each class.

    Vectors are visited with the first coordinate varying fastest.
    """
    b_matrix = tuple(tuple(int(x) for x in row) for row in b_matrix)
    det = int(sympy.Matrix(b_matrix).det())
    if det == 0:
        raise ValidationError("B is singular; Z^d / B Z^d is infinite")
    L = abs(det)
    if L > cap:
        raise ResourceError(f"|det B| = {L} exceeds coset cap {cap}")
    partial = CosetSystem(b_matrix, (), _exact_inverse(b_matrix))
    seen, reps = set(), []
    for t in itertools.product(range(L), repeat=len(b_matrix)):
        x = t[::-1]
        k = partial.key(x)
        if k not in seen:
            seen.add(k)
            reps.append(x)
            if len(reps) == L:
                break
    return CosetSystem(b_matrix, tuple(reps), partial._inverse)


def character_matrix(spatial: SpatialIfs, cosets: CosetSystem) -> np.ndarray:
    """Rows ``x`` over coset representatives, columns ``b_j``: ``exp(-2 pi i x . A b_j)``."""
    return _rows(spatial, cosets.representatives)


def _phase_rows(spatial: SpatialIfs, vectors) -> list[list[Fraction]]:
    return [[phase(spatial, x, 1, b) for b in spatial.translations_b] for x in vectors]


def _rows(spatial: SpatialIfs, vectors) -> np.ndarray:
    rows = _phase_rows(spatial, vectors)
    if not rows:
        return np.zeros((0, spatial.branch_count), dtype=complex)
    den = math.lcm(*(t.denominator for row in rows for t in row))
    nums = np.array([[int(t * den) for t in row] for row in rows], dtype=object)
    return unit_root(nums, den)


def separation_hypothesis(spatial: SpatialIfs) -> bool:
    """True when ``A b_j - A b_k`` is never an integer vector for ``j != k``."""
    a = spatial.a_matrix
    pts = [matvec(a, b) for b in spatial.translations_b]
    for p, q in itertools.combinations(pts, 2):
        if all((x - y).denominator == 1 for x, y in zip(p, q)):
            return False
    return True


@dataclass(frozen=True)
class SearchResult:
    """Outcome of :func:`search_frequencies`.

    On failure ``frequencies`` is None and ``message`` says which candidate
    pools were exhausted; failure never claims that no choice exists.
    """

    target: M1Class
    frequencies: tuple[tuple[int, ...], ...] | None
    hypothesis_holds: bool
    bound: int
    message: str
    warnings: tuple[str, ...] = ()
    coset_classes: tuple[int, ...] = ()

    @property
    def found(self) -> bool:
        return self.frequencies is not None


def _greedy_invertible(rows: np.ndarray, K: int) -> list[int] | None:
    """Pick row 0, then repeatedly the row maximizing the Gram volume."""
    chosen = [0]
    while len(chosen) < K:
        best, best_vol = None, 0.0
        for i in range(len(rows)):
            if i in chosen:
                continue
            sub = rows[chosen + [i]]
            vol = abs(np.linalg.det(sub @ sub.conj().T))
            if vol > best_vol + _VOLUME_TOL:
                best, best_vol = i, vol
        if best is None:
            return None
        chosen.append(best)
    return chosen


def _backtrack_hadamard(rows: np.ndarray, K: int) -> list[int] | None:
    """First (lexicographic) index set containing 0 whose rows are pairwise orthogonal."""
    tol = HADAMARD_TOL * K
    n = len(rows)
    gram = rows @ rows.conj().T
    ortho = np.abs(gram) < tol

    def extend(chosen: list[int]) -> list[int] | None:
        if len(chosen) == K:
            return chosen
        for i in range(chosen[-1] + 1, n):
            if all(ortho[i, j] for j in chosen):
                found = extend(chosen + [i])
                if found is not None:
                    return found
        return None

    return extend([0]) if n else None


def _validate(spatial: SpatialIfs, freqs, target: M1Class) -> bool:
    try:
        build_system(spatial, FrequencyIfs.dual_of(spatial, freqs), target)
    except ValidationError:
        return False
    return True


def search_frequencies(spatial: SpatialIfs, target=M1Class.INVERTIBLE, search_bound: int = 10) -> SearchResult:
    """Find ``c_0 = 0, c_1, ..., c_{K-1}`` making ``M_1`` of the target class.

    Coset representatives are tried first (greedy Gram-volume selection for
    invertibility, orthogonality backtracking for Hadamard). For the
    Hadamard target the box ``[-search_bound, search_bound]^d`` is then
    scanned in lexicographic order, one candidate per coset.
    """
    target = M1Class(target)
    if search_bound < 1:
        raise ValueError("search_bound must be >= 1")
    K, d = spatial.branch_count, spatial.dim
    cosets = coset_representatives(transpose(spatial.a_inverse))
    hyp = separation_hypothesis(spatial)
    notes = () if hyp else (
        "separation hypothesis fails: some A b_j - A b_k is an integer vector",
    )

    def success(freqs) -> SearchResult:
        classes = tuple(cosets.index_of(c) for c in freqs)
        return SearchResult(target, tuple(map(tuple, freqs)), hyp, search_bound,
                            f"found {target.value} M1", notes, classes)

    reps = list(cosets.representatives)
    rows = _rows(spatial, reps)
    pick = _greedy_invertible if target is M1Class.INVERTIBLE else _backtrack_hadamard
    chosen = pick(rows, K)
    if chosen is not None:
        freqs = [reps[i] for i in chosen]
        if _validate(spatial, freqs, target):
            return success(freqs)

    if target is M1Class.HADAMARD:
        box, seen = [tuple([0] * d)], {cosets.key(tuple([0] * d))}
        for x in itertools.product(range(-search_bound, search_bound + 1), repeat=d):
            k = cosets.key(x)
            if k not in seen:
                seen.add(k)
                box.append(x)
        chosen = _backtrack_hadamard(_rows(spatial, box), K)
        if chosen is not None:
            freqs = [box[i] for i in chosen]
            if _validate(spatial, freqs, target):
                return success(freqs)
        where = f"coset representatives and the box [-{search_bound}, {search_bound}]^{d}"
    else:
        where = "coset representatives"
    return SearchResult(
        target, None, hyp, search_bound,
        f"no {target.value} M1 found: search exhausted over {where}", notes,
    )
