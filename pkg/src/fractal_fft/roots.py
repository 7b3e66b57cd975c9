"""Evaluation of e^{-2 pi i theta} for exact rational phases theta."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

# (-i)**q for q = 0..3; multiplying by these is exact in IEEE arithmetic.
_QUARTER_TURNS = np.array([1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j])


def unit_root(numerators, denominator: int) -> np.ndarray:
    """Return ``exp(-2j*pi*numerators/denominator)`` elementwise.

    ``numerators`` may be an int64 or object (Python int) array. The phase is
    reduced modulo 1 with integer arithmetic and split into a whole number of
    quarter turns plus a remainder in ``[0, 1/4)``, so equal rational phases
    always map to bit-identical complex values and multiples of 1/4 come out
    exactly as 1, -i, -1, i.
    """
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    num = np.asarray(numerators)
    shape = num.shape
    num = num.reshape(-1)
    if num.dtype != object and denominator >= 2**61:
        num = num.astype(object)
    num = num % denominator
    quarters = (4 * num) // denominator
    rest = 4 * num - quarters * denominator
    angle = (np.pi / 2) * (rest.astype(float) / float(denominator))
    base = np.cos(angle) - 1j * np.sin(angle)
    return (base * _QUARTER_TURNS[quarters.astype(np.int64)]).reshape(shape)


def exp_phase(theta: Fraction) -> complex:
    """Scalar version of :func:`unit_root` for one Fraction."""
    theta = Fraction(theta)
    return complex(unit_root(np.array(theta.numerator, dtype=object), theta.denominator))
