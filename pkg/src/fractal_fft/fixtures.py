"""Reference systems used by the tests, the acceptance suite and the CLI demos."""
from __future__ import annotations

from .ifs_core import FrequencyIfs, SpatialIfs
from .transform import FractalSystem, M1Class, build_system


def make_system(a_inverse, b, c, required_class=M1Class.INVERTIBLE) -> FractalSystem:
    spatial = SpatialIfs(a_inverse, b)
    return build_system(spatial, FrequencyIfs.dual_of(spatial, c), required_class)


def dyadic() -> FractalSystem:
    """x/2, (x+1)/2 on [0, 1] with frequencies 2x, 2x+1: the classical DFT."""
    return make_system([[2]], [[0], [1]], [[0], [1]], M1Class.HADAMARD)


def quarter_cantor() -> FractalSystem:
    """x/4, (x+2)/4 with frequencies 4x, 4x+1 (a spectral Cantor measure)."""
    return make_system([[4]], [[0], [2]], [[0], [1]], M1Class.HADAMARD)


def middle_third() -> FractalSystem:
    """x/3, (x+2)/3 with frequencies 3x, 3x+1; M_1 invertible but not Hadamard."""
    return make_system([[3]], [[0], [2]], [[0], [1]])


def sierpinski() -> FractalSystem:
    """Three maps x/2 + b_j/2 in the plane; det M_1 = 4."""
    return make_system(
        [[2, 0], [0, 2]], [[0, 0], [1, 0], [0, 1]], [[0, 0], [1, 0], [0, 1]]
    )


FIXTURES = {
    "dyadic": dyadic,
    "quarter_cantor": quarter_cantor,
    "middle_third": middle_third,
    "sierpinski": sierpinski,
}
