"""Fast Fourier transforms on finite IFS approximations of fractals."""
from .dita import DitaSpec, OpCounter, dita_apply, dita_inverse_apply, dita_op_bound
from .errors import (
    ContractionWarning,
    FractalFFTError,
    IndexRangeError,
    NumericalError,
    ResourceError,
    ShapeError,
    ValidationError,
)
from .ifs_core import (
    FrequencyIfs,
    Kind,
    OrderedPointSet,
    Ordering,
    SpatialIfs,
    base_digits,
    digit_reversal_permute,
    digit_reverse,
    generate_point_set,
    orbit_point,
)
from .search import CosetSystem, SearchResult, character_matrix, coset_representatives, search_frequencies
from .transform import (
    FractalSystem,
    M1Class,
    TransformPlan,
    adjoint_apply,
    build_plan,
    build_system,
    dense_matrix,
    forward_apply,
    inverse_apply,
    phase,
    plan_op_count_bound,
    verify_block_identities,
)

__version__ = "0.1.0"
