"""flatchain: tropical assignment combinatorics, chained-system detection and
regularity testing, and flatness-based aircraft trajectory planning."""

from .tropical import (
    NEG_INF,
    Canon,
    Cover,
    ExtMatrix,
    NoTransversalError,
    SizeLimitError,
    canon_to_cover,
    cover_to_canon,
    is_minimal_canon,
    isoperimetric_matrix,
    minimal_canon,
    path_relation,
    tropical_det_bruteforce,
    tropical_det_from_canon,
)
from .matching import KoenigResult, ZeroPattern, hopcroft_karp, koenig_cover
from .jets import DiffSystem, JetPoint, jacobian_at, order_matrix, parse_system, truncated_determinant_at
from .osystem import OTestResult, classify_block_triangular, o_test, saddle_jacobi_bruteforce
from .oreg import ORegResult, kernel_support, o_reg, seq, sufficient_regularity_check

__version__ = "0.1.0"
