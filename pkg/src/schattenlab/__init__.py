"""Schatten-class ideals of multiplication and group-algebra representations, at finite truncation."""

from .linalg import adjoint, matmul, operator_norm, svd, svd_values, trace
from .measure_space import (
    AtomEntry,
    DiffusePiece,
    MeasureSpace,
    SimpleFunction,
    check_group_invariance,
    decompose,
    integrate_abs_power,
    is_atomless,
)
from .multiplication_rep import (
    TruncationSchedule,
    build_truncation,
    classify_exact,
    classify_numeric,
    diagnose_divergence,
    trace_power_partial,
)
from .schatten import INF, SchattenReport, containment_map, holder_witness, hs_inner, schatten_norm

__version__ = "0.1.0"
