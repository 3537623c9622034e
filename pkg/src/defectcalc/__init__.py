"""Finite-dimensional workbench for defect operators of commuting tuple pairs.

The main entry points are re-exported here; submodules hold the rest.
"""
from .decompose import DecompositionResult, MinPoly, decompose_iso, decompose_sym, krylov_min_poly
from .defect import (
    DefectKind,
    DefectReport,
    defect,
    forward_expansion_residual,
    iso_defect,
    lemma_independence_rank,
    multi_index_defect,
    nested_iso_defect,
    nested_sym_defect,
    strictness_order,
    sym_defect,
    tensor_defect_norm,
    tensor_strictness_order,
)
from .errors import DefectCalcError, InputError, NumericalError
from .instances import (
    SuiteReport,
    gen_block_tuples,
    gen_jordan_iso,
    gen_jordan_sym,
    gen_random_commuting,
    gen_tensor_lift,
    run_suite,
)
from .io import parse_pair, serialize_pair, serialize_report
from .linalg import DEFAULT_TOL, Tolerance
from .tuples import OperatorTuple, TuplePair, product_pair, scale_pair, tensor_pair

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "DecompositionResult",
    "DefectCalcError",
    "DefectKind",
    "DefectReport",
    "InputError",
    "MinPoly",
    "NumericalError",
    "OperatorTuple",
    "SuiteReport",
    "Tolerance",
    "TuplePair",
    "decompose_iso",
    "decompose_sym",
    "defect",
    "forward_expansion_residual",
    "gen_block_tuples",
    "gen_jordan_iso",
    "gen_jordan_sym",
    "gen_random_commuting",
    "gen_tensor_lift",
    "iso_defect",
    "krylov_min_poly",
    "lemma_independence_rank",
    "multi_index_defect",
    "nested_iso_defect",
    "nested_sym_defect",
    "parse_pair",
    "product_pair",
    "run_suite",
    "scale_pair",
    "serialize_pair",
    "serialize_report",
    "strictness_order",
    "sym_defect",
    "tensor_defect_norm",
    "tensor_pair",
    "tensor_strictness_order",
]
