"""Birkhoff-James orthogonality in finite normed spaces and Lebesgue-Bochner spaces of simple functions."""

__version__ = "0.1.0"

from .bochner import (
    Kernel,
    SimpleFunction,
    SupportMapWitness,
    approx_smooth_l1,
    bj_characterization,
    bj_l1,
    bj_lp,
    bj_oracle,
    bj_oracle_many,
    cozero_set,
    l1_terms,
    l1_terms_many,
    lp_functional,
    lp_norm,
    oracle_tolerance,
    orthogonal_correction,
    orthogonalizing_scalar,
    right_additive_at,
    right_additive_many,
    smooth_l1,
    zero_set,
)
from .errors import BJLabError, DimensionError, DomainError, ScenarioError, UnsupportedError
from .fuzz import FuzzConfig, FuzzReport, fuzz_equivalence
from .measure import CozeroStructure, MeasureSpace, SetOfPoints, atoms, cozero_structure, measure_of
from .scalar_spaces import (
    OrthoVerdict,
    Rule,
    ScalarSpace,
    Vector,
    bj_oracle_vectors,
    bj_oracle_vectors_many,
    bj_smooth,
    find_orthogonalizing_scalar,
    frechet_residual,
    p_norm,
    support_functional,
)
from .symmetry import (
    Claim,
    Outcome,
    SymmetryReport,
    left_witness_l1,
    lp_witnesses,
    partial_converse_check,
    right_witness_l1,
    rsil_check,
    sequence_space_classify,
)
