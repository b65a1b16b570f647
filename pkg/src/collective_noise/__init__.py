"""Collective decay of N qubits: block spectra, entropy decay, primitivity
and the classical chain on irrep labels."""

from ._accel import NUMBA_AVAILABLE, NUMBA_ENABLED
from .errors import (
    CapacityError, CollectiveNoiseError, ContractError, DomainError, NumericStabilityError,
    ShapeError,
)
from .lindblad_core import (
    BlockIndex, BlockOperator, GibbsState, Superoperator, conditional_expectation,
    lindblad_block, lindblad_dense, lindblad_multiplicity_free,
)
from .rep_su2 import schur_weyl_decomposition
from .spectral import (
    block_spectrum_recurrence, gap_upper_bound_witness, min_spectral_difference, spectral_gap,
)

__version__ = "0.1.0"

__all__ = [
    "NUMBA_AVAILABLE", "NUMBA_ENABLED",
    "CapacityError", "CollectiveNoiseError", "ContractError", "DomainError",
    "NumericStabilityError", "ShapeError",
    "BlockIndex", "BlockOperator", "GibbsState", "Superoperator", "conditional_expectation",
    "lindblad_block", "lindblad_dense", "lindblad_multiplicity_free",
    "schur_weyl_decomposition",
    "block_spectrum_recurrence", "gap_upper_bound_witness", "min_spectral_difference",
    "spectral_gap",
]
