"""Holevo capacity of coherent-state ensembles."""

from .capacity import (
    ACTIVATION_LEVEL,
    CapacityResult,
    Method,
    Threshold,
    activation_threshold,
    ask3_capacity,
    ask3_eigenvalues,
    capacity,
    generic_capacity,
    qam16_capacity,
    symmetric_capacity,
)
from .ensemble import Constellation, Tag, check_prior, make_ask3, make_psk, make_qam16, rotate, uniform_prior
from .entropy import (
    EntropyValue,
    delta_s,
    delta_s_gradient,
    entropy_from_eigenvalues,
    fock_entropy_oracle,
    gram_delta_s,
    gram_delta_s_gradient,
)
from .errors import ConvergenceError, NotPSDError, ValidationError
from .gram import coherent_overlap, gram_of, validate_gram, weighted_gram
from .spectral import Spectrum, block_circulant_eigenvalues, circulant_eigenvalues, hermitian_eig
from .symmetry import (
    SymmetryReduction,
    expand_ask3,
    expand_qam16,
    orbit_average,
    reduce_qam16,
    reduction_for,
    verify_symmetric_optimality,
)

__all__ = [name for name in dir() if not name.startswith("_")]
