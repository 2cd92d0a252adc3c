"""Coherent-state overlaps and prior-weighted Gram matrices.

For pure letter states the density operator ``sum_i xi_i |psi_i><psi_i|``
and the M x M matrix ``diag(sqrt(xi)) G diag(sqrt(xi))`` share their nonzero
spectrum, so the latter is the only representation of the mixture used here.
"""

import numpy as np

from .ensemble import Constellation, check_amplitude, check_prior
from .errors import NotPSDError, ValidationError

HERMITIAN_TOL = 1e-14
PSD_TOL = 1e-10


def coherent_overlap(beta, gamma) -> complex:
    """``<beta|gamma> = exp(-|beta|^2/2 - |gamma|^2/2 + conj(beta)*gamma)``."""
    beta = check_amplitude(beta)
    gamma = check_amplitude(gamma)
    return complex(np.exp(-0.5 * abs(beta) ** 2 - 0.5 * abs(gamma) ** 2 + beta.conjugate() * gamma))


def _overlap_matrix(z: np.ndarray) -> np.ndarray:
    r2 = np.abs(z) ** 2
    g = np.exp(-0.5 * r2[:, None] - 0.5 * r2[None, :] + np.conj(z)[:, None] * z[None, :])
    # exact Hermitian symmetry and unit diagonal, independent of exp rounding
    g = np.triu(g, 1)
    g = g + g.conj().T
    np.fill_diagonal(g, 1.0)
    return g


def gram_of(constellation: Constellation) -> np.ndarray:
    """Gram matrix ``G[i, j] = <alpha_i|alpha_j>`` of a constellation."""
    return _overlap_matrix(constellation.as_array())


def validate_gram(g) -> np.ndarray:
    """Check the Gram-matrix invariants and return ``g`` as a complex array.

    Raises
    ------
    ValidationError
        Wrong shape, non-unit diagonal (the offending entry is named) or a
        Hermiticity defect above 1e-14.
    NotPSDError
        An eigenvalue below -1e-10.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
        raise ValidationError(f"Gram matrix must be square and non-empty, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValidationError("Gram matrix has non-finite entries")
    for i in range(g.shape[0]):
        if g[i, i] != 1.0:
            raise ValidationError(f"diagonal entry G[{i}][{i}] = {complex(g[i, i])} is not 1")
    defect = np.max(np.abs(g - g.conj().T))
    if defect > HERMITIAN_TOL:
        i, j = np.unravel_index(np.argmax(np.abs(g - g.conj().T)), g.shape)
        raise ValidationError(f"Gram matrix is not Hermitian: |G[{i}][{j}] - conj(G[{j}][{i}])| = {defect:.3g}")
    from .spectral import hermitian_eig

    lam = hermitian_eig(g, vectors=False).eigenvalues
    if lam[-1] < -PSD_TOL:
        raise NotPSDError(f"Gram matrix is not positive semidefinite: eigenvalue {lam[-1]:.6g}")
    return g


def weighted_gram(g, xi) -> np.ndarray:
    """``A = diag(sqrt(xi)) G diag(sqrt(xi))``; trace one for a valid prior."""
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValidationError(f"Gram matrix must be square, got shape {g.shape}")
    xi = check_prior(xi)
    if xi.size != g.shape[0]:
        raise ValidationError(f"prior length {xi.size} does not match Gram size {g.shape[0]}")
    s = np.sqrt(xi)
    return s[:, None] * g * s[None, :]


def weighted_gram_batch(g, xis) -> np.ndarray:
    """Stack of weighted Grams for the rows of ``xis`` (no prior validation)."""
    s = np.sqrt(np.asarray(xis, dtype=float))
    return s[:, :, None] * np.asarray(g)[None, :, :] * s[:, None, :]
