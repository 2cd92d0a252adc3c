"""Hermitian eigensolver and circulant fast paths.

``hermitian_eig`` runs two-sided cyclic Jacobi on complex Hermitian
matrices. Pairs are visited in round-robin order, so each step applies
``n // 2`` disjoint rotations at once; stacks of matrices are processed
together, which is what makes grid scans over priors cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, NotPSDError, ValidationError

OFF_TOL = 1e-13
MAX_SWEEPS = 100
HERMITIAN_TOL = 1e-12
CLAMP_TOL = 1e-10
# rotations on entries this small (relative to ||A||_F) are skipped
SKIP_TOL = 1e-30


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order and eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    sweeps: int = 0


@lru_cache(maxsize=None)
def _round_robin(n: int):
    """Round-robin schedule: n-1 (or n) rounds of disjoint index pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def _jacobi(a: np.ndarray, want_vectors: bool):
    """Cyclic Jacobi on a stack ``(B, n, n)``; returns (diag, V or None, sweeps)."""
    a = a.copy()
    b, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=complex), (b, n, n)).copy() if want_vectors else None
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    limit = OFF_TOL * scale
    rows = np.arange(b)[:, None]
    sweeps = 0
    active = _offdiag_norm(a) > limit
    while np.any(active):
        if sweeps >= MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p, q in _round_robin(n):
            app = a[:, p, p].real
            aqq = a[:, q, q].real
            apq = a[:, p, q]
            r = np.abs(apq)
            nz = r > SKIP_TOL * scale[:, None]
            phase = np.where(nz, apq / np.where(nz, r, 1.0), 1.0)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                theta = (aqq - app) / (2.0 * r)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0, 1.0, t)
            # huge |theta|: t ~ 1/(2 theta), avoids theta**2 overflow
            big = np.abs(theta) > 1e150
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t = np.where(nz, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cq = c * np.conj(phase)  # U_qq
            sq = -s * np.conj(phase)  # U_qp
            # A <- A U (columns p, q)
            colp = a[:, :, p].copy()
            colq = a[:, :, q]
            a[:, :, p] = c[:, None, :] * colp + sq[:, None, :] * colq
            a[:, :, q] = s[:, None, :] * colp + cq[:, None, :] * colq
            # A <- U^H A (rows p, q)
            rowp = a[:, p, :].copy()
            rowq = a[:, q, :]
            a[:, p, :] = c[:, :, None] * rowp + np.conj(sq)[:, :, None] * rowq
            a[:, q, :] = s[:, :, None] * rowp + np.conj(cq)[:, :, None] * rowq
            a[rows, p, q] = 0.0
            a[rows, q, p] = 0.0
            if v is not None:
                colp = v[:, :, p].copy()
                colq = v[:, :, q]
                v[:, :, p] = c[:, None, :] * colp + sq[:, None, :] * colq
                v[:, :, q] = s[:, None, :] * colp + cq[:, None, :] * colq
        active = _offdiag_norm(a) > limit
    return np.diagonal(a, axis1=-2, axis2=-1).real.copy(), v, sweeps


def _as_hermitian(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValidationError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    ah = np.conj(np.swapaxes(a, -1, -2))
    size = np.max(np.abs(a)) if a.size else 0.0
    if a.size and np.max(np.abs(a - ah)) > HERMITIAN_TOL * max(1.0, size):
        raise ValidationError("matrix is not Hermitian within 1e-12")
    return 0.5 * (a + ah)


def clamp_psd(lam: np.ndarray) -> np.ndarray:
    """Zero eigenvalues in (-1e-10, 0); reject anything below -1e-10."""
    lam = np.asarray(lam, dtype=float)
    if lam.size and lam.min() < -CLAMP_TOL:
        raise NotPSDError(f"negative eigenvalue {lam.min():.6g} beyond clamp tolerance")
    return np.where(lam < 0, 0.0, lam)


def hermitian_eig(a, *, psd: bool = False, vectors: bool = True) -> Spectrum:
    """Full eigendecomposition of a complex Hermitian matrix.

    Parameters
    ----------
    a : (n, n) array_like
        Hermitian within 1e-12; it is symmetrized as ``(A + A^H) / 2``.
    psd : bool
        Treat ``a`` as positive semidefinite: eigenvalues in (-1e-10, 0) are
        set to zero and anything lower raises :class:`NotPSDError`.
    vectors : bool
        Also accumulate the unitary eigenvector matrix.

    Returns
    -------
    Spectrum
        Eigenvalues sorted in descending order, eigenvectors as columns.
    """
    a = _as_hermitian(a)
    if a.ndim != 2:
        raise ValidationError("hermitian_eig expects a single matrix; use eigvalsh_batch for stacks")
    lam, v, sweeps = _jacobi(a[None], vectors)
    lam = lam[0]
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    if psd:
        lam = clamp_psd(lam)
    vecs = v[0][:, order] if v is not None else None
    return Spectrum(lam, vecs, sweeps)


def eigvalsh_batch(a, *, psd: bool = False) -> np.ndarray:
    """Eigenvalues (descending) of a stack of Hermitian matrices ``(..., n, n)``."""
    a = _as_hermitian(a)
    shape = a.shape[:-2]
    n = a.shape[-1]
    flat = a.reshape(-1, n, n)
    lam, _, _ = _jacobi(flat, False) if flat.shape[0] else (np.zeros((0, n)), None, 0)
    lam = -np.sort(-lam, axis=-1)
    if psd:
        lam = clamp_psd(lam)
    return lam.reshape(shape + (n,))


def circulant_eigenvalues(overlaps) -> np.ndarray:
    """Spectrum of the uniform-prior weighted Gram of a symmetric pure-state set.

    ``overlaps[k] = <psi|V^k|psi>`` for k = 0..M-1. The eigenvalues are the
    scaled discrete Fourier transform

        lambda_j = (1/M) sum_k overlaps[k] exp(-2*pi*1j*j*k/M),  j = 0..M-1,

    evaluated directly. The row must satisfy ``c[M-k] = conj(c[k])`` within
    1e-12 so that every lambda_j is real.
    """
    c = np.asarray(overlaps, dtype=complex).ravel()
    m = c.size
    if m == 0:
        raise ValidationError("need at least one overlap")
    mirrored = np.conj(c[(-np.arange(m)) % m])
    if np.max(np.abs(c - mirrored)) > 1e-12:
        raise ValidationError("overlap row is not conjugate-symmetric, eigenvalues would be complex")
    jk = np.outer(np.arange(m), np.arange(m)) % m
    lam = (np.exp(-2j * math.pi * jk / m) @ c).real / m
    return clamp_psd(lam)


def block_circulant_eigenvalues(a, orbit_size: int, *, psd: bool = True) -> np.ndarray:
    """Eigenvalues of matrices commuting with a cyclic shift inside each orbit.

    Indices are grouped as ``r * orbit_size + t`` (orbit ``r``, position ``t``)
    and ``a[(r, t), (s, u)]`` must depend only on ``(u - t) mod orbit_size``.
    A Fourier transform along the position index splits ``a`` into
    ``orbit_size`` blocks of size ``n / orbit_size``; their spectra together
    form the spectrum of ``a``. Works on stacks ``(..., n, n)``.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[-1]
    if n % orbit_size:
        raise ValidationError(f"matrix size {n} is not a multiple of orbit size {orbit_size}")
    k = n // orbit_size
    lead = a.shape[:-2]
    # first position of every orbit against all positions: a_rs(d)
    first = a.reshape(lead + (k, orbit_size, k, orbit_size))[..., :, 0, :, :]
    dft = np.exp(2j * math.pi * np.outer(np.arange(orbit_size), np.arange(orbit_size)) / orbit_size)
    blocks = np.einsum("...rsd,jd->...jrs", first, dft)
    lam = eigvalsh_batch(blocks, psd=False).reshape(lead + (n,))
    lam = -np.sort(-lam, axis=-1)
    return clamp_psd(lam) if psd else lam
