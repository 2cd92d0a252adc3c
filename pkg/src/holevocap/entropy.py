"""Von Neumann entropy of pure-state ensembles and its derivatives.

Everything is computed from the spectrum of the weighted Gram matrix
``A = diag(sqrt(xi)) G diag(sqrt(xi))``. Public values are in bits; the
``*_nats`` helpers exist for the optimizers. Letter states are pure, so the
Holevo quantity equals the entropy of the mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import Constellation, check_prior
from .errors import ValidationError
from .gram import gram_of, weighted_gram
from .spectral import Spectrum, clamp_psd, hermitian_eig

LN2 = math.log(2.0)
# boundary letters whose squared distance from supp(rho) exceeds this get an
# infinite derivative
KERNEL_TOL = 1e-12
# eigenvalues below this are treated as kernel when projecting boundary letters
SUPPORT_CUTOFF = 1e-14
FOCK_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class EntropyValue:
    bits: float
    nats: float

    @classmethod
    def from_nats(cls, nats: float) -> "EntropyValue":
        nats = max(float(nats), 0.0)
        return cls(nats / LN2, nats)


def _xlogx(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    pos = lam > 0
    out[pos] = lam[pos] * np.log(lam[pos])
    return out


def entropy_nats(lam) -> float:
    """``-sum lam log lam`` for already-clamped eigenvalues, 0 log 0 = 0."""
    # + 0.0 turns -0.0 into 0.0
    return float(-np.sum(_xlogx(lam), axis=-1)) + 0.0


def entropy_from_eigenvalues(lambdas) -> EntropyValue:
    """Entropy of a probability spectrum.

    Inputs in (-1e-10, 0) are clamped to zero and the vector is renormalized;
    more negative entries or a sum off by more than 1e-6 raise.
    """
    lam = clamp_psd(np.asarray(lambdas, dtype=float).ravel())
    total = lam.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValidationError(f"eigenvalues sum to {total!r}, not 1")
    return EntropyValue.from_nats(entropy_nats(lam / total))


def prior_spectrum(g, xi, vectors: bool = True) -> Spectrum:
    """Eigendecomposition of the weighted Gram matrix for prior ``xi``."""
    return hermitian_eig(weighted_gram(g, xi), psd=True, vectors=vectors)


def gram_delta_s(g, xi) -> EntropyValue:
    """Holevo quantity of a pure-state ensemble given by its Gram matrix."""
    return EntropyValue.from_nats(entropy_nats(prior_spectrum(g, xi, vectors=False).eigenvalues))


def delta_s(constellation: Constellation, xi) -> EntropyValue:
    """``S(rho(xi)) - sum_i xi_i S(rho_i)``, which is ``S(rho(xi))`` for coherent states."""
    xi = check_prior(xi, constellation.size)
    return gram_delta_s(gram_of(constellation), xi)


@dataclass(frozen=True)
class GradientParts:
    """Derivative of the entropy (nats) with boundary information.

    ``finite`` holds ``-<psi_i|ln rho|psi_i> - 1`` restricted to the support
    of rho. ``kernel`` is the squared norm of the component of ``psi_i``
    outside that support; it is only computed for letters with zero prior
    (zero elsewhere). A letter with ``kernel >= 1e-12`` has an infinite
    one-sided derivative.
    """

    finite: np.ndarray
    kernel: np.ndarray
    projections: np.ndarray  # <u_a|psi_i> for support eigenvectors, shape (n_support, M)

    @property
    def flagged(self) -> np.ndarray:
        return self.kernel >= KERNEL_TOL

    @property
    def gradient(self) -> np.ndarray:
        return np.where(self.flagged, np.inf, self.finite)


def gradient_parts(g, xi, spectrum: Spectrum) -> GradientParts:
    """Entropy gradient from a weighted-Gram spectrum.

    For ``xi_i > 0`` the projection of letter i on eigenvector a is
    ``sqrt(lam_a) * conj(w_ai) / sqrt(xi_i)``; substituting gives the
    round-off friendly form ``-(1/xi_i) sum_a |w_ai|^2 lam_a ln lam_a - 1``.
    Zero-prior letters use ``v_i = diag(sqrt(xi)) G[:, i]`` directly.
    """
    g = np.asarray(g, dtype=complex)
    xi = np.asarray(xi, dtype=float)
    lam = spectrum.eigenvalues
    w = spectrum.eigenvectors
    m = xi.size
    finite = np.empty(m)
    kernel = np.zeros(m)
    pos = xi > 0
    xl = _xlogx(lam)
    if np.any(pos):
        finite[pos] = -(np.abs(w[pos, :]) ** 2 @ xl) / xi[pos] - 1.0
    keep = lam > SUPPORT_CUTOFF
    lk = lam[keep]
    wk = w[:, keep]
    v = np.sqrt(xi)[:, None] * g  # column i is v_i
    proj = (wk.conj().T @ v) / np.sqrt(lk)[:, None]
    zero = ~pos
    if np.any(zero):
        q = np.abs(proj[:, zero]) ** 2
        finite[zero] = -(np.log(lk) @ q) - 1.0
        kernel[zero] = np.maximum(np.real(np.diag(g))[zero] - q.sum(axis=0), 0.0)
    return GradientParts(finite, kernel, proj)


def gram_delta_s_gradient(g, xi) -> np.ndarray:
    """Gradient (bits per unit prior) with ``inf`` for flagged boundary letters."""
    xi = check_prior(xi, np.shape(g)[0])
    parts = gradient_parts(g, xi, prior_spectrum(g, xi))
    return parts.gradient / LN2


def delta_s_gradient(constellation: Constellation, xi) -> np.ndarray:
    """``dS/dxi_i = (-<psi_i| ln rho |psi_i> - 1) / ln 2`` for every letter.

    Components for letters with zero prior whose state has weight >= 1e-12
    outside the support of rho are reported as ``inf``: adding such a letter
    gives unbounded first-order gain.
    """
    return gram_delta_s_gradient(gram_of(constellation), check_prior(xi, constellation.size))


def _log_divided_difference_kernel(lam: np.ndarray) -> np.ndarray:
    """``K_ab = lam_a lam_b (ln lam_a - ln lam_b) / (lam_a - lam_b)``, ``K_aa = lam_a``."""
    a = lam[:, None]
    b = lam[None, :]
    k = np.zeros((lam.size, lam.size))
    both = (a > 0) & (b > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = a - b
        near = np.abs(diff) <= 1e-8 * np.maximum(a, b)
        exact = a * b * (np.log(a) - np.log(b)) / diff
        # second-order accurate when lam_a ~ lam_b
        approx = 2.0 * a * b / (a + b)
    k[both] = np.where(near, approx, exact)[both]
    return k


def hessian_nats(xi, spectrum: Spectrum) -> np.ndarray:
    """Hessian of the entropy (nats) w.r.t. the prior, for letters with ``xi > 0``.

    Entries for zero-prior letters are NaN. Built from the Daleckii-Krein
    expansion of ``ln``; with eigenvector projections substituted every term
    stays bounded even for tiny eigenvalues.
    """
    xi = np.asarray(xi, dtype=float)
    lam = spectrum.eigenvalues
    w = spectrum.eigenvectors
    kern = _log_divided_difference_kernel(lam)
    x = w[:, :, None] * np.conj(w)[:, None, :]  # x[i, a, b] = w_ia conj(w_ib)
    h = -np.real(np.einsum("ab,iab,jab->ij", kern, x, np.conj(x)))
    pos = xi > 0
    out = np.full((xi.size, xi.size), np.nan)
    sel = np.ix_(pos, pos)
    out[sel] = h[sel] / np.outer(xi[pos], xi[pos])
    return out


def _coherent_coefficients(beta: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    r2 = abs(beta) ** 2
    if beta == 0:
        c = np.zeros(n_max + 1, dtype=complex)
        c[0] = 1.0
        return c
    logmag = -0.5 * r2 + n * math.log(abs(beta)) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    return np.exp(logmag) * np.exp(1j * n * np.angle(beta))


def poisson_tail(mean: float, n_max: int) -> float:
    """``P(N > n_max)`` for a Poisson variable, summed term by term."""
    if mean == 0:
        return 0.0
    total = 0.0
    k = n_max + 1
    while True:
        term = math.exp(-mean + k * math.log(mean) - math.lgamma(k + 1))
        total += term
        if k > mean and term < 1e-18 * max(total, 1e-300):
            return total
        k += 1


def fock_n_max(constellation: Constellation) -> int:
    """Truncation guideline ``|a|^2 + 10 |a| + 20`` for the largest amplitude."""
    peak = max(abs(a) ** 2 for a in constellation.amplitudes)
    return int(math.ceil(peak + 10 * math.sqrt(peak) + 20))


def fock_entropy_oracle(constellation: Constellation, xi, n_max: int | None = None) -> EntropyValue:
    """Entropy of the mixture built explicitly in a truncated number basis.

    Test oracle only: it materializes ``rho(xi)`` as an
    ``(n_max + 1) x (n_max + 1)`` matrix from the coefficients
    ``exp(-|a|^2/2) a^n / sqrt(n!)`` and diagonalizes it with LAPACK, sharing
    no code with the Gram path.

    Raises
    ------
    ValidationError
        Some state leaks more than 1e-12 probability above ``n_max``.
    """
    xi = check_prior(xi, constellation.size)
    if n_max is None:
        n_max = fock_n_max(constellation)
    if n_max < 1 or int(n_max) != n_max:
        raise ValidationError("n_max must be a positive integer")
    n_max = int(n_max)
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for p, beta in zip(xi, constellation.amplitudes):
        tail = poisson_tail(abs(beta) ** 2, n_max)
        if tail > FOCK_TAIL_TOL:
            raise ValidationError(f"truncation n_max={n_max} leaves tail {tail:.3g} for amplitude {beta}")
        c = _coherent_coefficients(beta, n_max)
        rho += p * np.outer(c, c.conj())
    lam = np.linalg.eigvalsh(rho)
    lam = np.clip(lam, 0.0, None)
    return EntropyValue.from_nats(entropy_nats(lam / lam.sum()))
