"""Independent oracles shared by the test modules.

None of these touch the package's own eigensolver: spectra come from LAPACK
through ``numpy.linalg.eigvalsh`` and overlaps are written out by hand.
"""

import cmath
import math

import numpy as np
import pytest


def overlap_oracle(b, c):
    b, c = complex(b), complex(c)
    return cmath.exp(-abs(b) ** 2 / 2 - abs(c) ** 2 / 2 + b.conjugate() * c)


def gram_oracle(amps):
    m = len(amps)
    return np.array([[overlap_oracle(amps[i], amps[j]) for j in range(m)] for i in range(m)])


def entropy_bits_oracle(p):
    """Scalar loop, 0 log 0 = 0."""
    total = 0.0
    for x in p:
        if x > 0:
            total -= x * math.log2(x)
    return total


def lapack_entropy_nats(g, xi):
    """Entropy of diag(sqrt xi) G diag(sqrt xi) without normalizing ``xi``."""
    s = np.sqrt(np.asarray(xi, dtype=float))
    lam = np.linalg.eigvalsh(s[:, None] * g * s[None, :])
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def fd_gradient_bits(g, xi, h=1e-5):
    """Central differences of the unnormalized entropy, one coordinate at a time."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.size)
    for i in range(xi.size):
        up, dn = xi.copy(), xi.copy()
        up[i] += h
        dn[i] -= h
        out[i] = (lapack_entropy_nats(g, up) - lapack_entropy_nats(g, dn)) / (2 * h)
    return out / math.log(2)


def random_amplitudes(rng, m, scale=1.0):
    return tuple(scale * (rng.normal(size=m) + 1j * rng.normal(size=m)))


def interior_prior(rng, m):
    """Dirichlet draw mixed with the uniform prior, so every entry is >= 1/(2m)."""
    return 0.5 * rng.dirichlet(np.ones(m)) + 0.5 / m


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
