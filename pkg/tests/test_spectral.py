import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holevocap import (
    NotPSDError,
    ValidationError,
    block_circulant_eigenvalues,
    circulant_eigenvalues,
    coherent_overlap,
    gram_of,
    hermitian_eig,
    make_psk,
    make_qam16,
    uniform_prior,
    weighted_gram,
)
from holevocap.ensemble import rotate
from holevocap.spectral import clamp_psd, eigvalsh_batch


def random_hermitian(rng, n):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (x + x.conj().T) / 2


class TestJacobi:
    def test_identity(self):
        np.testing.assert_allclose(hermitian_eig(np.eye(5)).eigenvalues, np.ones(5))

    @pytest.mark.parametrize("a,b", [(2.0, 0.5), (1.0, -3.0), (0.0, 1e-9)])
    def test_two_by_two(self, a, b):
        lam = hermitian_eig(np.array([[a, b], [b, a]])).eigenvalues
        np.testing.assert_allclose(lam, sorted([a + b, a - b], reverse=True), atol=1e-15)

    def test_trace_and_determinant(self, rng):
        a = random_hermitian(rng, 8)
        lam = hermitian_eig(a).eigenvalues
        assert abs(lam.sum() - np.trace(a).real) < 1e-10
        # determinant by LU, independent of any eigensolver
        assert abs(np.prod(lam) - np.linalg.det(a).real) < 1e-8

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 16), st.integers(0, 2**32 - 1))
    def test_reconstruction(self, n, seed):
        a = random_hermitian(np.random.default_rng(seed), n)
        s = hermitian_eig(a)
        v = s.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
        np.testing.assert_allclose((v * s.eigenvalues) @ v.conj().T, a, atol=1e-11)
        assert np.all(np.diff(s.eigenvalues) <= 0)
        np.testing.assert_allclose(s.eigenvalues, np.linalg.eigvalsh(a)[::-1], atol=1e-11)

    def test_permutation_covariance(self, rng):
        a = random_hermitian(rng, 7)
        perm = rng.permutation(7)
        p = np.eye(7)[perm]
        s = hermitian_eig(a)
        t = hermitian_eig(p @ a @ p.T)
        np.testing.assert_allclose(s.eigenvalues, t.eigenvalues, atol=1e-10)

    def test_degenerate(self):
        a = np.diag([1.0, 1.0, 1.0, 2.0]) + 0j
        u = np.linalg.qr(np.arange(16).reshape(4, 4) + 1j + np.eye(4))[0]
        lam = hermitian_eig(u @ a @ u.conj().T).eigenvalues
        np.testing.assert_allclose(lam, [2, 1, 1, 1], atol=1e-13)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            hermitian_eig(np.array([[1, 1], [0, 1]]))

    def test_batch_matches_single(self, rng):
        stack = np.stack([random_hermitian(rng, 6) for _ in range(10)])
        batch = eigvalsh_batch(stack)
        for k in range(10):
            np.testing.assert_allclose(batch[k], hermitian_eig(stack[k]).eigenvalues, atol=1e-12)


class TestClamp:
    def test_clamps_noise(self):
        assert np.array_equal(clamp_psd([0.5, -1e-12, 0.5]), [0.5, 0.0, 0.5])

    def test_rejects_negative(self):
        with pytest.raises(NotPSDError):
            clamp_psd([1.1, -1e-3])

    def test_psd_flag(self):
        with pytest.raises(NotPSDError):
            hermitian_eig(np.array([[1, 2], [2, 1]]), psd=True)


def psk_row(m, a2):
    a = math.sqrt(a2)
    return [coherent_overlap(a, rotate(a, 2 * math.pi * k / m)) for k in range(m)]


class TestCirculant:
    def test_single(self):
        np.testing.assert_allclose(circulant_eigenvalues([1.0]), [1.0])

    @pytest.mark.parametrize("a2", [0.1, 1.0, 3.0])
    def test_binary_closed_form(self, a2):
        lam = np.sort(circulant_eigenvalues([1.0, math.exp(-2 * a2)]))
        e = math.exp(-2 * a2)
        np.testing.assert_allclose(lam, [(1 - e) / 2, (1 + e) / 2], atol=1e-15)
        g = gram_of(make_psk(2, math.sqrt(a2)))
        np.testing.assert_allclose(lam, np.sort(hermitian_eig(weighted_gram(g, [0.5, 0.5])).eigenvalues),
                                   atol=1e-15)

    @pytest.mark.parametrize("m", range(3, 9))
    def test_matches_jacobi(self, m):
        lam = np.sort(circulant_eigenvalues(psk_row(m, 1.0)))
        g = gram_of(make_psk(m, 1.0))
        ref = np.sort(hermitian_eig(weighted_gram(g, uniform_prior(m)), psd=True).eigenvalues)
        np.testing.assert_allclose(lam, ref, atol=1e-10)
        assert abs(lam.sum() - 1) < 1e-10

    def test_rejects_asymmetric_row(self):
        with pytest.raises(ValidationError):
            circulant_eigenvalues([1.0, 0.5j, 0.5j])


class TestBlockCirculant:
    @pytest.mark.parametrize("a2", [0.02, 0.3, 2.0])
    def test_qam16_ring_constant_prior(self, rng, a2):
        g = gram_of(make_qam16(math.sqrt(a2)))
        w = rng.dirichlet(np.ones(4))
        xi = np.repeat(w / 4, 4)
        a = weighted_gram(g, xi)
        np.testing.assert_allclose(block_circulant_eigenvalues(a, 4), np.linalg.eigvalsh(a)[::-1], atol=1e-12)

    def test_size_mismatch(self):
        with pytest.raises(ValidationError):
            block_circulant_eigenvalues(np.eye(6), 4)
