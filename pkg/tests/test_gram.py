import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gram_oracle, random_amplitudes
from holevocap import (
    Constellation,
    NotPSDError,
    ValidationError,
    coherent_overlap,
    gram_of,
    make_ask3,
    make_psk,
    make_qam16,
    validate_gram,
    weighted_gram,
)
from holevocap.gram import weighted_gram_batch


def test_overlap_normalized():
    for a in (0, 1, 1 + 2j, -3j):
        assert abs(coherent_overlap(a, a) - 1) < 1e-15


@pytest.mark.parametrize("a2", [0.1, 1.0, 4.0])
def test_overlap_with_vacuum(a2):
    a = math.sqrt(a2)
    assert abs(coherent_overlap(0, a) - math.exp(-a2 / 2)) < 1e-15


@pytest.mark.parametrize("a", [0.3, 1.0, 2.0])
def test_overlap_antipodal(a):
    assert abs(coherent_overlap(a, -a) - math.exp(-2 * a * a)) < 1e-15


def test_gram_matches_oracle(rng):
    amps = random_amplitudes(rng, 9)
    np.testing.assert_allclose(gram_of(Constellation(amps)), gram_oracle(amps), atol=1e-15)


def test_single_state():
    assert np.array_equal(gram_of(make_psk(1, 0.4)), [[1.0]])


@pytest.mark.parametrize("a2", [0.05, 1.0, 3.0])
def test_ask3_entries(a2):
    g = gram_of(make_ask3(math.sqrt(a2)))
    kappa = math.exp(-a2 / 2)
    assert abs(g[0, 1] - kappa) < 1e-15
    assert abs(g[1, 2] - kappa**4) < 1e-15


@pytest.mark.parametrize("c", [make_psk(8, 1.0), make_ask3(0.5), make_qam16(0.3), make_qam16(1.0)])
def test_gram_psd(c):
    g = gram_of(c)
    assert np.linalg.eigvalsh(g).min() >= -1e-10
    validate_gram(g)


def test_common_phase_leaves_gram_unchanged(rng):
    amps = np.array(random_amplitudes(rng, 6))
    g = gram_of(Constellation(tuple(amps)))
    g2 = gram_of(Constellation(tuple(amps * np.exp(0.37j))))
    np.testing.assert_allclose(g, g2, atol=1e-14)


def test_conjugation_conjugates_gram(rng):
    amps = np.array(random_amplitudes(rng, 6))
    g = gram_of(Constellation(tuple(amps)))
    gc = gram_of(Constellation(tuple(amps.conj())))
    np.testing.assert_allclose(gc, g.conj(), atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(gc), np.linalg.eigvalsh(g), atol=1e-12)


class TestWeighted:
    def test_orthogonal_uniform(self):
        np.testing.assert_allclose(weighted_gram(np.eye(4), np.full(4, 0.25)), np.eye(4) / 4)

    def test_point_mass(self):
        g = gram_of(make_psk(3, 1.0))
        a = weighted_gram(g, [1.0, 0.0, 0.0])
        expected = np.zeros((3, 3))
        expected[0, 0] = 1
        np.testing.assert_allclose(a, expected, atol=1e-16)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_spectrum_in_unit_interval(self, m, seed):
        r = np.random.default_rng(seed)
        g = gram_of(Constellation(random_amplitudes(r, m, 0.7)))
        lam = np.linalg.eigvalsh(weighted_gram(g, r.dirichlet(np.ones(m))))
        assert lam.min() >= -1e-10 and lam.max() <= 1 + 1e-10
        assert abs(lam.sum() - 1) < 1e-10

    def test_batch_matches_single(self, rng):
        g = gram_of(make_qam16(0.4))
        xis = rng.dirichlet(np.ones(16), size=5)
        batch = weighted_gram_batch(g, xis)
        for k in range(5):
            np.testing.assert_allclose(batch[k], weighted_gram(g, xis[k]), atol=1e-16)

    def test_rejects_bad_prior(self):
        with pytest.raises(ValidationError):
            weighted_gram(np.eye(2), [0.7, 0.7])


class TestValidate:
    def test_non_square(self):
        with pytest.raises(ValidationError, match="square"):
            validate_gram(np.ones((2, 3)))

    def test_diagonal_names_entry(self):
        g = np.eye(3, dtype=complex)
        g[1, 1] = 0.9
        with pytest.raises(ValidationError, match=r"G\[1\]\[1\]"):
            validate_gram(g)

    def test_not_hermitian(self):
        with pytest.raises(ValidationError, match="Hermitian"):
            validate_gram(np.array([[1, 0.5j], [0.5j, 1]]))

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            validate_gram(np.array([[1, 2], [2, 1]]))

    def test_non_finite(self):
        with pytest.raises(ValidationError):
            validate_gram(np.array([[1, np.nan], [np.nan, 1]]))
