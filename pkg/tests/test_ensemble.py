import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holevocap import Constellation, Tag, ValidationError, check_prior, make_ask3, make_psk, make_qam16, uniform_prior
from holevocap.ensemble import QAM16_RINGS, rotate


class TestPsk:
    def test_single_letter(self):
        c = make_psk(1, 0.7)
        assert c.amplitudes == (0.7 + 0j,)
        assert c.tag is Tag.SYMMETRIC

    def test_binary_is_antipodal(self):
        c = make_psk(2, 1.3)
        assert c.amplitudes[0] == 1.3
        assert abs(c.amplitudes[1] + 1.3) < 1e-15

    def test_qpsk_sign_convention(self):
        got = make_psk(4, 1 + 0j).as_array()
        np.testing.assert_allclose(got, [1, -1j, -1, 1j], atol=1e-15)

    @given(m=st.integers(1, 16), re=st.floats(-3, 3), im=st.floats(-3, 3))
    def test_orbit_shift(self, m, re, im):
        # shifting by one index is multiplication by exp(-2 pi i / M)
        a = make_psk(m, complex(re, im)).as_array()
        w = cmath.exp(-2j * math.pi / m)
        np.testing.assert_allclose(np.roll(a, -1), a * w, atol=1e-12)

    def test_bad_m(self):
        with pytest.raises(ValidationError):
            make_psk(0, 1.0)
        with pytest.raises(ValidationError):
            make_psk(2.5, 1.0)

    def test_symmetric_tag_checks_orbit(self):
        with pytest.raises(ValidationError):
            Constellation((1.0, 1.0, -1.0), Tag.SYMMETRIC)


class TestAsk3:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
    def test_amplitudes(self, alpha):
        assert make_ask3(alpha).amplitudes == (0j, complex(alpha), complex(-alpha))

    def test_negative_alpha_rejected(self):
        with pytest.raises(ValidationError):
            make_ask3(-1.0)


class TestQam16:
    def test_ring_seeds(self):
        a = make_qam16(1.0).as_array()
        assert a[0] == 1 + 1j
        assert a[4] == 3 + 1j
        assert a[8] == 1 + 3j
        assert a[12] == 3 + 3j

    def test_grid(self):
        a = make_qam16(0.5).as_array()
        expected = {complex(0.5 * x, 0.5 * y) for x in (-3, -1, 1, 3) for y in (-3, -1, 1, 3)}
        assert len(a) == 16
        assert {complex(round(z.real, 12), round(z.imag, 12)) for z in a} == expected

    @pytest.mark.parametrize("alpha", [1e-3, 0.3, 1.0, 7.0])
    def test_distinct(self, alpha):
        a = make_qam16(alpha).as_array()
        assert len({(z.real, z.imag) for z in a}) == 16

    def test_orbit_closure(self):
        a = make_qam16(1.0).as_array()
        for ring in QAM16_RINGS:
            for i in ring:
                z = a[i]
                for _ in range(4):
                    z = rotate(z, math.pi / 2)
                assert abs(z - a[i]) < 1e-12
            # consecutive ring members are quarter turns
            for k in range(3):
                assert abs(rotate(a[ring[k]], math.pi / 2) - a[ring[k + 1]]) < 1e-12

    def test_zero_alpha_rejected(self):
        with pytest.raises(ValidationError):
            make_qam16(0.0)


class TestPrior:
    @pytest.mark.parametrize("m", [1, 3, 16])
    def test_uniform(self, m):
        xi = uniform_prior(m)
        np.testing.assert_allclose(xi, 1.0 / m)
        assert abs(xi.sum() - 1) < 1e-12

    def test_check_prior_clips_roundoff(self):
        xi = check_prior([0.5, 0.5 + 1e-16, -1e-16])
        assert xi.min() == 0.0

    @pytest.mark.parametrize("bad", [[0.5, 0.6], [1.5, -0.5], [np.nan, 1.0], []])
    def test_check_prior_rejects(self, bad):
        with pytest.raises(ValidationError):
            check_prior(bad)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            check_prior([0.5, 0.5], m=3)

    @settings(max_examples=50)
    @given(st.lists(st.floats(0.01, 10), min_size=1, max_size=16))
    def test_normalized_weights_pass(self, w):
        xi = np.array(w) / np.sum(w)
        out = check_prior(xi)
        assert out.min() >= 0 and abs(out.sum() - 1) < 1e-12
