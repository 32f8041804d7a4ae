import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdmeans.errors import DimensionMismatch, ParameterOutOfRange
from pdmeans.matfun import loewner_leq, validate_spd
from pdmeans.means2 import (
    ScalarBounds,
    _riccati_residual,
    furuta_bound,
    gen_kantorovich,
    geo_mean2,
    kantorovich,
    specht,
    spectral_bounds,
)

from conftest import random_spd_matrix


class TestGeoMean2:
    def test_endpoints(self):
        rng = np.random.default_rng(0)
        a, b = random_spd_matrix(rng, 3), random_spd_matrix(rng, 3)
        np.testing.assert_allclose(geo_mean2(a, b, 0.0).entries, a.entries, atol=1e-11)
        np.testing.assert_allclose(geo_mean2(a, b, 1.0).entries, b.entries, atol=1e-11)

    def test_scalar_case(self):
        a = validate_spd([[4.0]])
        b = validate_spd([[9.0]])
        assert geo_mean2(a, b, 0.5).entries[0, 0] == pytest.approx(6.0, abs=1e-12)

    def test_mean_with_identity_is_square_root(self):
        a = validate_spd([[2.0, 1.0], [1.0, 1.0]])
        i2 = validate_spd(np.eye(2))
        expected = (a.eigenvectors * np.sqrt(a.eigenvalues)) @ a.eigenvectors.T
        np.testing.assert_allclose(geo_mean2(a, i2, 0.5).entries, expected, atol=1e-12)

    def test_riccati_characterization(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            a, b = random_spd_matrix(rng, 4), random_spd_matrix(rng, 4)
            x = geo_mean2(a, b, 0.5)
            assert _riccati_residual(x, a, b) <= 1e-8

    def test_symmetry_at_midpoint(self):
        rng = np.random.default_rng(2)
        a, b = random_spd_matrix(rng, 5), random_spd_matrix(rng, 5)
        lhs = geo_mean2(a, b, 0.5).entries
        rhs = geo_mean2(b, a, 0.5).entries
        assert np.max(np.abs(lhs - rhs)) <= 1e-9

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10_000), t=st.floats(0.0, 1.0))
    def test_congruence_invariance(self, seed, t):
        rng = np.random.default_rng(seed)
        a, b = random_spd_matrix(rng, 3), random_spd_matrix(rng, 3)
        c = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
        direct = c @ geo_mean2(a, b, t).entries @ c.T
        mapped = geo_mean2(
            validate_spd(c @ a.entries @ c.T), validate_spd(c @ b.entries @ c.T), t
        ).entries
        scale = np.linalg.norm(mapped, "fro")
        assert np.max(np.abs(direct - mapped)) <= 1e-8 * max(1.0, scale)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10_000), t=st.floats(0.0, 1.0))
    def test_monotonicity(self, seed, t):
        rng = np.random.default_rng(seed)
        a, b = random_spd_matrix(rng, 3), random_spd_matrix(rng, 3)
        bump_a = validate_spd(a.entries + rng.uniform(0.0, 1.0) * np.eye(3))
        bump_b = validate_spd(b.entries + rng.uniform(0.0, 1.0) * np.eye(3))
        holds, _ = loewner_leq(geo_mean2(a, b, t), geo_mean2(bump_a, bump_b, t))
        assert holds

    def test_t_out_of_range(self):
        a = validate_spd(np.eye(2))
        with pytest.raises(ParameterOutOfRange):
            geo_mean2(a, a, 1.5)
        with pytest.raises(ParameterOutOfRange):
            geo_mean2(a, a, -0.1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            geo_mean2(validate_spd(np.eye(2)), validate_spd(np.eye(3)), 0.5)


class TestScalarConstants:
    def test_kantorovich_degenerate(self):
        assert kantorovich(ScalarBounds(2.0, 2.0)) == pytest.approx(1.0)

    def test_kantorovich_values(self):
        assert kantorovich(ScalarBounds(1.0, 2.0)) == pytest.approx(9.0 / 8.0)
        assert kantorovich(ScalarBounds(1.0, 4.0)) == pytest.approx(25.0 / 16.0)

    def test_specht_at_one_exact(self):
        assert specht(1.0) == 1.0

    def test_specht_at_two(self):
        # (h-1) h^(1/(h-1)) / (e log h) at h = 2 is 2 / (e log 2).
        assert specht(2.0) == pytest.approx(2.0 / (math.e * math.log(2.0)), abs=1e-14)
        assert specht(2.0) == pytest.approx(1.0615, abs=5e-5)

    def test_specht_continuity_near_one(self):
        val = specht(1.0 + 1e-8)
        assert 1.0 <= val <= 1.0 + 1e-6

    def test_specht_taylor_coefficient_matches_formula(self):
        # At h = 1 + 1e-4 the closed form is still well conditioned; the
        # quadratic model 1 + (h-1)^2/8 must agree with it there.
        x = 1e-4
        direct = x * (1.0 + x) ** (1.0 / x) / (math.e * math.log(1.0 + x))
        assert 1.0 + x * x / 8.0 == pytest.approx(direct, abs=1e-12)

    def test_specht_continuous_across_taylor_cut(self):
        below = specht(1.0 + 0.9e-6)
        above = specht(1.0 + 1.1e-6)
        assert below < above
        assert abs(above - below) < 1e-12

    def test_specht_rejects_below_one(self):
        with pytest.raises(ParameterOutOfRange):
            specht(0.9)

    def test_scalar_chain_specht_kantorovich(self):
        for h in np.geomspace(1.0001, 100.0, 60):
            s = specht(float(h))
            k = kantorovich(ScalarBounds(1.0, float(h)))
            assert s <= k + 1e-12
            assert k <= s * s + 1e-12

    def test_gen_kantorovich_limits(self):
        assert gen_kantorovich(ScalarBounds(1.0, 3.0), 1.0) == 1.0
        assert gen_kantorovich(ScalarBounds(2.0, 2.0), 3.0) == 1.0

    def test_gen_kantorovich_p2_is_kantorovich(self):
        for m, M in ((1.0, 2.0), (0.5, 4.0), (2.0, 11.0)):
            b = ScalarBounds(m, M)
            assert gen_kantorovich(b, 2.0) == pytest.approx(kantorovich(b), rel=1e-14)

    def test_gen_kantorovich_rejects_small_p(self):
        with pytest.raises(ParameterOutOfRange):
            gen_kantorovich(ScalarBounds(1.0, 2.0), 0.5)

    def test_furuta_values(self):
        assert furuta_bound(ScalarBounds(1.0, 2.0), 1.0) == pytest.approx(1.0)
        assert furuta_bound(ScalarBounds(1.0, 2.0), 2.0) == pytest.approx(2.0)
        assert furuta_bound(ScalarBounds(1.0, 2.0), 3.0) == pytest.approx(4.0)

    def test_furuta_dominates_gen_kantorovich(self):
        b = ScalarBounds(1.0, 2.0)
        assert gen_kantorovich(b, 3.0) <= furuta_bound(b, 3.0)
        for h in np.geomspace(1.01, 50.0, 25):
            bb = ScalarBounds(1.0, float(h))
            for p in (1.5, 2.0, 3.0):
                assert gen_kantorovich(bb, p) <= furuta_bound(bb, p) + 1e-12

    def test_bounds_validation(self):
        with pytest.raises(ParameterOutOfRange):
            ScalarBounds(0.0, 1.0)
        with pytest.raises(ParameterOutOfRange):
            ScalarBounds(2.0, 1.0)

    def test_spectral_bounds(self):
        a = validate_spd(np.diag([1.0, 2.0]))
        b = validate_spd(np.diag([0.5, 3.0]))
        bounds = spectral_bounds([a, b])
        assert bounds.m == pytest.approx(0.5)
        assert bounds.M == pytest.approx(3.0)
