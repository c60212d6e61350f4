import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_cyclic_sign_changes
from wizer.circle import (Angle, AngleGrid, GridFunction, circular_convolve, circular_distance,
                          count_modes, cyclic_sign_changes, fourier_coefficients,
                          sign_changes_of_grid_function, wrap)
from wizer.errors import InputError

TWO_PI = 2 * math.pi


class TestAngle:
    def test_canonical_range(self):
        for theta in (-7.0, -1e-18, 0.0, TWO_PI, 13.0):
            a = Angle(theta)
            assert 0 <= a.theta < TWO_PI

    def test_arithmetic_mod_two_pi(self):
        a = Angle(6.0) + Angle(1.0)
        assert a.theta == pytest.approx(7.0 - TWO_PI)
        assert (-Angle(1.0)).theta == pytest.approx(TWO_PI - 1.0)

    def test_geodesic_distance(self):
        assert Angle(0.1).distance(TWO_PI - 0.1) == pytest.approx(0.2)
        assert Angle(0.0).distance(math.pi) == pytest.approx(math.pi)

    @given(st.floats(-50, 50), st.floats(-50, 50))
    def test_distance_in_range(self, a, b):
        d = float(circular_distance(a, b))
        assert 0 <= d <= math.pi + 1e-12

    def test_rejects_nan(self):
        with pytest.raises(InputError):
            Angle(float("nan"))

    def test_wrap_array(self):
        out = wrap(np.array([-TWO_PI, -1e-17, 7.0]))
        assert np.all((out >= 0) & (out < TWO_PI))


class TestAngleGrid:
    @pytest.mark.parametrize("size", [4, 7, 9, 0, -8])
    def test_invalid_sizes(self, size):
        with pytest.raises(InputError):
            AngleGrid(size)

    def test_nodes(self):
        g = AngleGrid(8)
        np.testing.assert_allclose(g.nodes, np.arange(8) * TWO_PI / 8)
        assert g.index(8 + 3) == 3

    def test_grid_function_checks(self, grid64):
        with pytest.raises(InputError):
            GridFunction(grid64, np.ones(10))
        with pytest.raises(InputError):
            GridFunction(grid64, np.r_[np.ones(63), np.inf])


class TestCyclicSignChanges:
    @pytest.mark.parametrize("x, expected", [
        ((0, 0, 0), 0),
        ((), 0),
        ((1, -1, 1, -1), 4),
        ((1, -1, 0, 1), 2),
        ((1, 1, 1), 0),
    ])
    def test_examples(self, x, expected):
        assert cyclic_sign_changes(x) == expected
        if x:
            assert brute_force_cyclic_sign_changes(list(x)) == expected

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            cyclic_sign_changes([1.0, float("nan")])

    @given(st.lists(st.sampled_from([-1, 0, 1]), max_size=12), st.integers(0, 11))
    def test_rotation_invariant_and_even(self, x, shift):
        c = cyclic_sign_changes(x)
        assert c % 2 == 0
        if x:
            k = shift % len(x)
            assert cyclic_sign_changes(x[k:] + x[:k]) == c
        assert c == brute_force_cyclic_sign_changes(x)

    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), max_size=30))
    def test_real_valued_matches_oracle(self, x):
        assert cyclic_sign_changes(x) == brute_force_cyclic_sign_changes(x)

    def test_exhaustive_length_5(self):
        for x in itertools.product((-1, 0, 1), repeat=5):
            assert cyclic_sign_changes(x) == brute_force_cyclic_sign_changes(list(x))


class TestGridSignChanges:
    def test_constant(self, grid64):
        assert sign_changes_of_grid_function(GridFunction(grid64, np.ones(64))) == 0

    @pytest.mark.parametrize("freq, expected", [(1, 2), (3, 6)])
    def test_sines(self, grid64, freq, expected):
        # zeros at nodes are skipped; the oracle counts sign arcs directly
        f = GridFunction(grid64, np.sin(freq * grid64.nodes))
        assert sign_changes_of_grid_function(f) == expected
        assert brute_force_cyclic_sign_changes(list(f.values)) == expected


class TestCountModes:
    def test_constant(self, grid64):
        assert count_modes(GridFunction(grid64, np.full(64, 0.3))) == 0

    @pytest.mark.parametrize("freq, expected", [(1, 1), (2, 2), (5, 5)])
    def test_cosines(self, grid64, freq, expected):
        f = GridFunction.from_callable(grid64, lambda t: 1 + np.cos(freq * t))
        assert count_modes(f) == expected
        # analytic derivative oracle: -freq*sin(freq t) has 2*freq sign changes
        assert brute_force_cyclic_sign_changes(list(-np.sin(freq * grid64.nodes + 0.01))) == 2 * expected


class TestConvolution:
    def test_uniform_smooths_to_uniform(self, grid64, rng):
        f = GridFunction(grid64, rng.uniform(0, 1, 64))
        f = GridFunction(grid64, f.values / f.integral())
        u = GridFunction(grid64, np.full(64, 1 / TWO_PI))
        np.testing.assert_allclose(circular_convolve(f, u).values, 1 / TWO_PI, atol=1e-15)
        np.testing.assert_allclose(circular_convolve(u, u).values, 1 / TWO_PI, atol=1e-15)

    def test_delta_is_identity(self, grid64, rng):
        delta = np.zeros(64)
        delta[0] = 1 / grid64.step
        g = GridFunction(grid64, rng.normal(size=64))
        out = circular_convolve(GridFunction(grid64, delta), g)
        # oracle: direct summation (2 pi / G) * sum_b g(a - b) delta(b)
        direct = np.array([sum(g.values[(a - b) % 64] * delta[b] for b in range(64)) * grid64.step
                           for a in range(64)])
        np.testing.assert_allclose(out.values, direct, atol=1e-12)
        np.testing.assert_allclose(out.values, g.values, atol=1e-12)

    def test_matches_direct_summation(self, grid64, rng):
        f = GridFunction(grid64, rng.normal(size=64))
        g = GridFunction(grid64, rng.normal(size=64))
        direct = np.array([sum(g.values[(a - b) % 64] * f.values[b] for b in range(64))
                           for a in range(64)]) * grid64.step
        np.testing.assert_allclose(circular_convolve(f, g).values, direct, atol=1e-12)

    def test_commutative_bilinear(self, grid64, rng):
        f, g, h = (GridFunction(grid64, rng.normal(size=64)) for _ in range(3))
        np.testing.assert_allclose(circular_convolve(f, g).values, circular_convolve(g, f).values,
                                   atol=1e-12)
        fg = GridFunction(grid64, 2.5 * f.values - 1.5 * g.values)
        lhs = circular_convolve(fg, h).values
        rhs = 2.5 * circular_convolve(f, h).values - 1.5 * circular_convolve(g, h).values
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_mass_preserved(self, grid64, rng):
        f = GridFunction(grid64, rng.normal(size=64))
        d = rng.uniform(size=64)
        d = GridFunction(grid64, d / (d.sum() * grid64.step))
        assert abs(circular_convolve(f, d).integral() - f.integral()) <= 1e-12

    def test_grid_mismatch(self):
        with pytest.raises(InputError):
            circular_convolve(GridFunction(AngleGrid(8), np.ones(8)),
                              GridFunction(AngleGrid(16), np.ones(16)))


class TestFourier:
    def test_uniform(self, grid64):
        c = fourier_coefficients(GridFunction(grid64, np.full(64, 1 / TWO_PI)), 5)
        assert c[0] == pytest.approx(1.0)
        assert all(abs(c[k]) < 1e-15 for k in c if k)

    def test_cardioid(self, grid64):
        c = fourier_coefficients(GridFunction.from_callable(grid64, lambda t: (1 + np.cos(t)) / TWO_PI), 4)
        assert c[1] == pytest.approx(0.5, abs=1e-14)
        assert c[-1] == pytest.approx(0.5, abs=1e-14)
        assert abs(c[2]) < 1e-14

    def test_aliasing_error(self, grid64):
        with pytest.raises(InputError):
            fourier_coefficients(GridFunction(grid64, np.ones(64)), 32)

    def test_convolution_theorem(self, grid64, rng):
        def bandlimited():
            k = np.arange(1, 9)[:, None]
            return GridFunction(grid64, 1 + rng.normal(size=8) @ np.cos(k * grid64.nodes)
                                + rng.normal(size=8) @ np.sin(k * grid64.nodes))
        f, g = bandlimited(), bandlimited()
        cf, cg = fourier_coefficients(f, 20), fourier_coefficients(g, 20)
        cfg = fourier_coefficients(circular_convolve(f, g), 20)
        for k in cfg:
            assert abs(cfg[k] - cf[k] * cg[k]) <= 1e-10
