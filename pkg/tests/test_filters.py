"""Tests for base filters, scaling, circulant spectra and zero enforcement."""

import numpy as np
import pytest

from errors import (
    FilterTooLongError,
    InputError,
    NegativityViolationError,
    NoSpectralMinimumError,
)
from filters import (
    Filter,
    FilterSpectrum,
    build_base_filter,
    circulant_row,
    double_convolve,
    enforce_spectral_zero,
    filter_spectrum,
    first_spectral_minimum,
    scale_filter,
)


def make_filter(taps) -> Filter:
    taps = np.asarray(taps, dtype=float)
    return Filter(taps=taps, half_length=(taps.size - 1) // 2)


def triangle_spectrum(half_length: int, period: int) -> np.ndarray:
    """Closed-form eigenvalues of the normalized triangle (Fejér kernel)."""
    j = np.arange(period)
    width = half_length + 1
    out = np.ones(period)
    nz = j != 0
    out[nz] = (np.sin(np.pi * j[nz] * width / period) / (width * np.sin(np.pi * j[nz] / period))) ** 2
    return out


# =============================================================================
# Filter value object
# =============================================================================


class TestFilter:
    def test_valid(self) -> None:
        w = make_filter([0.25, 0.5, 0.25])
        assert w.half_length == 1
        assert w.length == 3
        assert w.center == 0.5

    def test_taps_are_read_only(self) -> None:
        w = make_filter([0.25, 0.5, 0.25])
        with pytest.raises(ValueError):
            w.taps[0] = 0.0

    @pytest.mark.parametrize(
        "taps",
        [
            [0.2, 0.5, 0.3],  # asymmetric
            [-0.1, 1.2, -0.1],  # negative
            [0.25, 0.25, 0.25],  # mass 0.75
            [0.25, np.inf, 0.25],
        ],
    )
    def test_rejects_invalid_taps(self, taps) -> None:
        with pytest.raises(InputError):
            make_filter(taps)

    def test_rejects_wrong_length(self) -> None:
        with pytest.raises(InputError):
            Filter(taps=np.array([0.25, 0.5, 0.25]), half_length=2)


# =============================================================================
# Base filters
# =============================================================================


class TestBuildBaseFilter:
    def test_triangle_l1(self) -> None:
        w = build_base_filter("triangular", 1)
        np.testing.assert_allclose(w.taps, [0.25, 0.5, 0.25], atol=1e-15)
        assert w.doubly_convolved

    def test_triangle_l2(self) -> None:
        w = build_base_filter("triangular", 2)
        np.testing.assert_allclose(w.taps, np.array([1, 2, 3, 2, 1]) / 9, atol=1e-15)

    @pytest.mark.parametrize("shape", ["triangular", "bspline3"])
    @pytest.mark.parametrize("half_length", [1, 2, 5, 8, 64])
    def test_invariants(self, shape: str, half_length: int) -> None:
        w = build_base_filter(shape, half_length)
        assert w.length == 2 * half_length + 1
        assert w.taps.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_array_equal(w.taps, w.taps[::-1])
        assert np.all(w.taps >= 0)
        assert w.shape == shape

    def test_bspline_spectrum_nonnegative(self) -> None:
        w = build_base_filter("bspline3", 8)
        assert filter_spectrum(w, 128).eigenvalues.min() >= -1e-14

    def test_bspline_smoother_than_triangle(self) -> None:
        tri = build_base_filter("triangular", 8)
        spline = build_base_filter("bspline3", 8)
        assert spline.center > tri.center

    @pytest.mark.parametrize("half_length", [0, -3])
    def test_invalid_length(self, half_length: int) -> None:
        with pytest.raises(InputError):
            build_base_filter("triangular", half_length)

    def test_unknown_shape(self) -> None:
        with pytest.raises(InputError):
            build_base_filter("gaussian", 4)

    def test_double_convolve_squares_spectrum(self) -> None:
        w = build_base_filter("triangular", 3)
        doubled = double_convolve(w)
        assert doubled.half_length == 6
        np.testing.assert_allclose(
            filter_spectrum(doubled, 64).eigenvalues,
            filter_spectrum(w, 64).eigenvalues ** 2,
            atol=1e-14,
        )


# =============================================================================
# Scaling
# =============================================================================


class TestScaleFilter:
    def test_same_length_is_identity(self) -> None:
        base = build_base_filter("triangular", 64)
        assert scale_filter(base, 64) is base

    @pytest.mark.parametrize("target", [1, 2, 7, 19, 40, 100])
    def test_triangle_scales_exactly(self, target: int) -> None:
        base = build_base_filter("triangular", 64)
        np.testing.assert_allclose(
            scale_filter(base, target).taps, build_base_filter("triangular", target).taps, atol=1e-14
        )

    @pytest.mark.parametrize("target", [3, 16, 33])
    def test_bspline_invariants(self, target: int) -> None:
        scaled = scale_filter(build_base_filter("bspline3", 64), target)
        assert scaled.half_length == target
        assert scaled.taps.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(scaled.taps >= 0)
        assert not scaled.doubly_convolved

    def test_invalid_target(self) -> None:
        with pytest.raises(InputError):
            scale_filter(build_base_filter("triangular", 4), 0)


# =============================================================================
# Circulant spectrum
# =============================================================================


class TestFilterSpectrum:
    def test_circulant_row_layout(self) -> None:
        row = circulant_row(make_filter([0.25, 0.5, 0.25]), 6)
        np.testing.assert_allclose(row, [0.5, 0.25, 0, 0, 0, 0.25])

    def test_too_long(self) -> None:
        with pytest.raises(FilterTooLongError):
            filter_spectrum(build_base_filter("triangular", 5), 10)

    def test_fits_exactly(self) -> None:
        spectrum = filter_spectrum(build_base_filter("triangular", 5), 11)
        assert spectrum.period == 11

    def test_three_tap_closed_form(self) -> None:
        p = 16
        spectrum = filter_spectrum(make_filter([0.25, 0.5, 0.25]), p)
        expected = 0.5 + 0.5 * np.cos(2 * np.pi * np.arange(p) / p)
        np.testing.assert_allclose(spectrum.eigenvalues, expected, atol=1e-15)
        assert spectrum.eigenvalues[0] == pytest.approx(1.0, abs=1e-15)
        assert spectrum.eigenvalues[8] == pytest.approx(0.0, abs=1e-15)

    def test_matches_dense_eigenvalues(self, rng, random_filter, dense_circulant) -> None:
        w = random_filter(rng, 6)
        p = 32
        dense = np.sort(np.linalg.eigvalsh(dense_circulant(w, p)))
        fast = np.sort(filter_spectrum(w, p).eigenvalues)
        np.testing.assert_allclose(fast, dense, atol=1e-12)

    def test_eigenvectors_are_fourier_modes(self, dense_circulant) -> None:
        w = build_base_filter("triangular", 3)
        p = 20
        matrix = dense_circulant(w, p)
        lam = filter_spectrum(w, p).eigenvalues
        k = np.arange(p)
        for j in (1, 4, 9):
            mode = np.cos(2 * np.pi * j * k / p)
            np.testing.assert_allclose(matrix @ mode, lam[j] * mode, atol=1e-13)

    def test_spectrum_is_even(self, rng, random_filter) -> None:
        lam = filter_spectrum(random_filter(rng, 4), 30).eigenvalues
        np.testing.assert_allclose(lam[1:], lam[1:][::-1], atol=1e-14)

    def test_triangle_matches_fejer(self) -> None:
        np.testing.assert_allclose(
            filter_spectrum(build_base_filter("triangular", 9), 100).eigenvalues,
            triangle_spectrum(9, 100),
            atol=1e-14,
        )

    def test_zero_count_and_convergence(self) -> None:
        spectrum = filter_spectrum(make_filter([0.25, 0.5, 0.25]), 16)
        assert spectrum.zero_count(1e-12) == 1
        assert spectrum.is_convergent(1e-12)

    def test_not_convergent(self) -> None:
        spectrum = filter_spectrum(make_filter([0.4, 0.2, 0.4]), 16)
        assert spectrum.eigenvalues.min() == pytest.approx(-0.6)
        assert not spectrum.is_convergent(1e-12)


class TestFirstSpectralMinimum:
    def test_triangle(self) -> None:
        spectrum = filter_spectrum(build_base_filter("triangular", 19), 2000)
        assert first_spectral_minimum(spectrum) == 100

    def test_no_minimum(self) -> None:
        with pytest.raises(NoSpectralMinimumError):
            first_spectral_minimum(FilterSpectrum(np.array([1.0, 0.9, 0.8, 0.8, 0.9]), 5))

    def test_nyquist_minimum(self) -> None:
        spectrum = filter_spectrum(make_filter([0.25, 0.5, 0.25]), 16)
        assert first_spectral_minimum(spectrum) == 8


# =============================================================================
# Zero enforcement
# =============================================================================


class TestEnforceSpectralZero:
    def test_exact_zero_at_first_minimum(self) -> None:
        h = build_base_filter("triangular", 5)
        p = 128
        out, j = enforce_spectral_zero(h, p)
        lam = filter_spectrum(out, p).eigenvalues
        assert j == first_spectral_minimum(filter_spectrum(h, p))
        assert abs(lam[j]) < 1e-15
        assert out.half_length == 10
        assert out.doubly_convolved

    def test_spectrum_formula(self) -> None:
        h = build_base_filter("triangular", 5)
        p = 128
        before = filter_spectrum(h, p).eigenvalues
        out, j = enforce_spectral_zero(h, p)
        epsilon = before[j]
        np.testing.assert_allclose(
            filter_spectrum(out, p).eigenvalues, ((before - epsilon) / (1 - epsilon)) ** 2, atol=1e-13
        )

    def test_result_is_admissible(self) -> None:
        out, _ = enforce_spectral_zero(build_base_filter("bspline3", 4), 64)
        assert out.taps.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(out.taps >= 0)
        assert filter_spectrum(out, 64).eigenvalues.min() >= -1e-14

    def test_explicit_bin(self) -> None:
        h = build_base_filter("triangular", 3)
        out, j = enforce_spectral_zero(h, 64, zero_bin=16)
        assert j == 16
        assert abs(filter_spectrum(out, 64).eigenvalues[16]) < 1e-15

    def test_negativity_violation(self) -> None:
        with pytest.raises(NegativityViolationError):
            enforce_spectral_zero(build_base_filter("triangular", 2), 64, zero_bin=1)

    def test_result_too_long(self) -> None:
        with pytest.raises(FilterTooLongError):
            enforce_spectral_zero(build_base_filter("triangular", 20), 64)

    @pytest.mark.parametrize("zero_bin", [0, 33])
    def test_bin_out_of_range(self, zero_bin: int) -> None:
        with pytest.raises(InputError):
            enforce_spectral_zero(build_base_filter("triangular", 3), 64, zero_bin=zero_bin)
