"""Property-level checks of the decomposition against its closed-form behavior."""

import numpy as np
import pytest

from benchmark import (
    SweepSettings,
    amplitude_axis,
    c1_metric,
    frequency_axis,
    phase_axis,
    separable_count,
    sweep_grid,
)
from dif_engine import (
    DecompositionConfig,
    decompose,
    inner_loop_direct_powered,
    inner_loop_direct_projection,
    moving_average_step,
    n0_for,
)
from filters import (
    Filter,
    build_base_filter,
    circulant_row,
    enforce_spectral_zero,
    filter_spectrum,
)
from mask_selection import IdealStrategy, base_filter_for, zero_aligned_filter
from signal_core import Signal, TwoToneParams, count_extrema, generate_two_tone

DURATION = 100.0
SAMPLE_RATE = 20.0


def standard_grid(count: int = 8):
    return amplitude_axis(count), frequency_axis(count, "rational", DURATION)


def unit_interval_filter(period: int) -> Filter:
    """Zero-aligned triangle: eigenvalues in [0, 1], zero at bin period/8."""
    w, _ = zero_aligned_filter(base_filter_for("triangular"), period, period // 8)
    return w


def increment_norms(s: Signal, w: Filter, steps) -> np.ndarray:
    """||s_{m+1} - s_m||_2 for each m in steps, closed form in the DFT domain."""
    lam = filter_spectrum(w, s.size).eigenvalues
    s_hat = np.fft.fft(s.samples)
    return np.array([
        np.linalg.norm(lam * np.power(1.0 - lam, m) * s_hat) / np.sqrt(s.size) for m in steps
    ])


# =============================================================================
# Circulant structure
# =============================================================================


def test_dft_eigenvalues_match_dense_circulant(rng, random_filter) -> None:
    for trial in range(20):
        p = (64, 128)[trial % 2]
        w = random_filter(rng, int(rng.integers(1, 17)))
        row = circulant_row(w, p)
        matrix = np.array([np.roll(row, i) for i in range(p)])
        k = np.arange(p)
        basis = np.exp(2j * np.pi * np.outer(k, k) / p)
        dense = (matrix @ basis)[0] / basis[0]
        fast = filter_spectrum(w, p).eigenvalues
        scale = np.max(np.abs(fast))
        assert np.max(np.abs(dense - fast)) / scale < 1e-10


# =============================================================================
# Inner loop equivalences
# =============================================================================


@pytest.mark.parametrize("steps", [1, 10, 100])
def test_explicit_steps_equal_powered_form(rng, steps: int) -> None:
    w = unit_interval_filter(64)
    for _ in range(5):
        s = Signal.from_samples(rng.standard_normal(64), 1.0)
        x = s
        for _ in range(steps):
            x = moving_average_step(x, w)
        powered = inner_loop_direct_powered(s, w, steps)
        assert np.linalg.norm(x.samples - powered.samples) <= 1e-9 * s.norm()


def test_powered_form_approaches_projection(rng) -> None:
    w = unit_interval_filter(64)
    s = Signal.from_samples(rng.standard_normal(64), 1.0)
    projection = inner_loop_direct_projection(s, w, 1e-11).samples
    distances = [
        np.linalg.norm(inner_loop_direct_powered(s, w, n).samples - projection)
        for n in (1, 3, 10, 30, 100, 300, 1000, 3000, 10_000)
    ]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(distances, distances[1:]))
    assert distances[-1] < distances[0]


# =============================================================================
# Two-tone separation
# =============================================================================


def test_ideal_mask_separates_to_machine_precision() -> None:
    a_values, f_values = standard_grid()
    settings = SweepSettings(strategy="ideal:1", mode="direct_projection")
    grid = sweep_grid(a_values, f_values, phase_axis(4), settings)
    assert not grid.failed.any()
    assert np.all(grid.c1 < 1e-8)


def test_extrema_mask_fails_above_critical_curve() -> None:
    a_values, f_values = standard_grid()
    grid = sweep_grid(a_values, f_values, phase_axis(4), SweepSettings(strategy="extrema"))
    product = grid.product_grid(1)

    below = product < 0.5
    above = product > 2.0
    assert below.sum() >= 20
    assert above.sum() >= 15
    assert np.mean(grid.c1[below] < 0.1) >= 0.9
    assert np.mean(grid.c1[above] > 0.5) >= 0.9


def test_derivative_masks_widen_separable_region() -> None:
    a_values, f_values = standard_grid()
    phases = phase_axis(4)
    counts = [
        separable_count(sweep_grid(a_values, f_values, phases, SweepSettings(strategy=strategy)))
        for strategy in ("extrema", "derivative:1", "derivative:2")
    ]
    assert counts[0] < counts[1] < counts[2]


@pytest.mark.slow
def test_full_resolution_partition() -> None:
    a_values, f_values = standard_grid(48)
    phases = phase_axis(single=3.0)
    ideal = sweep_grid(a_values, f_values, phases, SweepSettings(strategy="ideal:1"))
    assert np.all(ideal.c1 < 1e-8)

    extrema = sweep_grid(a_values, f_values, phases, SweepSettings(strategy="extrema"))
    product = extrema.product_grid(1)
    assert np.mean(extrema.c1[product < 0.5] < 0.1) >= 0.9
    assert np.mean(extrema.c1[product > 2.0] > 0.5) >= 0.9


# =============================================================================
# Zero enforcement
# =============================================================================


@pytest.mark.parametrize("half_length", [4, 8, 16])
def test_zero_enforced_triangle(half_length: int) -> None:
    w, j = enforce_spectral_zero(build_base_filter("triangular", half_length), 256)
    assert abs(filter_spectrum(w, 256).eigenvalues[j]) < 1e-12
    np.testing.assert_array_equal(w.taps, w.taps[::-1])
    assert w.taps.min() >= -1e-14
    assert abs(w.taps.sum() - 1.0) < 1e-12


# =============================================================================
# Stopping bound
# =============================================================================


def test_n0_bound_moderate_delta(rng) -> None:
    w = unit_interval_filter(128)
    delta = 1e-3
    for _ in range(10):
        s = Signal.from_samples(rng.standard_normal(128), 1.0)
        n0 = n0_for(s, w, delta, 1e-11)
        steps = np.arange(n0 + 200)
        norms = increment_norms(s, w, steps)
        assert np.all(np.diff(norms) <= 1e-15 * norms[0])
        assert np.all(norms[n0:] < delta)


def test_n0_bound_tight_delta(rng) -> None:
    w = unit_interval_filter(128)
    delta = 1e-8
    for _ in range(10):
        s = Signal.from_samples(rng.standard_normal(128), 1.0)
        n0 = n0_for(s, w, delta, 1e-11)
        assert n0 > 10**6
        early = increment_norms(s, w, np.arange(2000))
        assert np.all(np.diff(early) <= 1e-15 * early[0])
        late = increment_norms(s, w, [n0, n0 + 1, 2 * n0, 10 * n0])
        assert np.all(late < delta)
        assert np.all(np.diff(late) <= 1e-15 * early[0])
        assert late[0] <= early[-1] + 1e-15 * early[0]


# =============================================================================
# Reconstruction
# =============================================================================


def test_reconstruction_identity(rng, multitone) -> None:
    cfg = DecompositionConfig(mode="direct_projection")
    for _ in range(20):
        bins = rng.choice(np.arange(8, 201), size=3, replace=False)
        s = multitone(bins, rng.uniform(0.5, 2.0, 3), rng.uniform(0, 2 * np.pi, 3), 512, 8.0,
                      offset=float(rng.uniform(-3, 3)))
        result = decompose(s, cfg)
        assert result.imf_count >= 1
        assert result.reconstruction_error() < 1e-10
        assert count_extrema(result.remainder) < 2


def off_grid_tones(rng: np.random.Generator, period: int = 512, sample_rate: float = 8.0) -> Signal:
    """Three tones at non-integer DFT bins, so their energy leaks into every bin."""
    k = np.arange(period)
    bins = rng.uniform(1.5, 200.0, 3)
    amplitudes = rng.uniform(0.5, 2.0, 3)
    phases = rng.uniform(0, 2 * np.pi, 3)
    samples = sum(a * np.cos(2 * np.pi * j * k / period + phi) for j, a, phi in zip(bins, amplitudes, phases))
    return Signal.from_samples(samples + rng.uniform(-3, 3), sample_rate)


def test_reconstruction_off_grid_iterative(rng) -> None:
    cfg = DecompositionConfig(mode="iterative")
    for _ in range(20):
        result = decompose(off_grid_tones(rng), cfg)
        assert result.stop_reason in ("extrema", "negligible")
        assert result.reconstruction_error() < 1e-10
        assert count_extrema(result.remainder) < 2


def test_reconstruction_off_grid_projection(rng) -> None:
    cfg = DecompositionConfig(mode="direct_projection")
    for _ in range(20):
        result = decompose(off_grid_tones(rng), cfg)
        assert result.reconstruction_error() < 1e-10
        # projection keeps only exact spectral zeros, so leakage may use up the IMF cap
        assert result.stop_reason in ("extrema", "negligible", "imf-limit")
        if result.stop_reason != "imf-limit":
            assert count_extrema(result.remainder) < 2


def test_reconstruction_white_noise(rng) -> None:
    cfg = DecompositionConfig(mode="iterative")
    for _ in range(10):
        s = Signal.from_samples(rng.standard_normal(512), 8.0)
        result = decompose(s, cfg)
        assert result.stop_reason in ("extrema", "negligible")
        assert result.reconstruction_error() < 1e-10
        assert count_extrema(result.remainder) < 2
        assert count_extrema(result.remainder) < 2


# =============================================================================
# Stress preset
# =============================================================================


def test_stress_preset_matches_projection() -> None:
    params = TwoToneParams(a=1.0, f=0.5, phi=3.0)
    s = generate_two_tone(params, DURATION, SAMPLE_RATE)
    strategy = IdealStrategy([1.0])

    stress = decompose(s, DecompositionConfig.from_preset("stress", mask_strategy=strategy, max_imfs=1))
    projection = decompose(s, DecompositionConfig(mode="direct_projection", mask_strategy=strategy, max_imfs=1))

    assert stress.diagnostics[0].iterations == 10_000_000
    c1_stress = c1_metric(stress.imfs[0], params, DURATION, SAMPLE_RATE)
    c1_projection = c1_metric(projection.imfs[0], params, DURATION, SAMPLE_RATE)
    assert abs(c1_stress - c1_projection) < 1e-10
