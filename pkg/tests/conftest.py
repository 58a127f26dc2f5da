"""Shared fixtures and oracles for the iterfilt test suite."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from filters import Filter, circulant_row  # noqa: E402
from signal_core import Signal  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def make_signal():
    """Build a Signal from samples and a sample rate."""

    def _make(samples, sample_rate: float = 1.0) -> Signal:
        return Signal.from_samples(np.asarray(samples, dtype=float), sample_rate)

    return _make


@pytest.fixture
def random_filter():
    """Random admissible filter: symmetric, nonnegative, unit mass."""

    def _make(rng: np.random.Generator, half_length: int) -> Filter:
        side = rng.random(half_length) + 0.1
        taps = np.concatenate((side[::-1], [rng.random() + 0.5], side))
        return Filter(taps=taps / taps.sum(), half_length=half_length)

    return _make


@pytest.fixture
def dense_circulant():
    """Dense O(p^2) circulant matrix of a filter (oracle)."""

    def _make(w: Filter, period: int) -> np.ndarray:
        row = circulant_row(w, period)
        return np.array([np.roll(row, i) for i in range(period)])

    return _make


@pytest.fixture
def multitone():
    """Sum of on-grid cosines at the given DFT bins plus an offset."""

    def _make(bins, amplitudes, phases, period: int, sample_rate: float, offset: float = 0.0) -> Signal:
        k = np.arange(period)
        samples = np.full(period, offset, dtype=float)
        for j, amp, phi in zip(bins, amplitudes, phases):
            samples += amp * np.cos(2 * np.pi * j * k / period + phi)
        return Signal.from_samples(samples, sample_rate)

    return _make
