"""
신호 코어 모듈
균일 샘플링 신호 표현, 두 톤 테스트 신호 생성, 극값 계산,
유한 차분, 경계 확장
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import find_peaks

from errors import InputError

EXTENSION_MODES = ('periodic', 'reflect-even', 'reflect-odd')


@dataclass(frozen=True)
class Signal:
    """
    균일 샘플링된 실수 신호 (불변 값 객체)

    Attributes:
        samples: 길이 p 의 샘플 배열 (읽기 전용)
        sample_rate: 샘플링 주파수 Fs (samples/s)
        duration: 신호 길이 n (초), p = n * Fs
    """

    samples: np.ndarray
    sample_rate: float
    duration: float

    def __post_init__(self):
        data = np.array(self.samples, dtype=float)
        if data.ndim != 1 or data.size < 2:
            raise InputError(f"signal needs at least 2 samples, got shape {data.shape}")
        if not self.sample_rate > 0:
            raise InputError(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.duration > 0:
            raise InputError(f"duration must be positive, got {self.duration}")
        if abs(data.size - self.duration * self.sample_rate) >= 0.5:
            raise InputError(
                f"sample count {data.size} does not match duration*sample_rate "
                f"= {self.duration * self.sample_rate}"
            )
        if not np.all(np.isfinite(data)):
            raise InputError("signal contains NaN or Inf samples")
        data.setflags(write=False)
        object.__setattr__(self, 'samples', data)

    @classmethod
    def from_samples(cls, samples, sample_rate: float) -> 'Signal':
        """샘플 배열과 Fs 로 생성 (duration = p / Fs)"""
        samples = np.asarray(samples, dtype=float)
        return cls(samples=samples, sample_rate=sample_rate, duration=samples.size / sample_rate)

    def with_samples(self, samples) -> 'Signal':
        """같은 Fs 를 가진 새 신호 (길이가 달라도 됨)"""
        return Signal.from_samples(samples, self.sample_rate)

    @property
    def size(self) -> int:
        """샘플 수 p"""
        return int(self.samples.size)

    @property
    def period(self) -> float:
        """샘플 간격 T = 1 / Fs"""
        return 1.0 / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        """샘플 시각 x_k = k T"""
        return np.arange(self.size) * self.period

    def norm(self) -> float:
        """이산 L2 노름"""
        return float(np.linalg.norm(self.samples))


@dataclass(frozen=True)
class TwoToneParams:
    """
    두 톤 신호 파라미터

    cos(2πx) 가 고주파(HF) 성분, a·cos(2πfx + φ) 가 저주파(LF) 성분
    """

    a: float
    f: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.f < 1.0:
            raise InputError(f"LF frequency f must lie in (0, 1), got {self.f}")
        if not self.a >= 0.0:
            raise InputError(f"LF amplitude a must be nonnegative, got {self.a}")


def sample_count(duration_seconds: float, sample_rate: float) -> int:
    """n 초를 Fs 로 샘플링했을 때의 정수 샘플 수"""
    return int(round(duration_seconds * sample_rate))


def high_frequency_component(duration_seconds: float, sample_rate: float) -> np.ndarray:
    """HF 성분 cos(2π x_k)"""
    x = np.arange(sample_count(duration_seconds, sample_rate)) / sample_rate
    return np.cos(2 * np.pi * x)


def low_frequency_component(params: TwoToneParams, duration_seconds: float, sample_rate: float) -> np.ndarray:
    """LF 성분 a cos(2π f x_k + φ)"""
    x = np.arange(sample_count(duration_seconds, sample_rate)) / sample_rate
    return params.a * np.cos(2 * np.pi * params.f * x + params.phi)


def generate_two_tone(params: TwoToneParams, duration_seconds: float, sample_rate: float) -> Signal:
    """
    두 톤 테스트 신호 생성

    Args:
        params: (a, f, φ)
        duration_seconds: 신호 길이 n (초)
        sample_rate: 샘플링 주파수 Fs

    Returns:
        samples[k] = cos(2π kT) + a cos(2π f kT + φ) 인 신호
    """
    if not 0.0 < params.f < 1.0:
        raise InputError(f"LF frequency f must lie in (0, 1), got {params.f}")
    p = sample_count(duration_seconds, sample_rate)
    if p < 4:
        raise InputError(f"two-tone signal needs at least 4 samples, got {p}")
    samples = (
        high_frequency_component(duration_seconds, sample_rate)
        + low_frequency_component(params, duration_seconds, sample_rate)
    )
    return Signal(samples=samples, sample_rate=sample_rate, duration=duration_seconds)


def find_extrema(sig: Signal) -> Tuple[np.ndarray, np.ndarray]:
    """
    내부 극대/극소 위치 계산

    평탄 구간(plateau)은 중간점 하나로 계산하고, 양 끝 샘플은 제외한다.

    Returns:
        (극대 인덱스, 극소 인덱스) 튜플
    """
    if sig.size < 3:
        empty = np.array([], dtype=int)
        return empty, empty
    maxima, _ = find_peaks(sig.samples)
    minima, _ = find_peaks(-sig.samples)
    return maxima, minima


def count_extrema(sig: Signal) -> int:
    """내부 극값 개수 (극대 + 극소)"""
    maxima, minima = find_extrema(sig)
    return int(maxima.size + minima.size)


def _central_stencil(order: int) -> np.ndarray:
    """중앙 1차 차분 [1/2, 0, -1/2] 을 order 번 합성한 스텐실"""
    kernel = np.array([1.0])
    for _ in range(order):
        kernel = np.convolve(kernel, [0.5, 0.0, -0.5])
    return kernel


def finite_difference(sig: Signal, order: int) -> Signal:
    """
    d 차 유한 차분 (s^(d) 근사)

    내부는 중앙 차분을 d 번 적용한 스텐실, 경계 d 개 샘플은 같은 차수의
    전진/후진 차분을 쓴다. 결과에는 Fs^d 가 곱해진다.

    Args:
        sig: 입력 신호
        order: 미분 차수 d (≥ 1)

    Returns:
        길이가 같은 도함수 신호
    """
    if order < 1:
        raise InputError(f"derivative order must be >= 1, got {order}")
    p = sig.size
    if p <= 2 * order:
        raise InputError(f"order {order} too large for {p} samples (need p > 2d)")

    x = sig.samples
    out = np.empty(p)
    out[order:p - order] = np.convolve(x, _central_stencil(order), mode='valid')

    weights = np.array([(-1) ** (order - k) * math.comb(order, k) for k in range(order + 1)], dtype=float)
    for i in range(order):
        out[i] = weights @ x[i:i + order + 1]
        j = p - 1 - i
        out[j] = weights @ x[j - order:j + 1]

    return sig.with_samples(out * sig.sample_rate ** order)


def extend_signal(sig: Signal, pad_length: int, mode: str) -> Signal:
    """
    경계 확장

    Args:
        sig: 입력 신호
        pad_length: 양쪽에 붙일 샘플 수 (≤ p)
        mode: 'periodic' | 'reflect-even' | 'reflect-odd'

    Returns:
        길이 p + 2·pad_length 신호
    """
    if mode not in EXTENSION_MODES:
        raise InputError(f"unknown extension mode: {mode}")
    if pad_length < 0 or pad_length > sig.size:
        raise InputError(f"pad length {pad_length} must lie in [0, {sig.size}]")
    if pad_length == 0:
        return sig

    if mode == 'periodic':
        padded = np.pad(sig.samples, pad_length, mode='wrap')
    elif mode == 'reflect-even':
        padded = np.pad(sig.samples, pad_length, mode='reflect')
    else:
        padded = np.pad(sig.samples, pad_length, mode='reflect', reflect_type='odd')
    return sig.with_samples(padded)


def trim_signal(sig: Signal, pad_length: int) -> Signal:
    """extend_signal 로 붙인 양쪽 패딩 제거"""
    if pad_length == 0:
        return sig
    return sig.with_samples(sig.samples[pad_length:sig.size - pad_length])
