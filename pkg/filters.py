"""
필터 모듈
이동 평균용 저역 통과 필터의 생성, 스케일링, 순환(circulant) 스펙트럼 계산,
스펙트럼 영점 강제
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import fft
from scipy.signal import argrelmin

from config import config
from errors import (
    FilterTooLongError,
    InputError,
    NegativityViolationError,
    NoSpectralMinimumError,
    SpectrumNotRealError,
)

FILTER_SHAPES = ('triangular', 'bspline3')


@dataclass(frozen=True)
class Filter:
    """
    대칭, 비음수, 단위 질량 필터

    Attributes:
        taps: 길이 2L+1 탭 배열 (읽기 전용)
        half_length: 반길이 L
        doubly_convolved: h*h 형태 여부 (스펙트럼 비음수 보장)
        shape: 생성에 쓰인 기본 모양 (알 수 없으면 None)
    """

    taps: np.ndarray
    half_length: int
    doubly_convolved: bool = False
    shape: Optional[str] = None

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float)
        if taps.ndim != 1 or taps.size != 2 * self.half_length + 1:
            raise InputError(
                f"filter with L={self.half_length} needs {2 * self.half_length + 1} taps, got {taps.size}"
            )
        if not np.all(np.isfinite(taps)):
            raise InputError("filter taps must be finite")
        if np.max(np.abs(taps - taps[::-1])) > config.SYMMETRY_TOLERANCE:
            raise InputError("filter taps are not even-symmetric")
        if np.min(taps) < -config.NEGATIVITY_TOLERANCE:
            raise InputError(f"filter has negative tap {np.min(taps):.3e}")
        if abs(taps.sum() - 1.0) > config.MASS_TOLERANCE:
            raise InputError(f"filter mass is {taps.sum():.15g}, expected 1")
        taps.setflags(write=False)
        object.__setattr__(self, 'taps', taps)

    @property
    def length(self) -> int:
        """탭 개수 2L+1"""
        return 2 * self.half_length + 1

    @property
    def center(self) -> float:
        """중심 탭 h[L]"""
        return float(self.taps[self.half_length])


@dataclass(frozen=True)
class FilterSpectrum:
    """
    주기 p 순환 행렬의 고유값 (필터 행의 DFT 실수부)

    Attributes:
        eigenvalues: λ_0..λ_{p-1}
        period: p
    """

    eigenvalues: np.ndarray
    period: int

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, 'eigenvalues', values)

    def zero_mask(self, tolerance: float) -> np.ndarray:
        """|λ_j| ≤ tolerance 인 빈의 불리언 마스크"""
        return np.abs(self.eigenvalues) <= tolerance

    def zero_count(self, tolerance: float) -> int:
        """0 으로 간주되는 고유값 개수 k"""
        return int(self.zero_mask(tolerance).sum())

    def is_convergent(self, tolerance: float) -> bool:
        """모든 고유값이 [0, 2] 안에 있는지 (허용치 포함)"""
        return bool(np.all(self.eigenvalues >= -tolerance) and np.all(self.eigenvalues <= 2.0))


def _normalized(taps: np.ndarray) -> np.ndarray:
    """대칭화 후 단위 질량으로 정규화"""
    taps = 0.5 * (taps + taps[::-1])
    return taps / taps.sum()


def _triangle_taps(half_length: int) -> np.ndarray:
    """사각 창 (L+1) 의 자기 합성곱, 정규화 전"""
    rect = np.ones(half_length + 1)
    return np.convolve(rect, rect)


def build_base_filter(shape: str, half_length: int) -> Filter:
    """
    기본 필터 생성

    Args:
        shape: 'triangular' 또는 'bspline3'
        half_length: 반길이 L (≥ 1)

    Returns:
        doubly_convolved=True 인 Filter
    """
    if half_length < 1:
        raise InputError(f"filter half length must be >= 1, got {half_length}")
    if shape == 'triangular':
        taps = _triangle_taps(half_length)
    elif shape == 'bspline3':
        # 홀수 L 은 반길이 floor(L/2), ceil(L/2) 삼각형의 합성곱
        taps = np.convolve(_triangle_taps(half_length // 2), _triangle_taps(half_length - half_length // 2))
    else:
        raise InputError(f"unknown filter shape: {shape}")
    return Filter(taps=_normalized(taps), half_length=half_length, doubly_convolved=True, shape=shape)


def double_convolve(h: Filter) -> Filter:
    """h*h (반길이 2L, 스펙트럼 = h 스펙트럼의 제곱)"""
    taps = np.convolve(h.taps, h.taps)
    return Filter(taps=_normalized(taps), half_length=2 * h.half_length, doubly_convolved=True, shape=h.shape)


def scale_filter(base: Filter, target_half_length: int) -> Filter:
    """
    선형 스케일링 w_L(x) = w(x/L) / L 의 이산 버전

    기본 탭 i 는 가로축 (i-L)/(L+1), ±1 에는 암묵적 0 이 있다.
    목표 탭 j 는 (j-L')/(L'+1) 에서 선형 보간하므로 삼각형은 정확히 재현된다.

    Args:
        base: 기본 필터
        target_half_length: 목표 반길이 L' (≥ 1)

    Returns:
        반길이 L' 필터
    """
    if target_half_length < 1:
        raise InputError(f"target half length must be >= 1, got {target_half_length}")
    L = base.half_length
    if target_half_length == L:
        return base

    xp = np.concatenate(([-1.0], (np.arange(2 * L + 1) - L) / (L + 1), [1.0]))
    fp = np.concatenate(([0.0], base.taps, [0.0]))

    target = target_half_length
    left = np.interp((np.arange(target + 1) - target) / (target + 1), xp, fp)
    taps = np.concatenate((left, left[-2::-1]))
    taps = np.clip(taps, 0.0, None)

    # 보간된 B-spline 은 더 이상 정확한 h*h 가 아니다
    exact = base.shape == 'triangular'
    return Filter(
        taps=taps / taps.sum(),
        half_length=target,
        doubly_convolved=base.doubly_convolved and exact,
        shape=base.shape,
    )


def circulant_row(w: Filter, period: int, wrap: bool = False) -> np.ndarray:
    """
    탭을 인덱스 0 중심으로 감아 넣은 길이 p 순환 행 (첫 열)

    wrap 이면 주기보다 긴 필터를 p 로 접어서(같은 잉여류 탭 합산) 넣는다.
    이때 고유값은 필터 DTFT 를 2πj/p 에서 샘플링한 값과 같다.
    """
    L = w.half_length
    if w.length > period:
        if not wrap:
            raise FilterTooLongError(f"filter length {w.length} exceeds period {period}")
        return np.bincount(np.arange(-L, L + 1) % period, weights=w.taps, minlength=period)
    row = np.zeros(period)
    row[:L + 1] = w.taps[L:]
    if L > 0:
        row[-L:] = w.taps[:L]
    return row


def filter_spectrum(w: Filter, period: int, wrap: bool = False) -> FilterSpectrum:
    """
    순환 행렬 고유값 계산

    Args:
        w: 필터 (wrap 이 아니면 2L+1 ≤ p)
        period: 주기 p
        wrap: 긴 필터를 주기로 접을지 여부

    Returns:
        FilterSpectrum
    """
    values = fft.fft(circulant_row(w, period, wrap))
    imag = float(np.max(np.abs(values.imag)))
    if imag > config.IMAG_TOLERANCE:
        raise SpectrumNotRealError(f"filter spectrum imaginary part {imag:.3e} exceeds tolerance")
    return FilterSpectrum(eigenvalues=values.real, period=period)


def first_spectral_minimum(spectrum: FilterSpectrum) -> int:
    """양의 주파수 구간(1..p/2)에서 가장 작은 주파수의 스펙트럼 극소 빈"""
    candidates = argrelmin(spectrum.eigenvalues, mode='wrap')[0]
    candidates = candidates[(candidates >= 1) & (candidates <= spectrum.period // 2)]
    if candidates.size == 0:
        raise NoSpectralMinimumError(f"filter spectrum is monotone over positive bins (p={spectrum.period})")
    return int(candidates[0])


def enforce_spectral_zero(h: Filter,
                          period: int,
                          zero_bin: Optional[int] = None,
                          wrap: bool = False) -> Tuple[Filter, int]:
    """
    스펙트럼 영점 강제

    ε = λ_j(h) 를 빼고 자기 합성곱하여 스펙트럼이 ((λ - ε)/(1 - ε))² 인 필터를 만든다.
    빈 j 에서 정확히 0 이 된다.

    Args:
        h: 입력 필터
        period: 주기 p
        zero_bin: 영점 빈 (None이면 첫 스펙트럼 극소)
        wrap: 주기로 접은 스펙트럼 사용 (출력 길이 4L+1 > p 허용)

    Returns:
        (영점 필터, 영점 빈) 튜플
    """
    spectrum = filter_spectrum(h, period, wrap)
    if zero_bin is None:
        zero_bin = first_spectral_minimum(spectrum)
    elif not 1 <= zero_bin <= period // 2:
        raise InputError(f"zero bin {zero_bin} must lie in [1, {period // 2}]")

    epsilon = float(spectrum.eigenvalues[zero_bin])
    if epsilon >= h.center:
        raise NegativityViolationError(
            f"spectral value {epsilon:.6g} at bin {zero_bin} is not below central tap {h.center:.6g}"
        )
    if not wrap and 4 * h.half_length + 1 > period:
        raise FilterTooLongError(f"zero-enforced filter length {4 * h.half_length + 1} exceeds period {period}")

    shifted = np.array(h.taps)
    shifted[h.half_length] -= epsilon
    shifted /= 1.0 - epsilon
    taps = np.convolve(shifted, shifted)
    out = Filter(taps=_normalized(taps), half_length=2 * h.half_length, doubly_convolved=True, shape=h.shape)
    return out, zero_bin
