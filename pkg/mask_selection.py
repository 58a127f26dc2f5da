"""
마스크 선택 모듈
내부 루프에 쓸 필터 반길이 L 선택 전략 (극값 기반, 이상적 영점 정렬, 도함수 기반)과
선택된 L 을 영점 정렬 필터로 실현하는 로직
"""
import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import fft
from scipy.signal import argrelmax, argrelmin

from config import config
from errors import (
    ComputationError,
    InputError,
    MaskSelectionError,
    NegativityViolationError,
    NoSpectralMinimumError,
)
from filters import (
    Filter,
    build_base_filter,
    enforce_spectral_zero,
    filter_spectrum,
    first_spectral_minimum,
    scale_filter,
)
from signal_core import Signal, count_extrema, finite_difference
from utils import log


@dataclass(frozen=True)
class MaskChoice:
    """
    실현된 마스크

    Attributes:
        filter: 내부 루프에 쓰는 영점 정렬 필터 (반길이 2L, 주기보다 길면 p 로 접어서 적용)
        half_length: 실제 필터를 만든 스케일 길이 L
        zero_bin: 필터 스펙트럼의 가장 작은 양의 영점 빈
        source: 선택 경로 ('ideal', 'extrema', 'derivative', 'fallback')
        requested_length: 전략이 요청한 마스크 길이 (ideal 목표 주파수면 None)
    """

    filter: Filter
    half_length: int
    zero_bin: int
    source: str
    requested_length: Optional[int] = None

    def wraps(self, period: int) -> bool:
        """필터가 주기보다 길어 접어야 하는지"""
        return self.filter.length > period


# --- 마스크 길이 ---

def mask_from_extrema(s: Signal, nu: float = config.DEFAULT_NU) -> int:
    """
    극값 개수 기반 마스크 길이

    Args:
        s: 현재 잔차 신호
        nu: 배율 (기본 1.6)

    Returns:
        L = round(nu · p / 극값 수), [1, (p-1)//2] 로 제한
    """
    if not nu > 0:
        raise InputError(f"nu must be positive, got {nu}")
    n_extrema = count_extrema(s)
    if n_extrema < 2:
        raise MaskSelectionError(f"too few extrema for mask selection ({n_extrema})")
    L = int(round(nu * s.size / n_extrema))
    return max(1, min(L, (s.size - 1) // 2))


def mask_from_derivative(s: Signal, order: int, nu: float = config.DEFAULT_NU) -> int:
    """d 차 유한 차분의 극값 개수로 마스크 길이 계산 (d=0 이면 극값 기반과 동일)"""
    if order < 0:
        raise InputError(f"derivative order must be >= 0, got {order}")
    if order == 0:
        return mask_from_extrema(s, nu)
    return mask_from_extrema(finite_difference(s, order), nu)


def target_bin(sample_rate: float, period: int, target_frequency: float) -> int:
    """목표 주파수(Hz)의 DFT 빈 j* = round(f · p / Fs)"""
    if not target_frequency > 0:
        raise InputError(f"target frequency must be positive, got {target_frequency}")
    j = int(round(target_frequency * period / sample_rate))
    if not 1 <= j <= period // 2:
        raise InputError(
            f"target frequency {target_frequency} Hz maps to bin {j}, outside [1, {period // 2}]"
        )
    return j


def mask_ideal(sample_rate: float, period: int, base: Filter, target_frequency: float) -> Tuple[Filter, int]:
    """
    가장 작은 양의 스펙트럼 영점이 정확히 목표 빈에 오는 필터

    Args:
        sample_rate: Fs
        period: p
        base: 스케일링할 기본 필터
        target_frequency: 목표 주파수 (Hz)

    Returns:
        (영점 정렬 필터, 마스크 길이 L) 튜플
    """
    j_star = target_bin(sample_rate, period, target_frequency)
    return zero_aligned_filter(base, period, j_star)


# --- 영점 정렬 필터 (캐시) ---

_cache: Dict[tuple, Tuple[Filter, int]] = {}
_cache_lock = threading.Lock()


def _first_minimum_bin(base: Filter, half_length: int, period: int) -> int:
    """scale_filter(base, L) 의 첫 스펙트럼 극소 빈 (없으면 p//2 + 1)"""
    spectrum = filter_spectrum(scale_filter(base, half_length), period)
    try:
        return first_spectral_minimum(spectrum)
    except NoSpectralMinimumError:
        return period // 2 + 1


def _lobe_edge(base: Filter, half_length: int, period: int) -> float:
    """
    scale_filter(base, L) 의 DTFT 주엽 끝 (첫 극소) 위치, 빈 단위

    주기로 접지 않은 응답을 p 의 배수 길이로 제로 패딩해 계산하므로
    영점이 정수 빈에 떨어지면 정확히 그 빈이 나온다.
    """
    taps = scale_filter(base, half_length).taps
    factor = -(-config.LOBE_OVERSAMPLING * taps.size // period)
    response = np.abs(fft.rfft(taps, factor * period))
    minima = argrelmin(response)[0]
    return minima[0] / factor if minima.size else math.inf


def _largest_satisfying(covers: Callable[[int], bool], lo: int, hi: int) -> Optional[int]:
    """[lo, hi] 에서 covers 가 참인 가장 큰 L (covers 는 단조 감소), 없으면 None"""
    if not covers(lo):
        return None
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if covers(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def _largest_covering_length(base: Filter, period: int, j_star: int) -> int:
    """
    첫 극소 빈이 j* 이상인 가장 큰 L (첫 극소 빈은 L 에 대해 비증가)

    4L+1 ≤ p 인 필터의 주엽이 모두 j* 보다 넓으면 (낮은 빈) 주기로 접을 더 긴 필터에서 찾는다.
    """
    fitting = (period - 1) // 4
    if fitting >= 1 and _first_minimum_bin(base, fitting, period) <= j_star:
        L = _largest_satisfying(lambda n: _first_minimum_bin(base, n, period) >= j_star, 1, fitting)
    else:
        L = _largest_satisfying(lambda n: _lobe_edge(base, n, period) >= j_star,
                                max(fitting, 1), config.MAX_WRAP_FACTOR * period)
    if L is None:
        raise MaskSelectionError(f"no mask length reaches bin {j_star} for p={period}")
    return L


def _verify_zero(w: Filter, h: Filter, period: int, j_star: int) -> None:
    """
    가장 작은 양의 영점이 j* 인지 확인

    출력 스펙트럼은 ((λ_h - ε)/(1 - ε))² 이므로 1..j*-1 에서 λ_h > ε 이면
    그 앞에 영점이 없다.
    """
    values = filter_spectrum(w, period, wrap=True).eigenvalues
    if abs(values[j_star]) >= config.SPECTRAL_ZERO_TOLERANCE:
        raise MaskSelectionError(f"spectrum at bin {j_star} is {values[j_star]:.3e}, not zero")
    base_values = filter_spectrum(h, period, wrap=True).eigenvalues
    early = np.flatnonzero(base_values[1:j_star] <= base_values[j_star])
    if early.size:
        raise MaskSelectionError(f"filter has an earlier zero at bin {early[0] + 1} (target {j_star})")


def zero_aligned_filter(base: Filter, period: int, j_star: int) -> Tuple[Filter, int]:
    """
    j* 를 주엽(main lobe) 위에 두는 가장 큰 L 을 찾고, j* 에 영점 강제

    낮은 빈에서는 결과 필터가 주기보다 길 수 있다 (순환 적용 시 p 로 접힌다).
    j* = 1 이면 접힌 필터는 주기 평균이 된다.

    Returns:
        (필터, L) 튜플
    """
    key = (base.taps.tobytes(), base.half_length, period, j_star)
    with _cache_lock:
        if key in _cache:
            return _cache[key]

    L = _largest_covering_length(base, period, j_star)
    while True:
        h = scale_filter(base, L)
        try:
            w, _ = enforce_spectral_zero(h, period, zero_bin=j_star, wrap=True)
            break
        except NegativityViolationError:
            if L == 1:
                raise MaskSelectionError(f"zero at bin {j_star} is unattainable for p={period}")
            L -= 1
    _verify_zero(w, h, period, j_star)

    with _cache_lock:
        _cache[key] = (w, L)
    return w, L


def clear_cache() -> None:
    """영점 정렬 필터 캐시 비우기"""
    with _cache_lock:
        _cache.clear()


# --- 마스크 실현 ---

def snap_to_peak(s: Signal, estimate: float) -> int:
    """
    추정 빈과 가장 가까운 |DFT(s)| 의 유의미한 극대 빈

    DC 는 제외하고, 최대값의 PEAK_SNAP_THRESHOLD 배 이상인 극대만 후보다.
    거리가 같으면 크기가 큰 쪽을 고른다. 후보가 없으면 반올림한 추정 빈.
    """
    p = s.size
    fallback = int(min(max(round(estimate), 1), p // 2))
    magnitude = np.abs(fft.fft(s.samples))
    reference = float(magnitude.max())
    magnitude[0] = 0.0
    peak = magnitude[1:p // 2 + 1].max()
    # 상수 신호: 반올림 잡음뿐
    if peak <= config.RESIDUAL_TOLERANCE * reference:
        return fallback

    candidates = argrelmax(magnitude, mode='wrap')[0]
    candidates = candidates[(candidates >= 1) & (candidates <= p // 2)]
    candidates = candidates[magnitude[candidates] >= config.PEAK_SNAP_THRESHOLD * peak]
    if candidates.size == 0:
        return fallback
    best = min(candidates, key=lambda j: (abs(j - estimate), -magnitude[j]))
    return int(best)


def realize_mask(
    s: Signal,
    half_length: int,
    base: Filter,
    nu: float,
    snap: bool,
    source: str,
) -> MaskChoice:
    """
    마스크 길이 L 을 영점 정렬 필터로 실현

    목표 빈은 j = nu·p/(2L) 이고, snap 이면 가까운 스펙트럼 피크로 옮긴다.
    영점을 둘 수 없으면 scale_filter(base, L/2) 의 첫 극소에 영점을 강제한다
    (출력 반길이 ≤ L 이라 2L+1 ≤ p 안에 들어간다).
    MaskChoice.half_length 는 실제 필터를 만든 L 이다.
    """
    p = s.size
    if half_length < 1 or 2 * half_length + 1 > p:
        raise MaskSelectionError(f"mask length L={half_length} does not fit period {p}")
    estimate = nu * p / (2.0 * half_length)
    j = snap_to_peak(s, estimate) if snap else int(min(max(round(estimate), 1), p // 2))
    try:
        w, realized = zero_aligned_filter(base, p, j)
        return MaskChoice(filter=w, half_length=realized, zero_bin=j, source=source, requested_length=half_length)
    except ComputationError as e:
        log(f"⚠️ 영점 정렬 실패 (bin {j}): {e} -> 기본 스케일 필터로 대체", 'WARNING')

    realized = max(1, half_length // 2)
    try:
        w, zero_bin = enforce_spectral_zero(scale_filter(base, realized), p)
    except ComputationError as e:
        raise MaskSelectionError(f"cannot realize mask L={half_length} for p={p}: {e}") from e
    return MaskChoice(filter=w, half_length=realized, zero_bin=zero_bin, source='fallback',
                      requested_length=half_length)


# --- 전략 ---

class MaskStrategy(ABC):
    """마스크 선택 전략 추상 기본 클래스"""

    kind = ''

    def __init__(self, nu: float = config.DEFAULT_NU, snap: bool = config.SNAP_TO_PEAK):
        if not nu > 0:
            raise InputError(f"nu must be positive, got {nu}")
        self.nu = nu
        self.snap = snap

    @abstractmethod
    def half_length(self, residual: Signal, imf_index: int) -> int:
        """
        현재 잔차에 대한 마스크 길이 L

        Args:
            residual: 현재 잔차 신호
            imf_index: 추출할 IMF 순번 (0부터)
        """

    def select(self, residual: Signal, imf_index: int, base: Filter) -> MaskChoice:
        """마스크 길이를 정하고 필터로 실현"""
        L = self.half_length(residual, imf_index)
        return realize_mask(residual, L, base, self.nu, self.snap, self.kind)

    def describe(self) -> str:
        return self.kind


class ExtremaStrategy(MaskStrategy):
    """잔차의 극값 개수 기반 전략"""

    kind = 'extrema'

    def half_length(self, residual: Signal, imf_index: int) -> int:
        return mask_from_extrema(residual, self.nu)


class DerivativeStrategy(MaskStrategy):
    """d 차 도함수의 극값 개수 기반 전략"""

    kind = 'derivative'

    def __init__(self, order: int, nu: float = config.DEFAULT_NU, snap: bool = config.SNAP_TO_PEAK):
        super().__init__(nu, snap)
        if order < 1:
            raise InputError(f"derivative order must be >= 1, got {order}")
        self.order = order

    def half_length(self, residual: Signal, imf_index: int) -> int:
        return mask_from_derivative(residual, self.order, self.nu)

    def describe(self) -> str:
        return f"derivative:{self.order}"


class IdealStrategy(MaskStrategy):
    """
    이상적 영점 정렬 전략

    IMF 순서대로 목표 주파수를 하나씩 쓰고, 목표가 다 떨어지면
    잔차의 극값 기반 규칙으로 계속한다.
    """

    kind = 'ideal'

    def __init__(self, frequencies: Sequence[float], nu: float = config.DEFAULT_NU, snap: bool = config.SNAP_TO_PEAK):
        super().__init__(nu, snap)
        if not frequencies:
            raise InputError("ideal strategy needs at least one target frequency")
        if any(not freq > 0 for freq in frequencies):
            raise InputError(f"target frequencies must be positive, got {list(frequencies)}")
        self.frequencies = tuple(float(freq) for freq in frequencies)

    def half_length(self, residual: Signal, imf_index: int) -> int:
        return mask_from_extrema(residual, self.nu)

    def select(self, residual: Signal, imf_index: int, base: Filter) -> MaskChoice:
        if imf_index >= len(self.frequencies):
            return super().select(residual, imf_index, base)
        frequency = self.frequencies[imf_index]
        w, L = mask_ideal(residual.sample_rate, residual.size, base, frequency)
        j = target_bin(residual.sample_rate, residual.size, frequency)
        return MaskChoice(filter=w, half_length=L, zero_bin=j, source=self.kind)

    def describe(self) -> str:
        return 'ideal:' + ','.join(f"{freq:g}" for freq in self.frequencies)


def parse_mask_strategy(text: str, nu: float = config.DEFAULT_NU, snap: bool = config.SNAP_TO_PEAK) -> MaskStrategy:
    """
    'extrema' | 'ideal[:<Hz>[,<Hz>...]]' | 'derivative:<d>' 문자열을 전략으로 변환

    derivative:0 은 극값 기반 전략과 같다.
    주파수 없는 ideal 은 2-톤 실험의 HF 성분 (IDEAL_DEFAULT_FREQUENCY) 을 목표로 한다.
    """
    kind, sep, arg = text.strip().partition(':')
    try:
        if kind == 'extrema' and not sep:
            return ExtremaStrategy(nu, snap)
        if kind == 'ideal' and not sep:
            return IdealStrategy([config.IDEAL_DEFAULT_FREQUENCY], nu, snap)
        if kind == 'ideal' and arg:
            return IdealStrategy([float(x) for x in arg.split(',')], nu, snap)
        if kind == 'derivative' and arg:
            order = int(arg)
            return ExtremaStrategy(nu, snap) if order == 0 else DerivativeStrategy(order, nu, snap)
    except ValueError as e:
        raise InputError(f"invalid mask strategy '{text}': {e}") from e
    raise InputError(f"invalid mask strategy '{text}' (expected extrema, ideal[:<Hz>] or derivative:<d>)")


def base_filter_for(shape: str) -> Filter:
    """스케일링 기준 필터 (반길이 BASE_HALF_LENGTH)"""
    return build_base_filter(shape, config.BASE_HALF_LENGTH)
