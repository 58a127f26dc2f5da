"""
DIF 엔진 모듈
이산 Iterative Filtering 의 내부/외부 루프
(명시적 반복, 스펙트럼 사영, 유한 반복 스펙트럼 거듭제곱) 와 N₀ 정지 상한
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from scipy import fft

from config import config
from errors import InputError, NonConvergentError
from filters import Filter, filter_spectrum
from mask_selection import ExtremaStrategy, MaskChoice, MaskStrategy, base_filter_for
from results import DecompositionResult, ImfDiagnostics
from signal_core import EXTENSION_MODES, Signal, count_extrema, extend_signal, trim_signal
from utils import log

MODES = ('iterative', 'direct_projection', 'direct_powered')
MODE_ALIASES = {'projection': 'direct_projection', 'powered': 'direct_powered'}


@dataclass(frozen=True)
class BoundarySpec:
    """경계 확장 설정 (pad 가 None 이면 마스크 길이로 자동 결정)"""

    mode: str
    pad: Optional[int] = None

    def __post_init__(self):
        if self.mode not in EXTENSION_MODES:
            raise InputError(f"unknown boundary mode: {self.mode}")
        if self.pad is not None and self.pad < 0:
            raise InputError(f"boundary pad must be >= 0, got {self.pad}")

    def describe(self) -> str:
        return self.mode if self.pad is None else f"{self.mode}:{self.pad}"


def parse_boundary(text: Optional[str]) -> Optional[BoundarySpec]:
    """'none' | '<mode>' | '<mode>:<pad>' 파싱"""
    if text is None or text == 'none':
        return None
    mode, _, pad = text.partition(':')
    try:
        return BoundarySpec(mode=mode, pad=int(pad) if pad else None)
    except ValueError as e:
        raise InputError(f"invalid boundary '{text}': {e}") from e


@dataclass
class DecompositionConfig:
    """
    분해 설정

    Attributes:
        delta: 내부 루프 정지 임계값 δ
        max_iterations: 내부 루프 최대 반복 횟수
        mode: 'iterative' | 'direct_projection' | 'direct_powered'
        zero_tolerance: 고유값 0 판정 허용치 (None이면 min(1e-13·p, 1e-6))
        mask_strategy: 마스크 선택 전략 (None이면 극값 기반)
        boundary: 경계 확장 (None이면 주기 신호로 취급)
        filter_shape: 기본 필터 모양
        max_imfs: IMF 개수 상한
    """

    delta: float = config.STANDARD_DELTA
    max_iterations: int = config.STANDARD_MAX_ITERATIONS
    mode: str = 'iterative'
    zero_tolerance: Optional[float] = None
    mask_strategy: Optional[MaskStrategy] = None
    boundary: Optional[BoundarySpec] = None
    filter_shape: str = 'triangular'
    max_imfs: int = field(default_factory=lambda: config.MAX_IMFS)

    def __post_init__(self):
        self.mode = MODE_ALIASES.get(self.mode, self.mode)
        if self.mode not in MODES:
            raise InputError(f"unknown mode: {self.mode}")
        if not self.delta > 0:
            raise InputError(f"delta must be positive, got {self.delta}")
        if self.max_iterations < 1:
            raise InputError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.zero_tolerance is not None and not 0 < self.zero_tolerance <= config.ZERO_TOLERANCE_CAP:
            raise InputError(f"zero_tolerance must lie in (0, 1e-6], got {self.zero_tolerance}")
        if self.max_imfs < 1:
            raise InputError(f"max_imfs must be >= 1, got {self.max_imfs}")

    @classmethod
    def from_preset(cls, name: str, **overrides) -> 'DecompositionConfig':
        """'standard' / 'stress' 프리셋으로 생성"""
        try:
            delta, max_iterations, mode = config.preset(name)
        except ValueError as e:
            raise InputError(str(e)) from e
        return cls(delta=delta, max_iterations=max_iterations, mode=mode, **overrides)

    def tolerance_for(self, period: int) -> float:
        """주기 p 에 대한 실제 0 판정 허용치"""
        return self.zero_tolerance if self.zero_tolerance is not None else config.zero_tolerance(period)

    def strategy(self) -> MaskStrategy:
        return self.mask_strategy or ExtremaStrategy()

    def describe(self) -> dict:
        """매니페스트용 설정 딕셔너리"""
        return {
            'delta': self.delta,
            'max_iterations': self.max_iterations,
            'mode': self.mode,
            'zero_tolerance': self.zero_tolerance,
            'mask': self.strategy().describe(),
            'nu': self.strategy().nu,
            'boundary': self.boundary.describe() if self.boundary else 'none',
            'filter': self.filter_shape,
            'max_imfs': self.max_imfs,
        }


# --- 스펙트럼 공통 ---

def _spectral_setup(s: Signal, w: Filter, zero_tolerance: float,
                    wrap: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """신호 DFT 와 필터 고유값, 수렴 조건 (λ ∈ [0, 2]) 검사"""
    spectrum = filter_spectrum(w, s.size, wrap)
    if not spectrum.is_convergent(zero_tolerance):
        lam = spectrum.eigenvalues
        raise NonConvergentError(
            f"filter eigenvalues span [{lam.min():.3e}, {lam.max():.3e}], outside [0, 2]"
        )
    return fft.fft(s.samples), spectrum.eigenvalues


def _to_signal(s: Signal, s_hat: np.ndarray) -> Signal:
    return s.with_samples(fft.ifft(s_hat).real)


def moving_average_step(s: Signal, w: Filter) -> Signal:
    """s - W s (순환 합성곱), DFT 영역에서 (1 - λ_j) 곱"""
    lam = filter_spectrum(w, s.size).eigenvalues
    return _to_signal(s, (1.0 - lam) * fft.fft(s.samples))


def _iterate(s_hat: np.ndarray, lam: np.ndarray, delta: float, max_iterations: int) -> Tuple[np.ndarray, int, float]:
    """‖s_{m+1} - s_m‖₂ < δ 또는 m = max_iterations 까지 반복 (Parseval 로 노름 계산)"""
    scale = math.sqrt(lam.size)
    increment = math.inf
    m = 0
    while m < max_iterations:
        step = lam * s_hat
        s_hat = s_hat - step
        m += 1
        increment = float(np.linalg.norm(step)) / scale
        if increment < delta:
            break
    return s_hat, m, increment


def inner_loop_iterative(s: Signal, w: Filter, cfg: DecompositionConfig) -> Tuple[Signal, int]:
    """
    명시적 반복 내부 루프

    Args:
        s: 입력 신호
        w: 마스크 필터 (루프 동안 고정)
        cfg: delta, max_iterations, zero_tolerance 사용

    Returns:
        (마지막 반복값, 반복 횟수) 튜플
    """
    s_hat, lam = _spectral_setup(s, w, cfg.tolerance_for(s.size))
    s_hat, m, _ = _iterate(s_hat, lam, cfg.delta, cfg.max_iterations)
    return _to_signal(s, s_hat), m


def inner_loop_direct_projection(s: Signal, w: Filter, zero_tolerance: float) -> Signal:
    """m → ∞ 극한: |λ_j| ≤ 허용치인 푸리에 모드로의 사영"""
    s_hat, lam = _spectral_setup(s, w, zero_tolerance)
    return _to_signal(s, np.where(np.abs(lam) <= zero_tolerance, s_hat, 0.0))


def inner_loop_direct_powered(s: Signal, w: Filter, iterations: int) -> Signal:
    """N 번 반복의 닫힌 형태: (1 - λ_j)^N ŝ_j"""
    if iterations < 1:
        raise InputError(f"iterations must be >= 1, got {iterations}")
    s_hat, lam = _spectral_setup(s, w, config.zero_tolerance(s.size))
    return _to_signal(s, np.power(1.0 - lam, iterations) * s_hat)


def _powered_increment(s_hat: np.ndarray, lam: np.ndarray, iterations: int) -> float:
    """N 번째 증분 노름 ‖λ (1-λ)^N ŝ‖₂ (닫힌 형태)"""
    step = lam * np.power(1.0 - lam, iterations) * s_hat
    return float(np.linalg.norm(step)) / math.sqrt(lam.size)


# --- N₀ 상한 ---

_EXACT_LIMIT = 64


def _sequence_below(n: int, rhs: float) -> bool:
    """N^N / (N+1)^(N+1) < rhs"""
    if math.isinf(rhs):
        return True
    if n <= _EXACT_LIMIT:
        return Fraction(n ** n, (n + 1) ** (n + 1)) < Fraction(rhs)
    return -math.log(n + 1) - n * math.log1p(1.0 / n) < math.log(rhs)


def compute_n0_bound(s_spectrum_inf_norm: float, p: int, k_zero_count: int, delta: float) -> int:
    """
    N^N/(N+1)^(N+1) < δ / (‖s̃‖∞ √(p-1-k)) 를 만족하는 최소 N₀

    Args:
        s_spectrum_inf_norm: 정규화 DFT 의 최대 절댓값 ‖s̃‖∞
        p: 주기
        k_zero_count: 0 고유값 개수 k
        delta: 정지 임계값 δ

    Returns:
        N₀ ≥ 1
    """
    if not delta > 0:
        raise InputError(f"delta must be positive, got {delta}")
    dof = p - 1 - k_zero_count
    if dof < 1:
        log(f"⚠️ 스펙트럼이 모두 소거됨 (p={p}, k={k_zero_count}) -> N₀ = 1", 'DEBUG')
        return 1
    if s_spectrum_inf_norm <= 0:
        return 1
    rhs = delta / (s_spectrum_inf_norm * math.sqrt(dof))
    if _sequence_below(1, rhs):
        return 1

    # 좌변은 N 에 대해 감소, 배로 늘려 구간을 찾고 이분 탐색
    lo, hi = 1, 2
    while not _sequence_below(hi, rhs):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _sequence_below(mid, rhs):
            hi = mid
        else:
            lo = mid
    return hi


def n0_for(s: Signal, w: Filter, delta: float, zero_tolerance: float, wrap: bool = False) -> int:
    """신호와 필터로부터 N₀ 계산"""
    spectrum = filter_spectrum(w, s.size, wrap)
    inf_norm = float(np.max(np.abs(fft.fft(s.samples)))) / math.sqrt(s.size)
    return compute_n0_bound(inf_norm, s.size, spectrum.zero_count(zero_tolerance), delta)


# --- 외부 루프 ---

def _run_inner_loop(s: Signal, w: Filter, cfg: DecompositionConfig) -> Tuple[Signal, int, float]:
    """
    설정된 모드로 IMF 하나 추출 → (IMF, 반복 횟수, 마지막 증분 노름)

    실현된 마스크는 주기보다 길 수 있으므로 필터를 p 로 접어서 적용한다.
    """
    tolerance = cfg.tolerance_for(s.size)
    s_hat, lam = _spectral_setup(s, w, tolerance, wrap=True)

    if cfg.mode == 'direct_projection':
        imf_hat = np.where(np.abs(lam) <= tolerance, s_hat, 0.0)
        return _to_signal(s, imf_hat), 0, 0.0

    if cfg.mode == 'direct_powered':
        n0 = n0_for(s, w, cfg.delta, tolerance, wrap=True)
        iterations = min(n0, cfg.max_iterations)
        imf_hat = np.power(1.0 - lam, iterations) * s_hat
        return _to_signal(s, imf_hat), iterations, _powered_increment(s_hat, lam, iterations)

    imf_hat, iterations, increment = _iterate(s_hat, lam, cfg.delta, cfg.max_iterations)
    return _to_signal(s, imf_hat), iterations, increment


def _extract(residual: Signal, index: int, cfg: DecompositionConfig, base: Filter) -> Tuple[Signal, MaskChoice, int, float]:
    """마스크 선택 + (경계 확장) + 내부 루프 + (잘라내기)"""
    strategy = cfg.strategy()
    choice = strategy.select(residual, index, base)
    if cfg.boundary is None:
        imf, iterations, increment = _run_inner_loop(residual, choice.filter, cfg)
        return imf, choice, iterations, increment

    pad = cfg.boundary.pad
    if pad is None:
        pad = min(2 * choice.half_length, residual.size)
    extended = extend_signal(residual, pad, cfg.boundary.mode)
    choice = strategy.select(extended, index, base)
    imf, iterations, increment = _run_inner_loop(extended, choice.filter, cfg)
    return trim_signal(imf, pad), choice, iterations, increment


def decompose(s: Signal, cfg: Optional[DecompositionConfig] = None) -> DecompositionResult:
    """
    DIF 외부 루프

    잔차의 극값이 2개 미만이 될 때까지 마스크 선택, 내부 루프, IMF 추가, 빼기를 반복한다.

    Args:
        s: 입력 신호 (p ≥ 4)
        cfg: 분해 설정

    Returns:
        DecompositionResult
    """
    cfg = cfg or DecompositionConfig()
    if s.size < 4:
        raise InputError(f"decomposition needs at least 4 samples, got {s.size}")

    base = base_filter_for(cfg.filter_shape)
    result = DecompositionResult(source=s)
    residual = s
    scale = s.norm()

    while result.imf_count < cfg.max_imfs:
        if count_extrema(residual) < 2:
            return result.finish(residual, 'extrema')

        mean = float(residual.samples.mean())
        oscillation = residual.samples - mean
        if np.linalg.norm(oscillation) <= config.RESIDUAL_TOLERANCE * scale:
            if result.imf_count:
                result.fold_into_last(oscillation)
            else:
                result.add_imf(residual.with_samples(oscillation), ImfDiagnostics(0, 0, 0, 'residual', 0.0))
            return result.finish(residual.with_samples(np.full(residual.size, mean)), 'negligible')

        index = result.imf_count
        imf, choice, iterations, increment = _extract(residual, index, cfg, base)

        if np.linalg.norm(imf.samples) <= config.RESIDUAL_TOLERANCE * scale:
            log(f"⚠️ IMF {index + 1} 이 비어 있음, 분해 중단", 'WARNING')
            return result.finish(residual, 'stalled', converged=False)

        result.add_imf(imf, ImfDiagnostics(
            index=index,
            half_length=choice.half_length,
            iterations=iterations,
            mode=cfg.mode,
            increment_norm=increment,
            zero_bin=choice.zero_bin,
            strategy=choice.source,
        ))
        log(f"IMF {index + 1}: L={choice.half_length}, bin={choice.zero_bin}, N={iterations}", 'DEBUG')
        residual = residual.with_samples(residual.samples - imf.samples)

    if count_extrema(residual) >= 2 and cfg.max_imfs >= config.MAX_IMFS:
        log(f"⚠️ IMF 상한 {cfg.max_imfs}개 도달", 'WARNING')
    return result.finish(residual, 'imf-limit')
