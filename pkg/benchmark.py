"""
벤치마크 모듈
두 톤 신호 (a, f, φ) 격자 스윕, c1 지표 계산, 임계 곡선 af^e = 1
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from config import config
from dif_engine import BoundarySpec, DecompositionConfig, decompose, parse_boundary
from errors import InputError, IterFiltError, MaskSelectionError, ZeroDenominatorError
from mask_selection import parse_mask_strategy
from signal_core import (
    Signal,
    TwoToneParams,
    generate_two_tone,
    high_frequency_component,
    low_frequency_component,
)
from utils import log, resolve_thread_count

FREQUENCY_MODES = ('rational', 'irrational')


# --- 축 ---

def amplitude_axis(count: int = config.BENCH_GRID_A,
                   a_min: float = config.BENCH_A_MIN,
                   a_max: float = config.BENCH_A_MAX) -> np.ndarray:
    """로그 간격 진폭 축"""
    if count < 1 or not 0 < a_min <= a_max:
        raise InputError(f"invalid amplitude axis: count={count}, range=[{a_min}, {a_max}]")
    return np.logspace(np.log10(a_min), np.log10(a_max), count)


def frequency_axis(count: int = config.BENCH_GRID_F,
                   mode: str = 'rational',
                   duration: float = config.BENCH_DURATION,
                   f_min: float = config.BENCH_F_MIN,
                   f_max: float = config.BENCH_F_MAX) -> np.ndarray:
    """
    LF 주파수 축

    Args:
        count: 점 개수
        mode: 'rational' 이면 1/n 배수로 스냅, 'irrational' 이면 격자 밖으로 이동
        duration: 신호 길이 n (DFT 해상도 1/n)

    Returns:
        (0, 1) 안의 주파수 배열
    """
    if count < 1 or not 0 < f_min <= f_max < 1:
        raise InputError(f"invalid frequency axis: count={count}, range=[{f_min}, {f_max}]")
    base = np.linspace(f_min, f_max, count)
    if mode == 'rational':
        snapped = np.round(base * duration) / duration
        return np.clip(snapped, 1.0 / duration, 1.0 - 1.0 / duration)
    if mode == 'irrational':
        return base * (1.0 + config.BENCH_IRRATIONAL_OFFSET)
    raise InputError(f"unknown frequency mode: {mode}")


def phase_axis(count: Optional[int] = config.BENCH_PHI_COUNT, single: Optional[float] = None) -> np.ndarray:
    """φ 평균용 [0, 2π) 균등 위상, 또는 단일 위상"""
    if single is not None:
        return np.array([float(single)])
    if count is None or count < 1:
        raise InputError(f"phase count must be >= 1, got {count}")
    return 2.0 * np.pi * np.arange(count) / count


# --- 지표 ---

def c1_metric(imf1: Signal, params: TwoToneParams, duration: float, sample_rate: float) -> float:
    """
    분리 품질 c1 = ‖IMF₁ - cos(2πx)‖ / ‖a cos(2πfx + φ)‖

    Returns:
        0 이면 완전 분리, 약 1 이면 분리 안 됨
    """
    if params.a == 0:
        raise ZeroDenominatorError("c1 is undefined for a = 0")
    hf = high_frequency_component(duration, sample_rate)
    lf = low_frequency_component(params, duration, sample_rate)
    if imf1.size != hf.size:
        raise InputError(f"IMF length {imf1.size} does not match reference length {hf.size}")
    denominator = float(np.linalg.norm(lf))
    if denominator == 0.0:
        raise ZeroDenominatorError("LF component has zero norm")
    return float(np.linalg.norm(imf1.samples - hf)) / denominator


# --- 스윕 ---

@dataclass
class SweepSettings:
    """스윕 실험 설정"""

    strategy: str = 'extrema'
    filter_shape: str = 'triangular'
    duration: float = config.BENCH_DURATION
    sample_rate: float = config.BENCH_SAMPLE_RATE
    mode: str = 'direct_projection'
    delta: float = config.STANDARD_DELTA
    max_iterations: int = config.STANDARD_MAX_ITERATIONS
    nu: float = config.DEFAULT_NU
    frequency_mode: str = 'rational'
    boundary: Optional[str] = None  # None 이면 irrational 모드에서만 reflect-even
    threads: Optional[int] = None

    def boundary_spec(self) -> Optional[BoundarySpec]:
        if self.boundary is None:
            return BoundarySpec('reflect-even') if self.frequency_mode == 'irrational' else None
        return parse_boundary(self.boundary)

    def decomposition_config(self) -> DecompositionConfig:
        """셀 하나에 쓰는 분해 설정 (IMF₁ 만 필요)"""
        if self.frequency_mode not in FREQUENCY_MODES:
            raise InputError(f"unknown frequency mode: {self.frequency_mode}")
        return DecompositionConfig(
            delta=self.delta,
            max_iterations=self.max_iterations,
            mode=self.mode,
            mask_strategy=parse_mask_strategy(self.strategy, self.nu),
            boundary=self.boundary_spec(),
            filter_shape=self.filter_shape,
            max_imfs=1,
        )

    def metadata(self) -> Dict[str, object]:
        boundary = self.boundary_spec()
        return {
            'strategy': self.strategy,
            'filter': self.filter_shape,
            'n': self.duration,
            'Fs': self.sample_rate,
            'mode': self.mode,
            'delta': self.delta,
            'iterations': self.max_iterations,
            'nu': self.nu,
            'frequencies': self.frequency_mode,
            'boundary': boundary.describe() if boundary else 'none',
        }


@dataclass
class C1Grid:
    """
    c1 격자 [a × f]

    실패한 셀은 FAILED_CELL (-1) 로 기록된다.
    """

    a_values: np.ndarray
    f_values: np.ndarray
    phi_values: np.ndarray
    c1: np.ndarray
    metadata: Dict[str, object] = field(default_factory=dict)
    half_lengths: Optional[np.ndarray] = None
    iterations: Optional[np.ndarray] = None

    def __post_init__(self):
        expected = (len(self.a_values), len(self.f_values))
        if self.c1.shape != expected:
            raise InputError(f"c1 grid shape {self.c1.shape} does not match axes {expected}")

    @property
    def failed(self) -> np.ndarray:
        """실패 셀 마스크"""
        return self.c1 == config.FAILED_CELL

    @property
    def failed_ratio(self) -> float:
        return float(self.failed.mean()) if self.c1.size else 0.0

    def product_grid(self, exponent: int = 1) -> np.ndarray:
        """셀별 a · f^e"""
        return np.outer(self.a_values, np.power(self.f_values, exponent))


def _run_cell(a: float, f: float, phi_values: Sequence[float], settings: SweepSettings) -> Tuple[float, int, int]:
    """한 (a, f) 셀의 φ 평균 c1, IMF₁ 마스크 길이, 반복 횟수"""
    cfg = settings.decomposition_config()
    scores = []
    half_length = iterations = 0
    for phi in phi_values:
        params = TwoToneParams(a=a, f=f, phi=phi)
        result = decompose(generate_two_tone(params, settings.duration, settings.sample_rate), cfg)
        if not result.imfs:
            raise MaskSelectionError(f"no IMF extracted (stop: {result.stop_reason})")
        scores.append(c1_metric(result.imfs[0], params, settings.duration, settings.sample_rate))
        half_length = result.diagnostics[0].half_length
        iterations = result.diagnostics[0].iterations
    return float(np.mean(scores)), half_length, iterations


def sweep_grid(a_values: Sequence[float],
               f_values: Sequence[float],
               phi_values: Sequence[float],
               settings: Optional[SweepSettings] = None) -> C1Grid:
    """
    (a, f) 격자 스윕

    셀들은 서로 독립이라 스레드 풀에서 실행하고, 결과는 인덱스 순서로 모은다.
    실패한 셀은 -1 로 기록하고 스윕은 계속한다.

    Args:
        a_values: 진폭 축
        f_values: 주파수 축
        phi_values: 위상 (여러 개면 평균)
        settings: 실험 설정

    Returns:
        C1Grid
    """
    settings = settings or SweepSettings()
    a_values = np.asarray(a_values, dtype=float)
    f_values = np.asarray(f_values, dtype=float)
    phi_values = np.asarray(phi_values, dtype=float)
    if a_values.size == 0 or f_values.size == 0 or phi_values.size == 0:
        raise InputError("sweep axes must be nonempty")
    settings.decomposition_config()

    shape = (a_values.size, f_values.size)
    c1 = np.full(shape, config.FAILED_CELL)
    half_lengths = np.zeros(shape, dtype=int)
    iterations = np.zeros(shape, dtype=int)
    cells = [(i, j) for i in range(shape[0]) for j in range(shape[1])]
    workers = resolve_thread_count(settings.threads)

    log(f"📊 스윕 시작: {shape[0]}x{shape[1]} 셀, φ {phi_values.size}개, 전략 {settings.strategy}, 스레드 {workers}")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            cell: pool.submit(_run_cell, a_values[cell[0]], f_values[cell[1]], phi_values, settings)
            for cell in cells
        }
        for (i, j), future in futures.items():
            try:
                c1[i, j], half_lengths[i, j], iterations[i, j] = future.result()
            except IterFiltError as e:
                log(f"❌ 셀 실패 (a={a_values[i]:.4g}, f={f_values[j]:.4g}): {e}", 'WARNING')

    grid = C1Grid(
        a_values=a_values,
        f_values=f_values,
        phi_values=phi_values,
        c1=c1,
        metadata=settings.metadata(),
        half_lengths=half_lengths,
        iterations=iterations,
    )
    log(f"✅ 스윕 완료: 실패 셀 {int(grid.failed.sum())}개, 분리 비율 {separable_fraction(grid):.3f}")
    return grid


def separable_fraction(grid: C1Grid, threshold: float = 0.1) -> float:
    """유효 셀 중 c1 < threshold 인 비율"""
    valid = ~grid.failed
    if not valid.any():
        return 0.0
    return float((grid.c1[valid] < threshold).mean())


def separable_count(grid: C1Grid, threshold: float = 0.1) -> int:
    """c1 < threshold 인 유효 셀 개수"""
    return int(((grid.c1 < threshold) & ~grid.failed).sum())


def critical_curves(a_values: Sequence[float],
                    f_values: Sequence[float],
                    exponents: Sequence[int] = config.BENCH_CRITICAL_EXPONENTS) -> Dict[int, np.ndarray]:
    """
    임계 곡선 a = f^(-e)

    Returns:
        {e: (k, 2) 배열 [f, a]} (a 는 진폭 축 범위로 잘림)
    """
    if len(exponents) == 0:
        raise InputError("critical curves need at least one exponent")
    a_values = np.asarray(a_values, dtype=float)
    f_values = np.asarray(f_values, dtype=float)
    curves: Dict[int, np.ndarray] = {}
    for e in exponents:
        a = np.clip(np.power(f_values, -float(e)), a_values.min(), a_values.max())
        curves[int(e)] = np.column_stack((f_values, a))
    return curves
