"""
설정 관리 모듈
환경변수와 상수를 통합 관리하는 Config 클래스
"""
import os
from dataclasses import dataclass, field
from typing import Tuple

from dotenv import load_dotenv

# .env 파일이 있으면 환경변수로 로드
load_dotenv()


def _env_int(name: str, default: int) -> int:
    """정수 환경변수 읽기 (잘못된 값이면 기본값)"""
    try:
        return int(os.getenv(name, str(default)))
    except ValueError:
        return default


@dataclass
class Config:
    """iterfilt 설정 클래스"""

    # --- 실행 환경 설정 ---
    THREADS: int = field(default_factory=lambda: _env_int('ITERFILT_THREADS', 0))  # 0 = 자동
    OUTPUT_DIR: str = field(default_factory=lambda: os.getenv('ITERFILT_OUTPUT_DIR', './output'))
    LOG_LEVEL: str = field(default_factory=lambda: os.getenv('ITERFILT_LOG_LEVEL', 'INFO').upper())

    # --- 내부 루프 (정지 조건) ---
    STANDARD_DELTA: float = 1e-3
    STANDARD_MAX_ITERATIONS: int = 10_000
    STRESS_DELTA: float = 1e-20
    STRESS_MAX_ITERATIONS: int = 10_000_000
    ZERO_TOLERANCE_PER_SAMPLE: float = 1e-13  # 고유값 0 판정 허용치 = 이 값 * p
    ZERO_TOLERANCE_CAP: float = 1e-6

    # --- 외부 루프 ---
    MAX_IMFS: int = 64  # IMF 개수 상한
    RESIDUAL_TOLERANCE: float = 1e-12  # 잔차 진동 성분이 이보다 작으면 종료

    # --- 마스크 선택 ---
    DEFAULT_NU: float = 1.6  # 극값 기반 마스크 배율
    BASE_HALF_LENGTH: int = 64  # 스케일링 기준 필터 반길이
    PEAK_SNAP_THRESHOLD: float = 1e-6  # 스펙트럼 피크 스냅 상대 임계값
    SNAP_TO_PEAK: bool = True
    IDEAL_DEFAULT_FREQUENCY: float = 1.0  # 주파수 없는 ideal 전략의 목표 (2-톤 HF 성분 cos(2πx))
    LOBE_OVERSAMPLING: int = 16  # 주엽 끝 탐색용 DTFT 오버샘플링
    MAX_WRAP_FACTOR: int = 2  # 주기로 접는 필터의 최대 반길이 = 이 값 * p

    # --- 필터 검증 허용치 ---
    SYMMETRY_TOLERANCE: float = 1e-14
    NEGATIVITY_TOLERANCE: float = 1e-14
    MASS_TOLERANCE: float = 1e-12
    IMAG_TOLERANCE: float = 1e-12
    SPECTRAL_ZERO_TOLERANCE: float = 1e-12  # 강제된 영점 검증

    # --- 벤치마크 기본값 ---
    BENCH_DURATION: float = 100.0  # n (초)
    BENCH_SAMPLE_RATE: float = 20.0  # Fs (samples/s)
    BENCH_A_MIN: float = 1e-2
    BENCH_A_MAX: float = 1e2
    BENCH_F_MIN: float = 0.05
    BENCH_F_MAX: float = 0.95
    BENCH_GRID_A: int = 48
    BENCH_GRID_F: int = 48
    BENCH_PHI_COUNT: int = 16
    BENCH_SINGLE_PHI: float = 3.0  # 단일 위상 모드 (φ=3)
    BENCH_IRRATIONAL_OFFSET: float = (2 ** 0.5 - 1) / 100  # f_irr = f * (1 + offset)
    BENCH_CRITICAL_EXPONENTS: Tuple[int, ...] = (1, 2, 3, 4)
    BENCH_FAIL_RATIO: float = 0.5  # 실패 셀 비율이 이보다 크면 exit 3
    FAILED_CELL: float = -1.0  # 실패 셀 표식 (NaN 대신)

    # --- 출력 설정 ---
    CSV_DIGITS: int = 17  # 유효숫자

    def zero_tolerance(self, period: int) -> float:
        """주기 p에 대한 고유값 0 판정 허용치"""
        return min(self.ZERO_TOLERANCE_PER_SAMPLE * period, self.ZERO_TOLERANCE_CAP)

    def preset(self, name: str) -> Tuple[float, int, str]:
        """
        프리셋 값 반환

        Args:
            name: 'standard' 또는 'stress'

        Returns:
            (delta, max_iterations, mode) 튜플
        """
        if name == 'standard':
            return self.STANDARD_DELTA, self.STANDARD_MAX_ITERATIONS, 'iterative'
        if name == 'stress':
            return self.STRESS_DELTA, self.STRESS_MAX_ITERATIONS, 'direct_powered'
        raise ValueError(f"unknown preset: {name}")

    def validate(self) -> bool:
        """설정값 범위 검증"""
        checks = [
            self.THREADS >= 0,
            self.STANDARD_DELTA > 0 and self.STRESS_DELTA > 0,
            self.MAX_IMFS >= 1,
            self.DEFAULT_NU > 0,
            self.LOBE_OVERSAMPLING >= 1 and self.MAX_WRAP_FACTOR >= 1,
            0 < self.ZERO_TOLERANCE_CAP <= 1e-6,
            self.BENCH_F_MIN > 0 and self.BENCH_F_MAX < 1,
            self.LOG_LEVEL in ('DEBUG', 'INFO', 'WARNING', 'ERROR'),
        ]
        return all(checks)


# 전역 설정 인스턴스
config = Config()
