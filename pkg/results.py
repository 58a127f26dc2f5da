"""
결과 모듈
DecompositionResult dataclass로 분해 결과와 IMF별 진단 정보를 캡슐화
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from signal_core import Signal


@dataclass
class ImfDiagnostics:
    """IMF 하나에 대한 내부 루프 진단 정보"""

    index: int
    half_length: int  # 마스크 길이 L (스케일된 기본 필터의 반길이)
    iterations: int  # 사용한 반복 횟수 N (projection 은 0)
    mode: str
    increment_norm: float  # 마지막 증분 ‖s_{N+1} - s_N‖₂
    zero_bin: Optional[int] = None
    strategy: str = ''

    def as_row(self) -> list:
        """진단 CSV 한 줄"""
        return [self.index, self.half_length, self.iterations, self.mode, self.increment_norm]


@dataclass
class DecompositionResult:
    """분해 결과 클래스"""

    source: Signal
    imfs: List[Signal] = field(default_factory=list)
    diagnostics: List[ImfDiagnostics] = field(default_factory=list)
    remainder: Optional[Signal] = None

    # --- 종료 정보 ---
    converged: bool = True
    stop_reason: str = ''

    @property
    def imf_count(self) -> int:
        """추출된 IMF 개수"""
        return len(self.imfs)

    def add_imf(self, imf: Signal, diagnostics: ImfDiagnostics) -> None:
        """IMF 와 진단 정보 추가"""
        self.imfs.append(imf)
        self.diagnostics.append(diagnostics)

    def fold_into_last(self, samples: np.ndarray) -> None:
        """무시할 만한 진동 성분을 마지막 IMF 에 합침"""
        last = self.imfs[-1]
        self.imfs[-1] = last.with_samples(last.samples + samples)

    def finish(self, remainder: Signal, reason: str, converged: bool = True) -> 'DecompositionResult':
        """잔차와 종료 사유 기록"""
        self.remainder = remainder
        self.stop_reason = reason
        self.converged = self.converged and converged
        return self

    def reconstruct(self) -> np.ndarray:
        """Σ IMF + 잔차"""
        total = np.zeros(self.source.size)
        for imf in self.imfs:
            total += imf.samples
        if self.remainder is not None:
            total += self.remainder.samples
        return total

    def reconstruction_error(self) -> float:
        """재구성 상대 오차 ‖Σ IMF + r - s‖ / ‖s‖"""
        scale = self.source.norm() or 1.0
        return float(np.linalg.norm(self.reconstruct() - self.source.samples) / scale)

    def summary(self) -> str:
        """한 줄 요약 (로그용)"""
        lengths = ', '.join(str(d.half_length) for d in self.diagnostics)
        return f"IMF {self.imf_count}개 (L: {lengths or '-'}), 종료: {self.stop_reason}"
