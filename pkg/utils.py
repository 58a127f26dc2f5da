"""
유틸리티 모듈
로깅, 타이머, 헬퍼 함수 등
"""
import os
import sys
import time
from datetime import datetime
from typing import Optional

from config import config

_LEVELS = {'DEBUG': 10, 'INFO': 20, 'WARNING': 30, 'ERROR': 40}


def log(msg: str, level: str = 'INFO') -> None:
    """타임스탬프 포함 로그 출력 (stderr)"""
    if _LEVELS.get(level, 20) < _LEVELS.get(config.LOG_LEVEL, 20):
        return
    timestamp = datetime.now().strftime('%H:%M:%S')
    print(f"[{timestamp}] {msg}", file=sys.stderr, flush=True)


def resolve_thread_count(requested: Optional[int] = None) -> int:
    """
    병렬 작업자 수 결정

    Args:
        requested: 요청 스레드 수 (None이면 config.THREADS, 0이면 자동)

    Returns:
        1 이상의 작업자 수
    """
    count = config.THREADS if requested is None else requested
    if count <= 0:
        count = os.cpu_count() or 1
    return max(1, count)


class Stopwatch:
    """
    경과 시간 측정 클래스

    컨텍스트 매니저 지원:
        with Stopwatch() as sw:
            ...
        sw.elapsed
    """

    def __init__(self):
        self.start_time = 0.0
        self.end_time: Optional[float] = None

    def __enter__(self) -> 'Stopwatch':
        self.start_time = time.perf_counter()
        self.end_time = None
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.end_time = time.perf_counter()

    @property
    def elapsed(self) -> float:
        """경과 시간 (초)"""
        end = self.end_time if self.end_time is not None else time.perf_counter()
        return end - self.start_time
