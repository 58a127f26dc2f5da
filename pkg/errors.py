"""
예외 모듈
라이브러리 전체에서 사용하는 예외 계층과 CLI 종료 코드
"""


class IterFiltError(Exception):
    """iterfilt 기본 예외 (exit 3)"""

    exit_code = 3


class InputError(IterFiltError):
    """입력/파라미터 검증 실패 (exit 2)"""

    exit_code = 2


class ComputationError(IterFiltError):
    """계산 중 계약 위반 (exit 3)"""


class FilterTooLongError(ComputationError):
    """필터 길이 2L+1 이 주기 p 보다 김"""


class NoSpectralMinimumError(ComputationError):
    """양의 주파수 구간에서 스펙트럼 극소가 없음"""


class NegativityViolationError(ComputationError):
    """영점 강제 후 탭이 음수가 됨 (ε ≥ 중심 탭)"""


class SpectrumNotRealError(ComputationError):
    """필터 스펙트럼 허수부가 허용치를 넘음 (대칭성 오류)"""


class NonConvergentError(ComputationError):
    """고유값이 [0, 2] 밖에 있어 내부 루프가 수렴하지 않음"""


class MaskSelectionError(ComputationError):
    """마스크 길이 선택 실패 (극값 부족, 영점 도달 불가 등)"""


class ZeroDenominatorError(ComputationError):
    """c1 분모가 0 (a = 0)"""
