"""
산출물 모듈
신호/필터/스펙트럼/c1 격자/임계 곡선 CSV 입출력과 실행 매니페스트 관리
"""
import csv
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from benchmark import C1Grid
from config import config
from errors import InputError
from filters import Filter, FilterSpectrum
from results import ImfDiagnostics
from signal_core import Signal
from utils import log

VERSION = '1.0.0'
MANIFEST_NAME = 'manifest.json'


def fmt(value: float) -> str:
    """CSV 숫자 표기 (17 유효숫자)"""
    return f"{float(value):.{config.CSV_DIGITS}g}"


def _parse_header(line: str, prefix: str = '#') -> Dict[str, str]:
    """'# key=value key=value' 헤더 파싱"""
    if not line.startswith(prefix):
        raise InputError(f"missing header line, got: {line.strip()[:40]!r}")
    fields = {}
    for token in line[len(prefix):].split():
        key, sep, value = token.partition('=')
        if not sep:
            raise InputError(f"malformed header token: {token!r}")
        fields[key] = value
    return fields


def _read_lines(path: str) -> List[str]:
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            return [line for line in fh.read().splitlines() if line.strip()]
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e


def _parse_float(text: str, path: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError as e:
        raise InputError(f"{path}:{line_no}: not a number: {text!r}") from e


# --- Signal ---

def write_signal_csv(path: str, sig: Signal) -> None:
    """`# fs=<float> n=<float>` 헤더 + 한 줄에 샘플 하나"""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(f"# fs={fmt(sig.sample_rate)} n={fmt(sig.duration)}\n")
        fh.writelines(f"{fmt(x)}\n" for x in sig.samples)


def read_signal_csv(path: str) -> Signal:
    """Signal CSV 읽기 (형식 오류는 InputError)"""
    lines = _read_lines(path)
    if not lines:
        raise InputError(f"{path}: empty signal file")
    header = _parse_header(lines[0])
    if 'fs' not in header or 'n' not in header:
        raise InputError(f"{path}: header must define fs and n")
    sample_rate = _parse_float(header['fs'], path, 1)
    duration = _parse_float(header['n'], path, 1)
    samples = [_parse_float(line.strip(), path, i + 2) for i, line in enumerate(lines[1:])]
    return Signal(samples=np.array(samples), sample_rate=sample_rate, duration=duration)


# --- Filter / FilterSpectrum ---

def write_filter_csv(path: str, w: Filter) -> None:
    """`# L=<int> doubly_convolved=<bool>` 헤더 + 한 줄에 탭 하나"""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(f"# L={w.half_length} doubly_convolved={str(w.doubly_convolved).lower()}\n")
        fh.writelines(f"{fmt(t)}\n" for t in w.taps)


def read_filter_csv(path: str) -> Filter:
    lines = _read_lines(path)
    if not lines:
        raise InputError(f"{path}: empty filter file")
    header = _parse_header(lines[0])
    try:
        half_length = int(header['L'])
        doubly = header.get('doubly_convolved', 'false') == 'true'
    except (KeyError, ValueError) as e:
        raise InputError(f"{path}: malformed filter header") from e
    taps = [_parse_float(line.strip(), path, i + 2) for i, line in enumerate(lines[1:])]
    return Filter(taps=np.array(taps), half_length=half_length, doubly_convolved=doubly)


def write_spectrum_csv(path: str, spectrum: FilterSpectrum) -> None:
    """`# p=<int>` 헤더 + `j,lambda` 행"""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(f"# p={spectrum.period}\n")
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(['j', 'lambda'])
        writer.writerows([j, fmt(lam)] for j, lam in enumerate(spectrum.eigenvalues))


def read_spectrum_csv(path: str) -> FilterSpectrum:
    lines = _read_lines(path)
    header = _parse_header(lines[0])
    rows = list(csv.reader(lines[2:]))
    values = [_parse_float(row[1], path, i + 3) for i, row in enumerate(rows)]
    return FilterSpectrum(eigenvalues=np.array(values), period=int(header['p']))


# --- C1Grid / 임계 곡선 ---

def write_grid_csv(path: str, grid: C1Grid, values: Optional[np.ndarray] = None) -> None:
    """
    c1 격자 CSV

    Args:
        path: 출력 경로
        grid: C1Grid
        values: 대신 쓸 [a × f] 행렬 (진단 격자용, None이면 c1)
    """
    matrix = grid.c1 if values is None else values
    meta = ' '.join(f"{k}={v}" for k, v in grid.metadata.items())
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('# axis=a ' + ' '.join(fmt(a) for a in grid.a_values) + '\n')
        fh.write('# axis=f ' + ' '.join(fmt(f) for f in grid.f_values) + '\n')
        fh.write('# axis=phi ' + ' '.join(fmt(phi) for phi in grid.phi_values) + '\n')
        fh.write(f"# meta {meta}\n")
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerows([fmt(v) for v in row] for row in matrix)


def read_grid_csv(path: str) -> C1Grid:
    lines = _read_lines(path)
    axes: Dict[str, np.ndarray] = {}
    metadata: Dict[str, object] = {}
    rows = []
    for i, line in enumerate(lines):
        if line.startswith('# axis='):
            name, *values = line[len('# axis='):].split()
            axes[name] = np.array([_parse_float(v, path, i + 1) for v in values])
        elif line.startswith('# meta'):
            metadata = dict(_parse_header(line, '# meta'))
        else:
            rows.append([_parse_float(v, path, i + 1) for v in line.split(',')])
    if 'a' not in axes or 'f' not in axes:
        raise InputError(f"{path}: grid file needs a and f axes")
    return C1Grid(
        a_values=axes['a'],
        f_values=axes['f'],
        phi_values=axes.get('phi', np.array([])),
        c1=np.array(rows).reshape(axes['a'].size, axes['f'].size),
        metadata=metadata,
    )


def write_curve_csv(path: str, exponent: int, points: np.ndarray) -> None:
    """`e,<exponent>` 헤더 + `f,a` 쌍"""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(['e', exponent])
        writer.writerows([fmt(f), fmt(a)] for f, a in points)


def write_diagnostics_csv(path: str, diagnostics: Sequence[ImfDiagnostics]) -> None:
    """IMF별 진단 CSV"""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(['imf', 'half_length', 'iterations', 'mode', 'increment_norm'])
        for d in diagnostics:
            index, half_length, iterations, mode, increment = d.as_row()
            writer.writerow([index + 1, half_length, iterations, mode, fmt(increment)])


# --- 매니페스트 ---

@dataclass
class RunManifest:
    """실행 매니페스트 (출력 디렉토리마다 하나)"""

    command: str
    configuration: Dict[str, object]
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    duration_seconds: float = 0.0
    version: str = VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=str)

    @classmethod
    def load(cls, path: str) -> 'RunManifest':
        try:
            with open(path, 'r', encoding='utf-8') as fh:
                return cls(**json.load(fh))
        except (OSError, ValueError, TypeError) as e:
            raise InputError(f"cannot load manifest {path}: {e}") from e


class ArtifactWriter:
    """
    출력 디렉토리 관리 클래스

    - 파일 쓰기 및 작성 목록 추적
    - 마지막에 매니페스트 작성
    - 실패 시 작성한 파일 정리
    """

    def __init__(self, out_dir: Optional[str] = None):
        """
        Args:
            out_dir: 출력 디렉토리 (None이면 config 사용)
        """
        self.out_dir = out_dir or config.OUTPUT_DIR
        self.written: List[str] = []
        self._ensure_dir()

    def _ensure_dir(self) -> None:
        """출력 디렉토리 생성"""
        try:
            os.makedirs(self.out_dir, exist_ok=True)
        except OSError as e:
            raise InputError(f"cannot create output directory {self.out_dir}: {e}") from e

    def path(self, name: str) -> str:
        """작성 목록에 등록하고 전체 경로 반환"""
        if name not in self.written:
            self.written.append(name)
        return os.path.join(self.out_dir, name)

    def signal(self, name: str, sig: Signal) -> None:
        write_signal_csv(self.path(name), sig)

    def filter(self, name: str, w: Filter) -> None:
        write_filter_csv(self.path(name), w)

    def spectrum(self, name: str, spectrum: FilterSpectrum) -> None:
        write_spectrum_csv(self.path(name), spectrum)

    def grid(self, name: str, grid: C1Grid, values: Optional[np.ndarray] = None) -> None:
        write_grid_csv(self.path(name), grid, values)

    def curve(self, name: str, exponent: int, points: np.ndarray) -> None:
        write_curve_csv(self.path(name), exponent, points)

    def diagnostics(self, name: str, diagnostics: Sequence[ImfDiagnostics]) -> None:
        write_diagnostics_csv(self.path(name), diagnostics)

    def manifest(self, command: str, configuration: Dict[str, object],
                 inputs: Sequence[str] = (), duration_seconds: float = 0.0) -> RunManifest:
        """매니페스트 작성 (작성한 모든 파일 나열)"""
        manifest = RunManifest(
            command=command,
            configuration=configuration,
            inputs=list(inputs),
            outputs=list(self.written),
            duration_seconds=duration_seconds,
        )
        with open(os.path.join(self.out_dir, MANIFEST_NAME), 'w', encoding='utf-8') as fh:
            fh.write(manifest.to_json() + '\n')
        log(f"📁 {len(self.written)}개 파일 저장: {self.out_dir}")
        return manifest

    def cleanup(self) -> None:
        """작성한 파일 삭제 (실패 시)"""
        for name in self.written:
            try:
                os.remove(os.path.join(self.out_dir, name))
            except OSError:
                pass
        self.written.clear()
