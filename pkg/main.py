"""
iterfilt
이산 Iterative Filtering 신호 분해 도구

분해 (decompose), 두 톤 벤치마크 (benchmark), 필터 설계 (filter-design),
테스트 신호 생성 (generate) 명령 제공
"""
import argparse
import os
import signal
import sys
import threading
from typing import List, Optional, Tuple

from artifacts import ArtifactWriter, read_signal_csv
from benchmark import (
    SweepSettings,
    amplitude_axis,
    critical_curves,
    frequency_axis,
    phase_axis,
    sweep_grid,
)
from config import config
from dif_engine import DecompositionConfig, decompose, parse_boundary
from errors import InputError, IterFiltError
from filters import (
    FILTER_SHAPES,
    build_base_filter,
    double_convolve,
    enforce_spectral_zero,
    filter_spectrum,
    scale_filter,
)
from mask_selection import parse_mask_strategy
from signal_core import TwoToneParams, generate_two_tone
from utils import Stopwatch, log

CLI_MODES = {'iterative': 'iterative', 'projection': 'direct_projection', 'powered': 'direct_powered'}


def parse_grid(text: str) -> Tuple[int, int]:
    """'<na>x<nf>' 파싱"""
    try:
        na, nf = (int(part) for part in text.lower().split('x'))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 8x8, got {text!r}")
    if na < 1 or nf < 1:
        raise argparse.ArgumentTypeError(f"grid dimensions must be positive, got {text!r}")
    return na, nf


def build_parser() -> argparse.ArgumentParser:
    """명령행 파서 구성"""
    parser = argparse.ArgumentParser(prog='iterfilt', description='Discrete Iterative Filtering toolkit')
    sub = parser.add_subparsers(dest='command', required=True)

    # --- decompose ---
    p = sub.add_parser('decompose', help='decompose a signal CSV into IMFs')
    p.add_argument('input', help='signal CSV (# fs=<Fs> n=<n> header)')
    p.add_argument('--out', default=None, help='output directory')
    p.add_argument('--preset', choices=('standard', 'stress'), default='standard')
    p.add_argument('--delta', type=float, default=None)
    p.add_argument('--max-iter', type=int, default=None)
    p.add_argument('--mode', choices=tuple(CLI_MODES), default=None)
    p.add_argument('--mask', default='extrema', help='extrema | ideal[:<Hz>[,<Hz>...]] | derivative:<d>')
    p.add_argument('--filter', choices=FILTER_SHAPES, default='triangular')
    p.add_argument('--nu', type=float, default=config.DEFAULT_NU)
    p.add_argument('--boundary', default='none', help='none | periodic | reflect-even:<pad> | reflect-odd:<pad>')
    p.add_argument('--max-imfs', type=int, default=config.MAX_IMFS)
    p.add_argument('--no-snap', action='store_true', help='do not snap mask bins to spectral peaks')

    # --- benchmark ---
    p = sub.add_parser('benchmark', help='two-tone c1 sweep over (a, f)')
    p.add_argument('--out', default=None)
    p.add_argument('--strategy', default='extrema', help='extrema | ideal[:<Hz>] | derivative:<d>')
    freq = p.add_mutually_exclusive_group()
    freq.add_argument('--rational', dest='frequencies', action='store_const', const='rational')
    freq.add_argument('--irrational', dest='frequencies', action='store_const', const='irrational')
    phase = p.add_mutually_exclusive_group()
    phase.add_argument('--phi-avg', type=int, default=None, metavar='COUNT')
    phase.add_argument('--phi', type=float, default=None, metavar='VALUE')
    p.add_argument('--grid', type=parse_grid, default=(config.BENCH_GRID_A, config.BENCH_GRID_F))
    p.add_argument('--preset', choices=('standard', 'stress'), default=None)
    p.add_argument('--mode', choices=tuple(CLI_MODES), default=None)
    p.add_argument('--filter', choices=FILTER_SHAPES, default='triangular')
    p.add_argument('--nu', type=float, default=config.DEFAULT_NU)
    p.add_argument('--duration', type=float, default=config.BENCH_DURATION)
    p.add_argument('--fs', type=float, default=config.BENCH_SAMPLE_RATE)
    p.add_argument('--boundary', default=None)
    p.add_argument('--threads', type=int, default=None)
    p.set_defaults(frequencies='rational')

    # --- filter-design ---
    p = sub.add_parser('filter-design', help='build a filter and its spectrum')
    p.add_argument('--out', default=None)
    p.add_argument('--shape', choices=FILTER_SHAPES, default='triangular')
    p.add_argument('--L', dest='half_length', type=int, required=True)
    p.add_argument('--scale-to', type=int, default=None, metavar='L')
    p.add_argument('--double', action='store_true', help='self-convolve the filter')
    p.add_argument('--period', type=int, default=None)
    p.add_argument('--enforce-zero', action='store_true')
    p.add_argument('--zero-bin', type=int, default=None)

    # --- generate ---
    p = sub.add_parser('generate', help='write a two-tone signal CSV')
    p.add_argument('--out', default=None)
    p.add_argument('--a', type=float, default=1.0)
    p.add_argument('--f', type=float, default=0.5)
    p.add_argument('--phi', type=float, default=0.0)
    p.add_argument('--duration', type=float, default=config.BENCH_DURATION)
    p.add_argument('--fs', type=float, default=config.BENCH_SAMPLE_RATE)

    return parser


class IterFiltCli:
    """iterfilt 명령 실행 클래스"""

    def __init__(self):
        self.parser = build_parser()
        self.writer: Optional[ArtifactWriter] = None
        self._previous_handler = None

    def _setup_signal_handlers(self) -> None:
        """SIGTERM 을 인터럽트로 처리 (Graceful Shutdown)"""
        if threading.current_thread() is not threading.main_thread():
            return

        def signal_handler(signum, frame):
            log(f"🛑 시그널 {signum} 수신, 종료 중...")
            raise KeyboardInterrupt

        self._previous_handler = signal.signal(signal.SIGTERM, signal_handler)

    def _restore_signal_handlers(self) -> None:
        if self._previous_handler is not None:
            signal.signal(signal.SIGTERM, self._previous_handler)
            self._previous_handler = None

    def run(self, argv: Optional[List[str]] = None) -> int:
        """
        명령 실행

        Returns:
            종료 코드 (0 성공, 2 입력 오류, 3 계산 오류, 130 인터럽트)
        """
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)

        handlers = {
            'decompose': self.cmd_decompose,
            'benchmark': self.cmd_benchmark,
            'filter-design': self.cmd_filter_design,
            'generate': self.cmd_generate,
        }
        self._setup_signal_handlers()
        try:
            return handlers[args.command](args)
        except IterFiltError as e:
            log(f"❌ {e}", 'ERROR')
            self.shutdown(failed=True)
            return e.exit_code
        except KeyboardInterrupt:
            log("⌨️ 키보드 인터럽트")
            self.shutdown(failed=True)
            return 130
        finally:
            self._restore_signal_handlers()

    def shutdown(self, failed: bool = False) -> None:
        """실패 시 작성 중이던 출력 정리"""
        if failed and self.writer is not None:
            self.writer.cleanup()
        self.writer = None

    def _writer(self, out_dir: Optional[str]) -> ArtifactWriter:
        self.writer = ArtifactWriter(out_dir)
        return self.writer

    # --- 명령 ---

    def cmd_decompose(self, args: argparse.Namespace) -> int:
        """신호 CSV 분해 → IMF CSV, 잔차, 진단, 매니페스트"""
        with Stopwatch() as sw:
            sig = read_signal_csv(args.input)
            delta, max_iterations, mode = config.preset(args.preset)
            cfg = DecompositionConfig(
                delta=delta if args.delta is None else args.delta,
                max_iterations=max_iterations if args.max_iter is None else args.max_iter,
                mode=mode if args.mode is None else CLI_MODES[args.mode],
                mask_strategy=parse_mask_strategy(args.mask, args.nu, snap=not args.no_snap),
                boundary=parse_boundary(args.boundary),
                filter_shape=args.filter,
                max_imfs=args.max_imfs,
            )

            log(f"🚀 분해 시작: p={sig.size}, Fs={sig.sample_rate:g}, mask={args.mask}, mode={cfg.mode}")
            result = decompose(sig, cfg)

            writer = self._writer(args.out)
            for i, imf in enumerate(result.imfs, start=1):
                writer.signal(f"imf_{i:02d}.csv", imf)
            writer.signal('remainder.csv', result.remainder)
            writer.diagnostics('diagnostics.csv', result.diagnostics)

        configuration = cfg.describe()
        configuration.update(
            stop_reason=result.stop_reason,
            converged=result.converged,
            reconstruction_error=result.reconstruction_error(),
        )
        writer.manifest('decompose', configuration, inputs=[os.path.abspath(args.input)], duration_seconds=sw.elapsed)
        log(f"✅ {result.summary()}")
        self.shutdown()
        return 0

    def cmd_benchmark(self, args: argparse.Namespace) -> int:
        """(a, f) 스윕 → c1 격자, 진단 격자, 임계 곡선, 매니페스트"""
        if args.preset is not None:
            delta, max_iterations, mode = config.preset(args.preset)
        else:
            delta, max_iterations, mode = config.STANDARD_DELTA, config.STANDARD_MAX_ITERATIONS, 'direct_projection'
        if args.mode is not None:
            mode = CLI_MODES[args.mode]

        settings = SweepSettings(
            strategy=args.strategy,
            filter_shape=args.filter,
            duration=args.duration,
            sample_rate=args.fs,
            mode=mode,
            delta=delta,
            max_iterations=max_iterations,
            nu=args.nu,
            frequency_mode=args.frequencies,
            boundary=args.boundary,
            threads=args.threads,
        )
        na, nf = args.grid
        a_values = amplitude_axis(na)
        f_values = frequency_axis(nf, args.frequencies, args.duration)
        phi_count = config.BENCH_PHI_COUNT if args.phi_avg is None else args.phi_avg
        phi_values = phase_axis(phi_count, args.phi)

        with Stopwatch() as sw:
            grid = sweep_grid(a_values, f_values, phi_values, settings)
            writer = self._writer(args.out)
            writer.grid('c1_grid.csv', grid)
            writer.grid('half_lengths.csv', grid, grid.half_lengths)
            writer.grid('iterations.csv', grid, grid.iterations)
            for exponent, points in critical_curves(a_values, f_values).items():
                writer.curve(f"curve_e{exponent}.csv", exponent, points)

        configuration = dict(grid.metadata)
        configuration.update(grid=f"{na}x{nf}", phi=[float(v) for v in phi_values], failed_cells=int(grid.failed.sum()))
        writer.manifest('benchmark', configuration, duration_seconds=sw.elapsed)
        self.shutdown()

        if grid.failed_ratio > config.BENCH_FAIL_RATIO:
            log(f"❌ 실패 셀 비율 {grid.failed_ratio:.0%} 가 허용치를 넘음", 'ERROR')
            return 3
        return 0

    def cmd_filter_design(self, args: argparse.Namespace) -> int:
        """필터와 스펙트럼 CSV (선택적으로 영점 강제)"""
        if args.half_length < 1:
            self.parser.print_usage(sys.stderr)
            raise InputError(f"--L must be >= 1, got {args.half_length}")

        w = build_base_filter(args.shape, args.half_length)
        if args.scale_to is not None:
            w = scale_filter(w, args.scale_to)
        if args.double:
            w = double_convolve(w)

        period = args.period
        if period is None:
            period = 256
            while period < 2 * w.length:
                period *= 2

        zero_bin = None
        if args.enforce_zero or args.zero_bin is not None:
            w, zero_bin = enforce_spectral_zero(w, period, args.zero_bin)
            log(f"✅ 영점 강제: bin {zero_bin}, L={w.half_length}")
            print(f"zero_bin={zero_bin}")
        spectrum = filter_spectrum(w, period)

        writer = self._writer(args.out)
        writer.filter('filter.csv', w)
        writer.spectrum('spectrum.csv', spectrum)
        writer.manifest('filter-design', {
            'shape': args.shape,
            'L': args.half_length,
            'scale_to': args.scale_to,
            'double': args.double,
            'period': period,
            'enforce_zero': zero_bin is not None,
            'zero_bin': zero_bin,
            'output_half_length': w.half_length,
        })
        self.shutdown()
        return 0

    def cmd_generate(self, args: argparse.Namespace) -> int:
        """두 톤 신호 CSV 작성"""
        params = TwoToneParams(a=args.a, f=args.f, phi=args.phi)
        sig = generate_two_tone(params, args.duration, args.fs)
        writer = self._writer(args.out)
        writer.signal('signal.csv', sig)
        writer.manifest('generate', {
            'a': args.a, 'f': args.f, 'phi': args.phi, 'n': args.duration, 'Fs': args.fs,
        })
        self.shutdown()
        return 0


def main(argv: Optional[List[str]] = None) -> int:
    """엔트리 포인트"""
    if not config.validate():
        log("❌ 설정값 검증 실패", 'ERROR')
        return 2
    return IterFiltCli().run(argv)


if __name__ == "__main__":
    sys.exit(main())
