#!/usr/bin/env python
"""
Línea de comandos de la calibración dinámica.

Subcomandos:
    simulate          Estudio de simulación sobre la rejilla de escenarios
    calibrate         Calibra un conjunto de datos CSV con un método
    radiometer        Compara MF2 / MD1 / MD2 sobre un flujo de radiómetro
    synth-radiometer  Genera un flujo sintético con deriva de ganancia
    plot-data         Exporta la serie calibrada (t, median, lower, upper, truth)
    gen-data          Genera un conjunto simulado en CSV

Códigos de salida: 0 éxito, 1 configuración, 2 fallo numérico, 3 E/S.

Uso: python run_calibration.py simulate --desk-scale --output results.csv
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from develop.config import load_grid
from develop.core.errors import CalibrationError, ConfigurationError, ParseError
from develop.core.knowledge import (
    DEFAULT_LEVEL, DEFAULT_PROPOSALS, DEFAULT_SAMPLES, DYNAMIC_SLOPE_TOLERANCE, PROPOSAL_ROUNDS,
    RADIOMETER_DRIFT, RADIOMETER_GAIN, RADIOMETER_NOISE_SD, T_RECEIVER, T_SKY,
)
from develop.core.models import GainKind, Md2Sampling, Method, RefSet, SimConfig, ThetaProcess, TruthCase
from develop.main import CalibrationConfig, DynamicCalibrator
from simulation.experiment import all_failed, format_results, run_experiment, write_results
from simulation.generator import gen_dataset, read_dataset_csv, write_dataset_csv
from simulation.metrics import series_metrics
from simulation.plot_data import emit_plot_data
from simulation.radiometer import (
    RADIOMETER_METHODS, compare_radiometer, read_radiometer_csv, synthesize_radiometer,
    write_radiometer_csv,
)
from simulation.schemas import ExperimentGrid

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

_log = logging.getLogger("run_calibration")


class CalibrationArgumentParser(argparse.ArgumentParser):
    """Los errores de argumentos salen con código 1, no con el 2 de argparse."""

    def error(self, message):
        raise ConfigurationError(f"{self.prog}: {message}")


def _csv_list(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [item.strip() for item in text.split(",") if item.strip()]


def _float_list(text: Optional[str]) -> Optional[List[float]]:
    items = _csv_list(text)
    if items is None:
        return None
    try:
        return [float(item) for item in items]
    except ValueError as exc:
        raise ConfigurationError(f"invalid number list '{text}'") from exc


def _add_calibration_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-M", "--n-proposals", type=int, default=DEFAULT_PROPOSALS)
    parser.add_argument("-N", "--n-samples", type=int, default=DEFAULT_SAMPLES)
    parser.add_argument("--burn-in", type=int, default=0)
    parser.add_argument("--level", type=float, default=DEFAULT_LEVEL)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--md2-sampling", choices=[m.value for m in Md2Sampling],
                        default=Md2Sampling.PER_SAMPLE.value)
    parser.add_argument("--proposal-rounds", type=int, default=PROPOSAL_ROUNDS,
                        help="Adaptive proposal rounds (0 = plain SIR from the prior).")
    parser.add_argument("--slope-tolerance", type=float, default=DYNAMIC_SLOPE_TOLERANCE)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = CalibrationArgumentParser(description="Dynamic statistical calibration with DLMs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="INFO logging on stderr.")
    parser.add_argument("--debug", action="store_true", help="DEBUG logging on stderr.")
    parser.add_argument("-q", "--quiet", action="store_true", help="Suppress progress output.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sim = subparsers.add_parser("simulate", help="Run the simulation study grid.")
    sim.add_argument("--config", type=Path, default=None, help="Grid JSON (default: experiment_grid.json).")
    scale = sim.add_mutually_exclusive_group()
    scale.add_argument("--desk-scale", action="store_true", help="replicates=20, T=500, M=2000, N=500.")
    scale.add_argument("--full-scale", "--paper-scale", dest="full_scale", action="store_true",
                       help="replicates=100, T=1000, M=5000, N=1000.")
    sim.add_argument("--cases", type=str, default=None, help="Comma list: interpolation,extrapolation.")
    sim.add_argument("--gains", type=str, default=None, help="Comma list of gain regimes.")
    sim.add_argument("--refs", type=str, default=None, help="Comma list: two,five.")
    sim.add_argument("--obs-vars", type=str, default=None)
    sim.add_argument("--sys-vars", type=str, default=None)
    sim.add_argument("--methods", type=str, default=None, help="Comma list, e.g. MD1,MD2,MF1.")
    sim.add_argument("--replicates", type=int, default=None)
    sim.add_argument("--T", dest="T", type=int, default=None)
    sim.add_argument("-M", "--n-proposals", type=int, default=None)
    sim.add_argument("-N", "--n-samples", type=int, default=None)
    sim.add_argument("--burn-in", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--md2-sampling", choices=[m.value for m in Md2Sampling], default=None)
    sim.add_argument("--proposal-rounds", type=int, default=None)
    sim.add_argument("--metric-scale", choices=["original", "standardized"], default=None)
    sim.add_argument("--timing", action="store_true", help="Record wall_ms per row.")
    sim.add_argument("--workers", type=int, default=None)
    sim.add_argument("--output", type=Path, default=None, help="Result CSV (default: stdout).")

    cal = subparsers.add_parser("calibrate", help="Calibrate a dataset CSV.")
    cal.add_argument("--data", type=Path, required=True, help="Dataset CSV from gen-data.")
    cal.add_argument("--method", choices=[m.value for m in Method], default=Method.MD2.value)
    cal.add_argument("--plot-output", type=Path, default=None)
    _add_calibration_args(cal)

    rad = subparsers.add_parser("radiometer", help="Radiometer stream pipeline.")
    rad.add_argument("--input", type=Path, required=True, help="CSV t,v_cold,v_hot,v_unknown.")
    rad.add_argument("--methods", type=str, default=",".join(m.value for m in RADIOMETER_METHODS))
    rad.add_argument("--plot-dir", type=Path, default=None, help="Write one plot CSV per method.")
    _add_calibration_args(rad)

    synth = subparsers.add_parser("synth-radiometer", help="Synthetic radiometer stream.")
    synth.add_argument("--output", type=Path, required=True)
    synth.add_argument("--T", dest="T", type=int, default=1000)
    synth.add_argument("--t-sky", type=float, default=T_SKY)
    synth.add_argument("--t-rec", type=float, default=T_RECEIVER)
    synth.add_argument("--gain", type=float, default=RADIOMETER_GAIN)
    synth.add_argument("--drift", type=float, default=RADIOMETER_DRIFT)
    synth.add_argument("--noise-sd", type=float, default=RADIOMETER_NOISE_SD)
    synth.add_argument("--seed", type=int, default=None)

    plot = subparsers.add_parser("plot-data", help="Export a calibrated series for plotting.")
    plot.add_argument("--data", type=Path, required=True)
    plot.add_argument("--method", choices=[m.value for m in Method], default=Method.MD2.value)
    plot.add_argument("--output", type=Path, required=True)
    _add_calibration_args(plot)

    gen = subparsers.add_parser("gen-data", help="Write one simulated dataset CSV.")
    gen.add_argument("--output", type=Path, required=True)
    gen.add_argument("--refs", choices=[r.value for r in RefSet], default=RefSet.TWO.value)
    gen.add_argument("--gain", choices=[g.value for g in GainKind], default=GainKind.CONSTANT_ZERO.value)
    gen.add_argument("--case", choices=[c.value for c in TruthCase], default=TruthCase.INTERPOLATION.value)
    gen.add_argument("--obs-var", type=float, default=0.0001)
    gen.add_argument("--sys-var", type=float, default=0.00001)
    gen.add_argument("--T", dest="T", type=int, default=500)
    gen.add_argument("--theta-process", choices=[p.value for p in ThetaProcess],
                     default=ThetaProcess.IID.value)
    gen.add_argument("--interpolation-walk", action="store_true")
    gen.add_argument("--seed", type=int, default=0)

    return parser.parse_args(argv)


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _calibration_config(args: argparse.Namespace) -> CalibrationConfig:
    return CalibrationConfig(
        n_proposals=args.n_proposals, n_samples=args.n_samples, burn_in=args.burn_in,
        level=args.level, md2_sampling=Md2Sampling(args.md2_sampling), seed=args.seed,
        proposal_rounds=args.proposal_rounds, slope_tolerance=args.slope_tolerance,
    )


# ============================================================
# SUBCOMANDOS
# ============================================================

def cmd_simulate(args: argparse.Namespace) -> int:
    preset = "desk" if args.desk_scale else "full" if args.full_scale else None
    values = load_grid(
        args.config, preset=preset,
        cases=_csv_list(args.cases), gains=_csv_list(args.gains), refs=_csv_list(args.refs),
        obs_vars=_float_list(args.obs_vars), sys_vars=_float_list(args.sys_vars),
        methods=_csv_list(args.methods), replicates=args.replicates, T=args.T,
        n_proposals=args.n_proposals, n_samples=args.n_samples, burn_in=args.burn_in,
        seed=args.seed, md2_sampling=args.md2_sampling, metric_scale=args.metric_scale,
        proposal_rounds=args.proposal_rounds,
        workers=args.workers, include_timing=True if args.timing else None,
    )
    grid = ExperimentGrid(**values)
    verbose = not args.quiet and args.output is not None

    if verbose:
        print("=" * 70)
        print(f"SIMULATION STUDY: {len(grid.cells())} cells x {grid.replicates} replicates, "
              f"T={grid.T}, M={grid.n_proposals}, N={grid.n_samples}")
        print("=" * 70)

    def progress(done, total, cell):
        if verbose:
            print(f"  [{done}/{total}] {cell.key}")

    frame = run_experiment(grid, progress=progress)
    if args.output is not None:
        write_results(frame, args.output)
        if verbose:
            print(f"Saved results: {args.output}")
    else:
        sys.stdout.write(format_results(frame))

    if all_failed(frame):
        _log.error("every cell failed")
        return EXIT_NUMERICAL
    return EXIT_OK


def _calibrate_dataset(args: argparse.Namespace):
    dataset = read_dataset_csv(args.data)
    calibrator = DynamicCalibrator(_calibration_config(args))
    result = calibrator.calibrate(dataset.ref_points, dataset.y_refs, dataset.y0_obs, args.method)
    return dataset, result


def cmd_calibrate(args: argparse.Namespace) -> int:
    dataset, result = _calibrate_dataset(args)
    metrics = series_metrics(result.summary, dataset.x0_truth)
    if not args.quiet:
        print("=" * 70)
        print(f"CALIBRATION {result.method.value}: T={dataset.T}, burn_in={result.summary.start}")
        print("=" * 70)
        print(f"  MSE: {metrics.mse:.6g}")
        print(f"  CP:  {metrics.cp:.4f}")
        print(f"  IW:  {metrics.iw:.6g}")
        print(f"  sigma_hat: {result.sigma_hat:.6g}")
        if result.diagnostics is not None:
            print(f"  ESS: {result.diagnostics.ess:.2f}  "
                  f"flags: {result.diagnostics.instability_flags}  "
                  f"rejected: {result.diagnostics.rejected_proposals}")
        print(f"  Time: {result.processing_time:.2f}s")
    if args.plot_output is not None:
        emit_plot_data(result.summary, dataset.x0_truth, args.plot_output)
        if not args.quiet:
            print(f"Saved plot data: {args.plot_output}")
    return EXIT_OK


def cmd_plot_data(args: argparse.Namespace) -> int:
    dataset, result = _calibrate_dataset(args)
    emit_plot_data(result.summary, dataset.x0_truth, args.output)
    if not args.quiet:
        print(f"Saved plot data: {args.output}")
    return EXIT_OK


def cmd_radiometer(args: argparse.Namespace) -> int:
    stream = read_radiometer_csv(args.input)
    methods = [Method(m) for m in _csv_list(args.methods)]
    comparison = compare_radiometer(stream, methods, config=_calibration_config(args), seed=args.seed)

    if not args.quiet:
        print("=" * 70)
        print(f"RADIOMETER: {len(stream)} samples, T_cold={stream.t_cold} K, T_hot={stream.t_hot} K")
        print("=" * 70)
        for _, row in comparison.to_frame().iterrows():
            reduction = "" if row["method"] == Method.MF2.value else f"  ({row['reduction_pct']:+.1f}% vs MF2)"
            print(f"  {row['method']}: mean={row['mean']:.3f} K  sigma_hat={row['sigma_hat']:.4f} K{reduction}")

    if args.plot_dir is not None:
        args.plot_dir.mkdir(parents=True, exist_ok=True)
        for method, result in comparison.results.items():
            path = args.plot_dir / f"radiometer_{method.value}.csv"
            emit_plot_data(result.summary, None, path)
            if not args.quiet:
                print(f"Saved plot data: {path}")
    return EXIT_OK


def cmd_synth_radiometer(args: argparse.Namespace) -> int:
    stream = synthesize_radiometer(T=args.T, t_sky=args.t_sky, t_rec=args.t_rec, gain0=args.gain,
                                   drift=args.drift, noise_sd=args.noise_sd, seed=args.seed)
    write_radiometer_csv(stream, args.output)
    if not args.quiet:
        print(f"Saved radiometer stream: {args.output}")
    return EXIT_OK


def cmd_gen_data(args: argparse.Namespace) -> int:
    config = SimConfig(refs=args.refs, T=args.T, obs_var=args.obs_var, sys_var=args.sys_var,
                       gain=args.gain, truth=args.case, seed=args.seed,
                       theta_process=args.theta_process, interpolation_walk=args.interpolation_walk)
    write_dataset_csv(gen_dataset(config), args.output)
    if not args.quiet:
        print(f"Saved dataset: {args.output}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "radiometer": cmd_radiometer,
    "synth-radiometer": cmd_synth_radiometer,
    "plot-data": cmd_plot_data,
    "gen-data": cmd_gen_data,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _configure_logging(args)

    try:
        return COMMANDS[args.command](args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigurationError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
