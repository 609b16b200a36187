"""
Estudio de simulación: réplicas por celda, métricas agregadas y tabla CSV.

Cada celda deriva sus semillas de (seed, crc32(clave de la celda)), de modo
que quitar o añadir celdas no altera las demás. Las filas se ordenan por
(case, gain, r, refs, method) antes de emitirse.
"""

import logging
import time
import zlib
from dataclasses import asdict, dataclass
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from develop.core.errors import CalibrationError
from develop.core.models import Method, SimConfig
from develop.config import resolve_workers
from develop.main import CalibrationConfig, DynamicCalibrator

from .generator import gen_dataset
from .metrics import aggregate, series_metrics
from .schemas import Cell, ExperimentGrid
from .tables import FLOAT_FORMAT

_log = logging.getLogger(__name__)

RESULT_COLUMNS = ["case", "gain", "r", "refs", "method", "av_mse", "av_cp", "av_iw", "wall_ms"]

_METHOD_ORDER = {m: i for i, m in enumerate(Method)}


@dataclass
class ResultRow:
    """Una fila de la tabla de resultados."""
    case: str
    gain: str
    r: float
    refs: str
    method: str
    av_mse: float = float("nan")
    av_cp: float = float("nan")
    av_iw: float = float("nan")
    wall_ms: float = 0.0
    error: Optional[str] = None


def _crc(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def cell_seed(seed: int, cell: Cell) -> np.random.SeedSequence:
    """Semilla de una celda, independiente del orden de ejecución."""
    return np.random.SeedSequence([seed, _crc(cell.key)])


class ExperimentRunner:
    """
    Ejecuta la rejilla experimental celda a celda.
    """

    def __init__(self, grid: ExperimentGrid):
        self.grid = grid
        self.calibrator = DynamicCalibrator(CalibrationConfig(
            n_proposals=grid.n_proposals,
            n_samples=grid.n_samples,
            level=grid.level,
            md2_sampling=grid.md2_sampling,
            slope_tolerance=grid.slope_tolerance,
            proposal_rounds=grid.proposal_rounds,
            centering=grid.centering,
        ))

    def _sim_config(self, cell: Cell) -> SimConfig:
        return SimConfig(
            refs=cell.refs, T=self.grid.T, obs_var=cell.obs_var, sys_var=cell.sys_var,
            gain=cell.gain, truth=cell.case, replicates=self.grid.replicates,
            seed=self.grid.seed, theta_process=self.grid.theta_process,
            interpolation_walk=self.grid.interpolation_walk,
        )

    def run_cell(self, cell: Cell) -> List[ResultRow]:
        """
        Todas las réplicas de una celda para todos los métodos.

        Un método que falla en alguna réplica deja de ejecutarse en la
        celda y produce una fila de error.
        """
        grid = self.grid
        sim = self._sim_config(cell)
        base = cell_seed(grid.seed, cell)
        per_method: Dict[Method, list] = {m: [] for m in grid.methods}
        elapsed: Dict[Method, float] = {m: 0.0 for m in grid.methods}
        errors: Dict[Method, str] = {}

        for replicate, data_seed in enumerate(base.spawn(grid.replicates)):
            dataset = gen_dataset(sim, rng=np.random.default_rng(data_seed))
            x = dataset.ref_points
            center, scale = None, None
            if grid.metric_scale == "standardized":
                center, scale = float(np.mean(x)), float(np.std(x))

            for method in grid.methods:
                if method in errors:
                    continue
                rng = np.random.default_rng([grid.seed, _crc(cell.key), replicate, _crc(method.value)])
                start = time.perf_counter()
                try:
                    result = self.calibrator.calibrate(x, dataset.y_refs, dataset.y0_obs, method, rng=rng)
                    metrics = series_metrics(result.summary, dataset.x0_truth, burn_in=grid.burn_in,
                                             center=center, scale=scale)
                except CalibrationError as exc:
                    errors[method] = f"{type(exc).__name__}: {exc}"
                    _log.warning("cell %s method %s failed at replicate %d: %s",
                                 cell.key, method.value, replicate, exc)
                    continue
                elapsed[method] += time.perf_counter() - start
                per_method[method].append(metrics)

        rows = []
        for method in grid.methods:
            row = ResultRow(case=cell.case.value, gain=cell.gain.value, r=cell.snr,
                            refs=cell.refs.value, method=method.value)
            if method in errors:
                row.error = errors[method]
            else:
                agg = aggregate(per_method[method])
                row.av_mse, row.av_cp, row.av_iw = agg.av_mse, agg.av_cp, agg.av_iw
                if grid.include_timing:
                    row.wall_ms = 1000.0 * elapsed[method] / agg.replicates
            rows.append(row)
        _log.info("cell %s done (%d replicates)", cell.key, grid.replicates)
        return rows

    def run(self, workers: Optional[int] = None,
            progress: Optional[Callable[[int, int, Cell], None]] = None) -> pd.DataFrame:
        """
        Ejecuta todas las celdas, en paralelo si workers > 1.

        Returns:
            DataFrame ordenado con las columnas de RESULT_COLUMNS (más 'error'
            si alguna fila falló)
        """
        cells = self.grid.cells()
        if not self.grid.methods or not cells:
            return pd.DataFrame(columns=RESULT_COLUMNS)

        if self.grid.T >= 1000 and self.grid.replicates >= 100:
            _log.warning("full-scale grid: %d cells x %d replicates, expect a long run",
                         len(cells), self.grid.replicates)

        workers = resolve_workers(workers if workers is not None else self.grid.workers)
        rows: List[ResultRow] = []
        if workers > 1:
            with Pool(processes=min(workers, len(cells))) as pool:
                tasks = [(self.grid, cell) for cell in cells]
                for done, (cell, cell_rows) in enumerate(pool.imap_unordered(_cell_task, tasks), 1):
                    rows.extend(cell_rows)
                    if progress:
                        progress(done, len(cells), cell)
        else:
            for done, cell in enumerate(cells, 1):
                rows.extend(self.run_cell(cell))
                if progress:
                    progress(done, len(cells), cell)
        return results_frame(rows)


def _cell_task(args: Tuple[ExperimentGrid, Cell]) -> Tuple[Cell, List[ResultRow]]:
    grid, cell = args
    return cell, ExperimentRunner(grid).run_cell(cell)


def results_frame(rows: List[ResultRow]) -> pd.DataFrame:
    """Ordena las filas de forma determinista y fija las columnas."""
    rows = sorted(rows, key=lambda row: (row.case, row.gain, row.r, row.refs,
                                          _METHOD_ORDER[Method(row.method)]))
    frame = pd.DataFrame([asdict(row) for row in rows], columns=RESULT_COLUMNS + ["error"])
    if frame["error"].isna().all():
        frame = frame.drop(columns="error")
    return frame.reset_index(drop=True)


def run_experiment(grid: ExperimentGrid, workers: Optional[int] = None,
                   progress: Optional[Callable[[int, int, Cell], None]] = None) -> pd.DataFrame:
    """Ejecuta la rejilla y devuelve la tabla de resultados."""
    return ExperimentRunner(grid).run(workers=workers, progress=progress)


def all_failed(frame: pd.DataFrame) -> bool:
    """True si hay filas y todas son de error."""
    return len(frame) > 0 and "error" in frame.columns and bool(frame["error"].notna().all())


def format_results(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_results(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Escribe la tabla de resultados en UTF-8."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(format_results(frame))
    return path
