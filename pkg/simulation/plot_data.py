"""
Exportación de series calibradas para gráficas externas.
"""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from develop.core.errors import ConfigurationError
from develop.core.models import CalSummarySeries

from .tables import read_table, write_table

PLOT_COLUMNS = ["t", "median", "lower", "upper"]


def _aligned_truth(summary: CalSummarySeries, truth) -> np.ndarray:
    truth = np.asarray(truth, dtype=float).reshape(-1)
    if truth.size == len(summary):
        return truth
    if truth.size >= summary.start + len(summary):
        return truth[summary.start:summary.start + len(summary)]
    raise ConfigurationError(
        f"truth of length {truth.size} does not cover t={summary.start}..{summary.start + len(summary)}"
    )


def emit_plot_data(summary: CalSummarySeries, truth, path: Union[str, Path]) -> Path:
    """
    Escribe t, median, lower, upper y, si se da, truth.

    t es 1-based y respeta el burn-in del resumen.
    """
    frame = pd.DataFrame({
        "t": summary.t_index + 1,
        "median": summary.median,
        "lower": summary.lower,
        "upper": summary.upper,
    }, columns=PLOT_COLUMNS)
    if truth is not None:
        frame["truth"] = _aligned_truth(summary, truth)
    return write_table(frame, path)


def read_plot_data(path: Union[str, Path]) -> Tuple[CalSummarySeries, Optional[np.ndarray]]:
    """Lee un archivo de emit_plot_data."""
    frame, _ = read_table(path, required=PLOT_COLUMNS)
    start = int(frame["t"].iloc[0]) - 1 if len(frame) else 0
    summary = CalSummarySeries(
        median=frame["median"].to_numpy(),
        lower=frame["lower"].to_numpy(),
        upper=frame["upper"].to_numpy(),
        start=start,
    )
    truth = frame["truth"].to_numpy() if "truth" in frame.columns else None
    return summary, truth
