"""
Generador de datos del estudio de simulación.

Modelo: y_jt = beta0_t + (beta1_t + g_t) x_j + eps_t

- make_design: diseños de 2 y 5 referencias
- gen_theta_path: coeficientes (beta0_t, beta1_t) ~ N(mu, sigma2_W (X'X)^-1)
- gain / gain_path: fluctuación de la ganancia (nula, escalonada, sinusoidal)
- gen_x0_truth: trayectoria verdadera para interpolación o extrapolación
- gen_dataset: ensambla un conjunto completo a partir de SimConfig
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from develop.core.errors import ConfigurationError, DegenerateDesignError, ParseError
from develop.core.knowledge import (
    EXTRAPOLATION_BOUNDS, EXTRAPOLATION_START, INTERPOLATION_BOUNDS, INTERPOLATION_TARGET,
    REFERENCE_POINTS, SINE_AMPLITUDE, SINE_FREQUENCY, STEP_LEVELS, THETA_MEAN, WALK_SD,
)
from develop.core.models import (
    GainKind, RefSet, SimConfig, SimDataset, ThetaProcess, TruthCase,
)

from .tables import read_table, write_table

_log = logging.getLogger(__name__)


def make_design(refs: Union[RefSet, str]) -> np.ndarray:
    """
    Matriz de diseño fija con columna de unos.

    two -> [[1, 20], [1, 100]]; five -> referencias 20..100 de 20 en 20.
    """
    refs = RefSet(refs)
    points = np.asarray(REFERENCE_POINTS[refs.value], dtype=float)
    return np.column_stack([np.ones_like(points), points])


def gen_theta_path(sys_var: float, design: np.ndarray, T: int, rng: np.random.Generator,
                   process: ThetaProcess = ThetaProcess.IID,
                   mean: Sequence[float] = THETA_MEAN) -> np.ndarray:
    """
    Coeficientes verdaderos por instante (T x 2).

    IID: T extracciones independientes de N(mean, sigma2_W (X'X)^-1).
    RANDOM_WALK: theta_t = theta_{t-1} + w_t desde theta_0 = mean.
    """
    if sys_var < 0:
        raise ConfigurationError(f"sys_var must be non-negative, got {sys_var}")
    mean = np.asarray(mean, dtype=float)
    xtx = design.T @ design
    if np.linalg.matrix_rank(xtx) < xtx.shape[0]:
        raise DegenerateDesignError("design is rank deficient")
    if sys_var == 0:
        return np.tile(mean, (T, 1))

    cov = sys_var * np.linalg.inv(xtx)
    cov = 0.5 * (cov + cov.T)
    draws = rng.multivariate_normal(mean, cov, size=T, method="cholesky")
    if ThetaProcess(process) is ThetaProcess.RANDOM_WALK:
        return mean + np.cumsum(draws - mean, axis=0)
    return draws


def gain(kind: Union[GainKind, str], t: float, T: Optional[int] = None,
         levels: Sequence[float] = STEP_LEVELS) -> float:
    """
    Fluctuación de la ganancia g_t.

    Args:
        kind: constant_zero, stepped o sinusoidal
        t: Instante (1-based)
        T: Horizonte, necesario para el escalón
        levels: Niveles del escalón en segmentos iguales; deben sumar cero
    """
    kind = GainKind(kind)
    if kind is GainKind.CONSTANT_ZERO:
        return 0.0
    if kind is GainKind.SINUSOIDAL:
        return SINE_AMPLITUDE * float(np.sin(SINE_FREQUENCY * t))
    if T is None or T < 1:
        raise ConfigurationError("stepped gain needs the horizon T")
    if not np.isclose(sum(levels), 0.0, atol=1e-12):
        raise ConfigurationError(f"step levels must sum to zero, got {sum(levels)}")
    k = len(levels)
    segment = min(int((t - 1) * k // T), k - 1)
    return float(levels[max(segment, 0)])


def gain_path(kind: Union[GainKind, str], T: int,
              levels: Sequence[float] = STEP_LEVELS) -> np.ndarray:
    """g_t para t = 1..T."""
    kind = GainKind(kind)
    t = np.arange(1, T + 1)
    if kind is GainKind.CONSTANT_ZERO:
        return np.zeros(T)
    if kind is GainKind.SINUSOIDAL:
        return SINE_AMPLITUDE * np.sin(SINE_FREQUENCY * t)
    return np.array([gain(kind, s, T, levels) for s in t])


def reflected_walk(start: float, bounds: Tuple[float, float], T: int,
                   step_sd: float, rng: np.random.Generator) -> np.ndarray:
    """
    Paseo aleatorio gaussiano reflejado en [lower, upper].

    Se pliega la suma acumulada sobre el intervalo; con pasos simétricos
    tiene la misma ley que reflejar paso a paso.
    """
    lower, upper = bounds
    if not lower < upper:
        raise ConfigurationError(f"invalid bounds {bounds}")
    if not lower <= start <= upper:
        raise ConfigurationError(f"start {start} outside {bounds}")
    if step_sd < 0:
        raise ConfigurationError(f"step_sd must be non-negative, got {step_sd}")

    steps = rng.normal(0.0, step_sd, size=T) if step_sd > 0 else np.zeros(T)
    steps[0] = 0.0
    free = (start - lower) + np.cumsum(steps)
    width = upper - lower
    folded = np.mod(free, 2.0 * width)
    folded = np.where(folded > width, 2.0 * width - folded, folded)
    return np.clip(lower + folded, lower, upper)


def gen_x0_truth(case: Union[TruthCase, str], T: int, rng: np.random.Generator,
                 walk: bool = False, step_sd: float = WALK_SD) -> np.ndarray:
    """
    Trayectoria verdadera de x0t.

    Interpolación: constante en el centro del diseño (o paseo acotado en
    [20, 100] si walk). Extrapolación: paseo acotado en [100, 110].
    """
    case = TruthCase(case)
    if case is TruthCase.EXTRAPOLATION:
        return reflected_walk(EXTRAPOLATION_START, EXTRAPOLATION_BOUNDS, T, step_sd, rng)
    if walk:
        return reflected_walk(INTERPOLATION_TARGET, INTERPOLATION_BOUNDS, T, step_sd, rng)
    return np.full(T, INTERPOLATION_TARGET)


def _assemble(design: np.ndarray, theta: np.ndarray, g: np.ndarray, x0: np.ndarray,
              obs_var: float, rng: np.random.Generator) -> SimDataset:
    T, r = theta.shape[0], design.shape[0]
    slope = theta[:, 1] + g
    noise_sd = np.sqrt(obs_var)
    y_refs = theta[:, [0]] + slope[:, None] * design[None, :, 1] + noise_sd * rng.standard_normal((T, r))
    y0 = theta[:, 0] + slope * x0 + noise_sd * rng.standard_normal(T)
    return SimDataset(design=design, theta_path=theta, gain_path=g,
                      y_refs=y_refs, x0_truth=x0, y0_obs=y0)


def gen_dataset(config: SimConfig, rng: Optional[np.random.Generator] = None) -> SimDataset:
    """
    Genera un conjunto completo, reproducible a partir de la semilla.

    Args:
        config: Configuración del escenario
        rng: Generador; por defecto default_rng(config.seed)
    """
    if config.T < 1:
        raise ConfigurationError(f"T must be >= 1, got {config.T}")
    if config.obs_var < 0:
        raise ConfigurationError(f"obs_var must be non-negative, got {config.obs_var}")
    rng = rng if rng is not None else np.random.default_rng(config.seed)

    design = make_design(config.refs)
    theta = gen_theta_path(config.sys_var, design, config.T, rng,
                           process=config.theta_process, mean=config.theta_mean)
    g = gain_path(config.gain, config.T, config.step_levels)
    x0 = gen_x0_truth(config.truth, config.T, rng, walk=config.interpolation_walk,
                      step_sd=config.walk_sd)
    dataset = _assemble(design, theta, g, x0, config.obs_var, rng)
    _log.debug("generated %s/%s dataset T=%d snr=%.6g", config.refs.value, config.gain.value,
               config.T, config.snr)
    return dataset


def slope_crossing_dataset(T: int = 500, beta0: float = 2.0, start: float = 1.0,
                           end: float = -1.0, obs_var: float = 1e-4,
                           refs: RefSet = RefSet.TWO, x0: float = INTERPOLATION_TARGET,
                           seed: int = 0) -> SimDataset:
    """
    Conjunto con la pendiente verdadera variando linealmente de start a end.

    Con start > 0 > end la pendiente cruza el cero a mitad de la serie.
    """
    rng = np.random.default_rng(seed)
    design = make_design(refs)
    theta = np.column_stack([np.full(T, beta0), np.linspace(start, end, T)])
    return _assemble(design, theta, np.zeros(T), np.full(T, float(x0)), obs_var, rng)


# ============================================================
# CSV
# ============================================================

def dataset_frame(dataset: SimDataset) -> pd.DataFrame:
    """Columnas t, x0_truth, y0_obs, y_ref_1..r, beta0, beta1, gain."""
    frame = pd.DataFrame({
        "t": np.arange(1, dataset.T + 1),
        "x0_truth": dataset.x0_truth,
        "y0_obs": dataset.y0_obs,
    })
    for j in range(dataset.y_refs.shape[1]):
        frame[f"y_ref_{j + 1}"] = dataset.y_refs[:, j]
    frame["beta0"] = dataset.theta_path[:, 0]
    frame["beta1"] = dataset.theta_path[:, 1]
    frame["gain"] = dataset.gain_path
    return frame


def write_dataset_csv(dataset: SimDataset, path: Union[str, Path]) -> Path:
    """Escribe el conjunto con la línea '#x_ref=' de las referencias."""
    refs = ",".join(f"{x:.17g}" for x in dataset.ref_points)
    return write_table(dataset_frame(dataset), path, metadata={"x_ref": refs})


def read_dataset_csv(path: Union[str, Path]) -> SimDataset:
    """
    Reconstruye un SimDataset escrito por write_dataset_csv.

    Raises:
        ParseError: si falta '#x_ref=' o alguna columna
    """
    frame, metadata = read_table(path, required=["t", "x0_truth", "y0_obs", "beta0", "beta1", "gain"])
    if "x_ref" not in metadata:
        raise ParseError("missing '#x_ref=' metadata line", line=1)
    try:
        points = np.array([float(v) for v in metadata["x_ref"].split(",")])
    except ValueError as exc:
        raise ParseError(f"invalid x_ref values: {exc}", line=1) from exc

    ref_columns = [f"y_ref_{j + 1}" for j in range(points.size)]
    missing = [c for c in ref_columns if c not in frame.columns]
    if missing:
        raise ParseError(f"missing columns {missing}", line=2)

    return SimDataset(
        design=np.column_stack([np.ones_like(points), points]),
        theta_path=frame[["beta0", "beta1"]].to_numpy(),
        gain_path=frame["gain"].to_numpy(),
        y_refs=frame[ref_columns].to_numpy(),
        x0_truth=frame["x0_truth"].to_numpy(),
        y0_obs=frame["y0_obs"].to_numpy(),
    )
