"""
Calibración de un radiómetro con dos cargas de referencia.

Las temperaturas (T_cold, T_hot) son las referencias x y los voltajes de
las cargas las respuestas; la escena desconocida (v_unknown) se calibra
en cada instante. La línea de base estática es el estimador inverso con
un único ajuste sobre toda la serie.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from develop.core.errors import ConfigurationError, ParseError
from develop.core.knowledge import (
    RADIOMETER_DRIFT, RADIOMETER_GAIN, RADIOMETER_NOISE_SD, T_COLD, T_HOT, T_RECEIVER, T_SKY,
)
from develop.core.models import Method, RadiometerStream
from develop.main import CalibrationConfig, CalibrationResult, DynamicCalibrator

from .tables import read_table, write_table

_log = logging.getLogger(__name__)

STREAM_COLUMNS = ["t", "v_cold", "v_hot", "v_unknown"]
RADIOMETER_METHODS = (Method.MF2, Method.MD1, Method.MD2)


def _temperature(metadata: Dict[str, str], key: str, default: float) -> float:
    if key not in metadata:
        return default
    try:
        return float(metadata[key])
    except ValueError as exc:
        raise ParseError(f"invalid {key} '{metadata[key]}'", line=1) from exc


def read_radiometer_csv(path: Union[str, Path]) -> RadiometerStream:
    """
    Lee un flujo 't,v_cold,v_hot,v_unknown' con metadatos opcionales
    '#t_cold=' y '#t_hot=' (por defecto 293.69 K y 325.59 K).
    """
    frame, metadata = read_table(path, required=STREAM_COLUMNS, numeric=STREAM_COLUMNS)
    return RadiometerStream(
        t=frame["t"].to_numpy(),
        v_cold=frame["v_cold"].to_numpy(),
        v_hot=frame["v_hot"].to_numpy(),
        v_unknown=frame["v_unknown"].to_numpy(),
        t_cold=_temperature(metadata, "t_cold", T_COLD),
        t_hot=_temperature(metadata, "t_hot", T_HOT),
        metadata=metadata,
    )


def write_radiometer_csv(stream: RadiometerStream, path: Union[str, Path]) -> Path:
    frame = pd.DataFrame({
        "t": stream.t, "v_cold": stream.v_cold,
        "v_hot": stream.v_hot, "v_unknown": stream.v_unknown,
    }, columns=STREAM_COLUMNS)
    metadata = {"t_cold": f"{stream.t_cold:.17g}", "t_hot": f"{stream.t_hot:.17g}"}
    for key, value in stream.metadata.items():
        metadata.setdefault(key, value)
    return write_table(frame, path, metadata=metadata)


def synthesize_radiometer(T: int = 1000, t_sky: float = T_SKY, t_cold: float = T_COLD,
                          t_hot: float = T_HOT, t_rec: float = T_RECEIVER,
                          gain0: float = RADIOMETER_GAIN, drift: float = RADIOMETER_DRIFT,
                          noise_sd: float = RADIOMETER_NOISE_SD,
                          seed: Optional[int] = None) -> RadiometerStream:
    """
    Flujo sintético v = g_t (T + t_rec) + ruido.

    La ganancia deriva linealmente de g0 (1 - drift/2) a g0 (1 + drift/2)
    a lo largo de la serie; la escena tiene temperatura constante t_sky.
    """
    if T < 2:
        raise ConfigurationError(f"T must be >= 2, got {T}")
    if gain0 <= 0 or noise_sd < 0:
        raise ConfigurationError("gain0 must be positive and noise_sd non-negative")
    rng = np.random.default_rng(seed)
    g = gain0 * (1.0 + drift * (np.linspace(0.0, 1.0, T) - 0.5))

    def channel(temperature: float) -> np.ndarray:
        return g * (temperature + t_rec) + noise_sd * rng.standard_normal(T)

    return RadiometerStream(
        t=np.arange(1, T + 1, dtype=float),
        v_cold=channel(t_cold), v_hot=channel(t_hot), v_unknown=channel(t_sky),
        t_cold=t_cold, t_hot=t_hot,
        metadata={"t_sky": f"{t_sky:.17g}", "drift": f"{drift:.17g}"},
    )


def calibrate_radiometer(stream: RadiometerStream, method: Union[Method, str],
                         config: Optional[CalibrationConfig] = None,
                         rng: Optional[np.random.Generator] = None) -> CalibrationResult:
    """
    Temperatura de la escena por instante.

    Returns:
        CalibrationResult; su sigma_hat es la desviación típica de la serie
    """
    method = Method(method)
    if method not in RADIOMETER_METHODS:
        raise ConfigurationError(
            f"radiometer calibration supports {[m.value for m in RADIOMETER_METHODS]}, got {method.value}"
        )
    calibrator = DynamicCalibrator(config)
    result = calibrator.calibrate(stream.references, stream.responses, stream.v_unknown,
                                  method, rng=rng)
    _log.info("radiometer %s: sigma_hat=%.4g K over %d samples",
              method.value, result.sigma_hat, len(result.summary))
    return result


@dataclass
class RadiometerComparison:
    """sigma_hat por método y reducción relativa frente al estimador inverso."""
    results: Dict[Method, CalibrationResult] = field(default_factory=dict)

    @property
    def sigma_hat(self) -> Dict[Method, float]:
        return {m: r.sigma_hat for m, r in self.results.items()}

    def reduction(self, method: Method) -> float:
        """Porcentaje de reducción de sigma_hat frente a MF2."""
        baseline = self.sigma_hat.get(Method.MF2)
        if baseline is None or baseline == 0:
            return float("nan")
        return 100.0 * (baseline - self.sigma_hat[method]) / baseline

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            {"method": m.value, "sigma_hat": s, "mean": float(np.mean(self.results[m].summary.median)),
             "reduction_pct": self.reduction(m)}
            for m, s in self.sigma_hat.items()
        ], columns=["method", "sigma_hat", "mean", "reduction_pct"])


def compare_radiometer(stream: RadiometerStream,
                       methods: Sequence[Union[Method, str]] = RADIOMETER_METHODS,
                       config: Optional[CalibrationConfig] = None,
                       seed: Optional[int] = None) -> RadiometerComparison:
    """Calibra el flujo con cada método; cada uno con su subsecuencia aleatoria."""
    methods = [Method(m) for m in methods]
    children = np.random.SeedSequence(seed).spawn(len(methods))
    comparison = RadiometerComparison()
    for method, child in zip(methods, children):
        comparison.results[method] = calibrate_radiometer(
            stream, method, config=config, rng=np.random.default_rng(child)
        )
    return comparison
