"""
Configuración de la calibración.

Archivos JSON:
- knowledge_base.json: Constantes del filtro, del estudio de simulación y del radiómetro
- experiment_grid.json: Rejilla del estudio por defecto (celdas, métodos, réplicas)

El archivo .env de la raíz del proyecto puede fijar DYNCAL_THREADS.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv

from ..core.errors import ConfigurationError
from ..core.knowledge import PRESETS, THREADS_VARIABLE

CONFIG_DIR = Path(__file__).parent
DEFAULT_GRID_PATH = CONFIG_DIR / 'experiment_grid.json'

load_dotenv(CONFIG_DIR.parent.parent / '.env')


def load_grid(path: Optional[Union[str, Path]] = None, preset: Optional[str] = None,
              **overrides: Any) -> Dict[str, Any]:
    """
    Carga la configuración de una rejilla experimental.

    Orden de precedencia: archivo < preset < overrides (flags de la CLI).

    Args:
        path: Archivo JSON; por defecto experiment_grid.json
        preset: 'desk' o 'full'
        **overrides: Valores explícitos; los None se ignoran

    Returns:
        Diccionario con las claves de ExperimentGrid
    """
    path = Path(path) if path is not None else DEFAULT_GRID_PATH
    with open(path, 'r', encoding='utf-8') as f:
        try:
            values = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(values, dict):
        raise ConfigurationError(f"{path}: top-level value must be an object")

    if preset is not None:
        if preset not in PRESETS:
            raise ConfigurationError(f"unknown preset '{preset}', expected one of {sorted(PRESETS)}")
        values.update(PRESETS[preset])

    values.update({k: v for k, v in overrides.items() if v is not None})
    return values


def resolve_workers(requested: Optional[int] = None) -> int:
    """
    Número de procesos del pool.

    DYNCAL_THREADS (entero positivo) limita el valor pedido o, si no se
    pide ninguno, el número de CPUs.
    """
    available = os.cpu_count() or 1
    workers = requested if requested is not None else available
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")

    raw = os.environ.get(THREADS_VARIABLE)
    if raw is not None and raw.strip():
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ConfigurationError(f"{THREADS_VARIABLE} must be an integer, got '{raw}'") from exc
        if cap < 1:
            raise ConfigurationError(f"{THREADS_VARIABLE} must be >= 1, got {cap}")
        workers = min(workers, cap)
    return workers
