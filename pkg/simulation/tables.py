"""
Lectura y escritura de tablas CSV con líneas de metadatos '#clave=valor'.

Todas las tablas del proyecto (conjuntos simulados, flujos de radiómetro,
resultados y datos de gráficas) pasan por aquí: UTF-8, fin de línea '\\n'
y 17 cifras significativas.
"""

import io
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from develop.core.errors import ParseError

FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def write_table(frame: pd.DataFrame, path: PathLike,
                metadata: Optional[Dict[str, str]] = None) -> Path:
    """
    Escribe un DataFrame precedido de sus líneas de metadatos.
    """
    path = Path(path)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for key, value in (metadata or {}).items():
            f.write(f"#{key}={value}\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def _split_lines(text: str) -> Tuple[Dict[str, str], List[Tuple[int, str]]]:
    metadata: Dict[str, str] = {}
    rows: List[Tuple[int, str]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith('#'):
            key, sep, value = stripped[1:].partition('=')
            if not sep or not key.strip():
                raise ParseError(f"malformed metadata line '{stripped}'", line=number)
            metadata[key.strip()] = value.strip()
            continue
        rows.append((number, stripped))
    return metadata, rows


def _parse_float(text: str) -> float:
    # Redondeo correcto, como el de repr()
    try:
        return float(text)
    except ValueError:
        return np.nan


def read_table(path: PathLike, required: Iterable[str],
               numeric: Optional[Iterable[str]] = None) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """
    Lee una tabla CSV validando columnas y valores numéricos.

    Args:
        path: Archivo de entrada
        required: Columnas obligatorias
        numeric: Columnas que deben ser numéricas (por defecto, todas)

    Returns:
        Tupla (DataFrame numérico, metadatos)

    Raises:
        ParseError: con el número de línea del primer valor inválido
        OSError: si el archivo no se puede leer
    """
    with open(path, 'r', encoding='utf-8') as f:
        metadata, rows = _split_lines(f.read())
    if not rows:
        raise ParseError("missing header", line=1)

    header_line, header = rows[0]
    columns = [c.strip() for c in header.split(',')]
    missing = [c for c in required if c not in columns]
    if missing:
        raise ParseError(f"missing columns {missing}", line=header_line)

    for number, row in rows[1:]:
        if row.count(',') != len(columns) - 1:
            raise ParseError(f"expected {len(columns)} fields", line=number)

    body = "\n".join([header] + [row for _, row in rows[1:]])
    frame = pd.read_csv(io.StringIO(body), dtype=str, keep_default_na=False, skipinitialspace=True)
    frame.columns = columns

    line_numbers = [number for number, _ in rows[1:]]
    for column in (columns if numeric is None else list(numeric)):
        values = frame[column].str.strip().map(_parse_float)
        bad = values.isna().to_numpy()
        if bad.any():
            index = int(bad.argmax())
            raise ParseError(f"non-numeric value '{frame[column].iloc[index]}' in column '{column}'",
                             line=line_numbers[index])
        frame[column] = values.astype(float)
    return frame, metadata
