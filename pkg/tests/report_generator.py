"""
Report Generator Module
=======================

Genera reportes en formato Markdown y CSV a partir del reporte maestro
de los experimentos de calibración.
"""

import json
from pathlib import Path
from datetime import datetime
from typing import Dict, List, Optional

import pandas as pd

EXPERIMENT_TITLES = [
    ("test_simulation_table", "Simulation Study Table"),
    ("test_burn_in", "Burn-in Sensitivity"),
    ("test_extrapolation", "Extrapolation Coverage"),
    ("test_radiometer_uncertainty", "Radiometer Calibration Uncertainty"),
]


def _format_value(key: str, value) -> str:
    if isinstance(value, float):
        return f"{value:.2f}%" if key.endswith("_pct") else f"{value:.4g}"
    return str(value)


def _methods_table(data: Dict) -> str:
    """Tabla markdown por método cuando el experimento guarda filas por método."""
    rows = data.get("rows", data.get("methods"))
    if isinstance(rows, dict):
        rows = [row for row in rows.values() if isinstance(row, dict) and "method" in row]
    if not rows:
        return ""
    frame = pd.DataFrame(rows)
    columns = [c for c in ("method", "r", "av_mse", "av_cp", "av_iw",
                           "sigma_hat", "mean", "reduction_pct") if c in frame.columns]
    if "method" not in columns:
        return ""
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for record in frame[columns].to_dict(orient="records"):
        lines.append("| " + " | ".join(_format_value(c, record[c]) for c in columns) + " |")
    return "\n".join(lines)


def _experiment_section(title: str, result: Dict) -> List[str]:
    status = result.get('execution', {}).get('status', 'unknown')
    section = [f"### {title}\n", f"**Status:** {status.upper()}\n"]

    test_data = result.get('data') or {}
    summary = test_data.get('summary', {})
    metrics = [(k, v) for k, v in summary.items()
               if isinstance(v, (int, float, str)) and not isinstance(v, bool)]
    if metrics:
        section.append("\n**Key Metrics:**\n")
        section += [f"- {k.replace('_', ' ')}: {_format_value(k, v)}" for k, v in metrics]
    section += [f"- [{'x' if ok else ' '}] {check.replace('_', ' ')}"
                for check, ok in summary.get('checks', {}).items()]

    table = _methods_table(test_data)
    if table:
        section += ["\n**Per Method:**\n", table]
    return section + ["\n"]


def generate_markdown_report(data: Dict) -> str:
    """Reporte markdown: resumen de ejecución y una sección por experimento."""
    results = data.get('results', {})
    executed = data.get('tests_executed', len(results))
    passed = sum(1 for r in results.values() if r.get('execution', {}).get('status') == 'success')

    md = [
        "# Dynamic Calibration - Experimental Results",
        f"\n**Report Generated:** {datetime.now():%Y-%m-%d %H:%M:%S}",
        "\n---\n",
        "## Executive Summary\n",
        f"- **Experiments Passed:** {passed}/{executed}",
    ]
    if 'unit_tests' in data:
        md.append(f"- **Unit Tests:** {data['unit_tests'].get('status', 'unknown').upper()}")
    md += ["\n---\n", "## Experiment Results\n"]

    for key, title in EXPERIMENT_TITLES:
        if key in results:
            md += _experiment_section(title, results[key])

    return "\n".join(md)


def generate_csv_summary(data: Dict) -> str:
    """Genera resumen CSV de métricas clave."""

    records = []
    for test_key, result in data.get('results', {}).items():
        summary = (result.get('data') or {}).get('summary', {})
        for key, value in summary.items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                records.append({"Test": test_key, "Metric": key, "Value": value})

    return pd.DataFrame(records, columns=["Test", "Metric", "Value"]).to_csv(index=False)


DATA_DIR = Path(__file__).parent.parent / "data"
REPORT_FILES = {
    "markdown": ("CALIBRATION_REPORT.md", generate_markdown_report),
    "csv": ("experiment_summary.csv", generate_csv_summary),
}


def generate_reports(master_report: Optional[Dict] = None, verbose: bool = True) -> Dict[str, Path]:
    """
    Escribe CALIBRATION_REPORT.md y experiment_summary.csv en data/reports.

    Sin master_report se lee data/results/master_test_report.json.
    Devuelve {formato: ruta}.
    """
    if master_report is None:
        master_file = DATA_DIR / "results" / "master_test_report.json"
        if not master_file.exists():
            raise FileNotFoundError(f"Master report not found: {master_file}")
        master_report = json.loads(master_file.read_text(encoding='utf-8'))

    reports_dir = DATA_DIR / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)

    written = {}
    for kind, (filename, render) in REPORT_FILES.items():
        path = reports_dir / filename
        path.write_text(render(master_report), encoding='utf-8')
        written[kind] = path
        if verbose:
            print(f"{kind} report: {path}")
    return written


if __name__ == "__main__":
    generate_reports(verbose=True)
