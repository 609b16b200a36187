#!/usr/bin/env python3
"""
Run All Tests
=============

Script principal para ejecutar tests y generar reportes.

Ejecución:
- Tests unitarios (pytest sobre tests/cases)
- Experimentos de calibración (tabla de simulación, burn-in,
  extrapolación, radiómetro)
- Reportes markdown y CSV

Uso:
    python run_tests.py              # Todo (unitarios + experimentos + reportes)
    python run_tests.py --unit       # Solo tests unitarios
    python run_tests.py --no-report  # Sin reportes
    python run_tests.py -q           # Modo silencioso
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "tests"))

from test_executor import execute_all_tests, print_test_summary, run_unit_tests
from report_generator import generate_reports


def main():
    parser = argparse.ArgumentParser(
        description="Ejecuta tests unitarios, experimentos de calibración y reportes"
    )
    parser.add_argument(
        '--unit',
        action='store_true',
        help='Ejecutar solo los tests unitarios (pytest)'
    )
    parser.add_argument(
        '--no-report',
        action='store_true',
        help='No generar reportes markdown/CSV'
    )
    parser.add_argument(
        '--quiet', '-q',
        action='store_true',
        help='Modo silencioso (menos output)'
    )

    args = parser.parse_args()
    verbose = not args.quiet
    cases_dir = Path(__file__).parent / "tests" / "cases"

    # 1. Tests unitarios
    if verbose:
        print("\n🧪 STEP 1/3: Running unit tests...")
    unit = run_unit_tests(cases_dir, verbose=verbose)
    if args.unit:
        sys.exit(unit["returncode"])

    # 2. Experimentos
    if verbose:
        print("\n🔬 STEP 2/3: Executing calibration experiments...")
    master_report = execute_all_tests(verbose=verbose)
    master_report["unit_tests"] = {"status": unit["status"], "returncode": unit["returncode"]}

    if verbose:
        print_test_summary(master_report)

    # 3. Reportes
    if not args.no_report:
        if verbose:
            print("\n📊 STEP 3/3: Generating reports...")
        generate_reports(master_report, verbose=verbose)
    elif verbose:
        print("\n⏭  STEP 3/3: Skipping report generation (--no-report)")

    failed = unit["status"] != "success" or any(
        r["execution"].get("status") != "success" for r in master_report["results"].values()
    )
    if verbose:
        print("\n⚠ Some tests failed\n" if failed else "\n✅ All done!\n")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
