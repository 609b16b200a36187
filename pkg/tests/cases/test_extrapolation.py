"""
Test: Extrapolation Coverage
============================

True x0 paths wander between 100 and 110, above the largest reference.
Compares MD1 and MD2 with per-sample noise against the static estimators
at the ratio r=200.

Metrics:
- Range of the generated truth paths
- AvCP / AvIW of MD1, MD2 and the four static methods
- Checks: truth inside [100, 110], MD2 AvCP >= 0.98, MD1 finite with
  positive width
"""

import sys
import json
from pathlib import Path
from typing import Dict
from datetime import datetime

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from develop import RefSet, SimConfig, TruthCase
from simulation.experiment import cell_seed, run_experiment
from simulation.generator import gen_dataset
from simulation.schemas import ExperimentGrid


def run_test() -> Dict:
    """Execute the extrapolation study."""

    grid = ExperimentGrid(
        cases=["extrapolation"], gains=["constant_zero"], refs=["two"],
        obs_vars=[0.01], sys_vars=[0.00005],
        methods=["MD1", "MD2", "MF1", "MF2", "MB1", "MB2"],
        replicates=5, T=400, n_proposals=1000, n_samples=200,
        seed=20130,
    )
    frame = run_experiment(grid)

    cell = grid.cells()[0]
    sim = SimConfig(refs=RefSet.TWO, T=grid.T, obs_var=0.01, sys_var=0.00005,
                    truth=TruthCase.EXTRAPOLATION)
    paths = [gen_dataset(sim, rng=np.random.default_rng(s)).x0_truth
             for s in cell_seed(grid.seed, cell).spawn(grid.replicates)]
    lowest = float(min(p.min() for p in paths))
    highest = float(max(p.max() for p in paths))

    by_method = {row["method"]: row for row in frame.to_dict(orient="records")}
    results = {
        "test_name": "Extrapolation Coverage",
        "timestamp": datetime.now().isoformat(),
        "snr": cell.snr,
        "methods": by_method,
        "summary": {}
    }

    checks = {
        "truth_within_bounds": 100.0 <= lowest and highest <= 110.0,
        "all_cells_completed": "error" not in frame.columns,
        "md2_cp_high": by_method["MD2"]["av_cp"] >= 0.98,
        "md1_finite": bool(np.isfinite(by_method["MD1"]["av_mse"])) and by_method["MD1"]["av_iw"] > 0.0,
    }
    results["summary"] = {
        "truth_min": lowest,
        "truth_max": highest,
        "md2_cp": by_method["MD2"]["av_cp"],
        "md2_iw": by_method["MD2"]["av_iw"],
        "md1_mse": by_method["MD1"]["av_mse"],
        "md1_cp": by_method["MD1"]["av_cp"],
        "mf1_cp": by_method["MF1"]["av_cp"],
        "mf2_cp": by_method["MF2"]["av_cp"],
        "checks": {name: bool(ok) for name, ok in checks.items()},
        "passed": bool(all(checks.values())),
    }
    return results


def test_extrapolation_coverage():
    summary = run_test()["summary"]
    assert summary["passed"], summary["checks"]


def main():
    print("Starting Extrapolation Coverage Test...")
    results = run_test()

    output_file = Path(__file__).parent.parent.parent / "data" / "results" / "test_extrapolation.json"
    output_file.parent.mkdir(parents=True, exist_ok=True)

    with open(output_file, 'w', encoding='utf-8') as f:
        json.dump(results, f, indent=2)

    summary = results['summary']
    print(f"\nTest completed. Results saved to: {output_file}")
    print(f"\nSummary:")
    print(f"  Truth range: [{summary['truth_min']:.2f}, {summary['truth_max']:.2f}]")
    print(f"  MD2 AvCP {summary['md2_cp']:.3f}, AvIW {summary['md2_iw']:.3f}")
    print(f"  MD1 AvMSE {summary['md1_mse']:.4g}, AvCP {summary['md1_cp']:.3f}")
    print(f"  MF1 AvCP {summary['mf1_cp']:.3f}, MF2 AvCP {summary['mf2_cp']:.3f}")
    for name, ok in summary['checks'].items():
        print(f"  [{'OK' if ok else 'FAIL'}] {name}")
    sys.exit(0 if summary['passed'] else 1)


if __name__ == "__main__":
    main()
