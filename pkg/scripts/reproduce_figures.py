#!/usr/bin/env python3
"""
Emit the data behind the coefficient-vs-order plots as CSV
- a_j(alpha) curves over an alpha grid for several j
- preimages a_j^{-1}(a_j(alpha*)) for the probe indices used in order recovery
"""

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from focir.services.frac_core import a_curves, a_value
from focir.services.ident_engine import alpha_preimages, recover_alpha_single

CURVE_INDICES = [1, 2, 5, 10, 25, 50, 100, 169, 500]
PROBE_INDICES = [25, 50, 169]


def emit_curves(out_dir: Path, points: int) -> Path:
    """a_j(alpha) for alpha in (0, 1), one column per j"""
    alphas = np.linspace(0.0, 1.0, points)
    table = a_curves(alphas, CURVE_INDICES)
    frame = pd.DataFrame(table, columns=[f"a_{j}" for j in CURVE_INDICES])
    frame.insert(0, "alpha", alphas)
    path = out_dir / "a_curves.csv"
    frame.to_csv(path, index=False)
    print(f"✓ {len(alphas)} orders x {len(CURVE_INDICES)} indices -> {path}")
    return path


def emit_preimages(out_dir: Path, alpha_true: float) -> Path:
    """Preimage of each probe value; the common entry is the recovered order"""
    probes = {j: a_value(alpha_true, j) for j in PROBE_INDICES}
    rows = []
    for j, value in probes.items():
        for root in alpha_preimages(j, value):
            rows.append({"j": j, "a_j": value, "alpha": root})
    recovered = recover_alpha_single(probes).alpha
    rows.append({"j": "common", "a_j": float("nan"), "alpha": recovered})
    path = out_dir / "preimages.csv"
    pd.DataFrame(rows).to_csv(path, index=False)
    print(f"✓ Probes {PROBE_INDICES} at alpha={alpha_true}: recovered {recovered!r} -> {path}")
    return path


def main():
    parser = argparse.ArgumentParser(description="Emit coefficient-vs-order curves as CSV")
    parser.add_argument("--out", default="figures", help="Output directory")
    parser.add_argument("--points", type=int, default=501, help="Alpha grid size")
    parser.add_argument("--alpha", type=float, default=0.3, help="Order probed for the preimage plot")
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    print(f"\n{'='*60}")
    print("COEFFICIENT CURVES")
    print(f"{'='*60}")
    try:
        emit_curves(out_dir, args.points)
        emit_preimages(out_dir, args.alpha)
    except Exception as e:
        print(f"\n✗ Failed to emit figures: {e}")
        return 1
    print(f"\n✓ Done. Files written to {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
