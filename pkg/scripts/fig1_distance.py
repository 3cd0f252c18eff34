"""Distance between the ITE trajectory and the straight geodesic, versus chain length.

    python scripts/fig1_distance.py --out results/fig1
"""
import argparse
from pathlib import Path

from acqite.harness.plots import write_plot_script
from acqite.harness.runner import DISTANCE_COLUMNS, distance_sweep, format_csv


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--J", type=float, default=0.5)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--boundary", default="open")
    p.add_argument("--initial-state", default="all_zero")
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results/fig1")
    a = p.parse_args()

    rows = distance_sweep(range(1, a.n_max + 1), a.J, a.h, a.boundary, a.initial_state,
                          a.tau_max, workers=a.workers)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {k: v for k, v in vars(a).items() if k not in ("out", "workers")}
    (out / "distance_sweep.csv").write_text(format_csv("distance_sweep", DISTANCE_COLUMNS, rows, meta))
    write_plot_script("fig1", out)
    prev = None
    for n, d, f in rows:
        step = "" if prev is None else f"  (+{d - prev:.4f})"
        print(f"n={n:2d}  distance {d:.6e}{step}")
        prev = d


if __name__ == "__main__":
    main()
