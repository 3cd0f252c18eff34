"""QITE versus ACQ: energy/fidelity traces and maximum fidelity per (n, D).

    python scripts/fig3_fidelity.py --out results/fig3 --workers 4
"""
import argparse
from pathlib import Path

from acqite.harness import ExperimentConfig, fidelity_sweep, run_experiment
from acqite.harness.plots import write_plot_script
from acqite.harness.runner import FIDELITY_COLUMNS, format_csv, write_run


def _ints(text):
    return [int(t) for t in text.split(",")]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-list", type=_ints, default=[4, 6, 8])
    p.add_argument("--D-list", type=_ints, default=[2, 4])
    p.add_argument("--dtau", type=float, default=0.05)
    p.add_argument("--policy", default="grid_line_search")
    p.add_argument("--initial-state", default="all_zero")
    p.add_argument("--boundary", default="open")
    p.add_argument("--trace-n", type=int, default=8, help="chain length for the trace panels")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results/fig3")
    a = p.parse_args()

    base = ExperimentConfig(J=0.5, h=1.0, dtau=a.dtau, policy=a.policy,
                            initial_state=a.initial_state, boundary=a.boundary, out=a.out)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    for D in a.D_list:
        for method in ("qite", "acq"):
            res = run_experiment(base.replace(n=a.trace_n, D=D, method=method))
            path = write_run(res, out)
            print(f"{path.name}: final fidelity {res.final['fidelity']:.6f}, "
                  f"qite calls {res.qite_calls}")
    write_plot_script("run", out)

    rows = fidelity_sweep(a.n_list, a.D_list, base, workers=a.workers)
    meta = base.to_dict(with_out=False)
    meta.update(n_list=a.n_list, D_list=a.D_list)
    (out / "fidelity_sweep.csv").write_text(format_csv("fidelity_sweep", FIDELITY_COLUMNS, rows, meta))
    write_plot_script("fig3", out)
    for method, n, D, fmax, ffinal, calls, steps, gates in rows:
        print(f"{method:4s} n={n:2d} D={D}  max fidelity {fmax:.6f}  calls {calls:3d}  2q gates {gates}")


if __name__ == "__main__":
    main()
