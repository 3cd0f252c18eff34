"""Self-contained plotting scripts written next to the CSVs.

The core never imports a plotting library; the emitted scripts need
matplotlib only when they are run.
"""
from __future__ import annotations

from pathlib import Path

_READER = '''import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def read(name):
    rows = [l.split(",") for l in (HERE / name).read_text().splitlines()
            if l and not l.startswith("#")]
    return rows[0], rows[1:]
'''

FIG1 = _READER + '''

head, rows = read("distance_sweep.csv")
n = [int(r[head.index("n")]) for r in rows]
d = [float(r[head.index("distance")]) for r in rows]
fig, ax = plt.subplots(figsize=(4, 3))
ax.plot(n, d, "o-")
ax.set_xlabel("N")
ax.set_ylabel("trajectory distance (ITE vs geodesic)")
fig.tight_layout()
fig.savefig(HERE / "fig1_distance.png", dpi=150)
'''

FIG3 = _READER + '''

head, rows = read("fidelity_sweep.csv")
col = {c: i for i, c in enumerate(head)}
fig, ax = plt.subplots(figsize=(4, 3))
series = {}
for r in rows:
    key = (r[col["method"]], int(r[col["D"]]))
    series.setdefault(key, []).append((int(r[col["n"]]), float(r[col["max_fidelity"]])))
for (method, D), pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", label=f"{method} D={D}")
ax.set_xlabel("N")
ax.set_ylabel("max ground fidelity")
ax.legend()
fig.tight_layout()
fig.savefig(HERE / "fig3_fidelity.png", dpi=150)
'''

RUN = _READER + '''

name = sys.argv[1] if len(sys.argv) > 1 else sorted(p.name for p in HERE.glob("run_*.csv"))[0]
head, rows = read(name)
col = {c: i for i, c in enumerate(head)}
steps = [int(r[col["step"]]) for r in rows]
fig, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(4, 5))
a1.plot(steps, [float(r[col["energy"]]) for r in rows], "o-")
a1.set_ylabel("energy")
a2.plot(steps, [float(r[col["fidelity"]]) for r in rows], "o-")
a2.set_ylabel("ground fidelity")
a2.set_xlabel("step")
fig.tight_layout()
fig.savefig(HERE / (Path(name).stem + ".png"), dpi=150)
'''

SCRIPTS = {"fig1": ("plot_fig1.py", FIG1), "fig3": ("plot_fig3.py", FIG3),
           "run": ("plot_run.py", RUN)}


def write_plot_script(kind: str, out) -> Path:
    name, body = SCRIPTS[kind]
    path = Path(out) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(body)
    return path
