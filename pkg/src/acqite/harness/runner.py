"""Experiment drivers: single runs, fidelity and distance sweeps, gate counts."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..acq import acq_run, db_qite_run, qite_run
from ..evolution import ite_trajectory
from ..geometry import ite_geodesic_distance
from ..hamiltonian import exact_spectrum
from ..qite import QiteGenerator
from .config import ConfigError, ExperimentConfig

SCHEMA_VERSION = 1
PRUNE = 1e-8

RUN_COLUMNS = ("step", "t", "energy", "fidelity", "qite_calls", "two_qubit_gates", "rotations")
FIDELITY_COLUMNS = ("method", "n", "D", "max_fidelity", "final_fidelity", "qite_calls",
                    "steps", "two_qubit_gates")
DISTANCE_COLUMNS = ("n", "distance", "final_fidelity")
GATE_COLUMNS = ("method", "steps", "qite_calls", "final_fidelity", "two_qubit_gates", "rotations")


# ----------------------------------------------------------------------------
# Gate counting
# ----------------------------------------------------------------------------

def gate_count(generators: Sequence[QiteGenerator], compressed: bool,
               prune: float = PRUNE) -> tuple[int, int]:
    """Two-qubit gates and single-qubit rotations to implement one step.

    Every weight-``w`` Pauli rotation compiles to a CNOT ladder of ``2(w-1)``
    two-qubit gates around one rotation. ``compressed=False`` counts the
    product of all generators separately; ``compressed=True`` counts one
    first-order Trotter layer of ``sum_k A_k``, where equal strings from
    different generators share a rotation.
    """
    strings = []
    if compressed:
        total: dict = {}
        for g in generators:
            for p, a in g.terms():
                total[p] = total.get(p, 0.0) + a
        strings = [p for p, a in total.items() if abs(a) > prune]
    else:
        for g in generators:
            strings.extend(p for p, _ in g.terms(prune))
    two_q = sum(2 * (p.weight - 1) for p in strings)
    return two_q, len(strings)


# ----------------------------------------------------------------------------
# Single runs
# ----------------------------------------------------------------------------

@dataclass
class RunResult:
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    generators: list = field(default_factory=list)  # per step, for the json dump

    @property
    def final(self) -> dict:
        return dict(zip(RUN_COLUMNS, self.rows[-1]))

    @property
    def max_fidelity(self) -> float:
        return max(r[3] for r in self.rows)

    @property
    def qite_calls(self) -> int:
        return self.rows[-1][4]

    def to_csv(self) -> str:
        return format_csv("run", RUN_COLUMNS, self.rows, self.config.to_dict(with_out=False))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(kind: str, columns: Sequence[str], rows, meta: dict | None = None) -> str:
    """CSV text with a versioned header comment; floats in round-trip repr."""
    lines = [f"# acqite {kind} v{SCHEMA_VERSION}"]
    if meta is not None:
        lines.append("# config " + json.dumps(meta, sort_keys=True))
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = [l for l in Path(path).read_text().splitlines() if l and not l.startswith("#")]
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


def run_experiment(config: ExperimentConfig, write: bool = False) -> RunResult:
    """Run one configured method; rows start with the initial state (step 0)."""
    model = config.model()
    H = model.dense().entries
    spec = exact_spectrum(model)
    psi0 = config.initial().amplitudes
    E0 = float(np.vdot(psi0, H @ psi0).real)
    res = RunResult(config)
    res.rows.append((0, 0.0, E0, spec.ground_fidelity(psi0), 0, 0, 0))

    if config.method == "ite":
        steps = config.max_steps if config.tau_max is None else \
            int(math.ceil(config.tau_max / config.dtau - 1e-12))
        taus = [config.dtau * k for k in range(1, steps + 1)]
        for k, (tau, s) in enumerate(zip(taus, ite_trajectory(H, psi0, taus)), 1):
            a = s.amplitudes
            res.rows.append((k, tau, float(np.vdot(a, H @ a).real), spec.ground_fidelity(a), 0, 0, 0))
    elif config.method == "qite":
        two_q = rot = 0
        for k, (s, E, gens) in enumerate(qite_run(model, psi0, config.D, config.dtau,
                                                  max_steps=config.max_steps,
                                                  sequential=config.sequential), 1):
            g2, gr = gate_count(gens, compressed=False)
            two_q, rot = two_q + g2, rot + gr
            res.rows.append((k, k * config.dtau, E, spec.ground_fidelity(s.amplitudes), k, two_q, rot))
            res.generators.append([g.to_dict() for g in gens])
    elif config.method == "acq":
        two_q = rot = 0
        t_total = 0.0
        trace = acq_run(model, psi0, config.D, config.dtau, config.step_policy(),
                        max_steps=config.max_steps, sequential=config.sequential) \
            if config.max_steps > 0 else []
        for rec in trace:
            g2, gr = gate_count(rec.generators, compressed=True)
            two_q, rot = two_q + g2, rot + gr
            t_total += rec.t
            res.rows.append((rec.step, t_total, rec.energy, spec.ground_fidelity(rec.state.amplitudes),
                             rec.qite_calls, two_q, rot))
            res.generators.append({"t": rec.t, "l_r": rec.l_r,
                                   "generators": [g.to_dict() for g in rec.generators]})
        if trace:
            # the closing sweep that found no descent still cost a QITE call
            last = res.rows[-1]
            res.rows[-1] = last[:4] + (trace.qite_calls,) + last[5:]
    else:
        t_total = 0.0
        for k, (s, E, t) in enumerate(db_qite_run(H, psi0, config.step_policy(),
                                                  max_steps=config.max_steps), 1):
            t_total += t
            res.rows.append((k, t_total, E, spec.ground_fidelity(s.amplitudes), 0, 0, 0))
    for row in res.rows:
        if not math.isfinite(row[2]):
            raise FloatingPointError(f"non-finite energy at step {row[0]}")
    if write:
        write_run(res, config.out)
    return res


def write_run(res: RunResult, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"run_{res.config.method}_n{res.config.n}_D{res.config.D}.csv"
    path.write_text(res.to_csv())
    if res.generators:
        gpath = path.with_suffix(".generators.json")
        gpath.write_text(json.dumps(res.generators, sort_keys=True))
    return path


# ----------------------------------------------------------------------------
# Sweeps
# ----------------------------------------------------------------------------

def _map(fn: Callable, items: list, workers: int) -> list:
    """Order-preserving map, optionally over a process pool."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fidelity_row(cfg: ExperimentConfig) -> tuple:
    res = run_experiment(cfg)
    final = res.final
    return (cfg.method, cfg.n, cfg.D, res.max_fidelity, final["fidelity"], res.qite_calls,
            final["step"], final["two_qubit_gates"])


def fidelity_sweep(n_list: Sequence[int], D_list: Sequence[int], base: ExperimentConfig,
                   methods: Sequence[str] = ("qite", "acq"), workers: int = 1) -> list[tuple]:
    """Maximum ground fidelity for every (method, n, D); rows in input order."""
    cfgs = [base.replace(method=m, n=int(n), D=int(D)) for m in methods
            for n in n_list for D in D_list]
    return _map(_fidelity_row, cfgs, workers)


def _distance_row(args) -> tuple:
    n, J, h, boundary, initial_state, tau_max, n_samples, quad = args
    cfg = ExperimentConfig(n=n, J=J, h=h, boundary=boundary, method="ite",
                           initial_state=initial_state)
    model = cfg.model()
    H = model.dense().entries
    psi0 = cfg.initial().amplitudes
    spec = exact_spectrum(model)
    if spec.ground_fidelity(psi0) < 1e-12:
        raise ConfigError(f"n={n}: initial state has no ground-state overlap")
    d = ite_geodesic_distance(H, psi0, tau_max, n_samples=n_samples, quadrature_points=quad)
    final = ite_trajectory(H, psi0, [tau_max])[0].amplitudes
    return (n, d, spec.ground_fidelity(final))


def distance_sweep(n_list: Sequence[int], J: float = 0.5, h: float = 1.0,
                   boundary: str = "open", initial_state: str = "all_zero",
                   tau_max: float = 10.0, n_samples: int = 201, quadrature_points: int = 101,
                   workers: int = 1) -> list[tuple]:
    """Distance between the ITE curve and the initial-to-ground geodesic per ``n``."""
    for n in n_list:
        if not 1 <= n <= 10:
            raise ConfigError(f"distance_sweep supports 1 <= n <= 10, got {n}")
    args = [(int(n), J, h, boundary, initial_state, tau_max, n_samples, quadrature_points)
            for n in n_list]
    return _map(_distance_row, args, workers)


def gate_comparison(config: ExperimentConfig) -> list[tuple]:
    """Cumulative gate estimates of plain QITE and ACQ on the same model."""
    out = []
    for method in ("qite", "acq"):
        res = run_experiment(config.replace(method=method))
        f = res.final
        out.append((method, f["step"], res.qite_calls, f["fidelity"], f["two_qubit_gates"],
                    f["rotations"]))
    return out
