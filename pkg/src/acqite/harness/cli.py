"""Command line entry point: ``acqite {run,sweep-fidelity,sweep-distance,gates}``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .config import ConfigError, ExperimentConfig, coerce, config_from_dict, load_config
from .plots import write_plot_script
from .runner import (DISTANCE_COLUMNS, FIDELITY_COLUMNS, GATE_COLUMNS, distance_sweep,
                     fidelity_sweep, format_csv, gate_comparison, run_experiment, write_run)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value or JSON config file")
    for f in fields(ExperimentConfig):
        p.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, default=None,
                       metavar=f.name.upper())


def _config(args) -> ExperimentConfig:
    overrides = {f.name: getattr(args, f.name) for f in fields(ExperimentConfig)
                 if getattr(args, f.name, None) is not None}
    if args.config:
        return load_config(args.config, **overrides)
    return config_from_dict(overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acqite", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment and write its CSV")
    _add_config_flags(p)

    p = sub.add_parser("sweep-fidelity", help="max fidelity per (method, n, D)")
    _add_config_flags(p)
    p.add_argument("--n-list", type=_int_list, default=[4, 6, 8])
    p.add_argument("--D-list", type=_int_list, default=[2, 4])
    p.add_argument("--methods", default="qite,acq")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sweep-distance", help="ITE vs geodesic distance per n")
    _add_config_flags(p)
    p.add_argument("--n-list", type=_int_list, default=[1, 2, 3, 4, 5, 6])
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--quadrature", type=int, default=101)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("gates", help="gate estimates of QITE and ACQ on one model")
    _add_config_flags(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        out = Path(cfg.out)
        if args.command == "run":
            res = run_experiment(cfg)
            path = write_run(res, out)
            write_plot_script("run", out)
            f = res.final
            print(f"{path}: {len(res.rows) - 1} steps, energy {f['energy']:.10f}, "
                  f"fidelity {f['fidelity']:.6f}, qite calls {f['qite_calls']}")
        elif args.command == "sweep-fidelity":
            methods = [m.strip() for m in args.methods.split(",") if m.strip()]
            for m in methods:
                coerce("method", m)
                cfg.replace(method=m)
            rows = fidelity_sweep(args.n_list, args.D_list, cfg, methods, args.workers)
            out.mkdir(parents=True, exist_ok=True)
            meta = cfg.to_dict(with_out=False)
            meta.update(n_list=args.n_list, D_list=args.D_list, methods=methods)
            (out / "fidelity_sweep.csv").write_text(format_csv("fidelity_sweep", FIDELITY_COLUMNS,
                                                              rows, meta))
            write_plot_script("fig3", out)
            for r in rows:
                print(f"{r[0]:5s} n={r[1]:2d} D={r[2]} max fidelity {r[3]:.6f} calls {r[5]}")
        elif args.command == "sweep-distance":
            tau_max = cfg.tau_max if cfg.tau_max is not None else 10.0
            rows = distance_sweep(args.n_list, cfg.J, cfg.h, cfg.boundary, cfg.initial_state,
                                  tau_max, args.samples, args.quadrature, args.workers)
            out.mkdir(parents=True, exist_ok=True)
            meta = {"J": cfg.J, "h": cfg.h, "boundary": cfg.boundary,
                    "initial_state": cfg.initial_state, "tau_max": tau_max,
                    "samples": args.samples, "quadrature": args.quadrature}
            (out / "distance_sweep.csv").write_text(format_csv("distance_sweep", DISTANCE_COLUMNS,
                                                              rows, meta))
            write_plot_script("fig1", out)
            for r in rows:
                print(f"n={r[0]:2d} distance {r[1]:.6e}")
        else:
            rows = gate_comparison(cfg)
            out.mkdir(parents=True, exist_ok=True)
            (out / "gates.csv").write_text(format_csv("gates", GATE_COLUMNS, rows,
                                                      cfg.to_dict(with_out=False)))
            for r in rows:
                print(f"{r[0]:5s} steps {r[1]} calls {r[2]} fidelity {r[3]:.6f} "
                      f"2q gates {r[4]} rotations {r[5]}")
    except (ConfigError, ValueError, OSError) as e:
        print(f"acqite: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
