"""Command-line entry point: ``egim {sweep,theory,desync,plot}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .sim.config import PRESETS, ConfigError, SimConfig, load_configs
from .sim.desync import desync_experiment
from .sim.output import emit_csv, emit_plot, read_csv
from .sim.sweep import run_sweep, theory_result


def _configs(args) -> list[SimConfig]:
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset, not both")
    if args.config:
        cfgs = load_configs(args.config)
    elif args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        cfgs = PRESETS[args.preset]
    else:
        cfgs = [SimConfig()]
    if args.seed is not None:
        cfgs = [c.with_overrides(seed=args.seed) for c in cfgs]
    return cfgs


def cmd_sweep(args) -> int:
    out = Path(args.out)
    for cfg in _configs(args):
        res = run_sweep(cfg, workers=args.workers)
        path = emit_csv(res, out / f"{cfg.name}.csv")
        print(f"{cfg.name}: wrote {path}")
        for p in res.points:
            print(f"  {p.snr_db:6.2f} dB  frames={p.frames:<7d} ser={p.ser:.4e}  ber={p.ber:.4e}")
    return 0


def cmd_theory(args) -> int:
    out = Path(args.out)
    for cfg in _configs(args):
        if cfg.scheme not in ("egim4qam", "egim8psk"):
            print(f"{cfg.name}: no closed form, skipped", file=sys.stderr)
            continue
        res = theory_result(cfg.scheme, cfg.snr_db, cfg.channel, cfg.policy)
        path = emit_csv(res, out / f"{cfg.scheme}-theory.csv")
        print(f"{cfg.scheme}: wrote {path}")
    return 0


def cmd_desync(args) -> int:
    seed = 0 if args.seed is None else args.seed
    reports = [desync_experiment(s, trials=args.trials, seed=seed, inject=True)
               for s in ("egim4qam", "autoencoder")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "desync.json"
    path.write_text(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", encoding="utf-8")
    for r in reports:
        print(f"{r.scheme}: downstream BER {r.mean_downstream_ber:.3f}, "
              f"max error bits {r.max_error_bits}, max span {r.max_error_span}")
    print(f"wrote {path}")
    return 0


def cmd_plot(args) -> int:
    results = [res for csv_path in args.csv for res in read_csv(csv_path)]
    if args.theory:
        for scheme in sorted({r.scheme for r in results if r.kind == "sim"}):
            if scheme in ("egim4qam", "egim8psk"):
                sims = [r for r in results if r.scheme == scheme]
                results.append(theory_result(scheme, sorted({s for r in sims for s in r.snr_db})))
    path = Path(args.out) / args.name
    labels = emit_plot(results, path)
    if labels:
        print(f"wrote {path} ({len(labels)} series)")
    else:
        print("nothing to plot", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON SimConfig (object or list of objects)")
    common.add_argument("--preset", help=f"built-in experiment: {', '.join(sorted(PRESETS))}")
    common.add_argument("--seed", type=int, help="override the config seed (u64)")
    common.add_argument("--out", default="results", help="output directory")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="egim", description="EGIM OFDM-IM link simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="Monte Carlo SER/BER sweep").set_defaults(func=cmd_sweep)
    sub.add_parser("theory", parents=[common], help="closed-form SER curves").set_defaults(func=cmd_theory)
    p = sub.add_parser("desync", parents=[common], help="single on/off flip injection")
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_desync)
    p = sub.add_parser("plot", parents=[common], help="overlay CSV results as SVG")
    p.add_argument("csv", nargs="+", help="CSV files written by sweep/theory")
    p.add_argument("--name", default="curves.svg")
    p.add_argument("--theory", action="store_true", help="add closed-form curves for EGIM schemes")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"egim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
