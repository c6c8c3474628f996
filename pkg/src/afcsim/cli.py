"""Command-line entry point: ``afcsim run|catalog|describe``."""
from __future__ import annotations

import argparse
import json
import sys

from .errors import AfcSimError
from .scenarios import CATALOG_IDS, catalog_text, list_catalog, resolve, run_scenario, with_overrides


def _print_summary(summary: dict) -> None:
    print(f"scenario {summary['scenario']} (seed {summary['seed']})")
    for name, run in summary["runs"].items():
        echo = run["echo"]
        if echo is None:
            print(f"  {name}: no echo")
            continue
        peaks = ", ".join(f"{p['time_ns']:.2f}" for p in echo.get("envelope_peaks", echo["peaks"]))
        line = f"  {name}: echo peaks [{peaks}] ns, main FWHM {echo['fwhm_ns']:.3g} ns, energy {echo['energy']:.4g}"
        if "compression" in run:
            line += f", kappa {run['compression']['kappa']:.3g}"
        print(line)
        for w in run["warnings"]:
            print(f"    warning: {w}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="afcsim", description="Programmable AFC pulse-processor simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file or catalog id")
    r.add_argument("config", help="path to a TOML scenario or a catalog id (e.g. fig3b)")
    r.add_argument("--seed", type=int, default=None, help="base RNG seed (variant i uses seed + i)")
    r.add_argument("--grid-dt", type=float, default=None, help="override the time step (ns)")
    r.add_argument("--out", default=None, help="output directory (default out/<name>)")
    r.add_argument("--json", action="store_true", help="print the full summary as JSON")

    sub.add_parser("catalog", help="list built-in scenarios")

    d = sub.add_parser("describe", help="print a catalog scenario's config")
    d.add_argument("id", choices=CATALOG_IDS, metavar="id")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        for sid, desc in list_catalog():
            print(f"{sid:8s} {' '.join(desc.split())}")
        return 0
    if args.command == "describe":
        sys.stdout.write(catalog_text(args.id))
        return 0
    try:
        config = with_overrides(resolve(args.config), args.seed, args.grid_dt)
        summary = run_scenario(config, args.out)
    except AfcSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        _print_summary(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
