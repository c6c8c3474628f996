"""Run every built-in scenario and write its outputs under one directory.

Usage: python scripts/reproduce_catalog.py [--out out] [--only fig3b fig9]
"""
import argparse
import os
import sys
import time

from afcsim.scenarios import CATALOG_IDS, catalog_config, run_scenario


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="out", help="parent output directory")
    p.add_argument("--only", nargs="+", choices=CATALOG_IDS, metavar="ID", help="subset of catalog ids")
    args = p.parse_args(argv)
    for sid in args.only or CATALOG_IDS:
        t0 = time.perf_counter()
        summary = run_scenario(catalog_config(sid), os.path.join(args.out, sid))
        parts = []
        for name, run in summary["runs"].items():
            echo = run["echo"]
            if echo is None:
                parts.append(f"{name}: no echo")
                continue
            peaks = echo.get("envelope_peaks", echo["peaks"])
            times = "/".join(f"{pk['time_ns']:.1f}" for pk in peaks)
            parts.append(f"{name}: {times} ns")
        print(f"{sid:7s} {time.perf_counter() - t0:5.1f} s  " + "; ".join(parts))
    return 0


if __name__ == "__main__":
    sys.exit(main())
