"""Grid-convergence report: re-run scenarios on a finer grid and compare.

Exits 1 if any comparison falls outside its tolerance.

Usage: python scripts/oracle_report.py [--refinement 4] [--ids fig3b fig6c fig9]
"""
import argparse
import sys

from afcsim.oracles import fine_grid_cross_check, reports_to_text
from afcsim.scenarios import CATALOG_IDS


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--refinement", type=int, default=4)
    p.add_argument("--ids", nargs="+", choices=CATALOG_IDS, default=["fig3b", "fig6c", "fig9"], metavar="ID")
    p.add_argument("--csv", action="store_true", help="comma-separated instead of tab-separated")
    args = p.parse_args(argv)
    reports = []
    for sid in args.ids:
        reports.extend(fine_grid_cross_check(sid, args.refinement))
    sys.stdout.write(reports_to_text(reports, "," if args.csv else "\t"))
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} comparisons within tolerance", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
