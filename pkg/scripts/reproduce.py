"""Rerun every verification on the bundled manifolds and print the reports.

    python3 scripts/reproduce.py [--json OUT] [--seed N]

Discrepancies between the printed results and the computed ones show up as
``discrepancy`` lines; failures as ``fail``.  Exit status follows the CLI
(0 all ok, 1 something failed).
"""

import argparse
import json
import sys
import time
from pathlib import Path

from riemext.dsl import parse_manifold
from riemext.flow import constant_curvature_solution, hyperbolic_printed_flow_discrepancy, solve_extension_flow
from riemext.extension import extend
from riemext.geometry import RicciConvention
from riemext.models import hyperbolic
from riemext.suites import SuiteConfig, run_suite

ROOT = Path(__file__).resolve().parent.parent
FILES = ["hyperbolic.man", "flat.man", "sphere2.man", "sphere3.man", "hyperbolic3.man", "warped.man",
         "schwarzschild.man", "flat_connection.man"]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", type=Path, help="also write all reports to this file")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    cfg = SuiteConfig(seed=args.seed)
    docs, ok = [], True

    for name in FILES:
        mf = parse_manifold(ROOT / "manifolds" / name)
        t0 = time.perf_counter()
        rep = run_suite("all", mf, cfg)
        print(f"== {name} ({time.perf_counter() - t0:.1f}s)")
        print(rep.text())
        docs.append({"file": name, **rep.to_json()})
        ok &= rep.ok

    print("== constant-curvature families (paper convention)")
    for n in (2, 3):
        cc = constant_curvature_solution("hyperbolic_n", n, RicciConvention.PAPER)
        print(f"-- n = {n}")
        print(cc.report.text())
        docs.append({"family": f"hyperbolic_{n}", **cc.report.to_json()})
        ok &= cc.report.ok

    flow = solve_extension_flow(extend(hyperbolic(2), omega_names=("P", "Q")), RicciConvention.PAPER)
    print("== printed flow of the hyperbolic extension")
    print(hyperbolic_printed_flow_discrepancy(flow).to_json())

    if args.json:
        args.json.write_text(json.dumps({"schema": 1, "reports": docs}, indent=2, ensure_ascii=False))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
