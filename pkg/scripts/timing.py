"""Wall-clock cost of the curvature pipeline per manifold file.

    python3 scripts/timing.py
"""

import time
from pathlib import Path

from riemext.dsl import parse_manifold
from riemext.flow import flow_rhs
from riemext.geometry import Curvature, RicciConvention

ROOT = Path(__file__).resolve().parent.parent

for f in sorted((ROOT / "manifolds").glob("*.man")):
    if f.stem.endswith("_c"):  # c-tensor files, not manifolds
        continue
    mf = parse_manifold(f)
    if mf.metric is None:
        continue
    t0 = time.perf_counter()
    m = mf.metric_structure()
    cv = Curvature(m, RicciConvention.STANDARD)
    _ = cv.scalar
    t1 = time.perf_counter()
    flow_rhs(m)
    t2 = time.perf_counter()
    print(f"{f.name:22s} dim={mf.dim}  curvature {t1 - t0:6.2f}s  flow_rhs {t2 - t1:6.2f}s  "
          f"nonzero Riemann {len(cv.riemann04.nonzero()):4d}")
