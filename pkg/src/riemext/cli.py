"""Command-line interface.

::

    riemext curvature FILE --tensor NAME [--convention C] [--format F]
    riemext extend FILE [--c CFILE] [--omega NAMES] [--out PATH]
    riemext flow FILE --family {extension,constant-curvature} [--convention C]
    riemext verify FILE --suite NAME [--trials N] [--threshold X]

Exit status: 0 when output was produced and every check passed, 1 when some
check is NonZero or Unknown, 2 for usage, input or parse errors.  Random
sampling is seeded from ``--seed`` (default 0), falling back to RIEMEXT_SEED.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Optional, Sequence

from .curvature_zoo import DimensionError, concircular, conharmonic, weyl
from .dsl import ManifoldFile, ManifoldFileError, dumps_manifold, parse_c_file, parse_manifold
from .expr import ParseError, render
from .extension import ExtensionError, extend
from .flow import PreconditionError, einstein_flow, solve_extension_flow
from .geometry import Curvature, RicciConvention, SingularMetricError
from .report import Report
from .suites import SUITES, SuiteConfig, fresh_time, run_suite
from .tensor import IndexedTensor, ShapeError, SymmetryError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TENSORS = ("metric", "inverse-metric", "christoffel", "riemann", "riemann04", "ricci", "scalar",
           "concircular", "conharmonic", "weyl")
_METRIC_ONLY = {"metric", "inverse-metric", "riemann04", "scalar", "concircular", "conharmonic", "weyl"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("RIEMEXT_SEED")
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"RIEMEXT_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="riemext", description="Symbolic curvature, Riemann extensions and Ricci flow checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default):
        sp.add_argument("file", help="manifold definition file")
        sp.add_argument("--seed", type=int, default=None, help="sampling seed (default 0 or $RIEMEXT_SEED)")
        sp.add_argument("--trials", type=int, default=8, help="sample points for zero tests")
        sp.add_argument("--threshold", type=float, default=1e-9, help="numeric zero threshold")
        sp.add_argument("--format", choices=("text", "json", "latex"), default=fmt_default)

    sp = sub.add_parser("curvature", help="print a curvature tensor of the file's geometry")
    common(sp, "text")
    sp.add_argument("--tensor", required=True, choices=TENSORS)
    sp.add_argument("--convention", choices=("standard", "paper"), default="standard")

    sp = sub.add_parser("extend", help="write the modified Riemann extension as a manifold file")
    common(sp, "text")
    sp.add_argument("--c", dest="cfile", help="c-tensor file (default: the file's c block, else zero)")
    sp.add_argument("--omega", help="fibre coordinate names, comma or space separated")
    sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("flow", help="exact Ricci-flow family with its checks")
    common(sp, "json")
    sp.add_argument("--family", required=True, choices=("extension", "constant-curvature"))
    sp.add_argument("--convention", choices=("standard", "paper"), default=None)

    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp, "json")
    sp.add_argument("--suite", required=True, choices=(*SUITES, "all"))
    sp.add_argument("--convention", choices=("standard", "paper"), default=None,
                    help="override the suite's default convention")
    return p


def _tensor_text(t: IndexedTensor, fmt: str) -> str:
    if t.rank == 0:
        return render(t.value(), fmt)
    lines = []
    for idx, v in sorted(t.nonzero().items()):
        key = "[" + ",".join(map(str, idx)) + "]"
        lines.append(f"{key} = {render(v, fmt)}")
    return "\n".join(lines) if lines else "0"


def _compute_tensor(mf: ManifoldFile, name: str, conv: RicciConvention) -> IndexedTensor:
    if name in _METRIC_ONLY and mf.metric is None:
        raise UsageError(f"--tensor {name} needs a metric; {mf.path or mf.name} defines a connection only")
    if mf.metric is None:
        base = mf.base_geometry()
        if name == "christoffel":
            return base.connection.gamma
        if name == "riemann":
            return base.riemann
        return base.ricci(conv)
    m = mf.metric_structure()
    cv = Curvature(m, conv)
    if name == "metric":
        return m.g
    if name == "inverse-metric":
        return m.g_inv
    if name == "christoffel":
        return cv.connection.gamma
    if name == "riemann":
        return cv.riemann
    if name == "riemann04":
        return cv.riemann04
    if name == "ricci":
        return cv.ricci
    if name == "scalar":
        return IndexedTensor.scalar(m.chart, cv.scalar)
    if name == "concircular":
        return concircular(m, cv.riemann04, cv.scalar)
    if name == "conharmonic":
        return conharmonic(m, cv.riemann04, cv.ricci)
    return weyl(m, cv.riemann04, cv.ricci, cv.scalar)


def cmd_curvature(args, out) -> int:
    mf = parse_manifold(args.file)
    conv = RicciConvention.parse(args.convention)
    t = _compute_tensor(mf, args.tensor, conv)
    if args.format == "json":
        doc = {"tensor": args.tensor, "convention": conv.value, "coords": list(mf.coords), **t.to_json()}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(_tensor_text(t, args.format) + "\n")
    return EXIT_OK


def _omega(arg: Optional[str]) -> Optional[tuple]:
    if arg is None:
        return None
    names = tuple(s for s in arg.replace(",", " ").split() if s)
    if not names:
        raise UsageError("--omega needs at least one name")
    return names


def cmd_extend(args, out) -> int:
    mf = parse_manifold(args.file)
    c = parse_c_file(args.cfile, mf) if args.cfile else mf.c
    omega = _omega(args.omega) or mf.omega
    if omega is not None:
        bad = set(omega) & set(mf.params)
        if bad:
            raise UsageError(f"fibre names collide with params: {sorted(bad)}")
    ext = extend(mf.base_geometry(), ManifoldFile(mf.name, mf.coords, mf.params, omega, c=c).c_tensor(), omega)
    g = ext.metric.g
    ext_file = ManifoldFile(f"{mf.name}-extension", ext.chart.coords, mf.params,
                            metric={idx: v for idx, v in g.nonzero().items()})
    if args.format == "json":
        text = json.dumps({"name": ext_file.name, "coords": list(ext.chart.coords), "params": list(mf.params),
                           "omega": list(ext.omega), "metric": g.to_json(), "c": ext.c.to_json()}, indent=2) + "\n"
    elif args.format == "latex":
        text = _tensor_text(g, "latex") + "\n"
    else:
        text = dumps_manifold(ext_file)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _emit_report(rep: Report, args, out, extra: Optional[dict] = None) -> int:
    if args.format == "json":
        doc = rep.to_json()
        if extra:
            doc.update(extra)
        out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(rep.text() + "\n")
        if extra and "family" in extra:
            out.write("family:\n")
            for key, v in extra["family"]["components"].items():
                out.write(f"  {key} = {v}\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_flow(args, out) -> int:
    mf = parse_manifold(args.file)
    rng = random.Random(args.seed)
    tn = fresh_time(mf)
    if args.family == "extension":
        conv = RicciConvention.parse(args.convention or "paper")
        ext = extend(mf.base_geometry(), mf.c_tensor(), mf.omega)
        fl = solve_extension_flow(ext, conv, tn, args.trials, args.threshold, rng)
        rep, fam = fl.report, fl.family
    else:
        conv = RicciConvention.parse(args.convention or "paper")
        if mf.metric is None:
            raise UsageError("constant-curvature family needs a metric")
        fl = einstein_flow(mf.metric_structure(), conv, mf.name, tn, args.trials, args.threshold, rng)
        rep, fam = fl.report, fl.family
    extra = {"time": tn, "family": {"coords": list(fam.chart.coords), **fam.g.to_json()}}
    return _emit_report(rep, args, out, extra)


def cmd_verify(args, out) -> int:
    mf = parse_manifold(args.file)
    conv = RicciConvention.parse(args.convention) if args.convention else None
    cfg = SuiteConfig(args.trials, args.threshold, args.seed, conv)
    rep = run_suite(args.suite, mf, cfg)
    return _emit_report(rep, args, out)


COMMANDS = {"curvature": cmd_curvature, "extend": cmd_extend, "flow": cmd_flow, "verify": cmd_verify}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.seed = _seed(args.seed)
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        if not args.threshold > 0:
            raise UsageError("--threshold must be positive")
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"riemext: error: {exc}\n")
    except (ManifoldFileError, ParseError) as exc:
        err.write(f"riemext: parse error: {exc}\n")
    except OSError as exc:
        err.write(f"riemext: cannot read input: {exc}\n")
    except (ExtensionError, PreconditionError, DimensionError, SingularMetricError, ShapeError,
            SymmetryError) as exc:
        err.write(f"riemext: error: {exc}\n")
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
