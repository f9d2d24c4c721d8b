"""Manifold definition files.

A file declares a chart and either a metric or a torsion-free connection,
optionally a symmetric deformation tensor ``c`` and fibre coordinate names.
Indices are 1-based.  Blank lines and ``#`` comments are ignored.

::

    file       = { line } ;
    line       = [ statement ] , [ comment ] , newline ;
    statement  = directive | header | entry ;
    directive  = "name" , word
               | "coords" , ident , { ident }
               | "params" , ident , { ident }
               | "omega" , ident , { ident } ;
    header     = ( "metric" | "connection" | "c" ) , ":" ;
    entry      = component , "=" , expr ;
    component  = ( "g" | "Gamma" | "c" ) , "[" , index , { "," , index } , "]" ;
    index      = digit , { digit } ;
    comment    = "#" , { any character } ;

``expr`` is the expression grammar of :mod:`riemext.expr.parser`.  Entries
belong to the most recent header: ``g[i,j]`` under ``metric:``,
``Gamma[k,i,j]`` (Γ^k_ij) under ``connection:``, ``c[i,j]`` under ``c:``.
Symmetric blocks take only ``i <= j`` entries (``j <= k`` for Γ) and are
mirrored.  ``params`` declares constant symbols such as a mass parameter;
expressions may use only coords and params.

A c-tensor file uses the same syntax; the ``c:`` header is optional there and
a ``coords`` line, if present, must match the manifold's chart.

Example::

    name hyperbolic
    coords x y
    omega P Q
    metric:
      g[1,1] = 1/y^2
      g[2,2] = 1/y^2
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .expr import ParseError, parse_expression, render
from .extension import BaseGeometry, ctensor
from .geometry import Connection, MetricStructure, metric_from_components
from .tensor import DOWN, UP, Chart, IndexedTensor

_IDENT = re.compile(r"[^\W\d]\w*")
_ENTRY = re.compile(r"\s*(?P<head>[^\W\d]\w*)\s*\[(?P<idx>[^\]]*)\]\s*=(?P<rhs>.*)$")
_HEADS = {"metric": ("g", 2), "connection": ("Gamma", 3), "c": ("c", 2)}
_DIRECTIVES = ("name", "coords", "params", "omega")


class ManifoldFileError(ValueError):
    """Validation error with a source location."""

    def __init__(self, message: str, line: int, column: int = 1, path: Optional[str] = None):
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class ManifoldFile:
    name: str
    coords: tuple
    params: tuple = ()
    omega: Optional[tuple] = None
    metric: Optional[dict] = None
    connection: Optional[dict] = None
    c: Optional[dict] = None
    path: Optional[str] = None

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def chart(self) -> Chart:
        return Chart(self.coords)

    def metric_structure(self) -> MetricStructure:
        if self.metric is None:
            raise ValueError(f"{self.name}: file defines a connection, not a metric")
        return metric_from_components(self.chart, self.metric)

    def connection_object(self) -> Connection:
        if self.connection is None:
            return self.metric_structure().levi_civita
        gamma = IndexedTensor(self.chart, (UP, DOWN, DOWN), self.connection)
        return Connection(self.chart, gamma)

    def base_geometry(self) -> BaseGeometry:
        if self.metric is not None:
            return BaseGeometry.from_metric(self.metric_structure())
        return BaseGeometry.from_connection(self.connection_object())

    def c_tensor(self) -> IndexedTensor:
        return ctensor(self.chart, self.c or {}, forbidden=self.omega or ())


def _split_comment(raw: str) -> str:
    pos = raw.find("#")
    return raw if pos < 0 else raw[:pos]


def _names(rest: str, lineno: int, col: int, path) -> tuple:
    out = []
    for m in re.finditer(r"\S+", rest):
        if not _IDENT.fullmatch(m.group()):
            raise ManifoldFileError(f"invalid identifier {m.group()!r}", lineno, col + m.start(), path)
        out.append(m.group())
    if not out:
        raise ManifoldFileError("expected at least one name", lineno, col, path)
    if len(set(out)) != len(out):
        raise ManifoldFileError("duplicate name", lineno, col, path)
    return tuple(out)


def parse_manifold_text(text: str, path: Optional[str] = None, c_only: bool = False,
                        coords: Optional[tuple] = None, params: tuple = ()) -> ManifoldFile:
    """Parse and validate a manifold (or, with ``c_only``, a c-tensor) source."""
    name = None
    decl: dict = {"coords": coords, "params": tuple(params) if c_only else None, "omega": None}
    blocks: dict = {}
    block = "c" if c_only else None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _split_comment(raw)
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        word, _, rest = stripped.partition(" ")
        if stripped.endswith(":") and stripped[:-1].strip() in _HEADS:
            block = stripped[:-1].strip()
            if c_only and block != "c":
                raise ManifoldFileError(f"a c-tensor file cannot contain a {block!r} block", lineno, col, path)
            if block in blocks:
                raise ManifoldFileError(f"duplicate {block!r} block", lineno, col, path)
            blocks[block] = {}
            continue
        if word in _DIRECTIVES and "=" not in stripped:
            rcol = col + len(word) + 1
            if word == "name":
                if c_only:
                    continue
                if name is not None:
                    raise ManifoldFileError("duplicate 'name'", lineno, col, path)
                name = rest.strip()
                if not name:
                    raise ManifoldFileError("empty name", lineno, rcol, path)
                continue
            vals = _names(rest, lineno, rcol, path)
            if c_only and word == "coords":
                if coords is not None and vals != tuple(coords):
                    raise ManifoldFileError(f"coords {list(vals)} do not match the manifold chart {list(coords)}",
                                            lineno, rcol, path)
                decl["coords"] = vals
                continue
            if c_only:
                continue
            if decl[word] is not None:
                raise ManifoldFileError(f"duplicate {word!r}", lineno, col, path)
            decl[word] = vals
            continue
        m = _ENTRY.match(line)
        if m is None:
            raise ManifoldFileError(f"cannot parse line: {stripped!r}", lineno, col, path)
        if block is None:
            raise ManifoldFileError("component entry outside a block (add 'metric:' or 'connection:')",
                                    lineno, col, path)
        if c_only and "c" not in blocks:
            blocks["c"] = {}
        entries.append((block, lineno, m, line))

    coords_t = decl["coords"]
    if coords_t is None:
        raise ManifoldFileError("missing 'coords' declaration", 1, 1, path)
    params_t = decl["params"] or ()
    omega_t = decl["omega"]
    clash = set(coords_t) & set(params_t)
    if clash:
        raise ManifoldFileError(f"names declared as both coords and params: {sorted(clash)}", 1, 1, path)
    if omega_t is not None:
        if len(omega_t) != len(coords_t):
            raise ManifoldFileError(f"need {len(coords_t)} omega names, got {len(omega_t)}", 1, 1, path)
        bad = set(omega_t) & (set(coords_t) | set(params_t))
        if bad:
            raise ManifoldFileError(f"omega names collide with declared symbols: {sorted(bad)}", 1, 1, path)
    n = len(coords_t)
    allowed = set(coords_t) | set(params_t)

    for blk, lineno, m, line in entries:
        head, arity = _HEADS[blk]
        hcol = m.start("head") + 1
        if m.group("head") != head:
            raise ManifoldFileError(f"expected {head}[...] in the {blk!r} block, found {m.group('head')!r}",
                                    lineno, hcol, path)
        icol = m.start("idx") + 1
        parts = [p.strip() for p in m.group("idx").split(",")]
        if len(parts) != arity or not all(p.isdigit() for p in parts):
            raise ManifoldFileError(f"{head} takes {arity} integer indices", lineno, icol, path)
        idx = tuple(int(p) for p in parts)
        for k in idx:
            if not 1 <= k <= n:
                raise ManifoldFileError(f"index {k} out of range 1..{n} in {head}{list(idx)}", lineno, icol, path)
        if idx[-2] > idx[-1]:
            raise ManifoldFileError(f"{head}{list(idx)}: give only entries with lower indices in order "
                                    f"(the block is mirrored automatically)", lineno, icol, path)
        rhs = m.group("rhs")
        rcol = m.start("rhs") + 1
        try:
            expr = parse_expression(rhs, lineno, rcol)
        except ParseError as exc:
            raise ManifoldFileError(exc.message, exc.line, exc.column, path) from None
        unknown = expr.free_symbols() - allowed
        if unknown:
            raise ManifoldFileError(f"undeclared symbol(s) {sorted(unknown)} in {head}{list(idx)}",
                                    lineno, rcol, path)
        comps = blocks.setdefault(blk, {})
        if idx in comps:
            raise ManifoldFileError(f"duplicate entry {head}{list(idx)}", lineno, hcol, path)
        comps[idx] = expr

    full = {blk: _mirror(comps) for blk, comps in blocks.items()}
    if c_only:
        return ManifoldFile("c", tuple(coords_t), params_t, None, None, None, full.get("c", {}), path)
    if ("metric" in blocks) == ("connection" in blocks):
        raise ManifoldFileError("need exactly one of a 'metric:' or a 'connection:' block", 1, 1, path)
    return ManifoldFile(name or (Path(path).stem if path else "manifold"), tuple(coords_t), params_t, omega_t,
                        full.get("metric"), full.get("connection"), full.get("c"), path)


def _mirror(comps: dict) -> dict:
    out = dict(comps)
    for idx, v in comps.items():
        swapped = idx[:-2] + (idx[-1], idx[-2])
        out[swapped] = v
    return out


def parse_manifold(path) -> ManifoldFile:
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return parse_manifold_text(text, str(p))


def parse_c_file(path, manifold: ManifoldFile) -> dict:
    p = Path(path)
    mf = parse_manifold_text(p.read_text(encoding="utf-8"), str(p), c_only=True, coords=manifold.coords,
                             params=manifold.params)
    return mf.c or {}


def dumps_manifold(mf: ManifoldFile) -> str:
    """Render a ManifoldFile back to source (upper-triangle entries only)."""
    lines = [f"name {mf.name}", "coords " + " ".join(mf.coords)]
    if mf.params:
        lines.append("params " + " ".join(mf.params))
    if mf.omega:
        lines.append("omega " + " ".join(mf.omega))
    for blk in ("metric", "connection", "c"):
        comps = getattr(mf, blk)
        if comps is None:
            continue
        head = _HEADS[blk][0]
        lines.append(f"{blk}:")
        for idx in sorted(comps):
            if idx[-2] <= idx[-1]:
                lines.append(f"  {head}[{','.join(map(str, idx))}] = {render(comps[idx], 'text')}")
    return "\n".join(lines) + "\n"

