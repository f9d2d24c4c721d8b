"""Dense-semantics indexed tensors of expressions over a coordinate chart.

Indices are 1-based everywhere.  Only nonzero components are stored; any
in-range lookup succeeds and returns ``ZERO`` for an absent entry.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .expr import ZERO, Expression, ZeroVerdict, combine, esum, is_zero, render, to_expr
from .expr.evaluate import DEFAULT_THRESHOLD, DEFAULT_TRIALS, ZERO_VERDICT

UP, DOWN = "up", "down"


class ShapeError(ValueError):
    pass


class SymmetryError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    coords: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        if not coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(coords)) != len(coords):
            raise ValueError(f"duplicate coordinate symbols in {coords}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


class IndexedTensor:
    """Rank-k array of canonical expressions with declared index variances."""

    __slots__ = ("chart", "variance", "_comps")

    def __init__(
        self,
        chart: Chart,
        variance: Sequence[str],
        components: Mapping[tuple, object] = (),
        symmetries: Iterable[tuple] = (),
    ):
        variance = tuple(variance)
        for v in variance:
            if v not in (UP, DOWN):
                raise ShapeError(f"variance must be 'up' or 'down', got {v!r}")
        self.chart = chart
        self.variance = variance
        n = chart.dim
        comps = {}
        items = components.items() if isinstance(components, Mapping) else components
        for idx, val in items:
            idx = tuple(idx)
            if len(idx) != len(variance) or any(not 1 <= i <= n for i in idx):
                raise ShapeError(f"index {idx} out of range for rank {len(variance)} on a {n}-chart")
            e = to_expr(val)
            if not e.is_zero_canonical():
                comps[idx] = e
        self._comps = comps
        for sym in symmetries:
            self.check_symmetry(*sym)

    @classmethod
    def _trusted(cls, chart: Chart, variance: tuple, comps: dict) -> "IndexedTensor":
        self = object.__new__(cls)
        self.chart = chart
        self.variance = variance
        self._comps = {k: v for k, v in comps.items() if not v.is_zero_canonical()}
        return self

    @classmethod
    def zeros(cls, chart: Chart, variance: Sequence[str]) -> "IndexedTensor":
        return cls._trusted(chart, tuple(variance), {})

    @classmethod
    def from_function(cls, chart: Chart, variance: Sequence[str], fn: Callable[..., object]) -> "IndexedTensor":
        variance = tuple(variance)
        comps = {idx: to_expr(fn(*idx)) for idx in _index_space(chart.dim, len(variance))}
        return cls._trusted(chart, variance, comps)

    @classmethod
    def scalar(cls, chart: Chart, value) -> "IndexedTensor":
        return cls._trusted(chart, (), {(): to_expr(value)})

    # -- access ---------------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __getitem__(self, idx) -> Expression:
        if not isinstance(idx, tuple):
            idx = (idx,)
        if len(idx) != self.rank or any(not 1 <= i <= self.dim for i in idx):
            raise IndexError(f"index {idx} out of range for rank {self.rank} on a {self.dim}-chart")
        return self._comps.get(idx, ZERO)

    def value(self) -> Expression:
        """The single component of a rank-0 tensor."""
        if self.rank:
            raise ShapeError("value() needs a scalar tensor")
        return self._comps.get((), ZERO)

    def nonzero(self) -> dict:
        return dict(self._comps)

    def items(self) -> Iterator:
        return iter(self._comps.items())

    def indices(self) -> Iterator[tuple]:
        return _index_space(self.dim, self.rank)

    def is_zero_canonical(self) -> bool:
        return not self._comps

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexedTensor):
            return NotImplemented
        return self.chart == other.chart and self.variance == other.variance and self._comps == other._comps

    __hash__ = None

    def __repr__(self) -> str:
        return f"IndexedTensor(variance={self.variance}, dim={self.dim}, nonzero={len(self._comps)})"

    # -- symmetry -------------------------------------------------------------

    def check_symmetry(self, slot_a: int, slot_b: int, sign: int = 1) -> None:
        """Raise SymmetryError unless swapping the two slots multiplies by ``sign``."""
        a, b = slot_a - 1, slot_b - 1
        if not (0 <= a < self.rank and 0 <= b < self.rank) or a == b:
            raise ShapeError(f"bad symmetry slots {slot_a}, {slot_b}")
        if self.variance[a] != self.variance[b]:
            raise SymmetryError("symmetric slots must share variance")
        for idx in set(self._comps) | {_swap(k, a, b) for k in self._comps}:
            lhs = self[idx]
            rhs = self[_swap(idx, a, b)]
            if not (lhs - rhs * sign).is_zero_canonical():
                raise SymmetryError(f"component {idx} breaks symmetry in slots ({slot_a},{slot_b})")

    # -- arithmetic sugar -----------------------------------------------------

    def __add__(self, other: "IndexedTensor") -> "IndexedTensor":
        return tensor_add(self, other)

    def __sub__(self, other: "IndexedTensor") -> "IndexedTensor":
        return tensor_add(self, tensor_scale(other, -1))

    def __neg__(self) -> "IndexedTensor":
        return tensor_scale(self, -1)

    def __mul__(self, k) -> "IndexedTensor":
        return tensor_scale(self, k)

    __rmul__ = __mul__

    # -- serialization --------------------------------------------------------

    def to_json(self, fmt: str = "text") -> dict:
        comps = {}
        for idx in sorted(self._comps):
            comps["[" + ",".join(map(str, idx)) + "]"] = render(self._comps[idx], fmt)
        return {"variance": list(self.variance), "dim": self.dim, "components": comps}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, chart: Chart, obj: Mapping) -> "IndexedTensor":
        from .expr import parse_expression

        if obj["dim"] != chart.dim:
            raise ShapeError(f"dump has dim {obj['dim']}, chart has {chart.dim}")
        comps = {}
        for key, text in obj["components"].items():
            idx = tuple(int(s) for s in key.strip("[]").split(",") if s.strip())
            comps[idx] = parse_expression(text)
        return cls(chart, obj["variance"], comps)


def _swap(idx: tuple, a: int, b: int) -> tuple:
    lst = list(idx)
    lst[a], lst[b] = lst[b], lst[a]
    return tuple(lst)


def _index_space(n: int, rank: int) -> Iterator[tuple]:
    return itertools.product(range(1, n + 1), repeat=rank)


def _require_same_shape(a: IndexedTensor, b: IndexedTensor) -> None:
    if a.chart != b.chart:
        raise ShapeError("tensors live on different charts")
    if a.variance != b.variance:
        raise ShapeError(f"variance mismatch: {a.variance} vs {b.variance}")


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def tensor_add(*ts: IndexedTensor) -> IndexedTensor:
    first = ts[0]
    for t in ts[1:]:
        _require_same_shape(first, t)
    groups: dict = {}
    for t in ts:
        for k, v in t._comps.items():
            groups.setdefault(k, []).append(v)
    return IndexedTensor._trusted(first.chart, first.variance, {k: esum(vs) for k, vs in groups.items()})


def tensor_scale(t: IndexedTensor, k) -> IndexedTensor:
    k = to_expr(k)
    if k.is_zero_canonical():
        return IndexedTensor.zeros(t.chart, t.variance)
    return IndexedTensor._trusted(t.chart, t.variance, {i: v * k for i, v in t._comps.items()})


def tensor_mul_outer(a: IndexedTensor, b: IndexedTensor) -> IndexedTensor:
    if a.chart != b.chart:
        raise ShapeError("tensors live on different charts")
    comps = {}
    for ia, va in a._comps.items():
        for ib, vb in b._comps.items():
            comps[ia + ib] = va * vb
    return IndexedTensor._trusted(a.chart, a.variance + b.variance, comps)


def contract(t: IndexedTensor, slot_a: int, slot_b: int) -> IndexedTensor:
    """Trace over one up and one down slot (1-based positions)."""
    a, b = slot_a - 1, slot_b - 1
    if not (0 <= a < t.rank and 0 <= b < t.rank):
        raise ShapeError(f"slot out of range for rank {t.rank}")
    if a == b:
        raise ShapeError("contraction slots must differ")
    if {t.variance[a], t.variance[b]} != {UP, DOWN}:
        raise ShapeError("contraction pairs one up slot with one down slot")
    keep = [s for s in range(t.rank) if s not in (a, b)]
    groups: dict = {}
    for idx, v in t._comps.items():
        if idx[a] == idx[b]:
            groups.setdefault(tuple(idx[s] for s in keep), []).append(v)
    variance = tuple(t.variance[s] for s in keep)
    return IndexedTensor._trusted(t.chart, variance, {k: esum(vs) for k, vs in groups.items()})


def contract_product(a: IndexedTensor, b: IndexedTensor, pairs: Sequence[tuple]) -> IndexedTensor:
    """Contract ``a ⊗ b`` over (slot_in_a, slot_in_b) pairs without forming it.

    Result indices: the free slots of ``a`` in order, then those of ``b``.
    Each pair must join an up slot with a down slot.
    """
    if a.chart != b.chart:
        raise ShapeError("tensors live on different charts")
    sa = [p[0] - 1 for p in pairs]
    sb = [p[1] - 1 for p in pairs]
    for i, j in zip(sa, sb):
        if not (0 <= i < a.rank and 0 <= j < b.rank):
            raise ShapeError("contraction slot out of range")
        if {a.variance[i], b.variance[j]} != {UP, DOWN}:
            raise ShapeError("contraction pairs one up slot with one down slot")
    free_a = [s for s in range(a.rank) if s not in sa]
    free_b = [s for s in range(b.rank) if s not in sb]
    by_key: dict = {}
    for idx, v in b._comps.items():
        by_key.setdefault(tuple(idx[j] for j in sb), []).append((tuple(idx[s] for s in free_b), v))
    groups: dict = {}
    for idx, va in a._comps.items():
        hits = by_key.get(tuple(idx[i] for i in sa))
        if not hits:
            continue
        head = tuple(idx[s] for s in free_a)
        for tail, vb in hits:
            groups.setdefault(head + tail, []).append(va * vb)
    variance = tuple(a.variance[s] for s in free_a) + tuple(b.variance[s] for s in free_b)
    return IndexedTensor._trusted(a.chart, variance, {k: esum(vs) for k, vs in groups.items()})


def permute(t: IndexedTensor, order: Sequence[int]) -> IndexedTensor:
    """Reorder slots: result slot ``i`` is input slot ``order[i]`` (1-based)."""
    order = [o - 1 for o in order]
    if sorted(order) != list(range(t.rank)):
        raise ShapeError(f"{order} is not a permutation of the slots")
    comps = {tuple(idx[o] for o in order): v for idx, v in t._comps.items()}
    return IndexedTensor._trusted(t.chart, tuple(t.variance[o] for o in order), comps)


def _move_last(t: IndexedTensor, target: int) -> IndexedTensor:
    """Move the last slot to 1-based position ``target``."""
    r = t.rank
    order = list(range(1, r))
    order.insert(target - 1, r)
    return permute(t, order)


def raise_index(t: IndexedTensor, slot: int, metric, target: Optional[int] = None) -> IndexedTensor:
    """Contract a down slot with the inverse metric; the new up index lands at
    ``target`` (default: the same position)."""
    if not 1 <= slot <= t.rank or t.variance[slot - 1] != DOWN:
        raise ShapeError(f"slot {slot} is not a down index")
    out = contract_product(t, metric.g_inv, [(slot, 1)])
    return _move_last(out, target or slot)


def lower_index(t: IndexedTensor, slot: int, metric, target: Optional[int] = None) -> IndexedTensor:
    """Contract an up slot with the metric; the new down index lands at
    ``target`` (default: the same position)."""
    if not 1 <= slot <= t.rank or t.variance[slot - 1] != UP:
        raise ShapeError(f"slot {slot} is not an up index")
    out = contract_product(t, metric.g, [(slot, 1)])
    return _move_last(out, target or slot)


def map_components(t: IndexedTensor, f: Callable[[Expression], object]) -> IndexedTensor:
    """Apply ``f`` to every stored component (``f(0)`` must be 0)."""
    return IndexedTensor._trusted(t.chart, t.variance, {k: to_expr(f(v)) for k, v in t._comps.items()})


def kronecker(chart: Chart) -> IndexedTensor:
    from .expr import ONE

    return IndexedTensor._trusted(chart, (UP, DOWN), {(i, i): ONE for i in range(1, chart.dim + 1)})


def tensor_is_zero(
    t: IndexedTensor,
    trials: int = DEFAULT_TRIALS,
    threshold: float = DEFAULT_THRESHOLD,
    rng: Optional[random.Random] = None,
) -> ZeroVerdict:
    """Componentwise zero test; a NonZero verdict records the offending index."""
    if t.is_zero_canonical():
        return ZERO_VERDICT
    rng = rng if rng is not None else random.Random(0)
    verdicts = []
    for idx in sorted(t._comps):
        v = is_zero(t._comps[idx], trials, threshold, rng)
        if v.witness is not None or not v.is_zero:
            v = ZeroVerdict(v.verdict, v.witness, v.value, idx)
        verdicts.append(v)
        if v.witness is not None:
            break
    return combine(verdicts)
