"""Exact symbolic scalars in canonical rational-function form.

Every :class:`Expression` is stored as ``num / den`` where ``num`` is an
expanded polynomial whose monomials may carry a single exponential kernel
``exp(a)``, and ``den`` is a product of powers of irreducible, exp-free (or
atomic) polynomial factors.  The fraction is kept reduced, so two equal
rational functions of the variables and of independent exponential kernels
share one representation, and canonical zero means an empty numerator.

Monomials are ``(powers, exparg)`` pairs: ``powers`` is a tuple of
``(symbol, exponent)`` sorted by symbol name with positive exponents, and
``exparg`` is ``None`` or the canonical Expression inside ``exp(...)``.
Products of kernels merge, ``exp(a)*exp(b) -> exp(a+b)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]
ExprLike = Union["Expression", int, Fraction]

ONE_MONO = ((), None)


# ---------------------------------------------------------------------------
# monomials
# ---------------------------------------------------------------------------

def _merge_powers(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        na, ea = a[i]
        nb, eb = b[j]
        if na == nb:
            e = ea + eb
            if e:
                out.append((na, e))
            i += 1
            j += 1
        elif na < nb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _merge_exp(a, b):
    if a is None:
        return b
    if b is None:
        return a
    s = a + b
    return None if s.is_zero_canonical() else s


@lru_cache(maxsize=1 << 18)
def mono_mul(m1: tuple, m2: tuple) -> tuple:
    return (_merge_powers(m1[0], m2[0]), _merge_exp(m1[1], m2[1]))


def _powers_divide(a: tuple, b: tuple):
    """a / b for power tuples, or None if some exponent would go negative."""
    da = dict(a)
    for name, e in b:
        k = da.get(name, 0) - e
        if k < 0:
            return None
        if k:
            da[name] = k
        else:
            del da[name]
    return tuple(sorted(da.items()))


def mono_degree(m: tuple) -> int:
    return sum(e for _, e in m[0])


def mono_sort_key(m: tuple):
    powers, earg = m
    if earg is None:
        return (0, (), -mono_degree(m), powers)
    return (1, earg.sort_key(), -mono_degree(m), powers)


# ---------------------------------------------------------------------------
# polynomials: dict monomial -> nonzero Fraction
# ---------------------------------------------------------------------------

def poly_add_into(acc: dict, p: Mapping, scale: Fraction = Fraction(1)) -> None:
    for m, c in p.items():
        v = acc.get(m, 0) + c * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


def poly_mul(p: Mapping, q: Mapping) -> dict:
    if len(p) > len(q):
        p, q = q, p
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def poly_scale(p: Mapping, c: Fraction) -> dict:
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def poly_key(p: Mapping) -> tuple:
    return tuple(sorted(((mono_sort_key(m), c) for m, c in p.items()), key=lambda kc: kc[0]))


def poly_vars(p: Mapping) -> frozenset:
    out = set()
    for (powers, earg) in p:
        out.update(n for n, _ in powers)
    return frozenset(out)


def poly_has_exp(p: Mapping) -> bool:
    return any(earg is not None for (_, earg) in p)


def _lex_vector(powers: tuple, order: tuple) -> tuple:
    d = dict(powers)
    return tuple(d.get(v, 0) for v in order)


def poly_leading(p: Mapping, order: tuple):
    """Leading (monomial, coefficient) under lex order with ``order[0]`` highest."""
    best = None
    best_key = None
    for m, c in p.items():
        k = _lex_vector(m[0], order)
        if best_key is None or k > best_key:
            best, best_key = (m, c), k
    return best


def _degrees(p: Mapping) -> dict:
    out: dict = {}
    for (powers, _) in p:
        for n, e in powers:
            if e > out.get(n, 0):
                out[n] = e
    return out


def poly_divexact(g: Mapping, f: "Factor"):
    """Exact quotient ``g / f`` or None when ``f`` does not divide ``g``.

    ``f`` must be exp-free; exponential kernels in ``g`` are carried along
    untouched since they are independent of the polynomial ring.
    """
    if not g:
        return {}
    fdeg = f.degrees
    gdeg = _degrees(g)
    for n, e in fdeg.items():
        if gdeg.get(n, 0) < e:
            return None
    if f.single_var is not None:
        name = f.single_var
        out = {}
        for (powers, earg), c in g.items():
            q = _powers_divide(powers, ((name, 1),))
            if q is None:
                return None
            out[(q, earg)] = c
        return out
    # kernels are independent: divide each kernel class separately
    groups: dict = {}
    for (powers, earg), c in g.items():
        groups.setdefault(earg, {})[powers] = c
    order = tuple(sorted(set(gdeg) | set(fdeg)))
    lm_f, lc_f = f.leading(order)
    fterms = list(f.poly.items())
    out: dict = {}
    for earg, rest in groups.items():
        rem = dict(rest)
        while rem:
            best = None
            best_key = None
            for pw, c in rem.items():
                k = _lex_vector(pw, order)
                if best_key is None or k > best_key:
                    best, best_key = (pw, c), k
            pw, c = best
            qpw = _powers_divide(pw, lm_f)
            if qpw is None:
                return None
            qc = c / lc_f
            out[(qpw, earg)] = out.get((qpw, earg), 0) + qc
            for (fpw, _), fc in fterms:
                m = _merge_powers(qpw, fpw)
                v = rem.get(m, 0) - qc * fc
                if v:
                    rem[m] = v
                else:
                    rem.pop(m, None)
    return {m: c for m, c in out.items() if c}


# ---------------------------------------------------------------------------
# denominator factors
# ---------------------------------------------------------------------------

class Factor:
    """An interned primitive polynomial used as a denominator factor.

    Exp-free factors are irreducible over Q with integer coprime coefficients
    and positive leading coefficient.  Factors containing exponential kernels
    are kept whole (primitive, sign-normalized) and never trial-divided.
    """

    __slots__ = ("poly", "key", "degrees", "single_var", "has_exp", "_powers", "_expr", "__weakref__")
    _registry: dict = {}

    def __new__(cls, poly: Mapping):
        key = poly_key(poly)
        hit = cls._registry.get(key)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        self.poly = dict(poly)
        self.key = key
        self.degrees = _degrees(poly)
        self.has_exp = poly_has_exp(poly)
        self.single_var = None
        if len(poly) == 1:
            ((powers, earg), c), = poly.items()
            if earg is None and len(powers) == 1 and powers[0][1] == 1 and c == 1:
                self.single_var = powers[0][0]
        self._powers = {1: self.poly}
        self._expr = None
        cls._registry[key] = self
        return self

    def leading(self, order: tuple):
        (pw, _), c = poly_leading(self.poly, order)
        return pw, c

    def power(self, k: int) -> dict:
        hit = self._powers.get(k)
        if hit is None:
            half = self.power(k // 2)
            hit = poly_mul(half, half)
            if k % 2:
                hit = poly_mul(hit, self.poly)
            self._powers[k] = hit
        return hit

    def as_expr(self) -> "Expression":
        if self._expr is None:
            self._expr = Expression._raw(self.poly, ())
        return self._expr

    def __lt__(self, other: "Factor") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Factor({self.as_expr()})"


def _primitive(poly: Mapping):
    """Split ``poly`` into (rational content, primitive integer polynomial).

    The primitive part has positive leading coefficient under lex order.
    """
    den = 1
    for c in poly.values():
        den = den * c.denominator // gcd(den, c.denominator)
    ints = {m: int(c * den) for m, c in poly.items()}
    g = 0
    for c in ints.values():
        g = gcd(g, c)
    order = tuple(sorted(poly_vars(poly)))
    _, lc = poly_leading(ints, order) if not poly_has_exp(poly) else min(
        ((m, c) for m, c in ints.items()), key=lambda mc: mono_sort_key(mc[0]))
    if lc < 0:
        g = -g
    prim = {m: Fraction(c // g) for m, c in ints.items()}
    return Fraction(g, den), prim


_factor_cache: dict = {}


def _sympy_factor(poly: Mapping):
    import sympy

    gens = sorted(poly_vars(poly))
    syms = sympy.symbols(gens)
    data = {}
    for (powers, _), c in poly.items():
        d = dict(powers)
        data[tuple(d.get(v, 0) for v in gens)] = sympy.Rational(c.numerator, c.denominator)
    P = sympy.Poly.from_dict(data, *syms, domain="QQ")
    const, factors = P.factor_list()
    out = []
    coeff = Fraction(int(sympy.numer(const)), int(sympy.denom(const)))
    for fp, mult in factors:
        fpoly = {}
        for exps, c in fp.as_dict().items():
            powers = tuple((gens[i], e) for i, e in enumerate(exps) if e)
            fpoly[(powers, None)] = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
        content, prim = _primitive(fpoly)
        coeff *= content ** mult
        out.append((Factor(prim), mult))
    return coeff, out


def factor_poly(poly: Mapping):
    """Factor a nonzero polynomial as ``coeff * monomial * prod(f**k)``.

    Returns ``(coeff, monomial, [(Factor, k), ...])``.  The monomial may carry
    an exponential kernel that is common to every term.
    """
    if len(poly) == 1:
        (m, c), = poly.items()
        return c, m, []
    key = poly_key(poly)
    hit = _factor_cache.get(key)
    if hit is not None:
        return hit
    # monomial content
    items = list(poly.items())
    common = dict(items[0][0][0])
    for (powers, _), _c in items[1:]:
        d = dict(powers)
        for n in list(common):
            common[n] = min(common[n], d.get(n, 0))
            if not common[n]:
                del common[n]
    eargs = {earg for (_, earg) in poly}
    shared_exp = next(iter(eargs)) if len(eargs) == 1 else None
    content_powers = tuple(sorted(common.items()))
    rest = {}
    for (powers, earg), c in items:
        rp = _powers_divide(powers, content_powers)
        rest[(rp, None if shared_exp is not None else earg)] = c
    if poly_has_exp(rest) or len(rest) == 1:
        coeff, prim = _primitive(rest)
        factors = [] if len(prim) == 1 else [(Factor(prim), 1)]
        if len(prim) == 1:
            (m, c), = prim.items()
            coeff *= c
            content_powers = _merge_powers(content_powers, m[0])
    else:
        coeff, factors = _sympy_factor(rest)
    result = (coeff, (content_powers, shared_exp), factors)
    _factor_cache[key] = result
    return result


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact constant")


def _den_merge(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for f, k in b:
        d[f] = d.get(f, 0) + k
    return tuple(sorted(d.items()))


def _reduce(num: dict, den: dict):
    """Cancel denominator factors that divide ``num``; returns (num, den tuple)."""
    if not num:
        return {}, ()
    out = []
    for f in sorted(den):
        k = den[f]
        if not f.has_exp:
            while k:
                q = poly_divexact(num, f)
                if q is None:
                    break
                num = q
                k -= 1
        if k:
            out.append((f, k))
    return num, tuple(out)


class Expression:
    """Immutable exact scalar in canonical form.

    Build values with :func:`Const`, :func:`Var`, :func:`Sum`, :func:`Product`,
    :func:`Power`, :func:`Exp` or Python operators; every result is already
    canonical.
    """

    __slots__ = ("_num", "_den", "_hash", "_skey", "_free")

    def __init__(self):
        raise TypeError("use Const/Var/Sum/Product/Power/Exp to build expressions")

    @classmethod
    def _raw(cls, num: dict, den: tuple) -> "Expression":
        self = object.__new__(cls)
        self._num = num
        self._den = den if num else ()
        self._hash = None
        self._skey = None
        self._free = None
        return self

    @classmethod
    def _reduced(cls, num: dict, den: Mapping) -> "Expression":
        n, d = _reduce(num, dict(den))
        return cls._raw(n, d)

    # -- structure ---------------------------------------------------------

    @property
    def numerator_terms(self) -> dict:
        return self._num

    @property
    def denominator_factors(self) -> tuple:
        return self._den

    def is_zero_canonical(self) -> bool:
        return not self._num

    def is_constant(self) -> bool:
        return not self._den and (not self._num or (len(self._num) == 1 and ONE_MONO in self._num))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self._num.get(ONE_MONO, Fraction(0))

    def has_exp(self) -> bool:
        if poly_has_exp(self._num):
            return True
        return any(f.has_exp for f, _ in self._den)

    def free_symbols(self) -> frozenset:
        if self._free is None:
            out = set()
            for (powers, earg) in self._num:
                out.update(n for n, _ in powers)
                if earg is not None:
                    out |= earg.free_symbols()
            for f, _ in self._den:
                out |= f.as_expr().free_symbols()
            self._free = frozenset(out)
        return self._free

    def depends_on(self, name: str) -> bool:
        return name in self.free_symbols()

    def sort_key(self) -> tuple:
        if self._skey is None:
            self._skey = (poly_key(self._num), tuple((f.key, k) for f, k in self._den))
        return self._skey

    @property
    def kind(self) -> str:
        from .nodes import to_node

        return to_node(self).kind

    @property
    def args(self) -> tuple:
        from .nodes import to_node

        return to_node(self).args

    # -- equality / hashing ------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Const(other)
        if not isinstance(other, Expression):
            return NotImplemented
        if self is other:
            return True
        return self._den == other._den and self._num == other._num

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._num.items()), self._den))
        return self._hash

    def __lt__(self, other: "Expression") -> bool:
        return self.sort_key() < other.sort_key()

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: ExprLike) -> "Expression":
        return esum((self, to_expr(other)))

    __radd__ = __add__

    def __sub__(self, other: ExprLike) -> "Expression":
        return esum((self, -to_expr(other)))

    def __rsub__(self, other: ExprLike) -> "Expression":
        return esum((to_expr(other), -self))

    def __neg__(self) -> "Expression":
        return Expression._raw({m: -c for m, c in self._num.items()}, self._den)

    def __mul__(self, other: ExprLike) -> "Expression":
        return emul(self, to_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other: ExprLike) -> "Expression":
        return emul(self, einv(to_expr(other)))

    def __rtruediv__(self, other: ExprLike) -> "Expression":
        return emul(to_expr(other), einv(self))

    def __pow__(self, k: int) -> "Expression":
        return Power(self, k)

    def __bool__(self) -> bool:
        return bool(self._num)

    def __repr__(self) -> str:
        from .render import render

        return f"Expression({render(self)!r})"

    def __str__(self) -> str:
        from .render import render

        return render(self)


def to_expr(x: ExprLike) -> Expression:
    if isinstance(x, Expression):
        return x
    return Const(x)


ZERO = Expression._raw({}, ())
ONE = Expression._raw({ONE_MONO: Fraction(1)}, ())


def Const(value) -> Expression:
    q = _as_fraction(value)
    if not q:
        return ZERO
    return Expression._raw({ONE_MONO: q}, ())


def Var(name: str) -> Expression:
    if not isinstance(name, str) or not name:
        raise TypeError("variable names are nonempty strings")
    return Expression._raw({(((name, 1),), None): Fraction(1)}, ())


def esum(items: Iterable[ExprLike]) -> Expression:
    """Sum of many expressions with one common-denominator pass."""
    groups: dict = {}
    for e in items:
        e = to_expr(e)
        if not e._num:
            continue
        acc = groups.get(e._den)
        if acc is None:
            groups[e._den] = dict(e._num)
        else:
            poly_add_into(acc, e._num)
    groups = {d: n for d, n in groups.items() if n}
    if not groups:
        return ZERO
    if len(groups) == 1:
        (den, num), = groups.items()
        if not den:
            return Expression._raw(num, ())
        return Expression._reduced(num, dict(den))
    lcm: dict = {}
    for den in groups:
        for f, k in den:
            if k > lcm.get(f, 0):
                lcm[f] = k
    total: dict = {}
    for den, num in groups.items():
        d = dict(den)
        part = num
        for f, k in lcm.items():
            extra = k - d.get(f, 0)
            if extra:
                part = poly_mul(part, f.power(extra))
        poly_add_into(total, part)
    return Expression._reduced(total, lcm)


def Sum(*items: ExprLike) -> Expression:
    return esum(items)


def _cancel(num: dict, den: tuple):
    """Cancel factors of ``den`` dividing ``num``; returns (num, remaining den dict)."""
    d = dict(den)
    if not num:
        return num, {}
    for f in list(d):
        if f.has_exp:
            continue
        while d[f]:
            q = poly_divexact(num, f)
            if q is None:
                break
            num = q
            d[f] -= 1
        if not d[f]:
            del d[f]
    return num, d


def emul(a: Expression, b: Expression) -> Expression:
    if not a._num or not b._num:
        return ZERO
    if a.is_constant():
        c = a._num[ONE_MONO]
        return b if c == 1 else Expression._raw(poly_scale(b._num, c), b._den)
    if b.is_constant():
        c = b._num[ONE_MONO]
        return a if c == 1 else Expression._raw(poly_scale(a._num, c), a._den)
    an, bn = a._num, b._num
    ad, bd = dict(a._den), dict(b._den)
    if bd:
        an, bd = _cancel(an, tuple(bd.items()))
    if ad:
        bn, ad = _cancel(bn, tuple(ad.items()))
    num = poly_mul(an, bn)
    den = _den_merge(tuple(sorted(ad.items())), tuple(sorted(bd.items())))
    return Expression._raw(num, den)


def Product(*items: ExprLike) -> Expression:
    out = ONE
    for e in items:
        out = emul(out, to_expr(e))
    return out


def einv(e: Expression) -> Expression:
    if not e._num:
        raise ZeroDivisionError("division by canonical zero")
    coeff, mono, factors = factor_poly(e._num)
    powers, earg = mono
    num: dict = {ONE_MONO: 1 / coeff}
    for f, k in e._den:
        num = poly_mul(num, f.power(k))
    if earg is not None:
        num = poly_mul(num, {((), (-earg)): Fraction(1)})
    den: dict = {}
    for name, k in powers:
        den[Factor({(((name, 1),), None): Fraction(1)})] = k
    for f, k in factors:
        den[f] = den.get(f, 0) + k
    return Expression._raw(num, tuple(sorted(den.items())))


def Power(base: ExprLike, exponent: int) -> Expression:
    base = to_expr(base)
    if isinstance(exponent, Fraction):
        if exponent.denominator != 1:
            raise ValueError(f"non-integer exponent {exponent}")
        exponent = int(exponent)
    if not isinstance(exponent, int):
        raise ValueError(f"non-integer exponent {exponent!r}")
    if exponent == 0:
        if not base._num:
            raise ZeroDivisionError("0^0 is undefined")
        return ONE
    if exponent < 0:
        return Power(einv(base), -exponent)
    if exponent == 1:
        return base
    # kernels and single terms power directly
    if len(base._num) == 1 and not base._den:
        (m, c), = base._num.items()
        powers, earg = m
        np_ = tuple((n, e * exponent) for n, e in powers)
        ne = None if earg is None else earg * exponent
        return Expression._raw({(np_, ne): c ** exponent}, ())
    result = ONE
    sq = base
    k = exponent
    while k:
        if k & 1:
            result = emul(result, sq)
        k >>= 1
        if k:
            sq = emul(sq, sq)
    return result


def Exp(arg: ExprLike) -> Expression:
    arg = to_expr(arg)
    if not arg._num:
        return ONE
    return Expression._raw({((), arg): Fraction(1)}, ())


def expand_poly(e: Expression) -> dict:
    """Numerator polynomial when ``e`` has no denominator, else ValueError."""
    if e._den:
        raise ValueError("expression has a denominator")
    return e._num


def normalize(e: ExprLike) -> Expression:
    """Canonical form.  Expressions are canonical on construction, so this is a
    coercion plus identity; kept as an explicit entry point."""
    return to_expr(e)


# ---------------------------------------------------------------------------
# differentiation and substitution
# ---------------------------------------------------------------------------

def _poly_derive(num: Mapping, v: str) -> Expression:
    plain: dict = {}
    extra = []
    for (powers, earg), c in num.items():
        d = dict(powers)
        k = d.get(v, 0)
        if k:
            if k == 1:
                del d[v]
            else:
                d[v] = k - 1
            m = (tuple(sorted(d.items())), earg)
            val = plain.get(m, 0) + c * k
            if val:
                plain[m] = val
            else:
                plain.pop(m, None)
        if earg is not None and earg.depends_on(v):
            extra.append(emul(Expression._raw({(powers, earg): c}, ()), derive(earg, v)))
    out = Expression._raw(plain, ())
    if extra:
        out = esum([out, *extra])
    return out


_derive_cache: dict = {}


def derive(e: ExprLike, v: Union[str, Expression]) -> Expression:
    """Exact partial derivative of ``e`` with respect to symbol ``v``."""
    e = to_expr(e)
    if isinstance(v, Expression):
        if v.kind != "var":
            raise ValueError("derive needs a variable symbol")
        (((v, _),), _), = v._num.keys()
    if not e.depends_on(v):
        return ZERO
    key = (e, v)
    hit = _derive_cache.get(key)
    if hit is not None:
        return hit
    dnum = _poly_derive(e._num, v)
    if not e._den:
        out = dnum
    else:
        parts = [emul(dnum, Expression._raw({ONE_MONO: Fraction(1)}, e._den))]
        for f, k in e._den:
            fe = f.as_expr()
            if not fe.depends_on(v):
                continue
            df = _poly_derive(f.poly, v)
            den = dict(e._den)
            den[f] += 1
            parts.append(emul(Expression._raw(poly_scale(e._num, Fraction(-k)), tuple(sorted(den.items()))), df))
        out = esum(parts)
    if len(_derive_cache) > 200_000:
        _derive_cache.clear()
    _derive_cache[key] = out
    return out


def substitute(e: ExprLike, bindings: Mapping[str, ExprLike]) -> Expression:
    """Simultaneous substitution of symbols, result canonical."""
    e = to_expr(e)
    binds = {k: to_expr(v) for k, v in bindings.items()}
    if not binds or not (e.free_symbols() & binds.keys()):
        return e
    memo: dict = {}

    def sub(x: Expression) -> Expression:
        if not (x.free_symbols() & binds.keys()):
            return x
        hit = memo.get(x)
        if hit is not None:
            return hit
        terms = []
        for (powers, earg), c in x._num.items():
            parts = [Const(c)]
            for name, k in powers:
                parts.append(Power(binds.get(name, Var(name)), k))
            if earg is not None:
                parts.append(Exp(sub(earg)))
            terms.append(Product(*parts))
        out = esum(terms)
        for f, k in x._den:
            out = out / Power(sub(f.as_expr()), k)
        memo[x] = out
        return out

    return sub(e)
