"""Expression trees for differential polynomials in jet variables.

Leaves are jet variables ``x_j^(k)`` and exact rational constants; interior
nodes are sums, products, integer powers, and the functions sin, cos, tan
and recip (1/x).  Differentiation is symbolic on the tree; evaluation works
with floats or with ``fractions.Fraction`` (for the exact-elimination mode,
on trees without trigonometric nodes).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math

from .tropical import NEG_INF


@dataclass(frozen=True)
class Var:
    """Jet variable: index of the base variable and derivative order."""

    var: int
    order: int


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Add:
    terms: tuple


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Fun:
    name: str  # sin | cos | tan | recip
    arg: object


Expr = Var | Num | Add | Mul | Pow | Fun

ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))

_FLOAT_FUNS = {"sin": math.sin, "cos": math.cos, "tan": math.tan}


def add(*terms) -> Expr:
    flat = []
    const = Fraction(0)
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        elif isinstance(t, Num):
            const += t.value
        else:
            flat.append(t)
    if const != 0:
        flat.append(Num(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat = []
    const = Fraction(1)
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.factors)
        elif isinstance(f, Num):
            const *= f.value
        else:
            flat.append(f)
    if const == 0:
        return ZERO
    if const != 1:
        flat.insert(0, Num(const))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(e: Expr) -> Expr:
    return mul(Num(Fraction(-1)), e)


def power(base: Expr, exp: int) -> Expr:
    if exp == 0:
        return ONE
    if exp == 1:
        return base
    if isinstance(base, Num):
        return Num(base.value**exp) if exp >= 0 else Num(Fraction(1) / base.value**-exp)
    if exp < 0:
        return Fun("recip", power(base, -exp))
    return Pow(base, exp)


def fun(name: str, arg: Expr) -> Expr:
    return Fun(name, arg)


def order_in(e: Expr, var: int):
    """Highest derivative order of variable ``var`` in ``e`` (NEG_INF if absent)."""
    if isinstance(e, Var):
        return e.order if e.var == var else NEG_INF
    if isinstance(e, Num):
        return NEG_INF
    if isinstance(e, Add):
        return max((order_in(t, var) for t in e.terms), default=NEG_INF)
    if isinstance(e, Mul):
        return max((order_in(f, var) for f in e.factors), default=NEG_INF)
    if isinstance(e, Pow):
        return order_in(e.base, var)
    return order_in(e.arg, var)


def jet_vars(e: Expr) -> set[Var]:
    if isinstance(e, Var):
        return {e}
    if isinstance(e, Num):
        return set()
    if isinstance(e, Add):
        return set().union(*(jet_vars(t) for t in e.terms)) if e.terms else set()
    if isinstance(e, Mul):
        return set().union(*(jet_vars(f) for f in e.factors)) if e.factors else set()
    if isinstance(e, Pow):
        return jet_vars(e.base)
    return jet_vars(e.arg)


def diff(e: Expr, var: int, order: int) -> Expr:
    """Partial derivative with respect to the jet variable x_var^(order)."""
    if isinstance(e, Var):
        return ONE if (e.var == var and e.order == order) else ZERO
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Add):
        return add(*(diff(t, var, order) for t in e.terms))
    if isinstance(e, Mul):
        parts = []
        for k, f in enumerate(e.factors):
            d = diff(f, var, order)
            if d != ZERO:
                rest = e.factors[:k] + e.factors[k + 1 :]
                parts.append(mul(d, *rest))
        return add(*parts)
    if isinstance(e, Pow):
        d = diff(e.base, var, order)
        if d == ZERO:
            return ZERO
        return mul(Num(Fraction(e.exp)), power(e.base, e.exp - 1), d)
    d = diff(e.arg, var, order)
    if d == ZERO:
        return ZERO
    if e.name == "sin":
        outer = fun("cos", e.arg)
    elif e.name == "cos":
        outer = neg(fun("sin", e.arg))
    elif e.name == "tan":
        outer = add(ONE, power(fun("tan", e.arg), 2))
    elif e.name == "recip":
        outer = neg(power(fun("recip", e.arg), 2))
    else:  # pragma: no cover
        raise ValueError(f"unknown function {e.name}")
    return mul(outer, d)


class EvalError(ValueError):
    pass


def evaluate(e: Expr, point, strict: bool = False, exact: bool = False):
    """Evaluate at a point mapping ``(var, order) -> value``.

    Unset jet variables default to 0, or raise in strict mode.  With
    ``exact`` the arithmetic stays in ``Fraction`` (trig nodes are refused).
    """
    if isinstance(e, Var):
        key = (e.var, e.order)
        if key in point:
            return point[key]
        if strict:
            raise EvalError(f"jet variable x{e.var + 1}^({e.order}) not set")
        return Fraction(0) if exact else 0.0
    if isinstance(e, Num):
        return e.value if exact else float(e.value)
    if isinstance(e, Add):
        return sum(evaluate(t, point, strict, exact) for t in e.terms)
    if isinstance(e, Mul):
        out = Fraction(1) if exact else 1.0
        for f in e.factors:
            out *= evaluate(f, point, strict, exact)
        return out
    if isinstance(e, Pow):
        return evaluate(e.base, point, strict, exact) ** e.exp
    v = evaluate(e.arg, point, strict, exact)
    if e.name == "recip":
        if v == 0:
            raise EvalError("division by zero in recip")
        return Fraction(1) / v if exact else 1.0 / v
    if exact:
        raise EvalError(f"{e.name} is not available in exact-rational mode")
    out = _FLOAT_FUNS[e.name](v)
    if not math.isfinite(out):
        raise EvalError(f"{e.name} evaluated outside its domain")
    return out


def to_text(e: Expr, names=None) -> str:
    """Render in the input DSL (parseable back)."""

    def name(v: Var) -> str:
        base = names[v.var] if names else f"x{v.var + 1}"
        return base if v.order == 0 else f"d({base},{v.order})"

    def go(e: Expr, prec: int) -> str:
        if isinstance(e, Var):
            return name(e)
        if isinstance(e, Num):
            s = str(e.value)
            return s if e.value >= 0 and "/" not in s else f"({s})"
        if isinstance(e, Add):
            s = " + ".join(go(t, 1) for t in e.terms)
            return f"({s})" if prec > 1 else s
        if isinstance(e, Mul):
            s = "*".join(go(f, 2) for f in e.factors)
            return f"({s})" if prec > 2 else s
        if isinstance(e, Pow):
            return f"{go(e.base, 3)}^{e.exp}"
        return f"{e.name}({go(e.arg, 0)})"

    return go(e, 0)
