"""Exact sparse multivariate polynomials over the rationals.

A :class:`VarRegistry` fixes the variable order and the role of each
variable: space coordinates ``z_1..z_n``, their primed copies
``z_1'..z_n'`` (coordinates on the second factor of ``X x X``), free
symbolic parameters and the curve parameter ``t``.  A :class:`Polynomial`
maps exponent vectors (one slot per registered variable) to nonzero
``int``/``Fraction`` coefficients.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from operator import add
from typing import Iterable, Mapping, Union

Coeff = Union[int, Fraction]


class VarRegistry:
    """Ordered, role-tagged variable set shared by a family of polynomials."""

    __slots__ = ("space_vars", "primed_vars", "params", "curve_var", "names", "_index", "_hash")

    def __init__(
        self,
        space_vars: Iterable[str],
        primed_vars: Iterable[str] | None = None,
        params: Iterable[str] = (),
        curve_var: str = "t",
    ):
        space = tuple(space_vars)
        primed = tuple(primed_vars) if primed_vars is not None else tuple(v + "'" for v in space)
        if not space:
            raise ValueError("at least one space variable is required")
        if len(space) != len(primed):
            raise ValueError("space and primed variable lists differ in length")
        names = space + primed + tuple(params) + (curve_var,)
        if len(set(names)) != len(names):
            raise ValueError(f"variable names are not pairwise distinct: {names}")
        for name in names:
            if not _IDENT.fullmatch(name):
                raise ValueError(f"invalid variable name {name!r}")
        self.space_vars = space
        self.primed_vars = primed
        self.params = tuple(params)
        self.curve_var = curve_var
        self.names = names
        self._index = {v: i for i, v in enumerate(names)}
        self._hash = hash((space, primed, self.params, curve_var))

    @property
    def n(self) -> int:
        return len(self.space_vars)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def slot(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown identifier {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def space_slots(self) -> range:
        return range(0, self.n)

    @property
    def primed_slots(self) -> range:
        return range(self.n, 2 * self.n)

    @property
    def param_slots(self) -> range:
        return range(2 * self.n, 2 * self.n + len(self.params))

    @property
    def t_slot(self) -> int:
        return len(self.names) - 1

    def with_params(self, extra: Iterable[str]) -> "VarRegistry":
        """Registry with the same coordinates and additional parameters."""
        new = [p for p in extra if p not in self.params]
        if not new:
            return self
        return VarRegistry(self.space_vars, self.primed_vars, self.params + tuple(new), self.curve_var)

    def fresh_names(self, stems: Iterable[str]) -> list[str]:
        """Names derived from ``stems`` that do not clash with this registry."""
        out = []
        for stem in stems:
            name, i = stem, 0
            while name in self._index or name in out:
                i += 1
                name = f"{stem}_{i}"
            out.append(name)
        return out

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, VarRegistry):
            return NotImplemented
        return (
            self.space_vars == other.space_vars
            and self.primed_vars == other.primed_vars
            and self.params == other.params
            and self.curve_var == other.curve_var
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (
            f"VarRegistry(space={list(self.space_vars)}, primed={list(self.primed_vars)}, "
            f"params={list(self.params)}, t={self.curve_var!r})"
        )


def _degrevlex_key(exp: tuple[int, ...]):
    return (sum(exp), tuple(-e for e in reversed(exp)))


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def as_coeff(c) -> Coeff:
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm_coeff(c)
    if isinstance(c, str):
        return _norm_coeff(Fraction(c))
    raise TypeError(f"unsupported coefficient {c!r}")


class Polynomial:
    """Immutable sparse polynomial; equality is structural."""

    __slots__ = ("reg", "terms", "_hash")

    def __init__(self, reg: VarRegistry, terms: Mapping[tuple, Coeff] | None = None):
        self.reg = reg
        clean = {}
        if terms:
            width = reg.nvars
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != width or any(x < 0 for x in e):
                    raise ValueError(f"bad exponent vector {e} for {width} variables")
                if c:
                    clean[e] = as_coeff(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, reg: VarRegistry, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.reg = reg
        p.terms = terms
        p._hash = None
        return p

    # construction -----------------------------------------------------------------

    @classmethod
    def zero(cls, reg: VarRegistry) -> "Polynomial":
        return cls._raw(reg, {})

    @classmethod
    def const(cls, reg: VarRegistry, c) -> "Polynomial":
        c = as_coeff(c)
        return cls._raw(reg, {(0,) * reg.nvars: c} if c else {})

    @classmethod
    def var(cls, reg: VarRegistry, name: str, power: int = 1) -> "Polynomial":
        e = [0] * reg.nvars
        e[reg.slot(name)] = power
        return cls._raw(reg, {tuple(e): 1})

    @classmethod
    def monomial(cls, reg: VarRegistry, exp: tuple, c=1) -> "Polynomial":
        return cls(reg, {tuple(exp): c})

    # predicates and queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Coeff:
        return self.terms.get((0,) * self.reg.nvars, 0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> int:
        """Lowest total degree of a term (order at the origin); -1 for zero."""
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, slots) -> int:
        slots = tuple(slots)
        return max((sum(e[s] for s in slots) for e in self.terms), default=-1)

    def order_in(self, slot: int) -> int | None:
        """Lowest exponent of the variable in ``slot``; ``None`` for zero."""
        return min((e[slot] for e in self.terms), default=None)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def support(self) -> list[tuple]:
        return sorted(self.terms, key=_degrevlex_key, reverse=True)

    def sorted_terms(self) -> list[tuple[tuple, Coeff]]:
        return [(e, self.terms[e]) for e in self.support()]

    def leading_term(self) -> tuple[tuple, Coeff]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_degrevlex_key)
        return e, self.terms[e]

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used.add(self.reg.names[i])
        return used

    def occurring_slots(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return used

    # arithmetic -------------------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.reg is not self.reg and other.reg != self.reg:
                raise ValueError("polynomials live over different registries")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.const(self.reg, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                del out[e]
        return Polynomial._raw(self.reg, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.reg, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "Polynomial":
        c = as_coeff(c)
        if not c:
            return Polynomial.zero(self.reg)
        if c == 1:
            return self
        return Polynomial._raw(self.reg, {e: _norm_coeff(v * c) for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial.zero(self.reg)
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (eb, cb), = b.items()
            return Polynomial._raw(
                self.reg, {tuple(map(add, ea, eb)): _norm_coeff(ca * cb) for ea, ca in a.items()}
            )
        out: dict = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(map(add, ea, eb))
                out[e] = get(e, 0) + ca * cb
        return Polynomial._raw(self.reg, {e: _norm_coeff(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.const(self.reg, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / other)
        return NotImplemented

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        """Quotient ``self / other``; raises ``ValueError`` when not exact."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if len(other.terms) == 1:
            (eb, cb), = other.terms.items()
            out = {}
            for ea, ca in self.terms.items():
                e = tuple(x - y for x, y in zip(ea, eb))
                if min(e, default=0) < 0:
                    raise ValueError("polynomial division is not exact")
                out[e] = _norm_coeff(Fraction(ca) / cb) if not isinstance(ca, int) or ca % cb else ca // cb
            return Polynomial._raw(self.reg, out)
        lead_e, lead_c = other.leading_term()
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            e = max(rem, key=_degrevlex_key)
            c = rem[e]
            qe = tuple(x - y for x, y in zip(e, lead_e))
            if min(qe) < 0:
                raise ValueError("polynomial division is not exact")
            qc = _norm_coeff(Fraction(c) / lead_c) if not isinstance(c, int) or not isinstance(lead_c, int) or c % lead_c else c // lead_c
            quot[qe] = qc
            for eb, cb in other.terms.items():
                te = tuple(map(add, qe, eb))
                v = rem.get(te, 0) - qc * cb
                if v:
                    rem[te] = v
                else:
                    rem.pop(te, None)
        return Polynomial._raw(self.reg, {e: _norm_coeff(c) for e, c in quot.items()})

    def divides(self, other: "Polynomial") -> bool:
        try:
            other.exact_div(self)
        except ValueError:
            return False
        return True

    # comparison -------------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return (other.reg is self.reg or other.reg == self.reg) and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return not self.terms
            return self.terms == {(0,) * self.reg.nvars: other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # structural maps --------------------------------------------------------------

    def permute_slots(self, perm: Mapping[int, int]) -> "Polynomial":
        """Rename variables by moving exponent slot ``i`` to ``perm[i]``."""
        width = self.reg.nvars
        out = {}
        for e, c in self.terms.items():
            new = [0] * width
            for i, x in enumerate(e):
                if x:
                    new[perm.get(i, i)] += x
            out[tuple(new)] = c
        return Polynomial._raw(self.reg, out)

    def primed(self) -> "Polynomial":
        """Pullback by the second projection: ``z_i -> z_i'``."""
        n = self.reg.n
        return self.permute_slots({i: i + n for i in range(n)})

    def to_registry(self, reg: VarRegistry) -> "Polynomial":
        """Re-express over ``reg`` (matching variables by name)."""
        if reg is self.reg or reg == self.reg:
            return self
        slots = [reg.slot(v) for v in self.reg.names]
        width = reg.nvars
        out = {}
        for e, c in self.terms.items():
            new = [0] * width
            for i, x in enumerate(e):
                if x:
                    new[slots[i]] = x
            out[tuple(new)] = c
        return Polynomial._raw(reg, out)

    def truncate_in(self, slot: int, order: int) -> "Polynomial":
        """Drop terms whose exponent in ``slot`` exceeds ``order``."""
        return Polynomial._raw(self.reg, {e: c for e, c in self.terms.items() if e[slot] <= order})

    def coefficient_in(self, slot: int, k: int) -> "Polynomial":
        """Coefficient of ``var^k`` as a polynomial not involving ``var``."""
        out = {}
        for e, c in self.terms.items():
            if e[slot] == k:
                out[e[:slot] + (0,) + e[slot + 1:]] = c
        return Polynomial._raw(self.reg, out)

    def shift_in(self, slot: int, k: int) -> "Polynomial":
        """Multiply by ``var^k``; negative ``k`` must divide exactly."""
        out = {}
        for e, c in self.terms.items():
            x = e[slot] + k
            if x < 0:
                raise ValueError("shift would produce a negative exponent")
            out[e[:slot] + (x,) + e[slot + 1:]] = c
        return Polynomial._raw(self.reg, out)

    def evaluate(self, values: Mapping[str, Coeff]) -> Coeff:
        total: Coeff = 0
        slots = {self.reg.slot(k): v for k, v in values.items()}
        for e, c in self.terms.items():
            term = c
            for i, x in enumerate(e):
                if x:
                    if i not in slots:
                        raise ValueError(f"no value for {self.reg.names[i]!r}")
                    term = term * slots[i] ** x
            total += term
        return _norm_coeff(total) if isinstance(total, Fraction) else total

    def partial_evaluate(self, values: Mapping[str, Coeff]) -> "Polynomial":
        """Substitute numbers for some variables, keeping the registry."""
        slots = {self.reg.slot(k): as_coeff(v) for k, v in values.items()}
        out: dict = {}
        for e, c in self.terms.items():
            new = list(e)
            for i, v in slots.items():
                if e[i]:
                    c = c * v ** e[i]
                    new[i] = 0
            if c:
                key = tuple(new)
                out[key] = out.get(key, 0) + c
        return Polynomial._raw(self.reg, {e: _norm_coeff(c) for e, c in out.items() if c})

    def substitute(self, mapping: Mapping[str, object], reg: VarRegistry | None = None, keep_unmapped: bool = False):
        return substitute(self, mapping, reg=reg, keep_unmapped=keep_unmapped)

    # printing ---------------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                name if x == 1 else f"{name}^{x}" for name, x in zip(self.reg.names, e) if x
            )
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


# --------------------------------------------------------------------------------------
# parsing


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*")
_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>\*\*|[-+*^()]))"
)


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"malformed expression near {text[pos:]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, reg: VarRegistry):
        self.toks = _tokenize(text)
        self.i = 0
        self.reg = reg

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = value or "a token"
            raise ParseError(f"expected {want!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Polynomial:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            base = Polynomial.const(self.reg, Fraction(val))
        elif kind == "ident":
            self.take()
            if val not in self.reg:
                raise ParseError(f"unknown identifier {val!r}")
            base = Polynomial.var(self.reg, val)
        elif val == "(":
            self.take()
            base = self.expr()
            self.take(")")
        elif val == "-":
            # unary minus inside a product, e.g. "2*-x"
            self.take()
            return -self.factor()
        else:
            raise ParseError(f"unexpected token {val!r}")
        if self.peek()[1] in ("^", "**"):
            self.take()
            kind, val = self.take()
            if kind != "num" or "/" in val:
                raise ParseError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base


def parse(text: str, reg: VarRegistry) -> Polynomial:
    """Parse ``text`` in the polynomial grammar over ``reg``."""
    p = _Parser(text, reg)
    if not p.toks:
        raise ParseError("empty expression")
    out = p.expr()
    if p.i != len(p.toks):
        raise ParseError(f"unexpected trailing input {p.toks[p.i][1]!r}")
    return out


def parse_vector(text: str, reg: VarRegistry) -> list[Polynomial]:
    """Parse ``"(e1, e2, ...)"`` into a list of polynomials."""
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")) and not (s.startswith("[") and s.endswith("]")):
        raise ParseError(f"vector must be parenthesised: {text!r}")
    inner = s[1:-1]
    parts, depth, cur = [], 0, ""
    for ch in inner:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [parse(x, reg) for x in parts]


# --------------------------------------------------------------------------------------
# rational functions


def _sympy_cancel(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    import sympy

    reg = num.reg
    gens = sympy.symbols([f"v{i}" for i in range(reg.nvars)])

    def to_poly(p: Polynomial):
        return sympy.Poly.from_dict({e: sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c for e, c in p.terms.items()}, *gens, domain="QQ")

    pn, pd = to_poly(num).cancel(to_poly(den), include=True)

    def back(p) -> Polynomial:
        return Polynomial(reg, {e: Fraction(int(c.p), int(c.q)) for e, c in p.as_dict().items()})

    return back(pn), back(pd)


class RationalFunction:
    """Quotient of polynomials kept in gcd-reduced form."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, reduce: bool = True):
        if den is None:
            den = Polynomial.const(num.reg, 1)
        if den.reg != num.reg:
            raise ValueError("numerator and denominator live over different registries")
        if den.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if reduce:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    @property
    def reg(self) -> VarRegistry:
        return self.num.reg

    def is_polynomial(self) -> bool:
        return self.den == 1

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise ValueError("rational function is not a polynomial")
        return self.num

    def _lift(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other, reduce=False)
        return RationalFunction(Polynomial.const(self.reg, other), reduce=False)

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __eq__(self, other):
        if isinstance(other, (Polynomial, int, Fraction)):
            other = self._lift(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.is_polynomial():
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def _reduce(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return num, Polynomial.const(num.reg, 1)
    if den.is_constant():
        return num.scale(Fraction(1) / den.constant_term()), Polynomial.const(num.reg, 1)
    try:
        return num.exact_div(den), Polynomial.const(num.reg, 1)
    except ValueError:
        pass
    if den.is_monomial():
        # cancel the common monomial factor only
        (de, dc), = den.terms.items()
        common = tuple(min([de[i]] + [e[i] for e in num.terms]) for i in range(len(de)))
        mono = Polynomial.monomial(num.reg, common, 1)
        num, den = num.exact_div(mono), den.exact_div(mono)
    else:
        num, den = _sympy_cancel(num, den)
    # normalise: denominator leading coefficient 1
    _, lc = den.leading_term()
    if lc != 1:
        num, den = num.scale(Fraction(1) / lc), den.scale(Fraction(1) / lc)
    return num, den


# --------------------------------------------------------------------------------------
# substitution and jets


def substitute(
    p: Polynomial,
    mapping: Mapping[str, object],
    reg: VarRegistry | None = None,
    keep_unmapped: bool = False,
):
    """Substitute polynomials, rational functions or numbers for variables.

    Returns a :class:`Polynomial` when every image used is polynomial and a
    gcd-reduced :class:`RationalFunction` otherwise.  Variables of ``p``
    absent from ``mapping`` raise ``ValueError`` unless ``keep_unmapped`` is
    set, in which case they map to the same-named variable of the target.
    """
    if reg is None:
        for v in mapping.values():
            if isinstance(v, (Polynomial, RationalFunction)):
                reg = v.reg
                break
        else:
            reg = p.reg
    images: dict[int, object] = {}
    for slot in sorted(p.occurring_slots()):
        name = p.reg.names[slot]
        if name in mapping:
            v = mapping[name]
        elif keep_unmapped:
            v = Polynomial.var(reg, name)
        else:
            raise ValueError(f"unmapped variable {name!r}")
        if isinstance(v, RationalFunction):
            if v.reg != reg:
                raise ValueError("substitution images live over different registries")
            if v.is_polynomial():
                v = v.num
        elif isinstance(v, Polynomial):
            if v.reg != reg:
                v = v.to_registry(reg)
        else:
            v = Polynomial.const(reg, v)
        images[slot] = v

    if all(isinstance(v, Polynomial) for v in images.values()):
        return _substitute_poly(p, images, reg)

    # rational images: clear denominators with the maximal power of each one
    maxexp = {s: max(e[s] for e in p.terms) for s in images}
    nums = {s: (v.num if isinstance(v, RationalFunction) else v) for s, v in images.items()}
    dens = {s: (v.den if isinstance(v, RationalFunction) else Polynomial.const(reg, 1)) for s, v in images.items()}
    total = Polynomial.zero(reg)
    common = reduce(lambda a, b: a * b, (dens[s] ** maxexp[s] for s in images), Polynomial.const(reg, 1))
    cache: dict = {}

    def pw(d, s, k):
        key = (d, s, k)
        if key not in cache:
            cache[key] = (nums if d == "n" else dens)[s] ** k
        return cache[key]

    for e, c in p.terms.items():
        term = Polynomial.const(reg, c)
        for s in images:
            term = term * pw("n", s, e[s]) * pw("d", s, maxexp[s] - e[s])
        total = total + term
    return RationalFunction(total, common)


def _substitute_poly(p: Polynomial, images: dict[int, Polynomial], reg: VarRegistry) -> Polynomial:
    powers: dict[int, list[Polynomial]] = {s: [Polynomial.const(reg, 1), v] for s, v in images.items()}

    def power(s: int, k: int) -> Polynomial:
        lst = powers[s]
        while len(lst) <= k:
            lst.append(lst[-1] * lst[1])
        return lst[k]

    acc: dict = {}
    for e, c in p.terms.items():
        term = None
        for s, x in enumerate(e):
            if x:
                f = power(s, x)
                term = f if term is None else term * f
        if term is None:
            key = (0,) * reg.nvars
            acc[key] = acc.get(key, 0) + c
            continue
        for te, tc in term.terms.items():
            acc[te] = acc.get(te, 0) + c * tc
    return Polynomial._raw(reg, {e: _norm_coeff(c) for e, c in acc.items() if c})


def jet_truncate(f, order: int, var: str | None = None) -> RationalFunction:
    """Power-series expansion of ``f`` in ``var`` (default ``t``) cut at degree ``order``.

    The result has a denominator free of ``var`` (a power of the constant
    term of the input denominator), so its coefficients are rational
    functions of the remaining variables.
    """
    if isinstance(f, Polynomial):
        f = RationalFunction(f, reduce=False)
    reg = f.reg
    slot = reg.slot(var or reg.curve_var)
    num, den = f.num, f.den
    d0 = den.coefficient_in(slot, 0)
    if d0.is_zero():
        raise ValueError("denominator vanishes identically at t = 0")
    # den = d0 + t*e ;  1/den = sum_k (-t e)^k / d0^(k+1)
    rest = den - d0
    te = -rest
    series = Polynomial.zero(reg)
    term = Polynomial.const(reg, 1)
    for k in range(order + 1):
        series = series + term * d0 ** (order - k)
        term = (term * te).truncate_in(slot, order)
        if term.is_zero():
            break
    top = (num * series).truncate_in(slot, order)
    return RationalFunction(top, d0 ** (order + 1))
