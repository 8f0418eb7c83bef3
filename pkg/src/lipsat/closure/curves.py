"""Curves through the origin, pullbacks and membership over ``k(params)[[t]]``.

A :class:`Curve` substitutes polynomials in ``t`` (with coefficients
polynomial in free parameters) for the space and primed coordinates.  The
parameters stay symbolic: "generic" means a polynomial condition in them
does not vanish, and those conditions are reported.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import flint

from ..algebra import GenModule, Ideal
from ..polycore import Polynomial, VarRegistry, parse


class Curve:
    """Germ of a curve ``(C, 0) -> (X x X, 0)`` given by polynomial images.

    ``source`` is the registry of the objects pulled back; the images live
    over ``target``, which adds the curve parameters to ``source``.
    ``weights`` marks a curve ``z_v = c_v t^{w_v}`` with independent symbolic
    coefficients, whose orders are plain weighted degrees.
    """

    def __init__(
        self,
        source: VarRegistry,
        subs: Mapping[str, Polynomial | str],
        params: Sequence[str] = (),
        label: str = "",
        kind: str = "user",
        weights: Mapping[str, int] | None = None,
        target: VarRegistry | None = None,
    ):
        coords = set(source.space_vars) | set(source.primed_vars)
        self.source = source
        self.target = target or source.with_params(params)
        self.params = tuple(params)
        self.label = label
        self.kind = kind
        self.weights = dict(weights) if weights else None
        t = self.target.t_slot
        allowed = set(self.target.param_slots) | {t}
        images = {}
        for name, img in subs.items():
            if name not in coords:
                raise ValueError(f"curve substitutes {name!r}, which is not a coordinate")
            if isinstance(img, str):
                img = parse(img, self.target)
            elif img.reg != self.target:
                img = img.to_registry(self.target)
            if not img.occurring_slots() <= allowed:
                raise ValueError(f"image of {name!r} involves coordinates: {img}")
            if not img.coefficient_in(t, 0).is_zero():
                raise ValueError(f"image of {name!r} does not vanish at t = 0: {img}")
            images[name] = img
        self.subs = images
        self._numeric = all(not (x.occurring_slots() - {t}) for x in images.values())
        self._series = None

    def image(self, name: str) -> Polynomial:
        return self.subs[name]

    @property
    def is_numeric(self) -> bool:
        return self._numeric

    def _mapping(self) -> dict:
        m = dict(self.subs)
        for p in self.source.params:
            m[p] = Polynomial.var(self.target, p)
        return m

    def pullback(self, p: Polynomial) -> Polynomial:
        if p.reg != self.source:
            p = p.to_registry(self.source)
        return p.substitute(self._mapping(), reg=self.target)

    def order(self, p: Polynomial, jet_order: int | None = None) -> int | None:
        """``ord_t(p o phi)``.

        ``None`` means the pullback vanishes (or, for numeric curves with a
        jet order ``N``, that no term of order ``<= N`` survives).
        """
        if p.is_zero():
            return None
        if p.reg != self.source:
            p = p.to_registry(self.source)
        if self.weights is not None:
            w = [self.weights.get(name, 0) for name in self.source.names]
            return min(sum(a * b for a, b in zip(e, w)) for e in p.terms)
        if self._numeric and not (p.occurring_slots() & set(self.source.param_slots)):
            return self._numeric_order(p, jet_order)
        return self.pullback(p).order_in(self.target.t_slot)

    def _numeric_order(self, p: Polynomial, N: int | None) -> int | None:
        if self._series is None:
            t = self.target.t_slot
            self._series = {}
            for name, img in self.subs.items():
                coeffs = [0] * (img.degree_in([t]) + 1)
                for e, c in img.terms.items():
                    coeffs[e[t]] = c
                self._series[self.source.slot(name)] = [flint.fmpq_poly(coeffs)]
        total = flint.fmpq_poly(0)
        for e, c in p.terms.items():
            term = flint.fmpq_poly(_fq(c))
            for s, a in enumerate(e):
                if not a:
                    continue
                if s not in self._series:
                    raise ValueError(f"unmapped variable {self.source.names[s]!r}")
                pw = self._series[s]
                while len(pw) <= a:
                    nxt = pw[-1] * pw[0]
                    pw.append(nxt if N is None else nxt.truncate(N + 1))
                term = term * pw[a - 1]
                if N is not None:
                    term = term.truncate(N + 1)
            total += term
        if total.is_zero():
            return None
        coeffs = total.coeffs()
        return next(i for i, c in enumerate(coeffs) if c != 0)

    def to_json(self) -> dict:
        out = {"subs": {k: str(v) for k, v in self.subs.items()}, "params": list(self.params)}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, source: VarRegistry, data: Mapping | str, label: str = "") -> "Curve":
        if isinstance(data, str):
            data = json.loads(data)
        if "subs" not in data:
            raise ValueError("curve JSON needs a 'subs' object")
        # coordinates left out are mapped to zero
        subs = {v: "0" for v in (*source.space_vars, *source.primed_vars)}
        subs.update(data["subs"])
        return cls(source, subs, data.get("params", ()), label or data.get("label", ""))

    def rebased(self, target: VarRegistry) -> "Curve":
        """The same curve with images over a larger parameter registry."""
        return Curve(self.source, self.subs, self.params, self.label, self.kind, self.weights, target)

    def __repr__(self):
        body = ", ".join(f"{k} = {v}" for k, v in self.subs.items())
        return f"Curve({self.label or self.kind}: {body})"


def _fq(c):
    if isinstance(c, int):
        return c
    return flint.fmpq(c.numerator, c.denominator)


def curve_pullback(obj, c: Curve):
    """Entrywise pullback of a polynomial, vector, :class:`GenModule` or :class:`Ideal`."""
    if isinstance(obj, Polynomial):
        return c.pullback(obj)
    if isinstance(obj, GenModule):
        return GenModule(c.target, obj.p, [[c.pullback(x) for x in col] for col in obj.cols])
    if isinstance(obj, Ideal):
        return Ideal(c.target, (c.pullback(g) for g in obj.gens))
    return tuple(c.pullback(x) for x in obj)


# --------------------------------------------------------------------------------------
# membership over the local ring at t = 0


@dataclass
class CurveMembership:
    """Outcome of :func:`curve_membership`.

    On failure ``row`` is the first row whose target entry cannot be matched,
    ``deficit`` is (pivot order) - (target order), or ``None`` when the row
    has no pivot left.  ``residual`` is the reduced target, a unit multiple
    of ``v - A x`` for the cofactors found so far.  ``conditions`` are the
    parameter polynomials that must not vanish for the elimination to apply.
    """

    member: bool
    row: int | None = None
    deficit: int | None = None
    residual: tuple = ()
    conditions: tuple = ()
    pivots: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "row": self.row,
            "deficit": self.deficit,
            "residual": [str(x) for x in self.residual],
            "conditions": [str(x) for x in self.conditions],
            "pivots": [list(p) for p in self.pivots],
        }


def curve_membership(v: Sequence[Polynomial], A: GenModule | Sequence[Sequence[Polynomial]]) -> CurveMembership:
    """Is ``v`` in the column span of ``A`` over the local ring at ``t = 0``?

    Valuation-pivoted elimination: repeatedly take an entry of least
    ``t``-order (ties: smallest row, then column), clear its row with
    column operations that only rescale by units, and reduce ``v``
    alongside.  Entries are polynomials in ``t`` over the parameters.
    """
    cols = [list(c) for c in (A.cols if isinstance(A, GenModule) else A)]
    v = list(v)
    if not v:
        return CurveMembership(True)
    reg = v[0].reg
    ts = reg.t_slot
    p = len(v)
    live_rows = set(range(p))
    live_cols = set(range(len(cols)))
    conditions: list[Polynomial] = []
    pivots = []

    def order(x: Polynomial):
        return x.order_in(ts)

    while True:
        best = None
        for i in sorted(live_rows):
            for j in sorted(live_cols):
                o = order(cols[j][i])
                if o is not None and (best is None or o < best[0]):
                    best = (o, i, j)
        if best is None:
            break
        m, i, j = best
        a = cols[j][i]
        u = a.shift_in(ts, -m)
        u0 = u.coefficient_in(ts, 0)
        if not u0.is_constant() and u0 not in conditions:
            conditions.append(u0)
        pivots.append((i, j, m))
        oi = order(v[i])
        if oi is not None and oi < m:
            lead = v[i].coefficient_in(ts, oi)
            if not lead.is_constant() and lead not in conditions:
                conditions.append(lead)
            return CurveMembership(False, i, m - oi, tuple(v), tuple(conditions), pivots)
        for l in sorted(live_cols - {j}):
            b = cols[l][i]
            if b.is_zero():
                continue
            q = b.shift_in(ts, -m)
            cols[l] = [u * x - q * y for x, y in zip(cols[l], cols[j])]
        if oi is not None:
            q = v[i].shift_in(ts, -m)
            v = [u * x - q * y for x, y in zip(v, cols[j])]
        live_rows.discard(i)
        live_cols.discard(j)
    for i in sorted(live_rows):
        if not v[i].is_zero():
            return CurveMembership(False, i, None, tuple(v), tuple(conditions), pivots)
    return CurveMembership(True, None, None, tuple(v), tuple(conditions), pivots)


# --------------------------------------------------------------------------------------
# deterministic curve families


@dataclass(frozen=True)
class CurveFamily:
    """Finite, seeded stand-in for "all analytic curves".

    Order: the linear diagonal family ``(t, a_i t; t, b_i t)`` (if enabled),
    then user curves, then monomial curves ``z_v = c_v t^{w_v}`` with
    ``1 <= w_v <= max_degree`` (at most ``monomial_cap`` of them), then
    ``count`` seeded random polynomial curves of degree ``<= max_degree``.
    """

    max_degree: int = 3
    count: int = 24
    include_diagonal_witness: bool = True
    seed: int = 0
    monomial_cap: int = 48
    extra: tuple = ()

    def curves(self, reg: VarRegistry) -> list[Curve]:
        key = (self, reg)
        if key not in _FAMILY_CACHE:
            _FAMILY_CACHE[key] = _build_family(self, reg)
        return _FAMILY_CACHE[key]


_FAMILY_CACHE: dict = {}


def diagonal_family_curve(reg: VarRegistry) -> Curve:
    """``z_1 = t, z_i = a_i t`` and ``z_1' = t, z_i' = b_i t`` with symbolic ``a_i, b_i``."""
    n = reg.n
    if n == 2:
        stems = ["alpha", "beta"]
    else:
        stems = [f"alpha{i + 1}" for i in range(1, n)] + [f"beta{i + 1}" for i in range(1, n)]
    names = reg.fresh_names(stems)
    a, b = names[: n - 1], names[n - 1:]
    subs = {reg.space_vars[0]: "t", reg.primed_vars[0]: "t"}
    for i in range(1, n):
        subs[reg.space_vars[i]] = f"{a[i - 1]}*t"
        subs[reg.primed_vars[i]] = f"{b[i - 1]}*t"
    target = reg.with_params(names)
    subs = {k: parse(v.replace("t", reg.curve_var) if reg.curve_var != "t" else v, target) for k, v in subs.items()}
    return Curve(reg, subs, names, "diagonal-family", "diagonal")


def _build_family(fam: CurveFamily, reg: VarRegistry) -> list[Curve]:
    coords = list(reg.space_vars) + list(reg.primed_vars)
    out: list[Curve] = []
    if fam.include_diagonal_witness:
        out.append(diagonal_family_curve(reg))
    out.extend(fam.extra)
    taken = set(reg.names)
    for c in out:
        taken.update(c.params)
    cnames = []
    for i in range(len(coords)):
        name, k = f"c{i + 1}", 0
        while name in taken:
            k += 1
            name = f"c{i + 1}_{k}"
        cnames.append(name)
    mono_target = reg.with_params(cnames)
    tvar = Polynomial.var(mono_target, reg.curve_var)
    exps = sorted(product(range(1, fam.max_degree + 1), repeat=len(coords)), key=lambda w: (sum(w), w))
    if len(exps) > fam.monomial_cap:
        rng = random.Random(f"monomial:{fam.seed}")
        head = exps[:1]
        rest = rng.sample(exps[1:], fam.monomial_cap - 1)
        exps = head + sorted(rest, key=lambda w: (sum(w), w))
    for w in exps:
        subs = {v: Polynomial.var(mono_target, c) * tvar ** e for v, c, e in zip(coords, cnames, w)}
        label = "monomial(" + ",".join(map(str, w)) + ")"
        out.append(Curve(reg, subs, cnames, label, "monomial", dict(zip(coords, w)), mono_target))
    rng = random.Random(f"curves:{fam.seed}")
    treg = reg
    t = Polynomial.var(treg, reg.curve_var)
    d = max(1, fam.max_degree)

    def series(low: int):
        out = Polynomial.zero(treg)
        for k in range(low, d + 1):
            c = rng.randint(-5, 5)
            if k == low and c == 0:
                c = rng.choice([-2, -1, 1, 2, 3])
            out = out + t ** k * c
        return out

    n = reg.n
    for idx in range(fam.count):
        style = idx % 3
        subs = {}
        if style == 0:
            for v in coords:
                subs[v] = series(rng.randint(1, d))
        elif style == 1:
            # approaches the diagonal: z' = z + higher-order perturbation
            for i in range(n):
                base = series(rng.randint(1, d))
                subs[reg.space_vars[i]] = base
                bump = t ** rng.randint(min(2, d), d + 1) * rng.choice([-3, -1, 1, 2])
                subs[reg.primed_vars[i]] = base + bump
        else:
            for v in coords:
                subs[v] = series(rng.randint(1, d)) if rng.random() < 0.75 else Polynomial.zero(treg)
        out.append(Curve(reg, subs, (), f"random-{idx}", "random"))
    return out
