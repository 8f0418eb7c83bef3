"""Integral-closure pipelines for ideals and modules.

Each pipeline tries cheap exact certificates first (membership, Newton
polyhedron), then looks for an obstruction along a deterministic family
of curves.  Curves are scanned in family order, so the reported witness is
always the first failing curve.
"""

from __future__ import annotations

from typing import Sequence

from ..algebra import GenModule, Ideal, augment, generic_rank, iter_minors, minor_ideal
from ..polycore import Polynomial
from .curves import Curve, CurveFamily, curve_membership, curve_pullback
from .membership import ideal_membership, local_unit_membership, module_membership
from .newton import newton_test
from .verdict import AllOf, Combination, CurveObstruction, Kind, NewtonOut, OrderWitness, RankJump, Verdict

DEFAULT_JET_ORDER = 12


def _weight_curve(reg, weight: Sequence[int]) -> Curve:
    """``z_v = c_v t^{w_v}`` on the variables with a coordinate role."""
    coords = list(reg.space_vars) + list(reg.primed_vars)
    names = reg.fresh_names([f"c{i + 1}" for i in range(len(coords))])
    target = reg.with_params(names)
    t = Polynomial.var(target, reg.curve_var)
    w = {v: weight[reg.slot(v)] for v in coords}
    subs = {v: Polynomial.var(target, c) * t ** w[v] for v, c in zip(coords, names)}
    label = "monomial(" + ",".join(str(w[v]) for v in coords) + ")"
    return Curve(reg, subs, names, label, "monomial", w, target)


def _min_order(curve: Curve, gens: Sequence[Polynomial], jet: int | None) -> int | None:
    best = None
    for g in gens:
        o = curve.order(g, jet)
        if o is not None and (best is None or o < best):
            best = o
            if best == 0:
                break
    return best


def _order_violation(curve, p, gens, jet, gens_order=None, have_gens_order=False):
    o = curve.order(p, jet)
    if o is None:
        return None
    if jet is not None and curve.is_numeric and o > jet:
        return None
    mo = gens_order if have_gens_order else _min_order(curve, gens, jet)
    if mo is None or o < mo:
        return OrderWitness(p, tuple(gens), curve, o, mo, jet if curve.is_numeric else None)
    return None


def closure_test_ideal(
    p: Polynomial,
    I: Ideal,
    family: CurveFamily | None = None,
    degree_bound: int | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
) -> Verdict:
    """Is ``p`` in the integral closure of ``I`` at the origin?"""
    family = family or CurveFamily()
    reg = I.reg
    if p.reg != reg:
        p = p.to_registry(reg)
    if p.is_zero():
        return Verdict(Kind.IN, Combination((p,), tuple((g,) for g in I.gens), tuple(Polynomial.zero(reg) for _ in I.gens)))
    tried = []
    if not I.is_zero():
        unit = local_unit_membership((p,), GenModule(reg, 1, [(g,) for g in I.gens]), 1)
        v = unit or ideal_membership(p, I, degree_bound)
        if v.is_in:
            return v
        tried.append("ideal membership")
        if I.is_monomial():
            certs = []
            for e in sorted(p.terms):
                c = newton_test(e, I)
                if isinstance(c, NewtonOut):
                    w = _order_violation(_weight_curve(reg, c.weight), p, I.gens, None)
                    if w is not None:
                        return Verdict(Kind.OUT, w, "Newton polyhedron separation")
                    return Verdict(Kind.OUT, c, "Newton polyhedron separation")
                certs.append(Verdict(Kind.IN, c))
            return Verdict(Kind.IN, AllOf("Newton polyhedron, term by term", tuple(certs)))
    for curve in family.curves(reg):
        w = _order_violation(curve, p, I.gens, jet_order)
        if w is not None:
            return Verdict(Kind.OUT, w)
    tried.append(f"{len(family.curves(reg))} curves")
    return Verdict.unknown(*tried)


def closure_test_module(
    h: Sequence[Polynomial],
    M: GenModule,
    family: CurveFamily | None = None,
    degree_bound: int | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
    rank: int | None = None,
) -> Verdict:
    """Is ``h`` in the integral closure of ``M`` at the origin?

    Reduces to minor ideals: with ``k`` the generic rank, ``h`` is integral
    over ``M`` iff ``I_k(h, M)`` is integral over ``I_k(M)``.  ``rank`` may
    be passed when the generic rank of ``M`` is already known.
    """
    family = family or CurveFamily()
    h = tuple(x if x.reg == M.reg else x.to_registry(M.reg) for x in h)
    if len(h) != M.p:
        raise ValueError(f"vector of length {len(h)} does not fit rank {M.p}")
    if all(x.is_zero() for x in h):
        return module_membership(h, M)
    k = generic_rank(M) if rank is None else rank
    aug = augment(h, M)
    ka = generic_rank(aug)
    if ka > k:
        return Verdict(Kind.OUT, RankJump(h, M, k, ka), "rank of (h, M) exceeds rank of M")
    v = local_unit_membership(h, M, k) or module_membership(h, M, degree_bound)
    if v.is_in:
        return v
    tried = ["module membership"]
    J = minor_ideal(M, k)
    cs = [d for _, d in iter_minors(aug, k, col_filter=lambda cols: cols[0] == 0) if not d.is_zero()]
    parts = []
    open_cs = []
    for c in cs:
        sub = ideal_membership(c, J, degree_bound)
        if sub.is_in:
            parts.append(sub)
            continue
        if J.is_monomial() and len(J.gens):
            sub = closure_test_ideal(c, J, family, degree_bound, jet_order)
            if sub.is_out:
                return Verdict(Kind.OUT, sub.certificate, f"minor not integral over I_{k}(M)")
            parts.append(sub)
            continue
        open_cs.append(c)
    if not open_cs:
        return Verdict(Kind.IN, AllOf(f"I_{k}(h, M) integral over I_{k}(M)", tuple(parts)))
    tried.append(f"minor reduction at k = {k}")
    for curve in family.curves(M.reg):
        jet = jet_order if curve.is_numeric else None
        mo = _min_order(curve, J.gens, jet)
        witness = None
        for c in open_cs:
            witness = _order_violation(curve, c, J.gens, jet_order, mo, True)
            if witness is not None:
                break
        res = curve_membership(curve_pullback(h, curve), curve_pullback(M, curve))
        if not res.member:
            return Verdict(Kind.OUT, CurveObstruction(h, M, curve, res))
        if witness is not None:
            return Verdict(Kind.OUT, witness, f"minor not integral over I_{k}(M)")
    tried.append(f"{len(family.curves(M.reg))} curves")
    return Verdict.unknown(*tried)
