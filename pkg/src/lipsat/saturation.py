"""Lipschitz saturation tests and the inclusion lemmas behind their equality.

``S1``: ``h_D`` integral over ``M_D``.  ``S2``: ``psi.h`` in the Lipschitz
saturation of ``psi.M`` for every functional ``psi``.  ``S3``: ``I_k(h, M)``
inside the Lipschitz saturation of ``I_k(M)``.  Always ``S1 c S2 c S3``;
the verdicts of the three tests are bracketed by that chain.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    Functional,
    GenModule,
    Ideal,
    apply_functional,
    augment,
    cofactor_functional,
    cofactor_indices,
    coordinate_functional,
    det,
    functional_image,
    generic_rank,
    iter_minors,
    minor_ideal,
)
from .closure import CurveFamily, closure_test_ideal, closure_test_module, ideal_membership, module_membership
from .closure.membership import local_unit_membership
from .closure.engine import DEFAULT_JET_ORDER
from .closure.verdict import AllOf, Combination, Kind, RankJump, Verdict, Via
from .double import (
    determinant_product_submatrix,
    diag_generators,
    diagonal_ideal,
    double_ideal,
    double_module,
    double_vector,
    doubled_ideal_minors,
    script_I_2k,
)
from .polycore import Polynomial, VarRegistry

LEMMAS = ("L420a", "L420b", "Lfree", "Ltilde")


def _aggregate(parts: list[Verdict], label: str) -> Verdict:
    for v in parts:
        if v.is_out:
            return Verdict(Kind.OUT, v.certificate, v.note or label)
    if all(v.is_in for v in parts):
        return Verdict(Kind.IN, AllOf(label, tuple(parts)))
    return Verdict.unknown(label + ": some generators undecided")


# --------------------------------------------------------------------------------------
# ideals


def ideal_sat_test(
    p: Polynomial,
    I: Ideal,
    family: CurveFamily | None = None,
    degree_bound: int | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
) -> Verdict:
    """Is ``p`` in the Lipschitz saturation ``I_S``, i.e. ``p_D`` integral over ``I_D``?"""
    family = family or CurveFamily()
    if p.is_zero():
        return Verdict(Kind.IN, Combination((p,), tuple((g,) for g in I.gens), tuple(Polynomial.zero(I.reg) for _ in I.gens)))
    if not I.is_zero():
        unit = local_unit_membership((p,), GenModule(I.reg, 1, [(g,) for g in I.gens]), 1)
        v = unit or ideal_membership(p, I, degree_bound)
        if v.is_in:
            return Verdict(Kind.IN, Via("I is contained in its Lipschitz saturation", v, Kind.IN))
    D = double_ideal(I).module
    v = closure_test_module(double_vector([p]), D, family, degree_bound, jet_order, rank=0 if I.is_zero() else 2)
    if not v.is_unknown:
        return v
    w = closure_test_ideal(p, I, family, degree_bound, jet_order)
    if w.is_out:
        return Verdict(Kind.OUT, Via("the Lipschitz saturation lies in the integral closure", w, Kind.OUT))
    return v


# --------------------------------------------------------------------------------------
# modules


def sat1_test(
    h: Sequence[Polynomial],
    M: GenModule,
    family: CurveFamily | None = None,
    generator_family: str = "B",
    degree_bound: int | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
) -> Verdict:
    """``h_D`` integral over ``M_D``; the rank of ``M_D`` is twice that of ``M``."""
    k = generic_rank(M)
    if k and not M.is_zero():
        v = local_unit_membership(h, M, k) or module_membership(h, M, degree_bound)
        if v.is_in:
            return Verdict(Kind.IN, Via("M is contained in its Lipschitz saturation", v, Kind.IN))
    MD = double_module(M, generator_family).module
    return closure_test_module(double_vector(h), MD, family, degree_bound, jet_order, rank=2 * k)


def psi_family(M: GenModule, budget: int = 4, seed: int = 0) -> list[tuple[str, Functional]]:
    """Cofactor functionals of ``[h | M]``, coordinate projections, then seeded random ones."""
    reg = M.reg
    out = []
    k = generic_rank(M)
    for idx in cofactor_indices(M, k):
        psi = cofactor_functional(M, idx)
        if any(not c.is_zero() for c in psi.comps):
            out.append((f"cofactor{idx.rows}{idx.cols}", psi))
    for i in range(M.p):
        out.append((f"coordinate{i}", coordinate_functional(reg, M.p, i)))
    rng = random.Random(f"psi:{seed}")
    for b in range(budget):
        comps = tuple(Polynomial.const(reg, rng.randint(-3, 3) or 1) for _ in range(M.p))
        out.append((f"random{b}", Functional(comps)))
    return out


def sat2_test(
    h: Sequence[Polynomial],
    M: GenModule,
    psi_budget: int = 4,
    family: CurveFamily | None = None,
    degree_bound: int | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
    seed: int = 0,
    sat1: Verdict | None = None,
) -> Verdict:
    """One-sided ``S2`` test: ``CertifiedIn`` only through ``S1``, ``CertifiedOut`` from a failing ``psi``."""
    s1 = sat1 if sat1 is not None else sat1_test(h, M, family, degree_bound=degree_bound, jet_order=jet_order)
    if s1.is_in:
        return Verdict(Kind.IN, Via("S1 is contained in S2", s1, Kind.IN))
    for name, psi in psi_family(M, psi_budget, seed):
        ph = apply_functional(psi, h)
        v = ideal_sat_test(ph, functional_image(psi, M), family, degree_bound, jet_order)
        if v.is_out:
            return Verdict(Kind.OUT, Via(f"psi = {name}", v, Kind.OUT), f"fails for psi = {name}")
    return Verdict.unknown("S1 bracket", f"{len(psi_family(M, psi_budget, seed))} functionals")


def sat3_test(
    h: Sequence[Polynomial],
    M: GenModule,
    family: CurveFamily | None = None,
    degree_bound: int | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
) -> Verdict:
    """``I_k(h, M)`` inside ``(I_k(M))_S`` generator by generator."""
    h = tuple(h)
    k = generic_rank(M)
    if k == 0:
        raise ValueError("S3 needs a module of positive generic rank (all minors of M vanish)")
    aug = augment(h, M)
    ka = generic_rank(aug)
    if ka > k:
        return Verdict(Kind.OUT, RankJump(h, M, k, ka), "rank of (h, M) exceeds rank of M")
    J = minor_ideal(M, k)
    parts = []
    for idx, c in iter_minors(aug, k, col_filter=lambda cols: cols[0] == 0):
        if c.is_zero():
            continue
        v = ideal_sat_test(c, J, family, degree_bound, jet_order)
        if v.is_out:
            return Verdict(Kind.OUT, Via(f"minor {idx.rows}{idx.cols}", v, Kind.OUT), "a minor of (h, M) is not in (I_k(M))_S")
        parts.append(v)
    return _aggregate(parts, f"I_{k}(h, M) in (I_{k}(M))_S")


@dataclass
class SatReport:
    """Verdicts for ``S1, S2, S3`` after applying ``S1 c S2 c S3``."""

    verdicts: dict
    raw: dict
    notes: list = field(default_factory=list)
    consistent: bool = True

    def to_dict(self) -> dict:
        return {
            "S1": self.verdicts["S1"].to_dict(),
            "S2": self.verdicts["S2"].to_dict(),
            "S3": self.verdicts["S3"].to_dict(),
            "notes": list(self.notes),
            "consistent": self.consistent,
        }


def bracket(raw: dict) -> SatReport:
    order = ["S1", "S2", "S3"]
    out = dict(raw)
    notes = []
    for i, a in enumerate(order):
        if raw[a].is_in:
            for b in order[i + 1:]:
                if out[b].is_unknown:
                    out[b] = Verdict(Kind.IN, Via(f"{a} is contained in {b}", raw[a], Kind.IN))
                    notes.append(f"{b} CertifiedIn from {a}")
        if raw[a].is_out:
            for b in order[:i]:
                if out[b].is_unknown:
                    out[b] = Verdict(Kind.OUT, Via(f"{b} is contained in {a}", raw[a], Kind.OUT))
                    notes.append(f"{b} CertifiedOut from {a}")
    consistent = True
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            if out[a].is_in and out[b].is_out:
                consistent = False
                notes.append(f"contradiction: {a} in but {b} out")
    return SatReport(out, raw, notes, consistent)


def sat_report(
    h: Sequence[Polynomial],
    M: GenModule,
    family: CurveFamily | None = None,
    psi_budget: int = 4,
    degree_bound: int | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
    seed: int = 0,
) -> SatReport:
    s1 = sat1_test(h, M, family, degree_bound=degree_bound, jet_order=jet_order)
    s3 = sat3_test(h, M, family, degree_bound, jet_order)
    s2 = sat2_test(h, M, psi_budget, family, degree_bound, jet_order, seed, sat1=s1)
    return bracket({"S1": s1, "S2": s2, "S3": s3})


# --------------------------------------------------------------------------------------
# the diagonal ideal and local certificates


def diagonal_power_cofactors(f: Polynomial, k: int) -> list[tuple[tuple[int, ...], Polynomial]] | None:
    """Write ``f = sum_beta a_beta w^beta`` with ``|beta| = k``, ``w = z - z'``.

    Returns ``None`` when ``f`` is not in ``I_Delta^k``.  In the coordinates
    ``(w, z')`` membership just means every term has ``w``-degree ``>= k``.
    """
    reg = f.reg
    n = reg.n
    if f.is_zero():
        return []
    to_w = {}
    for z, zp in zip(reg.space_vars, reg.primed_vars):
        to_w[z] = Polynomial.var(reg, z) + Polynomial.var(reg, zp)
    g = f.substitute(to_w, reg=reg, keep_unmapped=True)
    groups: dict = {}
    for e, c in g.terms.items():
        b = e[:n]
        if sum(b) < k:
            return None
        beta, need = [0] * n, k
        for i in range(n):
            take = min(b[i], need)
            beta[i] = take
            need -= take
        rest = tuple(x - y for x, y in zip(b, beta)) + e[n:]
        groups.setdefault(tuple(beta), {})[rest] = c
    back = {}
    for z, zp in zip(reg.space_vars, reg.primed_vars):
        back[z] = Polynomial.var(reg, z) - Polynomial.var(reg, zp)
    return [(beta, Polynomial(reg, terms).substitute(back, reg=reg, keep_unmapped=True)) for beta, terms in sorted(groups.items())]


def w_power(reg: VarRegistry, beta: Sequence[int]) -> Polynomial:
    out = Polynomial.const(reg, 1)
    for d, b in zip(diag_generators(reg), beta):
        out = out * d ** b
    return out


def translate(obj, point: Sequence, reg: VarRegistry | None = None):
    """Move ``(point, point)`` on the diagonal to the origin: ``z -> z + x0``, ``z' -> z' + x0``."""
    if isinstance(obj, GenModule):
        return GenModule(obj.reg, obj.p, [[translate(x, point) for x in c] for c in obj.cols])
    if isinstance(obj, Ideal):
        return Ideal(obj.reg, [translate(g, point) for g in obj.gens])
    if not isinstance(obj, Polynomial):
        return tuple(translate(x, point) for x in obj)
    reg = obj.reg
    m = {}
    for z, zp, a in zip(reg.space_vars, reg.primed_vars, point):
        a = Fraction(a)
        m[z] = Polynomial.var(reg, z) + Polynomial.const(reg, a)
        m[zp] = Polynomial.var(reg, zp) + Polynomial.const(reg, a)
    return obj.substitute(m, reg=reg, keep_unmapped=True)


def unit_minor(M: GenModule, k: int):
    """First ``k``-minor of ``M`` (canonical order) that is a unit at the origin."""
    for idx, d in iter_minors(M, k):
        if d.constant_term() != 0:
            return idx, d
    return None


def find_unit_point(M: GenModule, rng: random.Random, tries: int = 50):
    """A rational point where some ``k``-minor does not vanish, and ``M`` moved there."""
    k = generic_rank(M)
    if k == 0:
        return None
    for _ in range(tries):
        x0 = [Fraction(rng.randint(-3, 3)) for _ in range(M.reg.n)]
        T = translate(M, x0)
        if unit_minor(T, k) is not None:
            return x0, T
    return None


def _local_certificate(f: Polynomial, k: int, u: Polynomial, gen_for_beta, max_power: int) -> Verdict:
    """``u^(j+1) f = sum_beta a_beta gen_beta`` where ``gen_beta = u w^beta``."""
    scaled = f
    for j in range(max_power + 1):
        cof = diagonal_power_cofactors(scaled, k)
        if cof is not None:
            gens, cofs = [], []
            for beta, a in cof:
                g, sign = gen_for_beta(beta)
                gens.append((g,))
                cofs.append(a * sign)
            unit = u ** (j + 1)
            return Verdict(Kind.IN, Combination((f,), tuple(gens), tuple(cofs), unit), "local certificate with a unit")
        scaled = scaled * u
    return Verdict.unknown(f"no local certificate up to unit power {max_power}")


@dataclass
class Prop417Report:
    hyp1: Verdict
    hyp2: Verdict
    conclusion_applicable: bool
    k: int
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "hyp1": self.hyp1.to_dict(),
            "hyp2": self.hyp2.to_dict(),
            "conclusion_applicable": self.conclusion_applicable,
            "notes": list(self.notes),
        }


def prop417_check(
    h: Sequence[Polynomial],
    M: GenModule,
    I: Ideal | None = None,
    degree_bound: int | None = None,
    family: CurveFamily | None = None,
    jet_order: int = DEFAULT_JET_ORDER,
    local: bool = False,
) -> Prop417Report:
    """Check the two hypotheses under which ``S3`` membership forces ``S1``.

    hyp1: ``I I_2((I_k M)_D)`` integral over ``I_2k(M_D)``.
    hyp2: ``I_2k(h_D, M_D)`` integral over ``I I_2((I_k(h, M))_D)``.

    With ``local=True`` the germs at the origin are used: when a ``k``-minor
    ``g0`` of ``M`` is a unit there, inclusions are certified by identities
    ``u^j f = sum a_beta gen_beta`` with the unit ``u = g0 g0'``.
    """
    h = tuple(h)
    reg = M.reg
    k = generic_rank(M)
    if k == 0:
        vac = Verdict(Kind.IN, AllOf("zero module: nothing to check"))
        return Prop417Report(vac, vac, True, 0, ["generic rank 0"])
    I = I if I is not None else diagonal_ideal(reg) ** (k - 1)
    aug = augment(h, M)
    MD = double_module(M).module
    hD = double_vector(h)
    left1 = I * doubled_ideal_minors(minor_ideal(M, k))
    right2 = I * doubled_ideal_minors(minor_ideal(aug, k))
    notes = []
    default_I = I == diagonal_ideal(reg) ** (k - 1)
    found = unit_minor(M, k) if local else None
    if local and found is None:
        notes.append("no unit k-minor at the origin; falling back to integral closure tests")
    if found is not None and default_I:
        idx, g0 = found
        u = g0 * g0.primed()
        notes.append(f"unit minor rows {idx.rows} cols {idx.cols}")
        def gen1(beta):
            ts = tuple(i for i, b in enumerate(beta) for _ in range(b))
            _, _, sub = determinant_product_submatrix(M, ts, idx, idx)
            return det(sub, reg), 1

        diffs = diag_generators(reg)
        g0p = g0.primed()

        def gen2(beta):
            i = next(i for i, b in enumerate(beta) if b)
            rest = list(beta)
            rest[i] -= 1
            two = det([[g0, Polynomial.zero(reg)], [g0p, diffs[i] * g0p]], reg)
            return w_power(reg, rest) * two, 1

        parts1 = [_local_certificate(f, k, u, gen1, 2 * k) for f in left1.gens]
        hyp1 = _aggregate(parts1, "hyp1 (local)")
        if generic_rank(aug) > k:
            hyp2 = Verdict.unknown("rank of (h, M) exceeds k; hyp2 not localised")
        else:
            AD = augment(hD, MD)
            parts2 = []
            for _, f in iter_minors(AD, 2 * k):
                if not f.is_zero():
                    parts2.append(_local_certificate(f, k, u, gen2, 2 * k))
            hyp2 = _aggregate(parts2, "hyp2 (local)")
    else:
        J1 = minor_ideal(MD, 2 * k)
        hyp1 = _aggregate([closure_test_ideal(f, J1, family, degree_bound, jet_order) for f in left1.gens], "hyp1")
        if hyp1.is_out:
            hyp2 = Verdict.unknown("skipped after hyp1 failed")
        else:
            AD = augment(hD, MD)
            parts = [
                closure_test_ideal(f, right2, family, degree_bound, jet_order)
                for _, f in iter_minors(AD, 2 * k)
                if not f.is_zero()
            ]
            hyp2 = _aggregate(parts, "hyp2")
    return Prop417Report(hyp1, hyp2, hyp1.is_in and hyp2.is_in, k, notes)


# --------------------------------------------------------------------------------------
# inclusion lemmas


def _is_principal(J: Ideal) -> bool:
    return len(J.monic().gens) == 1


def lemma_ideals(M: GenModule, which: str) -> tuple[Ideal, Ideal, int]:
    """Left and right ideals of an inclusion lemma and the rank ``k``."""
    if which not in LEMMAS:
        raise ValueError(f"unknown lemma {which!r}; choose from {', '.join(LEMMAS)}")
    reg = M.reg
    k = generic_rank(M)
    if k == 0:
        raise ValueError("the inclusion lemmas need a module of positive generic rank")
    Ik = minor_ideal(M, k)
    delta = diagonal_ideal(reg)
    I2 = doubled_ideal_minors(Ik)
    if which == "L420a":
        return delta**k * I2, minor_ideal(double_module(M).module, 2 * k), k
    if which == "L420b":
        if not _is_principal(Ik):
            raise ValueError(f"I_{k}(M) is not principal: {Ik}")
        return delta ** (k - 1) * I2, minor_ideal(double_module(M).module, 2 * k), k
    if which == "Lfree":
        if M.r != k:
            raise ValueError(f"module is not free: {M.r} generators but generic rank {k}")
        return minor_ideal(double_module(M).module, 2 * k), delta ** (k - 1) * I2, k
    return script_I_2k(M, k), delta ** (k - 1) * I2, k


def inclusion_lemma_check(M: GenModule, which: str, degree_bound: int | None = None) -> Verdict:
    """Exact membership of every left generator in the right ideal."""
    left, right, k = lemma_ideals(M, which)
    parts = []
    for f in left.gens:
        v = ideal_membership(f, right, degree_bound)
        if v.is_out:
            return Verdict(Kind.OUT, v.certificate, f"{which}: generator {f} is not in the right-hand ideal")
        parts.append(v)
    return _aggregate(parts, f"{which} at k = {k}")
