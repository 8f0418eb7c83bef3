"""One-sided verdicts and their replayable certificates.

``CertifiedIn`` and ``CertifiedOut`` always carry a certificate whose
:meth:`verify` re-derives the claim by exact arithmetic, without trusting
the search that produced it.  ``Unknown`` records what was tried.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from ..polycore import Polynomial


class Kind(str, Enum):
    IN = "CertifiedIn"
    OUT = "CertifiedOut"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


def _vec(v) -> list[str]:
    return [str(x) for x in v]


class Certificate:
    def verify(self) -> bool:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Verdict:
    kind: Kind
    certificate: Certificate | None = None
    note: str = ""

    @classmethod
    def unknown(cls, *tried: str) -> "Verdict":
        return cls(Kind.UNKNOWN, Exhausted(tuple(tried)))

    @property
    def is_in(self) -> bool:
        return self.kind is Kind.IN

    @property
    def is_out(self) -> bool:
        return self.kind is Kind.OUT

    @property
    def is_unknown(self) -> bool:
        return self.kind is Kind.UNKNOWN

    def verify(self) -> bool:
        if self.kind is Kind.UNKNOWN:
            return True
        return self.certificate is not None and self.certificate.verify()

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"verdict": self.kind.value}
        if self.note:
            out["note"] = self.note
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out

    def __str__(self):
        return self.kind.value


@dataclass(frozen=True)
class Exhausted(Certificate):
    strategies: tuple[str, ...]

    def verify(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {"type": "exhausted", "strategies": list(self.strategies)}


@dataclass(frozen=True)
class Combination(Certificate):
    """``unit * target = sum_j cofactors[j] * gens[j]`` with ``unit(0) != 0``.

    With ``unit = 1`` this is plain membership; a unit of the local ring at
    the origin certifies membership of the germ.
    """

    target: tuple[Polynomial, ...]
    gens: tuple[tuple[Polynomial, ...], ...]
    cofactors: tuple[Polynomial, ...]
    unit: Polynomial | None = None

    def verify(self) -> bool:
        if len(self.cofactors) != len(self.gens):
            return False
        q = len(self.target)
        lhs = list(self.target)
        if self.unit is not None:
            if self.unit.constant_term() == 0:
                return False
            lhs = [self.unit * x for x in lhs]
        for i in range(q):
            acc = lhs[i]
            for a, g in zip(self.cofactors, self.gens):
                if not a.is_zero() and not g[i].is_zero():
                    acc = acc - a * g[i]
            if not acc.is_zero():
                return False
        return True

    def to_dict(self) -> dict:
        out = {
            "type": "combination",
            "cofactors": [str(a) for a in self.cofactors],
            "generators": [_vec(g) for g in self.gens],
        }
        if self.unit is not None:
            out["unit"] = str(self.unit)
        return out


@dataclass(frozen=True)
class GradedGap(Certificate):
    """The homogeneous target is not in the degree-``degree`` piece of the module.

    Replay rebuilds the graded piece from scratch and compares ranks.
    """

    target: tuple[Polynomial, ...]
    gens: tuple[tuple[Polynomial, ...], ...]
    degree: int

    def verify(self) -> bool:
        from .membership import graded_rank_gap

        return graded_rank_gap(self.target, self.gens, self.degree)

    def to_dict(self) -> dict:
        return {"type": "graded-gap", "degree": self.degree, "target": _vec(self.target)}


@dataclass(frozen=True)
class NewtonIn(Certificate):
    """``exponent >= sum_j weights[j] * gen_exps[j]`` with convex weights."""

    exponent: tuple[int, ...]
    gen_exps: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]

    def verify(self) -> bool:
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            return False
        for i, a in enumerate(self.exponent):
            if sum(w * g[i] for w, g in zip(self.weights, self.gen_exps)) > a:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "type": "newton-in",
            "exponent": list(self.exponent),
            "weights": [str(w) for w in self.weights],
            "generators": [list(g) for g in self.gen_exps],
        }


@dataclass(frozen=True)
class NewtonOut(Certificate):
    """A positive weight ``w`` with ``w.a < min_j w.g_j``.

    Such a weight is also the curve ``z_i = c_i t^{w_i}``.
    """

    exponent: tuple[int, ...]
    gen_exps: tuple[tuple[int, ...], ...]
    weight: tuple[int, ...]

    def verify(self) -> bool:
        if any(w <= 0 for w in self.weight):
            return False
        lhs = sum(w * a for w, a in zip(self.weight, self.exponent))
        return all(lhs < sum(w * g for w, g in zip(self.weight, ge)) for ge in self.gen_exps)

    def to_dict(self) -> dict:
        return {"type": "newton-out", "exponent": list(self.exponent), "weight": list(self.weight)}


@dataclass(frozen=True)
class OrderWitness(Certificate):
    """``ord_t(p o phi) < ord_t(g o phi)`` for every generator ``g``."""

    target: Polynomial
    gens: tuple[Polynomial, ...]
    curve: Any
    target_order: int
    gens_order: int | None
    jet_order: int | None = None

    def verify(self) -> bool:
        o = self.curve.order(self.target, self.jet_order)
        if o is None or o != self.target_order:
            return False
        for g in self.gens:
            og = self.curve.order(g, self.jet_order)
            if og is not None and og <= o:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "type": "order-witness",
            "curve": self.curve.to_json(),
            "target_order": self.target_order,
            "generators_min_order": self.gens_order,
        }


@dataclass(frozen=True)
class CurveObstruction(Certificate):
    """``h o phi`` is not in the span of ``M o phi`` over the local ring at ``t = 0``."""

    vector: tuple[Polynomial, ...]
    module: Any
    curve: Any
    result: Any

    def verify(self) -> bool:
        from .curves import curve_membership, curve_pullback

        res = curve_membership(curve_pullback(self.vector, self.curve), curve_pullback(self.module, self.curve))
        return not res.member and res.row == self.result.row

    def to_dict(self) -> dict:
        out = {"type": "curve-obstruction", "curve": self.curve.to_json()}
        out.update(self.result.to_dict())
        return out


@dataclass(frozen=True)
class RankJump(Certificate):
    """``rank (h, M) > rank M`` over the fraction field."""

    vector: tuple[Polynomial, ...]
    module: Any
    rank: int
    augmented_rank: int

    def verify(self) -> bool:
        from ..algebra import _bareiss_rank, augment

        return (
            self.augmented_rank > self.rank
            and _bareiss_rank(self.module) == self.rank
            and _bareiss_rank(augment(self.vector, self.module)) == self.augmented_rank
        )

    def to_dict(self) -> dict:
        return {"type": "rank-jump", "rank": self.rank, "augmented_rank": self.augmented_rank}


@dataclass(frozen=True)
class AllOf(Certificate):
    """Conjunction of ``CertifiedIn`` sub-verdicts (e.g. one per minor)."""

    label: str
    parts: tuple[Verdict, ...] = field(default_factory=tuple)

    def verify(self) -> bool:
        return all(v.is_in and v.verify() for v in self.parts)

    def to_dict(self) -> dict:
        return {"type": "all-of", "label": self.label, "parts": [v.to_dict() for v in self.parts]}


@dataclass(frozen=True)
class Via(Certificate):
    """A verdict inherited from another one through an inclusion."""

    label: str
    sub: Verdict
    expect: Kind

    def verify(self) -> bool:
        return self.sub.kind is self.expect and self.sub.verify()

    def to_dict(self) -> dict:
        return {"type": "via", "label": self.label, "sub": self.sub.to_dict()}
