"""Ideal and module membership by exact linear algebra on coefficients.

A representation ``target = sum_j a_j g_j`` with bounded cofactor degree is
a linear system in the coefficients of the ``a_j``.  For homogeneous data
one graded piece decides membership outright.  Pivot columns are found
modulo a large prime and the rank is then confirmed over the integers, so
every answer is exact.
"""

from __future__ import annotations

from collections import OrderedDict
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, lcm
from typing import Sequence

import flint

from ..algebra import GenModule, Ideal, det, iter_minors, submatrix
from ..polycore import Polynomial, VarRegistry
from .verdict import Combination, GradedGap, Kind, Verdict

PRIME = 2**61 - 1
PRODUCT_BUDGET = 1200
VecT = tuple[Polynomial, ...]


def vector_degree(v: Sequence[Polynomial]) -> int | None:
    """Common degree of a homogeneous vector, ``None`` if mixed; -1 for zero."""
    degs = set()
    for x in v:
        if x.is_zero():
            continue
        if not x.is_homogeneous():
            return None
        degs.add(x.degree())
    if not degs:
        return -1
    return degs.pop() if len(degs) == 1 else None


def _q(c):
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    return c


def _monomials(width: int, slots: tuple[int, ...], d: int):
    for combo in combinations_with_replacement(slots, d):
        e = [0] * width
        for s in combo:
            e[s] += 1
        yield tuple(e)


def _column(gen: VecT, m: tuple[int, ...]) -> dict:
    col = {}
    for i, x in enumerate(gen):
        for e, c in x.terms.items():
            col[(i, tuple(a + b for a, b in zip(e, m)))] = c
    return col


def _int_scaled(col: dict) -> tuple[dict, int]:
    """The column times the lcm of its denominators, and that multiplier."""
    den = 1
    for c in col.values():
        if isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    return {k: int(c * den) for k, c in col.items()}, den


EXACT_CHECK_ENTRIES = 60_000


def _nmod(m: int, n: int, cols: list[dict], index: dict, transpose: bool = False):
    A = flint.nmod_mat(n, m, PRIME) if transpose else flint.nmod_mat(m, n, PRIME)
    for j, col in enumerate(cols):
        for k, c in col.items():
            if transpose:
                A[j, index[k]] = c % PRIME
            else:
                A[index[k], j] = c % PRIME
    return A


def _leading(red, rank: int, n: int, nonzero) -> list[int]:
    # pivot columns of a reduced row echelon form increase strictly
    piv, j = [], 0
    for i in range(rank):
        while not nonzero(red[i, j]):
            j += 1
        piv.append(j)
        j += 1
    return piv


def _pivots(cols: list[dict], index: dict, transpose: bool = False) -> list[int]:
    """Indices of a maximal Q-independent subset of ``cols`` (integer entries).

    With ``transpose`` the roles flip and the result indexes rows of the
    matrix whose columns are ``cols``.  Independence modulo ``PRIME``
    implies independence over Q; maximality is confirmed exactly when the
    matrix is small enough for an integer rank computation.
    """
    if not cols or not index:
        return []
    m, n = len(index), len(cols)
    red, rank = _nmod(m, n, cols, index, transpose).rref()
    piv = _leading(red, rank, m if transpose else n, lambda x: int(x) != 0)
    if m * n > EXACT_CHECK_ENTRIES:
        return piv
    Z = flint.fmpz_mat(m, n)
    for j, col in enumerate(cols):
        for k, c in col.items():
            Z[index[k], j] = c
    if transpose:
        Z = Z.transpose()
    if Z.rank() == rank:
        return piv
    # unlucky prime: exact elimination
    red, rank = flint.fmpq_mat(Z).rref()
    return _leading(red, rank, m if transpose else n, lambda x: x != 0)


class _Piece:
    """Pivoted product basis of one graded or degree-bounded piece."""

    def __init__(self, gens: list[VecT], products: list[tuple[int, tuple]]):
        scaled = [_int_scaled(_column(gens[j], m)) for j, m in products]
        cols = [c for c, _ in scaled]
        index: dict = {}
        for col in cols:
            for k in col:
                if k not in index:
                    index[k] = len(index)
        piv = _pivots(cols, index)
        self.products = [products[j] for j in piv]
        self.scales = [scaled[j][1] for j in piv]
        self.cols = [cols[j] for j in piv]
        self.index = index
        r = self.rank = len(piv)
        self.rows = []
        if r == 0:
            return
        # rows where the pivot block is invertible: pivots of the transpose
        keys = list(index)
        self.rows = [keys[i] for i in _pivots(self.cols, index, transpose=True)]
        rpos = {k: i for i, k in enumerate(self.rows)}
        self.block = flint.fmpq_mat(r, r)
        block_p = flint.nmod_mat(r, r, PRIME)
        for j, col in enumerate(self.cols):
            for k, c in col.items():
                i = rpos.get(k)
                if i is not None:
                    self.block[i, j] = c
                    block_p[i, j] = c % PRIME
        self.inv_p = block_p.inv()

    def _mod_p_consistent(self, target: dict) -> bool:
        """False only if ``target`` is certainly outside the span."""
        b = flint.nmod_mat(self.rank, 1, PRIME)
        for i, k in enumerate(self.rows):
            c = target.get(k, 0)
            if isinstance(c, Fraction):
                if c.denominator % PRIME == 0:
                    return True
                c = c.numerator * pow(c.denominator, -1, PRIME)
            b[i, 0] = c % PRIME
        x = [int(v) for v in (self.inv_p * b).entries()]
        acc: dict = {}
        for xj, col in zip(x, self.cols):
            if xj:
                for k, v in col.items():
                    acc[k] = (acc.get(k, 0) + xj * v) % PRIME
        for k in set(acc) | set(target):
            c = target.get(k, 0)
            if isinstance(c, Fraction):
                if c.denominator % PRIME == 0:
                    return True
                c = c.numerator * pow(c.denominator, -1, PRIME)
            if acc.get(k, 0) != c % PRIME:
                return False
        return True

    def solve(self, target: dict) -> list[Fraction] | None:
        if any(k not in self.index for k in target):
            return None
        if self.rank == 0:
            return [] if not target else None
        if not self._mod_p_consistent(target):
            return None
        b = flint.fmpq_mat(self.rank, 1, [_q(target.get(k, 0)) for k in self.rows])
        x = self.block.solve(b)
        sol = [Fraction(int(x[i, 0].p), int(x[i, 0].q)) for i in range(self.rank)]
        acc: dict = {}
        for c, col in zip(sol, self.cols):
            if c:
                for k, v in col.items():
                    acc[k] = acc.get(k, 0) + c * v
        for k in set(acc) | set(target):
            if acc.get(k, 0) != target.get(k, 0):
                return None
        return sol


class SpanEngine:
    """Membership in ``sum_j R g_j`` for a fixed list of generator vectors."""

    def __init__(self, reg: VarRegistry, q: int, gens: Sequence[Sequence[Polynomial]]):
        self.reg = reg
        self.q = q
        self.gens: list[VecT] = [tuple(g) for g in gens]
        self.gdeg = [vector_degree(g) for g in self.gens]
        self.homogeneous = all(d is not None for d in self.gdeg)
        self.slots = set()
        for g in self.gens:
            for x in g:
                self.slots |= x.occurring_slots()
        self._pieces: dict = {}
        self._reduced: dict = {}

    def _independent(self, js: list[int]) -> list[int]:
        key = tuple(js)
        if key not in self._reduced:
            cols = [_int_scaled(_column(self.gens[j], (0,) * self.reg.nvars))[0] for j in js]
            index: dict = {}
            for col in cols:
                for k in col:
                    index.setdefault(k, len(index))
            self._reduced[key] = [js[i] for i in _pivots(cols, index)]
        return self._reduced[key]

    def _graded_piece(self, d: int, slots: tuple[int, ...]) -> _Piece:
        key = ("g", d, slots)
        if key not in self._pieces:
            products = []
            by_deg: dict[int, list[int]] = {}
            for j, e in enumerate(self.gdeg):
                if e is not None and 0 <= e <= d:
                    by_deg.setdefault(e, []).append(j)
            for e in sorted(by_deg):
                for j in self._independent(by_deg[e]):
                    products.extend((j, m) for m in _monomials(self.reg.nvars, slots, d - e))
            self._pieces[key] = _Piece(self.gens, products)
        return self._pieces[key]

    def _bounded_piece(self, D: int, slots: tuple[int, ...]) -> _Piece:
        key = ("b", D, slots)
        if key not in self._pieces:
            live = [j for j, g in enumerate(self.gens) if any(not x.is_zero() for x in g)]
            products = []
            for j in self._independent(live):
                for s in range(D + 1):
                    products.extend((j, m) for m in _monomials(self.reg.nvars, slots, s))
            self._pieces[key] = _Piece(self.gens, products)
        return self._pieces[key]

    def _certificate(self, target: VecT, piece: _Piece, sol: list[Fraction]) -> Combination:
        acc: list[dict] = [{} for _ in self.gens]
        for c, s, (j, m) in zip(sol, piece.scales, piece.products):
            if c:
                acc[j][m] = acc[j].get(m, 0) + c * s
        cof = [Polynomial(self.reg, a) for a in acc]
        return Combination(target, tuple(self.gens), tuple(cof))

    def test(self, target: Sequence[Polynomial], degree_bound: int | None = None) -> Verdict:
        target = tuple(target)
        if len(target) != self.q:
            raise ValueError(f"target of length {len(target)} for generators of length {self.q}")
        if all(x.is_zero() for x in target):
            zero = Polynomial.zero(self.reg)
            return Verdict(Kind.IN, Combination(target, tuple(self.gens), tuple(zero for _ in self.gens)))
        tslots = set()
        for x in target:
            tslots |= x.occurring_slots()
        slots = tuple(sorted(self.slots | tslots))
        tcol = {}
        for i, x in enumerate(target):
            for e, c in x.terms.items():
                tcol[(i, e)] = c
        d = vector_degree(target)
        if self.homogeneous and d is not None:
            piece = self._graded_piece(d, slots)
            sol = piece.solve(tcol)
            if sol is None:
                return Verdict(Kind.OUT, GradedGap(target, tuple(self.gens), d), "graded piece decides")
            return Verdict(Kind.IN, self._certificate(target, piece, sol))
        tdeg = max(x.degree() for x in target)
        gdegs = [max(x.degree() for x in g) for g in self.gens if any(not x.is_zero() for x in g)]
        if not gdegs:
            return Verdict.unknown("degree-bounded linear algebra")
        low = max(0, tdeg - min(gdegs))
        if degree_bound is not None:
            bounds = [max(degree_bound, low)]
        else:
            bounds = range(low, tdeg + max(gdegs) + 3)
        tried = None
        for D in bounds:
            if degree_bound is None and tried is not None:
                size = len(self._independent([j for j, g in enumerate(self.gens) if any(not x.is_zero() for x in g)]))
                if size * comb(D + len(slots), len(slots)) > PRODUCT_BUDGET:
                    break
            tried = D
            piece = self._bounded_piece(D, slots)
            sol = piece.solve(tcol)
            if sol is not None:
                return Verdict(Kind.IN, self._certificate(target, piece, sol))
        return Verdict.unknown(f"degree-bounded linear algebra (cofactor degree <= {tried})")


_CACHE: OrderedDict = OrderedDict()
_CACHE_SIZE = 64


def engine_for(reg: VarRegistry, q: int, gens: Sequence[Sequence[Polynomial]]) -> SpanEngine:
    key = (reg, q, tuple(tuple(g) for g in gens))
    eng = _CACHE.get(key)
    if eng is None:
        eng = SpanEngine(reg, q, key[2])
        _CACHE[key] = eng
        if len(_CACHE) > _CACHE_SIZE:
            _CACHE.popitem(last=False)
    else:
        _CACHE.move_to_end(key)
    return eng


def ideal_membership(p: Polynomial, I: Ideal, degree_bound: int | None = None) -> Verdict:
    """Exact membership certificate for ``p`` in ``I`` (see module docstring)."""
    return engine_for(I.reg, 1, [(g,) for g in I.gens]).test((p,), degree_bound)


def module_membership(h: Sequence[Polynomial], M: GenModule, degree_bound: int | None = None) -> Verdict:
    return engine_for(M.reg, M.p, M.cols).test(tuple(h), degree_bound)


def graded_rank_gap(target: Sequence[Polynomial], gens: Sequence[Sequence[Polynomial]], d: int) -> bool:
    """Independent replay: is ``target`` outside the degree-``d`` graded piece?

    Uses an exact rational rank comparison over all products, with no pivot
    selection or caching.
    """
    target = tuple(target)
    if vector_degree(target) != d:
        return False
    reg = target[0].reg
    slots = set()
    for v in list(gens) + [target]:
        for x in v:
            slots |= x.occurring_slots()
    slots = tuple(sorted(slots))
    cols = []
    for g in gens:
        e = vector_degree(g)
        if e is None:
            return False
        if 0 <= e <= d:
            cols.extend(_column(g, m) for m in _monomials(reg.nvars, slots, d - e))
    tcol = {}
    for i, x in enumerate(target):
        for e, c in x.terms.items():
            tcol[(i, e)] = c
    keys = sorted({k for col in cols + [tcol] for k in col})
    if not cols:
        return bool(tcol)

    def rank(cs):
        return flint.fmpq_mat([[_q(c.get(k, 0)) for c in cs] for k in keys]).rank()

    return rank(cols + [tcol]) > rank(cols)


def local_unit_membership(h: Sequence[Polynomial], M: GenModule, k: int) -> Verdict | None:
    """Membership in the local ring at the origin via a unit ``k x k`` minor.

    If the minor ``d`` of rows ``R`` and columns ``C`` has ``d(0) != 0``,
    Cramer's rule gives ``d * h = sum_{j in C} (adj(N) h_R)_j m_j`` on the rows
    ``R``; the remaining rows hold exactly when ``rank (h, M) = k``.  Returns
    ``None`` when no such minor is found or the identity fails (then it
    fails for every unit minor, so only the first one is tried).
    """
    h = tuple(h)
    if k < 1 or M.is_zero():
        return None
    reg = M.reg
    for idx, d in iter_minors(M, k):
        if d.constant_term() == 0:
            continue
        N = submatrix(M, idx)
        cof = [Polynomial.zero(reg) for _ in M.cols]
        for j, c in enumerate(idx.cols):
            acc = Polynomial.zero(reg)
            for i, r in enumerate(idx.rows):
                if h[r].is_zero():
                    continue
                sub = [[N[a][b] for b in range(k) if b != j] for a in range(k) if a != i]
                term = det(sub, reg) * h[r]
                acc = acc - term if (i + j) % 2 else acc + term
            cof[c] = acc
        cert = Combination(h, tuple(M.cols), tuple(cof), unit=d)
        return Verdict(Kind.IN, cert, "unit minor at the origin") if cert.verify() else None
    return None
