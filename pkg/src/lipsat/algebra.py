"""Ideals, generator matrices, minor ideals, generic rank and functionals.

Indices are 0-based throughout.  In an augmented matrix ``[h | M]`` column
0 is ``h`` and column ``j >= 1`` is column ``j - 1`` of ``M``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .polycore import Polynomial, VarRegistry, parse

Vector = Sequence[Polynomial]


class Ideal:
    """Finitely generated ideal; zero and repeated generators are dropped."""

    __slots__ = ("reg", "gens")

    def __init__(self, reg: VarRegistry, gens: Iterable[Polynomial] = ()):
        seen = set()
        kept = []
        for g in gens:
            if g.reg != reg:
                g = g.to_registry(reg)
            if g.is_zero() or g in seen:
                continue
            seen.add(g)
            kept.append(g)
        self.reg = reg
        self.gens = tuple(kept)

    @classmethod
    def parse(cls, reg: VarRegistry, texts: Iterable[str]) -> "Ideal":
        return cls(reg, [parse(s, reg) for s in texts])

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def is_zero(self) -> bool:
        return not self.gens

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.reg, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.reg, [a * b for a in self.gens for b in other.gens])

    def __pow__(self, k: int) -> "Ideal":
        if k < 0:
            raise ValueError("negative ideal power")
        out = Ideal(self.reg, [Polynomial.const(self.reg, 1)])
        for _ in range(k):
            out = out * self
        return out

    def monic(self) -> "Ideal":
        """Same ideal with each generator scaled to leading coefficient 1."""
        return Ideal(self.reg, [g.scale(Fraction(1) / g.leading_term()[1]) for g in self.gens])

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.gens)

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.gens)

    def same_generators(self, other: "Ideal") -> bool:
        """Structural equality of generator sets up to order and scalars (weaker than ideal equality)."""
        return set(self.monic().gens) == set(other.monic().gens)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.reg == other.reg and set(self.gens) == set(other.gens)

    def __hash__(self):
        return hash(frozenset(self.gens))

    def __repr__(self):
        return "<" + ", ".join(str(g) for g in self.gens) + ">"


class GenModule:
    """Submodule of a free module of rank ``p`` given by generator columns."""

    __slots__ = ("reg", "p", "cols")

    def __init__(self, reg: VarRegistry, p: int, cols: Iterable[Vector]):
        cols = [tuple(c) for c in cols]
        for c in cols:
            if len(c) != p:
                raise ValueError(f"column of length {len(c)} in a module of rank {p}")
            for x in c:
                if x.reg != reg:
                    raise ValueError("column entry over a different registry")
        self.reg = reg
        self.p = p
        self.cols = tuple(cols)

    @classmethod
    def from_rows(cls, reg: VarRegistry, rows: Sequence[Sequence]) -> "GenModule":
        """Build from a row-major matrix of polynomials or strings."""
        rows = [[parse(x, reg) if isinstance(x, str) else x for x in row] for row in rows]
        p = len(rows)
        if p == 0:
            raise ValueError("matrix needs at least one row")
        r = len(rows[0])
        if any(len(row) != r for row in rows):
            raise ValueError("matrix is not rectangular")
        return cls(reg, p, [[rows[i][j] for i in range(p)] for j in range(r)])

    @property
    def r(self) -> int:
        return len(self.cols)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.cols[j][i]

    def rows(self) -> list[list[Polynomial]]:
        return [[c[i] for c in self.cols] for i in range(self.p)]

    def zero_columns(self) -> list[int]:
        """Indices of zero generators (kept, but worth a warning)."""
        return [j for j, c in enumerate(self.cols) if all(x.is_zero() for x in c)]

    def is_zero(self) -> bool:
        return all(x.is_zero() for c in self.cols for x in c)

    def column_degree(self, j: int) -> int | None:
        """Common degree of the nonzero entries of column ``j`` (None if mixed or zero)."""
        degs = {x.degree() for x in self.cols[j] if not x.is_zero()}
        degs.update(-1 for x in self.cols[j] if not x.is_zero() and not x.is_homogeneous())
        if len(degs) != 1 or -1 in degs:
            return None
        return degs.pop()

    def map_entries(self, f) -> "GenModule":
        cols = [[f(x) for x in c] for c in self.cols]
        reg = cols[0][0].reg if cols and cols[0] else self.reg
        return GenModule(reg, self.p, cols)

    def select(self, cols: Iterable[int]) -> "GenModule":
        return GenModule(self.reg, self.p, [self.cols[j] for j in cols])

    def __eq__(self, other):
        if not isinstance(other, GenModule):
            return NotImplemented
        return self.reg == other.reg and self.p == other.p and self.cols == other.cols

    def __hash__(self):
        return hash((self.p, self.cols))

    def __repr__(self):
        return "[" + "; ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows()) + "]"


@dataclass(frozen=True)
class KIndex:
    """Row and column selection of a ``k x k`` submatrix (strictly increasing)."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != len(self.cols) or not self.rows:
            raise ValueError("row and column index tuples must be non-empty and of equal length")
        for t in (self.rows, self.cols):
            if any(a >= b for a, b in zip(t, t[1:])) or min(t) < 0:
                raise ValueError(f"index tuple {t} is not strictly increasing")

    @property
    def k(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Functional:
    """Row functional ``psi``; ``psi . h = sum_i psi_i h_i``."""

    comps: tuple[Polynomial, ...]

    @property
    def p(self) -> int:
        return len(self.comps)


# --------------------------------------------------------------------------------------
# determinants and minors


def det(rows: Sequence[Sequence[Polynomial]], reg: VarRegistry | None = None) -> Polynomial:
    """Determinant of a square polynomial matrix by memoised Laplace expansion."""
    k = len(rows)
    if k == 0:
        if reg is None:
            raise ValueError("registry needed for the empty determinant")
        return Polynomial.const(reg, 1)
    if any(len(r) != k for r in rows):
        raise ValueError("matrix is not square")
    reg = reg or rows[0][0].reg
    memo: dict = {}

    def rec(depth: int, cols: tuple[int, ...]) -> Polynomial:
        # expand along row ``depth`` over the remaining columns
        if depth == k:
            return Polynomial.const(reg, 1)
        key = cols
        if key in memo:
            return memo[key]
        acc = Polynomial.zero(reg)
        for pos, c in enumerate(cols):
            a = rows[depth][c]
            if a.is_zero():
                continue
            sub = rec(depth + 1, cols[:pos] + cols[pos + 1:])
            if sub.is_zero():
                continue
            term = a * sub
            acc = acc - term if pos % 2 else acc + term
        memo[key] = acc
        return acc

    return rec(0, tuple(range(k)))


def submatrix(M: GenModule, idx: KIndex) -> list[list[Polynomial]]:
    return [[M.cols[j][i] for j in idx.cols] for i in idx.rows]


def minor(M: GenModule, idx: KIndex) -> Polynomial:
    return det(submatrix(M, idx), M.reg)


def iter_minors(M: GenModule, k: int, col_filter=None):
    """Yield ``(KIndex, determinant)`` for all ``k x k`` minors in canonical order.

    Order: row tuples lexicographically, then column tuples.  Sub-minors are
    shared across column tuples of the same row selection.
    """
    if k < 1 or k > min(M.p, M.r):
        raise ValueError(f"minor size {k} out of range for a {M.p}x{M.r} matrix")
    reg = M.reg
    one = Polynomial.const(reg, 1)
    for rows in combinations(range(M.p), k):
        memo: dict = {}

        def rec(depth: int, cols: tuple[int, ...]) -> Polynomial:
            if depth == k:
                return one
            key = (depth, cols)
            hit = memo.get(key)
            if hit is not None:
                return hit
            i = rows[depth]
            acc = Polynomial.zero(reg)
            for pos, c in enumerate(cols):
                a = M.cols[c][i]
                if a.is_zero():
                    continue
                sub = rec(depth + 1, cols[:pos] + cols[pos + 1:])
                if sub.is_zero():
                    continue
                term = a * sub
                acc = acc - term if pos % 2 else acc + term
            memo[key] = acc
            return acc

        for cols in combinations(range(M.r), k):
            if col_filter is not None and not col_filter(cols):
                continue
            yield KIndex(rows, cols), rec(0, cols)


def minor_ideal(M: GenModule, k: int) -> Ideal:
    """Ideal generated by all ``k x k`` minors of the generator matrix."""
    if k == 0:
        return Ideal(M.reg, [Polynomial.const(M.reg, 1)])
    return Ideal(M.reg, (d for _, d in iter_minors(M, k)))


def augment(h: Vector, M: GenModule) -> GenModule:
    """The module ``(h, M)`` with ``h`` as column 0."""
    h = tuple(h)
    if len(h) != M.p:
        raise ValueError(f"vector of length {len(h)} does not fit rank {M.p}")
    return GenModule(M.reg, M.p, (h,) + M.cols)


# --------------------------------------------------------------------------------------
# generic rank


def _rank_at_point(M: GenModule, point: dict[int, Fraction]) -> int:
    rows = []
    for i in range(M.p):
        row = []
        for c in M.cols:
            x = c[i]
            v = Fraction(0)
            for e, coef in x.terms.items():
                term = Fraction(coef)
                for s, a in enumerate(e):
                    if a:
                        term *= point[s] ** a
                v += term
            row.append(v)
        rows.append(row)
    return _rank_fractions(rows)


def _rank_fractions(rows: list[list[Fraction]]) -> int:
    rows = [r[:] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def _bareiss_rank(M: GenModule) -> int:
    """Exact rank over the fraction field by fraction-free elimination."""
    a = [list(r) for r in M.rows()]
    nrows, ncols = M.p, M.r
    prev = Polynomial.const(M.reg, 1)
    rank = 0
    col = 0
    while rank < nrows and col < ncols:
        piv = None
        for i in range(rank, nrows):
            if not a[i][col].is_zero():
                if piv is None or len(a[i][col].terms) < len(a[piv][col].terms):
                    piv = i
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, nrows):
            ai = a[i]
            f = ai[col]
            for j in range(col + 1, ncols):
                num = p * ai[j] - f * a[rank][j]
                ai[j] = num.exact_div(prev) if not num.is_zero() else num
            ai[col] = Polynomial.zero(M.reg)
        prev = p
        rank += 1
        col += 1
    return rank


def generic_rank(M: GenModule, rng: random.Random | None = None) -> int:
    """Rank of the generator matrix over the fraction field.

    A random rational evaluation gives a certified lower bound; when it
    does not already reach ``min(p, r)`` the exact fraction-free
    elimination settles it.
    """
    if M.r == 0 or M.is_zero():
        return 0
    top = min(M.p, M.r)
    rng = rng or random.Random(0x5EED)
    point = {s: Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for s in range(M.reg.nvars)}
    if _rank_at_point(M, point) == top:
        return top
    return _bareiss_rank(M)


def generic_rank_by_minors(M: GenModule) -> int:
    """Largest ``k`` with a nonzero ``k x k`` minor (exhaustive; test oracle)."""
    for k in range(min(M.p, M.r), 0, -1):
        if any(not d.is_zero() for _, d in iter_minors(M, k)):
            return k
    return 0


# --------------------------------------------------------------------------------------
# functionals


def apply_functional(psi: Functional, h: Vector) -> Polynomial:
    if len(h) != psi.p:
        raise ValueError(f"functional of length {psi.p} applied to a vector of length {len(h)}")
    acc = None
    for a, b in zip(psi.comps, h):
        if a.is_zero() or b.is_zero():
            continue
        acc = a * b if acc is None else acc + a * b
    return acc if acc is not None else Polynomial.zero(psi.comps[0].reg)


def functional_image(psi: Functional, M: GenModule) -> Ideal:
    """The ideal ``psi . M`` generated by the pairings with the columns of ``M``."""
    if psi.p != M.p:
        raise ValueError("functional and module have different ranks")
    return Ideal(M.reg, (apply_functional(psi, c) for c in M.cols))


def cofactor_functional(M: GenModule, idx: KIndex) -> Functional:
    """Functional ``psi`` with ``psi . h = det([h, M]_{IJ})`` for every ``h``.

    ``idx`` indexes the augmented matrix ``[h | M]`` and must select column 0.
    ``psi`` carries the first-column cofactors of the selected submatrix on
    the rows of ``idx`` and zeros elsewhere.
    """
    if idx.cols[0] != 0:
        raise ValueError("the cofactor functional needs the first column of [h, M] selected")
    if max(idx.rows) >= M.p or max(idx.cols) > M.r:
        raise ValueError("index out of range for the augmented matrix")
    reg = M.reg
    k = idx.k
    other = [M.cols[j - 1] for j in idx.cols[1:]]
    comps = [Polynomial.zero(reg)] * M.p
    for l, i in enumerate(idx.rows):
        rest_rows = [r for m, r in enumerate(idx.rows) if m != l]
        sub = [[col[r] for col in other] for r in rest_rows]
        cof = det(sub, reg) if k > 1 else Polynomial.const(reg, 1)
        comps[i] = -cof if l % 2 else cof
    return Functional(tuple(comps))


def coordinate_functional(reg: VarRegistry, p: int, i: int) -> Functional:
    return Functional(tuple(Polynomial.const(reg, 1 if j == i else 0) for j in range(p)))


def cofactor_indices(M: GenModule, k: int) -> list[KIndex]:
    """All k-indexes of ``[h | M]`` that pick column 0."""
    out = []
    if k < 1 or k > M.p or k - 1 > M.r:
        return out
    for rows in combinations(range(M.p), k):
        for rest in combinations(range(1, M.r + 1), k - 1):
            out.append(KIndex(rows, (0,) + rest))
    return out
