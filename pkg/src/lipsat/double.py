"""The double of vectors, modules and ideals on ``X x X``.

The primed variables of the registry are the coordinates of the second
factor, so ``h o pi_1 = h`` and ``h o pi_2 = h'`` (see
:meth:`Polynomial.primed`).  Everything lives in one polynomial ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .algebra import GenModule, Ideal, KIndex, Vector, det, iter_minors, minor_ideal
from .polycore import Polynomial, VarRegistry

FAMILIES = ("B", "B'", "B''")


def diag_generators(reg: VarRegistry) -> list[Polynomial]:
    """``z_i - z_i'`` for each coordinate."""
    return [Polynomial.var(reg, z) - Polynomial.var(reg, zp) for z, zp in zip(reg.space_vars, reg.primed_vars)]


def diagonal_ideal(reg: VarRegistry) -> Ideal:
    return Ideal(reg, diag_generators(reg))


def pi2(h: Vector) -> tuple[Polynomial, ...]:
    return tuple(x.primed() for x in h)


def double_vector(h: Vector) -> tuple[Polynomial, ...]:
    """``h_D = (h o pi_1, h o pi_2)``."""
    h = tuple(h)
    return h + pi2(h)


@dataclass(frozen=True)
class DoubledModule:
    """``M_D`` as a generator matrix of rank ``2p`` with per-column provenance.

    ``tags[j]`` is ``("D", j0)`` for ``(h_j0)_D`` and ``(family, i, j0)`` for
    the second-block column built from coordinate ``i`` and generator ``j0``.
    """

    base: GenModule
    family: str
    module: GenModule
    tags: tuple

    @property
    def reg(self) -> VarRegistry:
        return self.module.reg


def double_module(M: GenModule, family: str = "B") -> DoubledModule:
    """Generators of ``M_D`` from generators ``h_1..h_r`` of ``M``.

    The second block is ordered generator-major: for each ``j``, all
    coordinates ``i``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown generator family {family!r}")
    reg, p = M.reg, M.p
    zero = (Polynomial.zero(reg),) * p
    diffs = diag_generators(reg)
    cols, tags = [], []
    for j, h in enumerate(M.cols):
        cols.append(double_vector(h))
        tags.append(("D", j))
    for j, h in enumerate(M.cols):
        hp = pi2(h)
        for i, d in enumerate(diffs):
            if family == "B":
                col = zero + tuple(d * x for x in hp)
            elif family == "B'":
                col = tuple(d * x for x in h) + zero
            else:
                zi = Polynomial.var(reg, reg.space_vars[i])
                col = double_vector([zi * x for x in h])
            cols.append(col)
            tags.append((family, i, j))
    return DoubledModule(M, family, GenModule(reg, 2 * p, cols), tuple(tags))


def ideal_as_module(I: Ideal) -> GenModule:
    """An ideal viewed as a rank-1 module (one generator per column)."""
    return GenModule(I.reg, 1, [(g,) for g in I.gens])


def double_ideal(I: Ideal) -> DoubledModule:
    """``I_D``: the double of ``I`` as a submodule of the rank-2 free module."""
    return double_module(ideal_as_module(I), "B")


def tilde_matrix(M: GenModule) -> GenModule:
    """Lower-right block ``[M~]`` of ``[M_D] = [[M, 0], [M', M~]]`` (family B)."""
    reg = M.reg
    diffs = diag_generators(reg)
    cols = []
    for h in M.cols:
        hp = pi2(h)
        for d in diffs:
            cols.append(tuple(d * x for x in hp))
    return GenModule(reg, M.p, cols)


def primed_module(M: GenModule) -> GenModule:
    return GenModule(M.reg, M.p, [pi2(c) for c in M.cols])


def script_I_2k(M: GenModule, k: int) -> Ideal:
    """Subideal of ``I_2k(M_D)`` generated by ``det(M_IJ) det(M~_KL)``."""
    if k < 1 or k > min(M.p, M.r):
        raise ValueError(f"k = {k} out of range")
    T = tilde_matrix(M)
    left = [d for _, d in iter_minors(M, k) if not d.is_zero()]
    right = [d for _, d in iter_minors(T, k) if not d.is_zero()]
    return Ideal(M.reg, (a * b for a in left for b in right))


def diagonal_power_times_I2(M: GenModule, k: int, power: int) -> Ideal:
    """``I_Delta^power * I_2((I_k(M))_D)``."""
    reg = M.reg
    Ik = minor_ideal(M, k)
    I2 = doubled_ideal_minors(Ik)
    return diagonal_ideal(reg) ** power * I2


def doubled_ideal_minors(I: Ideal) -> Ideal:
    """``I_2(I_D)`` from the family-B presentation of ``I_D``."""
    if I.is_zero():
        return Ideal(I.reg)
    D = double_ideal(I).module
    if D.r < 2:
        return Ideal(I.reg)
    return minor_ideal(D, 2)


def determinant_product_submatrix(
    M: GenModule, ts: tuple[int, ...], IJ: KIndex, KL: KIndex
) -> tuple[tuple[int, ...], tuple[int, ...], list[list[Polynomial]]]:
    """Rows, columns and entries of the submatrix of ``[M_D]`` (family B) whose
    determinant is ``prod_s (z_{t_s} - z_{t_s}') * det(M_IJ) * det(M'_KL)``.

    Rows: ``I`` in the top block, then ``K`` in the bottom block.  Columns:
    the doubled generators ``J``, then for each ``s`` the second-block column
    built from coordinate ``ts[s]`` and generator ``L[s]``.
    """
    k = IJ.k
    if KL.k != k or len(ts) != k:
        raise ValueError("index sizes disagree")
    n, p = M.reg.n, M.p
    rows = tuple(IJ.rows) + tuple(p + r for r in KL.rows)
    cols = tuple(IJ.cols) + tuple(M.r + l * n + t for t, l in zip(ts, KL.cols))
    D = double_module(M, "B").module
    return rows, cols, [[D.cols[c][r] for c in cols] for r in rows]


def determinant_product(M: GenModule, ts: tuple[int, ...], IJ: KIndex, KL: KIndex) -> Polynomial:
    reg = M.reg
    diffs = diag_generators(reg)
    out = Polynomial.const(reg, 1)
    for t in ts:
        out = out * diffs[t]
    a = det([[M.cols[j][i] for j in IJ.cols] for i in IJ.rows], reg)
    b = det([[M.cols[j][i].primed() for j in KL.cols] for i in KL.rows], reg)
    return out * a * b


def k_indexes(p: int, r: int, k: int):
    for rows in combinations(range(p), k):
        for cols in combinations(range(r), k):
            yield KIndex(rows, cols)


def diagonal_tuples(n: int, k: int):
    """All ``(t_1..t_k)`` coordinate choices (with repetition, ordered)."""
    return product(range(n), repeat=k)
