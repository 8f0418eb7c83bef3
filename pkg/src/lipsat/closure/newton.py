"""Integral closure of monomial ideals through Newton polyhedra.

A monomial ``z^a`` is integral over a monomial ideal iff ``a`` lies in
``conv(exponents) + R_{>=0}^n``.  Feasibility is decided by a small exact
simplex over the rationals, and a failing point comes with a separating
positive weight, i.e. a monomial curve along which the order drops.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd, lcm

from ..algebra import Ideal
from ..polycore import Polynomial
from .verdict import NewtonIn, NewtonOut


def simplex_max(c, A, b):
    """Maximise ``c.x`` subject to ``A x = b``, ``x >= 0`` in exact arithmetic.

    Two-phase simplex with Bland's rule.  Returns ``(status, x, value)`` with
    status ``"optimal"``, ``"infeasible"`` or ``"unbounded"``.
    """
    m, n = len(A), len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # tableau with artificials n..n+m-1
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = list(range(n, n + m))
    width = n + m

    def pivot(r, col):
        pr = T[r]
        f = pr[col]
        T[r] = pr = [v / f for v in pr]
        for i in range(m):
            if i != r and T[i][col]:
                g = T[i][col]
                T[i] = [a - g * p for a, p in zip(T[i], pr)]
        basis[r] = col

    def run(cost, allowed):
        while True:
            # reduced costs for maximisation
            entering = None
            for j in range(allowed):
                if j in basis:
                    continue
                rc = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(m))
                if rc > 0:
                    entering = j
                    break
            if entering is None:
                return "optimal"
            best = None
            for i in range(m):
                if T[i][entering] > 0:
                    ratio = T[i][-1] / T[i][entering]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], entering)

    phase1 = [Fraction(0)] * n + [Fraction(-1)] * m
    run(phase1, width)
    if sum(T[i][-1] for i in range(m) if basis[i] >= n) != 0:
        return "infeasible", None, None
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is not None:
                pivot(i, col)
    cost = [Fraction(v) for v in c] + [Fraction(0)] * m
    keep = [i for i in range(m) if basis[i] < n]
    T[:] = [T[i] for i in keep]
    basis[:] = [basis[i] for i in keep]
    m = len(T)
    status = run(cost, n)
    if status != "optimal":
        return status, None, None
    x = [Fraction(0)] * n
    for i in range(m):
        x[basis[i]] = T[i][-1]
    return "optimal", x, sum(ci * xi for ci, xi in zip(cost, x))


def newton_weights(a, gens):
    """Convex weights ``lam`` with ``sum lam_j g_j <= a`` or ``None``."""
    n, r = len(a), len(gens)
    # variables: lam_1..lam_r, slack_1..slack_n
    A = []
    for i in range(n):
        A.append([g[i] for g in gens] + [int(i == k) for k in range(n)])
    A.append([1] * r + [0] * n)
    b = list(a) + [1]
    status, x, _ = simplex_max([0] * (r + n), A, b)
    if status != "optimal":
        return None
    return tuple(x[:r])


def separating_weight(a, gens):
    """Positive integer weight ``w`` with ``w.a < min_j w.g_j``, or ``None``."""
    n, r = len(a), len(gens)
    # variables: w_1..w_n, s+, s-, slack_1..slack_r ; s <= w.g_j ; sum w = 1
    A = []
    for j, g in enumerate(gens):
        A.append([-x for x in g] + [1, -1] + [int(j == k) for k in range(r)])
    A.append([1] * n + [0, 0] + [0] * r)
    b = [0] * r + [1]
    c = [-x for x in a] + [1, -1] + [0] * r
    status, x, value = simplex_max(c, A, b)
    if status != "optimal" or value <= 0:
        return None
    w = x[:n]
    # make every weight positive without losing strict separation
    eps = value / (2 * (sum(a) + 1) + 2 * max(sum(g) for g in gens))
    w = [wi + eps for wi in w]
    den = lcm(*(wi.denominator for wi in w))
    wi = [int(v * den) for v in w]
    gg = gcd(*wi)
    wi = tuple(v // gg for v in wi)
    lhs = sum(u * v for u, v in zip(wi, a))
    if all(lhs < sum(u * v for u, v in zip(wi, g)) for g in gens):
        return wi
    return None


def _exponents(I: Ideal) -> list[tuple[int, ...]]:
    out = []
    for g in I.gens:
        if not g.is_monomial():
            raise ValueError(f"not a monomial generator: {g}")
        out.append(next(iter(g.terms)))
    return out


def newton_test(a, I: Ideal):
    """Certificate that ``z^a`` is (``NewtonIn``) or is not (``NewtonOut``) integral over ``I``."""
    gens = _exponents(I)
    a = tuple(a)
    if not gens:
        return None
    lam = newton_weights(a, gens)
    if lam is not None:
        return NewtonIn(a, tuple(gens), lam)
    live = [i for i in range(len(a)) if a[i] or any(g[i] for g in gens)]
    w = separating_weight([a[i] for i in live], [[g[i] for i in live] for g in gens])
    if w is None:
        raise ArithmeticError("Newton polyhedron test found neither weights nor a separation")
    full = [1] * len(a)
    for i, x in zip(live, w):
        full[i] = x
    return NewtonOut(a, tuple(gens), tuple(full))


def monomial_closure(I: Ideal) -> Ideal:
    """Minimal monomial generators of the integral closure of a monomial ideal."""
    gens = _exponents(I)
    reg = I.reg
    if not gens:
        return Ideal(reg)
    width = len(gens[0])
    box = [max(g[i] for g in gens) for i in range(width)]
    points = sorted(product(*(range(m + 1) for m in box)), key=lambda e: (sum(e), e))
    found: list[tuple[int, ...]] = []
    for e in points:
        if any(all(x >= y for x, y in zip(e, f)) for f in found):
            continue
        if newton_weights(e, gens) is not None:
            found.append(e)
    found.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return Ideal(reg, [Polynomial.monomial(reg, e) for e in found])
