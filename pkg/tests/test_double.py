import random
from itertools import product

import pytest
import sympy
from hypothesis import given, settings

from conftest import REG2, modules, polynomials
from oracles import sym_matrix, to_sympy
from lipsat import (
    GenModule,
    KIndex,
    VarRegistry,
    diagonal_ideal,
    double_module,
    double_vector,
    generic_rank,
    iter_minors,
    module_membership,
    parse,
    script_I_2k,
    tilde_matrix,
)
from lipsat.closure import curve_pullback, diagonal_family_curve
from lipsat.double import (
    FAMILIES,
    determinant_product,
    determinant_product_submatrix,
    diag_generators,
    k_indexes,
    pi2,
)
from lipsat.algebra import det
from lipsat.suite import SuiteConfig, random_module


def P(s, reg=REG2):
    return parse(s, reg)


class TestDoubleVector:
    def test_example(self, example):
        _, h = example
        assert double_vector(h) == (P("x"), P("3*y"), P("x'"), P("3*y'"))

    def test_zero(self):
        assert all(x.is_zero() for x in double_vector((P("0"), P("0"))))

    @given(polynomials(), polynomials(), polynomials(), polynomials())
    def test_additive(self, a, b, c, d):
        g, h = (a, b), (c, d)
        lhs = double_vector(tuple(x + y for x, y in zip(g, h)))
        assert lhs == tuple(x + y for x, y in zip(double_vector(g), double_vector(h)))

    @given(polynomials(), polynomials(), polynomials())
    def test_product_rule(self, a, b, c):
        # (a h)_D = a (h_D) - (a - a') (0, h')
        h = (b, c)
        lhs = double_vector(tuple(a * x for x in h))
        d = a - a.primed()
        rhs = tuple(a * x for x in double_vector(h))
        rhs = rhs[:2] + tuple(x - d * y for x, y in zip(rhs[2:], pi2(h)))
        assert lhs == rhs


class TestDoubleModule:
    def test_example_columns(self, example):
        M, _ = example
        D = double_module(M)
        assert D.module.p == 4 and D.module.r == 3 + 6
        assert D.tags[:3] == (("D", 0), ("D", 1), ("D", 2))
        assert D.tags[3:5] == (("B", 0, 0), ("B", 1, 0))

    def test_example_pullback_matches_display(self, example):
        M, h = example
        curve = diagonal_family_curve(REG2)
        R = curve.target
        pulled = curve_pullback(double_module(M).module, curve)
        cols = [c for c in pulled.cols if any(not x.is_zero() for x in c)]
        display = [
            ["t", "0", "alpha*t", "0", "0", "0"],
            ["alpha*t", "t", "0", "0", "0", "0"],
            ["t", "0", "beta*t", "(alpha-beta)*t^2", "0", "beta*(alpha-beta)*t^2"],
            ["beta*t", "t", "0", "beta*(alpha-beta)*t^2", "(alpha-beta)*t^2", "0"],
        ]
        expect = [tuple(parse(display[i][j], R) for i in range(4)) for j in range(6)]
        assert cols == expect
        assert curve_pullback(double_vector(h), curve) == tuple(parse(s, R) for s in ["t", "3*alpha*t", "t", "3*beta*t"])

    @pytest.mark.parametrize("family", FAMILIES)
    def test_zero_module(self, family):
        Z = GenModule.from_rows(REG2, [["0", "0"], ["0", "0"]])
        assert double_module(Z, family).module.is_zero()

    def test_unknown_family(self, example):
        with pytest.raises(ValueError):
            double_module(example[0], "C")

    @pytest.mark.parametrize("seed", range(6))
    def test_families_generate_same_module(self, seed):
        rng = random.Random(seed)
        M = random_module(SuiteConfig(n=2, p=rng.randint(1, 2), r=rng.randint(1, 2), homogeneous=True), rng)
        mods = {f: double_module(M, f).module for f in FAMILIES}
        for a, b in product(FAMILIES, repeat=2):
            for col in mods[a].cols:
                v = module_membership(col, mods[b])
                assert v.is_in and v.verify()

    @settings(max_examples=20)
    @given(modules(max_p=2, max_r=3))
    def test_rank_doubles(self, M):
        assert generic_rank(double_module(M).module) == 2 * generic_rank(M)

    def test_rank_doubling_oracle(self, example):
        D = double_module(example[0]).module
        assert sym_matrix(D).rank(simplify=True) == 4


class TestDiagonal:
    def test_n2(self):
        assert list(diagonal_ideal(REG2).gens) == [P("x - x'"), P("y - y'")]

    def test_n1(self):
        reg = VarRegistry(["z"])
        assert list(diagonal_ideal(reg).gens) == [parse("z - z'", reg)]

    def test_square(self):
        sq = diagonal_ideal(REG2) ** 2
        assert set(sq.gens) == {P("(x - x')^2"), P("(x - x')*(y - y')"), P("(y - y')^2")}


class TestTilde:
    def test_example(self, example):
        T = tilde_matrix(example[0])
        assert (T.p, T.r) == (2, 6)
        # direct construction: generator-major, coordinate-minor
        dx, dy = P("x - x'"), P("y - y'")
        expect = []
        for col in [("x'", "y'"), ("0", "x'"), ("y'", "0")]:
            for d in (dx, dy):
                expect.append(tuple(d * P(s) for s in col))
        assert list(T.cols) == expect

    def test_zero_module(self):
        Z = GenModule.from_rows(REG2, [["0"], ["0"]])
        assert tilde_matrix(Z).is_zero()

    @settings(max_examples=20)
    @given(modules())
    def test_entries_in_diagonal_ideal(self, M):
        diffs = diag_generators(REG2)
        for col, (j, i) in zip(tilde_matrix(M).cols, product(range(M.r), range(2))):
            for x in col:
                assert diffs[i].divides(x)

    def test_block_form(self, example):
        M, _ = example
        D = double_module(M).module
        T = tilde_matrix(M)
        for j in range(M.r, D.r):
            assert all(x.is_zero() for x in D.cols[j][:2])
            assert D.cols[j][2:] == T.cols[j - M.r]


class TestDeterminantProduct:
    @settings(max_examples=25)
    @given(modules(max_p=2, max_r=3))
    def test_identity(self, M):
        k = min(M.p, M.r)
        rng = random.Random(str(M))
        for IJ in k_indexes(M.p, M.r, k):
            KL = rng.choice(list(k_indexes(M.p, M.r, k)))
            ts = tuple(rng.randrange(2) for _ in range(k))
            _, _, sub = determinant_product_submatrix(M, ts, IJ, KL)
            assert det(sub, REG2) == determinant_product(M, ts, IJ, KL)

    def test_sympy_oracle(self, example):
        M, _ = example
        IJ, KL = KIndex((0, 1), (0, 2)), KIndex((0, 1), (1, 2))
        _, _, sub = determinant_product_submatrix(M, (0, 1), IJ, KL)
        S = sympy.Matrix([[to_sympy(x) for x in row] for row in sub])
        assert sympy.expand(S.det() - to_sympy(determinant_product(M, (0, 1), IJ, KL))) == 0


class TestScriptI:
    def test_generators_are_minors_of_double(self, example):
        M, _ = example
        D = double_module(M).module
        minors = {d for _, d in iter_minors(D, 4)}
        for g in script_I_2k(M, 2).gens:
            assert g in minors or -g in minors

    def test_k1_column(self):
        M = GenModule.from_rows(REG2, [["x"], ["y"]])
        got = set(script_I_2k(M, 1).gens)
        # oracle: det(M_IJ) * (z_i - z_i') * (entry of M')
        expect = set()
        for a in ("x", "y"):
            for d in ("x - x'", "y - y'"):
                for b in ("x'", "y'"):
                    expect.add(P(a) * P(d) * P(b))
        assert got == expect

    def test_zero_module(self):
        Z = GenModule.from_rows(REG2, [["0"], ["0"]])
        assert script_I_2k(Z, 1).is_zero()

    @pytest.mark.parametrize("seed", range(4))
    def test_random_inclusion(self, seed):
        rng = random.Random(seed)
        M = random_module(SuiteConfig(n=2, p=2, r=2), rng)
        k = generic_rank(M)
        if k == 0:
            return
        D = double_module(M).module
        minors = {d for _, d in iter_minors(D, 2 * k)}
        for g in script_I_2k(M, k).gens:
            assert g in minors or -g in minors
