import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REG2, module_and_vector, modules, polynomials
from oracles import groebner_contains, sym_matrix, sym_rank, to_sympy
from lipsat import (
    Functional,
    GenModule,
    Ideal,
    KIndex,
    Polynomial,
    apply_functional,
    augment,
    cofactor_functional,
    coordinate_functional,
    functional_image,
    generic_rank,
    iter_minors,
    minor,
    minor_ideal,
    parse,
)
from lipsat.algebra import _bareiss_rank, cofactor_indices, det, generic_rank_by_minors
from lipsat.double import double_module


def P(s):
    return parse(s, REG2)


def same_ideal(I, J):
    return all(groebner_contains(g, J.gens) for g in I.gens) and all(groebner_contains(g, I.gens) for g in J.gens)


class TestMinors:
    def test_example_I2(self, example):
        M, _ = example
        I = minor_ideal(M, 2)
        assert list(I.gens) == [P("x^2"), P("-y^2"), P("-x*y")]
        assert same_ideal(I, Ideal.parse(REG2, ["x^2", "x*y", "y^2"]))

    def test_example_I2_augmented(self, example):
        M, h = example
        J = minor_ideal(augment(h, M), 2)
        assert {P("-2*x*y"), P("x^2"), P("-3*y^2")} <= set(J.gens)
        assert same_ideal(J, Ideal.parse(REG2, ["x^2", "x*y", "y^2"]))

    def test_k1_is_entries(self):
        M = GenModule.from_rows(REG2, [["x", "y + 1"], ["0", "x*y"]])
        assert set(minor_ideal(M, 1).gens) == {P("x"), P("y + 1"), P("x*y")}

    def test_diagonal(self):
        M = GenModule.from_rows(REG2, [["x", "0"], ["0", "y"]])
        assert list(minor_ideal(M, 2).gens) == [P("x*y")]

    def test_zero_vector_adds_nothing(self, example):
        M, _ = example
        zero = (Polynomial.zero(REG2),) * 2
        for k in (1, 2):
            A = minor_ideal(augment(zero, M), k)
            assert {g for g in A.gens if not g.is_zero()} == {g for g in minor_ideal(M, k).gens if not g.is_zero()}

    def test_out_of_range(self, example):
        with pytest.raises(ValueError):
            list(iter_minors(example[0], 3))

    @given(modules(max_p=3, max_r=3))
    def test_determinants_match_sympy(self, M):
        S = sym_matrix(M)
        k = min(M.p, M.r)
        for idx, d in iter_minors(M, k):
            ref = S.extract(list(idx.rows), list(idx.cols)).det()
            assert sympy.expand(to_sympy(d) - ref) == 0

    def test_canonical_order(self, example):
        M, _ = example
        assert [i.cols for i, _ in iter_minors(M, 2)] == [(0, 1), (0, 2), (1, 2)]

    def test_kindex_validation(self):
        with pytest.raises(ValueError):
            KIndex((1, 0), (0, 1))
        with pytest.raises(ValueError):
            KIndex((0,), (0, 1))


class TestRank:
    def test_example(self, example):
        assert generic_rank(example[0]) == 2

    def test_zero(self):
        assert generic_rank(GenModule.from_rows(REG2, [["0", "0"], ["0", "0"]])) == 0

    def test_double_of_example(self, example):
        assert generic_rank(double_module(example[0]).module) == 4

    @given(modules(max_p=3, max_r=4))
    def test_matches_sympy(self, M):
        r = sym_rank(M)
        assert generic_rank(M) == r
        assert _bareiss_rank(M) == r
        assert generic_rank_by_minors(M) == r

    def test_rank_deficient(self):
        M = GenModule.from_rows(REG2, [["x", "x*y", "x^2"], ["y", "y^2", "x*y"]])
        assert generic_rank(M) == 1
        assert generic_rank(M, random.Random(5)) == 1


class TestFunctionals:
    def test_cofactor_example(self, example):
        M, h = example
        psi = cofactor_functional(M, KIndex((0, 1), (0, 1)))
        assert psi.comps == (P("y"), P("-x"))
        assert apply_functional(psi, h) == P("-2*x*y")
        # expand det [[x, x], [3y, y]] by its first column
        assert apply_functional(psi, h) == det([[P("x"), P("x")], [P("3*y"), P("y")]])

    def test_cofactor_identity(self, example):
        M, h = example
        aug = augment(h, M)
        for idx in cofactor_indices(M, 2):
            assert apply_functional(cofactor_functional(M, idx), h) == minor(aug, idx)

    @settings(max_examples=25)
    @given(module_and_vector(max_p=3, max_r=3))
    def test_cofactor_identity_random(self, Mh):
        M, h = Mh
        aug = augment(h, M)
        for k in range(1, min(M.p, M.r + 1) + 1):
            for idx in cofactor_indices(M, k):
                assert apply_functional(cofactor_functional(M, idx), h) == minor(aug, idx)

    def test_image_in_minor_ideal(self, example):
        M, _ = example
        I2 = minor_ideal(M, 2)
        for idx in cofactor_indices(M, 2):
            psi = cofactor_functional(M, idx)
            for g in M.cols:
                assert groebner_contains(apply_functional(psi, g), I2.gens)

    def test_functional_image_example(self, example):
        M, _ = example
        img = functional_image(Functional((P("y"), P("-x"))), M)
        assert list(img.gens) == [P("-x^2"), P("y^2")]
        assert same_ideal(img, Ideal.parse(REG2, ["x^2", "y^2"]))
        assert all(groebner_contains(g, minor_ideal(M, 2).gens) for g in img.gens)

    def test_coordinate(self, example):
        _, h = example
        assert apply_functional(coordinate_functional(REG2, 2, 0), h) == P("x")

    def test_zero_vector(self, example):
        psi = cofactor_functional(example[0], KIndex((0, 1), (0, 2)))
        assert apply_functional(psi, (P("0"), P("0"))).is_zero()

    @given(st.tuples(polynomials(), polynomials()), st.tuples(polynomials(), polynomials()),
           st.tuples(polynomials(), polynomials()), polynomials())
    def test_linearity(self, psi, g, h, a):
        f = Functional(psi)
        lhs = apply_functional(f, tuple(a * x + y for x, y in zip(g, h)))
        assert lhs == a * apply_functional(f, g) + apply_functional(f, h)

    def test_needs_first_column(self, example):
        with pytest.raises(ValueError):
            cofactor_functional(example[0], KIndex((0, 1), (1, 2)))


class TestIdeal:
    def test_power_and_product(self):
        I = Ideal.parse(REG2, ["x", "y"])
        assert set((I**2).gens) == {P("x^2"), P("x*y"), P("y^2")}

    def test_monomial_flag(self):
        assert Ideal.parse(REG2, ["x^2", "x*y"]).is_monomial()
        assert not Ideal.parse(REG2, ["x + y"]).is_monomial()

    def test_augment_shape(self, example):
        M, h = example
        A = augment(h, M)
        assert (A.p, A.r) == (2, 4) and A.cols[0] == h
        with pytest.raises(ValueError):
            augment((P("x"),), M)
