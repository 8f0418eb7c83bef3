import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REG2, polynomials
from oracles import groebner_contains
from lipsat import (
    GenModule,
    Ideal,
    Kind,
    KIndex,
    Polynomial,
    Verdict,
    apply_functional,
    cofactor_functional,
    diagonal_ideal,
    functional_image,
    generic_rank,
    ideal_sat_test,
    inclusion_lemma_check,
    monomial_closure,
    parse,
    prop417_check,
    sat1_test,
    sat2_test,
    sat3_test,
    sat_report,
)
from lipsat.closure.verdict import CurveObstruction, Via
from lipsat.saturation import (
    LEMMAS,
    bracket,
    diagonal_power_cofactors,
    find_unit_point,
    lemma_ideals,
    psi_family,
    translate,
    unit_minor,
    w_power,
)
from lipsat.suite import SuiteConfig, random_combination, random_module


def P(s):
    return parse(s, REG2)


def I(*gens):
    return Ideal.parse(REG2, gens)


ONE_ZERO = (P("1"), P("0"))


class TestIdealSaturation:
    def test_member(self):
        v = ideal_sat_test(P("x^2 + x*y"), I("x^2", "x*y", "y^2"))
        assert v.is_in and v.verify()

    def test_generator(self):
        assert ideal_sat_test(P("x*y"), I("x^2", "x*y", "y^2")).is_in

    def test_outside_integral_closure(self):
        v = ideal_sat_test(P("x"), I("x^2", "x*y", "y^2"))
        assert v.is_out and v.verify()

    def test_zero(self):
        assert ideal_sat_test(P("0"), I("x")).is_in

    def test_integral_but_not_lipschitz(self):
        # xy is integral over <x^2, y^2> yet fails the doubled test
        assert P("x*y") in monomial_closure(I("x^2", "y^2")).gens
        v = ideal_sat_test(P("x*y"), I("x^2", "y^2"))
        assert v.is_out and v.verify()


class TestSat1:
    def test_member(self, example):
        M, _ = example
        v = sat1_test(M.cols[0], M)
        assert v.is_in and v.verify()

    def test_zero(self, example):
        assert sat1_test((P("0"), P("0")), example[0]).is_in

    def test_example_out(self, example):
        M, h = example
        v = sat1_test(h, M)
        assert v.is_out and v.verify()
        cert = v.certificate
        assert isinstance(cert, CurveObstruction)
        assert cert.curve.to_json()["subs"] == {"x": "t", "x'": "t", "y": "alpha*t", "y'": "beta*t"}
        R = cert.curve.target
        assert cert.result.residual[3] == parse("2*beta*t - 2*alpha*t", R)

    def test_families_agree(self, example):
        M, h = example
        for fam in ("B", "B'", "B''"):
            assert sat1_test(h, M, generator_family=fam).is_out


class TestSat2:
    def test_member(self, example):
        M, _ = example
        v = sat2_test(M.cols[1], M)
        assert v.is_in and v.verify()

    def test_from_sat1(self, example):
        M, _ = example
        s1 = sat1_test(M.cols[1], M)
        v = sat2_test(M.cols[1], M, sat1=s1)
        assert isinstance(v.certificate, Via) and v.is_in

    def test_unit_vector_out(self, example):
        v = sat2_test(ONE_ZERO, example[0])
        assert v.is_out and v.verify()

    def test_example_out_by_cofactor(self, example):
        M, h = example
        v = sat2_test(h, M)
        assert v.is_out and v.verify()
        assert "cofactor" in v.note
        # psi = (y, -x): psi.h = -2xy, psi.M = <x^2, y^2>
        psi = cofactor_functional(M, KIndex((0, 1), (0, 1)))
        assert apply_functional(psi, h) == P("-2*x*y")
        img = functional_image(psi, M)
        assert set(img.gens) == {P("-x^2"), P("y^2")}
        assert ideal_sat_test(P("-2*x*y"), img).is_out

    def test_psi_family_order(self, example):
        names = [n for n, _ in psi_family(example[0], budget=2)]
        assert names[0].startswith("cofactor") and names[-2:] == ["random0", "random1"]


class TestSat3:
    def test_example_in(self, example):
        M, h = example
        v = sat3_test(h, M)
        assert v.is_in and v.verify()

    def test_member(self, example):
        M, _ = example
        assert sat3_test(M.cols[2], M).is_in

    def test_unit_vector_out(self, example):
        v = sat3_test(ONE_ZERO, example[0])
        assert v.is_out and v.verify()

    def test_rank_zero_rejected(self):
        Z = GenModule.from_rows(REG2, [["0"], ["0"]])
        with pytest.raises(ValueError):
            sat3_test(ONE_ZERO, Z)

    def test_rank_jump(self):
        M = GenModule.from_rows(REG2, [["x"], ["y"]])
        v = sat3_test((P("y"), P("x")), M)
        assert v.is_out


class TestChain:
    def test_example_report(self, example):
        M, h = example
        rep = sat_report(h, M)
        assert rep.consistent
        assert [rep.verdicts[s].kind for s in ("S1", "S2", "S3")] == [Kind.OUT, Kind.OUT, Kind.IN]

    def test_bracket_propagates(self):
        inn = Verdict(Kind.IN, None)
        out = Verdict(Kind.OUT, None)
        unk = Verdict.unknown("x")
        rep = bracket({"S1": inn, "S2": unk, "S3": unk})
        assert rep.verdicts["S2"].is_in and rep.verdicts["S3"].is_in
        rep = bracket({"S1": unk, "S2": unk, "S3": out})
        assert rep.verdicts["S1"].is_out and rep.verdicts["S2"].is_out
        assert not bracket({"S1": inn, "S2": unk, "S3": out}).consistent

    @settings(max_examples=12)
    @given(st.integers(0, 10_000))
    def test_members_in_everywhere(self, seed):
        rng = random.Random(seed)
        M = random_module(SuiteConfig(n=2, p=rng.randint(1, 2), r=rng.randint(1, 3)), rng)
        if generic_rank(M) == 0:
            return
        h = random_combination(rng, M, 1)
        rep = sat_report(h, M, psi_budget=1)
        assert rep.consistent
        assert not any(v.is_out for v in rep.verdicts.values())


class TestDiagonalPowers:
    @settings(max_examples=30)
    @given(polynomials(REG2, 2), polynomials(REG2, 2))
    def test_decomposition(self, a, b):
        d = diagonal_ideal(REG2).gens
        f = a * d[0] * d[1] + b * d[1] * d[1]
        parts = diagonal_power_cofactors(f, 2)
        assert parts is not None
        total = sum((c * w_power(REG2, beta) for beta, c in parts), Polynomial.zero(REG2))
        assert total == f

    def test_not_in_power(self):
        assert diagonal_power_cofactors(P("x - x'"), 2) is None

    def test_oracle_membership(self):
        f = P("(x - x')^2*y + (x - x')*(y - y')*x'")
        assert diagonal_power_cofactors(f, 2) is not None
        assert groebner_contains(f, list((diagonal_ideal(REG2) ** 2).gens))


class TestProp417:
    def test_free(self, example):
        M, h = example
        F = M.select([0, 1])
        rep = prop417_check(h, F, diagonal_ideal(REG2))
        assert rep.hyp1.is_in and rep.hyp2.is_in and rep.conclusion_applicable
        assert rep.hyp1.verify() and rep.hyp2.verify()

    def test_example_fails_a_hypothesis(self, example):
        M, h = example
        rep = prop417_check(h, M, diagonal_ideal(REG2))
        assert not rep.conclusion_applicable
        assert rep.hyp1.is_in and rep.hyp2.is_out

    def test_zero_module(self):
        Z = GenModule.from_rows(REG2, [["0"], ["0"]])
        rep = prop417_check(ONE_ZERO, Z)
        assert rep.hyp1.is_in and rep.hyp2.is_in

    @pytest.mark.parametrize("seed", range(3))
    def test_local(self, seed):
        rng = random.Random(seed)
        M = random_module(SuiteConfig(n=2, p=2, r=2), rng)
        found = find_unit_point(M, rng)
        assert found is not None
        _, T = found
        assert unit_minor(T, generic_rank(T)) is not None
        h = random_combination(rng, T, 1)
        rep = prop417_check(h, T, local=True)
        assert rep.hyp1.is_in and rep.hyp2.is_in
        assert rep.hyp1.verify() and rep.hyp2.verify()

    def test_translate(self):
        p = P("x*y + x'")
        q = translate(p, [1, 2])
        assert q == P("(x + 1)*(y + 2) + x' + 1")


class TestLemmas:
    def test_L420a_example(self, example):
        v = inclusion_lemma_check(example[0], "L420a")
        assert v.is_in and v.verify()

    def test_Ltilde_example(self, example):
        v = inclusion_lemma_check(example[0], "Ltilde")
        assert v.is_in and v.verify()

    def test_Lfree(self):
        M = GenModule.from_rows(REG2, [["x", "0"], ["y", "x"]])
        v = inclusion_lemma_check(M, "Lfree")
        assert v.is_in and v.verify()

    def test_preconditions(self, example):
        with pytest.raises(ValueError):
            inclusion_lemma_check(example[0], "Lfree")
        with pytest.raises(ValueError):
            inclusion_lemma_check(example[0], "L420b")
        with pytest.raises(ValueError):
            inclusion_lemma_check(example[0], "nope")

    def test_L420b_principal(self):
        M = GenModule.from_rows(REG2, [["x", "0"], ["0", "y"]])
        v = inclusion_lemma_check(M, "L420b")
        assert v.is_in and v.verify()

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("which", ["L420a", "Ltilde"])
    def test_random(self, seed, which):
        rng = random.Random(seed)
        M = random_module(SuiteConfig(n=2, p=2, r=rng.randint(1, 3)), rng)
        v = inclusion_lemma_check(M, which)
        assert v.is_in and v.verify()

    def test_lemma_ideals_shape(self, example):
        left, right, k = lemma_ideals(example[0], "L420a")
        assert k == 2 and not left.is_zero() and not right.is_zero()
        assert set(LEMMAS) == {"L420a", "L420b", "Lfree", "Ltilde"}
