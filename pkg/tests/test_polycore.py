from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import REG2, polynomials
from oracles import sym_equal, to_sympy
from lipsat.polycore import ParseError, Polynomial, RationalFunction, VarRegistry, jet_truncate, parse, substitute

R = VarRegistry(["x", "y"], params=["alpha", "beta"])
t = Polynomial.var(R, "t")
alpha = Polynomial.var(R, "alpha")


def P(s, reg=R):
    return parse(s, reg)


class TestRegistry:
    def test_default_primes(self):
        reg = VarRegistry(["x", "y"])
        assert reg.primed_vars == ("x'", "y'")
        assert reg.names == ("x", "y", "x'", "y'", "t")

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            VarRegistry(["x", "x"])
        with pytest.raises(ValueError):
            VarRegistry(["x"], params=["t"])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            VarRegistry([])


class TestParse:
    def test_difference_of_squares(self):
        p = P("x^2 - y^2", REG2)
        assert p.terms == {(2, 0, 0, 0, 0): 1, (0, 2, 0, 0, 0): -1}

    def test_zero(self):
        assert P("0").terms == {}
        assert P("x*x - (x^2)").is_zero()

    def test_rationals_and_parentheses(self):
        p = P("(1/2*x + y)^2")
        assert p == P("1/4*x^2 + x*y + y^2")

    def test_primed_and_params(self):
        p = P("alpha*(x - x')")
        assert p.variables() == {"alpha", "x", "x'"}

    @pytest.mark.parametrize("bad", ["x + q", "x +", "2**x", "(x", "x^y"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            P(bad)

    @given(polynomials(REG2, 3))
    def test_print_round_trip(self, p):
        assert parse(str(p), REG2) == p


class TestArithmetic:
    @given(polynomials(), polynomials(), polynomials())
    def test_distributive(self, p, q, r):
        assert (p + q) * r == p * r + q * r

    @given(polynomials(), polynomials())
    def test_product_matches_sympy(self, p, q):
        assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0

    @given(polynomials(), polynomials())
    def test_commutative_and_subtraction(self, p, q):
        assert p * q == q * p
        assert (p - q) + q == p

    def test_no_zero_coefficients(self):
        p = P("x + y") - P("y")
        assert p.terms == P("x").terms

    def test_homogeneity(self):
        assert P("x^2 + x*y").is_homogeneous()
        assert not P("x^2 + y").is_homogeneous()
        assert P("x^2 + x*y").degree() == 2

    def test_exact_division(self):
        q = P("x^2 - y^2").exact_div(P("x - y"))
        assert q == P("x + y")

    def test_primed(self):
        assert P("x*y + 2").primed() == P("x'*y' + 2")


class TestSubstitute:
    def test_monomial(self):
        assert substitute(P("x^2"), {"x": t, "y": alpha * t}) == t**2

    def test_diagonal_collapse(self):
        assert substitute(P("x - x'"), {"x": t, "x'": t}).is_zero()

    def test_diagonal_family(self):
        assert substitute(P("x*y"), {"x": t, "y": alpha * t}) == alpha * t**2

    def test_rational_image(self):
        f = substitute(P("x"), {"x": RationalFunction(t, 1 + t)})
        assert isinstance(f, RationalFunction)
        assert f * RationalFunction(1 + t) == RationalFunction(t)

    def test_unmapped(self):
        with pytest.raises(ValueError):
            substitute(P("x*y"), {"x": t})

    @given(polynomials(R, 2), polynomials(R, 2))
    def test_homomorphism(self, p, q):
        m = {"x": t + alpha * t**2, "y": 2 * t, "x'": t, "y'": alpha * t}
        assert substitute(p * q, m) == substitute(p, m) * substitute(q, m)


class TestJets:
    def test_geometric(self):
        f = jet_truncate(RationalFunction(Polynomial.const(R, 1), 1 - t), 3)
        assert f.as_polynomial() == 1 + t + t**2 + t**3

    def test_long_division(self):
        # oracle: sympy series of t^2/(1+t)
        f = jet_truncate(RationalFunction(t**2, 1 + t), 2)
        T = sympy.Symbol("t")
        series = sympy.series(T**2 / (1 + T), T, 0, 3).removeO()
        assert sympy.expand(to_sympy(f.as_polynomial()) - series) == 0

    def test_cancellation(self):
        assert jet_truncate(RationalFunction(alpha * t, alpha), 1).as_polynomial() == t

    def test_vanishing_denominator(self):
        with pytest.raises(ValueError):
            jet_truncate(RationalFunction(Polynomial.const(R, 1), t), 2)

    @given(st.integers(1, 4), st.integers(-3, 3), st.integers(1, 3), st.integers(-2, 2))
    def test_jet_of_product(self, N, a, b, c):
        f = RationalFunction(1 + a * t, b + t)
        g = RationalFunction(t + c * alpha * t**2, 1 - c * t)
        lhs = jet_truncate(f * g, N)
        rhs = jet_truncate(jet_truncate(f, N) * jet_truncate(g, N), N)
        assert lhs == rhs

    def test_series_coefficients_match_sympy(self):
        f = RationalFunction(1 + alpha * t, 1 - alpha * t - 2 * t**2)
        j = jet_truncate(f, 5)
        T, A = sympy.symbols("t alpha")
        series = sympy.series((1 + A * T) / (1 - A * T - 2 * T**2), T, 0, 6).removeO()
        num, den = to_sympy(j.num), to_sympy(j.den)
        assert sympy.simplify(num / den - series) == 0


def test_fraction_coefficients_stay_exact():
    p = P("1/3*x") * P("3*x")
    assert p == P("x^2")
    assert p.terms[(2, 0, 0, 0, 0, 0, 0)] == Fraction(1)
    assert sym_equal(p, P("x^2"))
