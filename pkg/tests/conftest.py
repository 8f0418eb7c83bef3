import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from lipsat import GenModule, Polynomial, VarRegistry, parse  # noqa: E402

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

REG2 = VarRegistry(["x", "y"])


@pytest.fixture
def reg2():
    return REG2


@pytest.fixture
def example():
    """The module ``[[x, 0, y], [y, x, 0]]`` and the vector ``(x, 3y)``."""
    M = GenModule.from_rows(REG2, [["x", "0", "y"], ["y", "x", "0"]])
    h = (parse("x", REG2), parse("3*y", REG2))
    return M, h


coefficients = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def polynomials(draw, reg=REG2, max_degree=2, slots=None, max_terms=4):
    slots = list(range(reg.n)) if slots is None else list(slots)
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = [0] * reg.nvars
        for s in slots:
            e[s] = draw(st.integers(0, max_degree))
        if sum(e) > max_degree:
            continue
        c = draw(coefficients)
        if c:
            terms[tuple(e)] = c
    return Polynomial(reg, terms)


@st.composite
def modules(draw, reg=REG2, max_p=2, max_r=3, max_degree=1):
    p = draw(st.integers(1, max_p))
    r = draw(st.integers(1, max_r))
    cols = [[draw(polynomials(reg, max_degree, max_terms=3)) for _ in range(p)] for _ in range(r)]
    return GenModule(reg, p, cols)


@st.composite
def module_and_vector(draw, reg=REG2, max_p=2, max_r=3, max_degree=1):
    M = draw(modules(reg, max_p, max_r, max_degree))
    h = tuple(draw(polynomials(reg, max_degree, max_terms=3)) for _ in range(M.p))
    return M, h


def rand_poly(rng: random.Random, reg, degree=1):
    terms = {}
    for e0 in range(degree + 1):
        for e1 in range(degree + 1 - e0):
            if rng.random() < 0.6:
                c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                if c:
                    e = [0] * reg.nvars
                    e[0] = e0
                    if reg.n > 1:
                        e[1] = e1
                    elif e1:
                        continue
                    terms[tuple(e)] = c
    return Polynomial(reg, terms)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
