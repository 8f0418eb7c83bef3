"""
Integral closure of monomial ideals
===================================

For monomial ideals the integral closure is read off the Newton polyhedron.
"""

from lipsat import Ideal, VarRegistry, monomial_closure, newton_test

reg = VarRegistry(["x", "y"])

# <x^3, y^2> gains x^2 y: the point (2, 1) sits above the segment (3,0)-(0,2)
I = Ideal.parse(reg, ["x^3", "y^2"])
print(I, "->", monomial_closure(I))

# a membership question comes with a certificate either way: convex
# weights on the generators, or a separating weight vector
for a in [(2, 1), (1, 1)]:
    cert = newton_test(a, I)
    print(a, type(cert).__name__, cert.verify(), getattr(cert, "weights", getattr(cert, "weight", None)))

# powers of the maximal ideal are already closed
m3 = Ideal.parse(reg, ["x", "y"]) ** 3
print(m3, "->", monomial_closure(m3))

# three variables: <x^2, y^2, z^2> closes up to all quadratic monomials
reg3 = VarRegistry(["x", "y", "z"])
J = Ideal.parse(reg3, ["x^2", "y^2", "z^2"])
print(J, "->", monomial_closure(J))
