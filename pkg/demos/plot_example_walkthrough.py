"""
The two-by-three module and the vector (x, 3y)
==============================================

A module whose Lipschitz saturation candidates disagree: the minors test
accepts ``h`` while the doubled test rejects it.
"""

from lipsat import GenModule, VarRegistry, augment, generic_rank, minor_ideal, parse
from lipsat import double_module, double_vector, sat1_test, sat2_test, sat3_test
from lipsat.closure import curve_pullback, diagonal_family_curve

reg = VarRegistry(["x", "y"])
M = GenModule.from_rows(reg, [["x", "0", "y"], ["y", "x", "0"]])
h = (parse("x", reg), parse("3*y", reg))
print("M =", M)
print("generic rank:", generic_rank(M))

# the 2x2 minors with and without h generate the same ideal
print("I_2(M)    =", minor_ideal(M, 2))
print("I_2(h, M) =", minor_ideal(augment(h, M), 2))

# so h passes the minors test
s3 = sat3_test(h, M)
print("S3:", s3.kind.value, "verified:", s3.verify())

# the doubled module lives over (x, y, x', y') and has rank 4
D = double_module(M).module
print("M_D is", D.p, "x", D.r, "of rank", generic_rank(D))

# pull back along x = x' = t, y = alpha t, y' = beta t
curve = diagonal_family_curve(reg)
for row in curve_pullback(D, curve).rows():
    print("   ", [str(e) for e in row])
print("h_D ->", [str(e) for e in curve_pullback(double_vector(h), curve)])

# the last coordinate cannot be matched unless alpha = beta
s1 = sat1_test(h, M)
cert = s1.certificate
print("S1:", s1.kind.value, "residual:", [str(e) for e in cert.result.residual])

# a cofactor functional already separates h at the middle level
s2 = sat2_test(h, M)
print("S2:", s2.kind.value, "-", s2.note)
