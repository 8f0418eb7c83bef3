"""
Bracketing the saturation chain
===============================

``S1`` sits inside ``S2`` which sits inside ``S3``.  Each test is one-sided,
so the report propagates verdicts along the chain.
"""

import random

from lipsat import sat_report
from lipsat.saturation import find_unit_point, prop417_check
from lipsat.suite import SuiteConfig, random_combination, random_module, random_vector

rng = random.Random(3)
M = random_module(SuiteConfig(n=2, p=2, r=2, homogeneous=True), rng)
print("M =", M)

# a member of M lands in every level
h = random_combination(rng, M)
print("h =", [str(e) for e in h])
print({k: v.kind.value for k, v in sat_report(h, M).verdicts.items()})

# a random vector usually fails everywhere
g = random_vector(rng, M.reg, M.p, 1, homogeneous=True)
rep = sat_report(g, M)
print("g =", [str(e) for e in g])
print({k: v.kind.value for k, v in rep.verdicts.items()}, "consistent:", rep.consistent)

# away from the degeneracy locus both hypotheses of the sufficient
# condition hold, so S3 membership forces S1 membership there
x0, T = find_unit_point(M, rng)
print("moved to", [str(a) for a in x0])
h0 = random_combination(rng, T)
r = prop417_check(h0, T, local=True)
print("hyp1:", r.hyp1.kind.value, "hyp2:", r.hyp2.kind.value, "applies:", r.conclusion_applicable)
