"""Seeded random instances and the property harness.

Exact identities and the inclusion lemmas are hard properties: a failure is
a bug.  Closure-based properties are soft: ``Unknown`` is tolerated, a
contradiction between certified verdicts is not.  Every failure is shrunk
(columns, then terms) and dumped in a replayable form.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Callable

from .algebra import (
    GenModule,
    Ideal,
    apply_functional,
    augment,
    cofactor_functional,
    cofactor_indices,
    det,
    functional_image,
    generic_rank,
    generic_rank_by_minors,
    minor_ideal,
)
from .closure import CurveFamily, closure_test_ideal, closure_test_module, module_membership
from .closure.newton import monomial_closure
from .double import (
    FAMILIES,
    determinant_product,
    determinant_product_submatrix,
    diag_generators,
    double_module,
    double_vector,
    k_indexes,
    pi2,
)
from .polycore import Polynomial, VarRegistry
from .saturation import (
    diagonal_power_cofactors,
    find_unit_point,
    inclusion_lemma_check,
    prop417_check,
    sat_report,
    sat1_test,
)

VAR_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    n: int = 2
    p: int = 2
    r: int = 3
    max_degree: int = 1
    homogeneous: bool = False
    density: float = 0.5
    count: int = 10
    counts: tuple = ()
    jet_order: int = 12
    curve_degree: int = 2
    curve_count: int = 6
    degree_bound: int | None = None
    properties: tuple = ()

    def count_for(self, name: str) -> int:
        return dict(self.counts).get(name, self.count)

    def family(self) -> CurveFamily:
        return CurveFamily(max_degree=self.curve_degree, count=self.curve_count, seed=self.seed, monomial_cap=16)


def registry(n: int) -> VarRegistry:
    names = VAR_NAMES[:n] if n <= len(VAR_NAMES) else tuple(f"z{i + 1}" for i in range(n))
    return VarRegistry(names)


def random_polynomial(rng: random.Random, reg: VarRegistry, degree: int, homogeneous: bool = False, density: float = 0.5):
    n = reg.n
    pad = (0,) * (reg.nvars - n)
    terms = {}
    for e in product(range(degree + 1), repeat=n):
        s = sum(e)
        if s > degree or (homogeneous and s != degree):
            continue
        if rng.random() < density:
            c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
            if c:
                terms[e + pad] = c
    return Polynomial(reg, terms)


def random_module(cfg: SuiteConfig, rng: random.Random | None = None) -> GenModule:
    """A ``p x r`` generator matrix with random rational entries of degree ``<= max_degree``."""
    if min(cfg.n, cfg.p, cfg.r) < 1 or cfg.max_degree < 0:
        raise ValueError("size caps must be positive")
    rng = rng or random.Random(cfg.seed)
    reg = registry(cfg.n)
    cols = [
        [random_polynomial(rng, reg, cfg.max_degree, cfg.homogeneous, cfg.density) for _ in range(cfg.p)]
        for _ in range(cfg.r)
    ]
    M = GenModule(reg, cfg.p, cols)
    if M.is_zero():
        e = [0] * reg.nvars
        if cfg.max_degree:
            e[rng.randrange(cfg.n)] = cfg.max_degree
        c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 2))
        cols[0][0] = Polynomial(reg, {tuple(e): c})
        M = GenModule(reg, cfg.p, cols)
    return M


def random_vector(rng: random.Random, reg: VarRegistry, p: int, degree: int, homogeneous=False) -> tuple:
    return tuple(random_polynomial(rng, reg, degree, homogeneous) for _ in range(p))


def random_combination(rng: random.Random, M: GenModule, degree: int = 1) -> tuple:
    """``sum_j a_j g_j`` with random polynomial cofactors: an element of ``M``."""
    out = [Polynomial.zero(M.reg)] * M.p
    for g in M.cols:
        a = random_polynomial(rng, M.reg, degree)
        out = [x + a * y for x, y in zip(out, g)]
    return tuple(out)


# --------------------------------------------------------------------------------------
# instances and shrinking


@dataclass
class Instance:
    M: GenModule
    h: tuple | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"vars": list(self.M.reg.space_vars), "matrix": [[str(x) for x in row] for row in self.M.rows()]}
        if self.h is not None:
            out["vector"] = [str(x) for x in self.h]
        for k, v in self.extra.items():
            out[k] = str(v) if isinstance(v, Polynomial) else [str(x) for x in v] if isinstance(v, tuple) else v
        return out


def _smaller(inst: Instance):
    M = inst.M
    if M.r > 1:
        for j in range(M.r):
            yield Instance(M.select([i for i in range(M.r) if i != j]), inst.h, inst.extra)
    for j, col in enumerate(M.cols):
        for i, x in enumerate(col):
            for e in list(x.terms):
                if len(x.terms) == 1 and x.is_zero():
                    continue
                y = Polynomial(x.reg, {f: c for f, c in x.terms.items() if f != e})
                cols = [list(c) for c in M.cols]
                cols[j][i] = y
                yield Instance(GenModule(M.reg, M.p, cols), inst.h, inst.extra)
    if inst.h is not None:
        for i, x in enumerate(inst.h):
            for e in list(x.terms):
                h = list(inst.h)
                h[i] = Polynomial(x.reg, {f: c for f, c in x.terms.items() if f != e})
                yield Instance(M, tuple(h), inst.extra)


def shrink(inst: Instance, check: Callable[[Instance], str], budget: int = 200) -> Instance:
    """Greedy reduction keeping ``check(inst) == "fail"``."""
    steps = 0
    improved = True
    while improved and steps < budget:
        improved = False
        for cand in _smaller(inst):
            steps += 1
            try:
                status = check(cand)
            except ValueError:
                continue
            if status == "fail":
                inst = cand
                improved = True
                break
            if steps >= budget:
                break
    return inst


# --------------------------------------------------------------------------------------
# properties


def _status(ok: bool | None) -> str:
    return "unknown" if ok is None else ("pass" if ok else "fail")


def _gen_basic(rng, cfg):
    M = random_module(replace(cfg, n=rng.randint(1, cfg.n), p=rng.randint(1, cfg.p), r=rng.randint(1, cfg.r)), rng)
    a = random_polynomial(rng, M.reg, cfg.max_degree)
    g = random_vector(rng, M.reg, M.p, cfg.max_degree)
    return Instance(M, random_vector(rng, M.reg, M.p, cfg.max_degree), {"alpha": a, "g": g})


def _small(rng, cfg, free=False):
    n = rng.randint(1, min(cfg.n, 2))
    p = rng.randint(1, min(cfg.p, 2))
    r = p if free else rng.randint(1, min(cfg.r, 3))
    return random_module(replace(cfg, n=n, p=p, r=r, max_degree=min(cfg.max_degree, 1)), rng)


def check_product_rule(inst):
    a, h = inst.extra["alpha"], inst.h
    lhs = double_vector([a * x for x in h])
    d = a - a.primed()
    rhs = [a * x for x in double_vector(h)]
    rhs = [x - y for x, y in zip(rhs, [Polynomial.zero(a.reg)] * len(h) + [d * x for x in pi2(h)])]
    return _status(list(lhs) == rhs)


def check_diagonal_membership(inst):
    a = inst.extra["alpha"]
    M = inst.M
    if M.is_zero():
        return "pass"
    h = M.cols[0]
    d = a - a.primed()
    v = tuple([Polynomial.zero(M.reg)] * M.p) + tuple(d * x for x in pi2(h))
    res = module_membership(v, double_module(M).module)
    return "unknown" if res.is_unknown else _status(res.is_in and res.verify())


def check_diagonal_difference(inst):
    a = inst.extra["alpha"]
    d = a - a.primed()
    cof = diagonal_power_cofactors(d, 1)
    if cof is None:
        return "fail"
    diffs = diag_generators(a.reg)
    total = Polynomial.zero(a.reg)
    for beta, c in cof:
        total = total + c * diffs[beta.index(1)]
    return _status(total == d)


def check_additive(inst):
    g, h = inst.extra["g"], inst.h
    return _status(double_vector([x + y for x, y in zip(g, h)]) == tuple(x + y for x, y in zip(double_vector(g), double_vector(h))))


def check_families(inst):
    mods = {f: double_module(inst.M, f).module for f in FAMILIES}
    unknown = False
    for f in FAMILIES:
        for g in FAMILIES:
            if f == g:
                continue
            for col in mods[f].cols:
                v = module_membership(col, mods[g])
                if v.is_out or (v.is_in and not v.verify()):
                    return "fail"
                unknown |= v.is_unknown
    return "unknown" if unknown else "pass"


def check_rank_doubling(inst):
    M = inst.M
    k = generic_rank(M)
    if M.p * M.r <= 9 and k != generic_rank_by_minors(M):
        return "fail"
    return _status(generic_rank(double_module(M).module) == 2 * k)


def check_linearity(inst):
    M, h, g, a = inst.M, inst.h, inst.extra["g"], inst.extra["alpha"]
    k = generic_rank(M)
    for idx in cofactor_indices(M, max(k, 1)):
        psi = cofactor_functional(M, idx)
        lhs = apply_functional(psi, [a * x + y for x, y in zip(g, h)])
        if lhs != a * apply_functional(psi, g) + apply_functional(psi, h):
            return "fail"
    return "pass"


def check_cofactor(inst):
    M, h = inst.M, inst.h
    k = generic_rank(M)
    if k == 0:
        return "pass"
    aug = augment(h, M)
    Ik = minor_ideal(M, k)
    for idx in cofactor_indices(M, k):
        psi = cofactor_functional(M, idx)
        sub = [[aug.cols[j][i] for j in idx.cols] for i in idx.rows]
        if apply_functional(psi, h) != det(sub, M.reg):
            return "fail"
        for g in functional_image(psi, M).gens:
            if g not in Ik.gens and -g not in Ik.gens:
                return "fail"
    return "pass"


def check_detprod(inst):
    M = inst.M
    rng = random.Random(str(inst.to_dict()))
    k = rng.randint(1, min(M.p, M.r))
    idxs = list(k_indexes(M.p, M.r, k))
    IJ, KL = rng.choice(idxs), rng.choice(idxs)
    ts = tuple(rng.randrange(M.reg.n) for _ in range(k))
    _, _, sub = determinant_product_submatrix(M, ts, IJ, KL)
    return _status(det(sub, M.reg) == determinant_product(M, ts, IJ, KL))


def _lemma_check(which):
    def check(inst):
        try:
            v = inclusion_lemma_check(inst.M, which)
        except ValueError:
            return "skip"
        if v.is_unknown:
            return "unknown"
        return _status(v.is_in and v.verify())

    return check


def check_rank_stability(inst):
    M, h = inst.M, inst.h
    if generic_rank(augment(h, M)) > generic_rank(M):
        v = closure_test_module(h, M)
        return _status(v.is_out and v.verify())
    return _status(generic_rank(augment(M.cols[0], M)) == generic_rank(M))


def check_chain(inst, cfg):
    M, h = inst.M, inst.h
    fam = cfg.family()
    try:
        rep = sat_report(h, M, fam, psi_budget=1, jet_order=cfg.jet_order, seed=cfg.seed)
    except ValueError:
        return "skip"
    if not rep.consistent:
        return "fail"
    for v in rep.raw.values():
        if not v.verify():
            return "fail"
    mm = module_membership(h, M)
    if mm.is_in and any(v.is_out for v in rep.verdicts.values()):
        return "fail"
    if rep.verdicts["S1"].is_in or rep.verdicts["S2"].is_in or rep.verdicts["S3"].is_in:
        cl = closure_test_module(h, M, fam, jet_order=cfg.jet_order)
        if cl.is_out:
            return "fail"
    if all(v.is_unknown for v in rep.verdicts.values()):
        return "unknown"
    return "pass"


def check_double_necessity(inst, cfg):
    M, h = inst.M, inst.h
    fam = cfg.family()
    s1 = sat1_test(h, M, fam, jet_order=cfg.jet_order)
    if not s1.verify():
        return "fail"
    if not s1.is_in:
        return "unknown"
    return _status(not closure_test_module(h, M, fam, jet_order=cfg.jet_order).is_out)


def check_functional_consistency(inst, cfg):
    M, h = inst.M, inst.h
    fam = cfg.family()
    v = closure_test_module(h, M, fam, jet_order=cfg.jet_order)
    if not v.verify():
        return "fail"
    if not v.is_in:
        return "unknown"
    k = generic_rank(M)
    for idx in cofactor_indices(M, k):
        psi = cofactor_functional(M, idx)
        w = closure_test_ideal(apply_functional(psi, h), functional_image(psi, M), fam, jet_order=cfg.jet_order)
        if w.is_out:
            return "fail"
    return "pass"


def check_monomial_closure(inst):
    I = inst.extra["ideal"]
    C = monomial_closure(I)
    CC = monomial_closure(C)
    if set(CC.gens) != set(C.gens):
        return "fail"
    for g in I.gens:
        if not any(all(a >= b for a, b in zip(next(iter(g.terms)), next(iter(c.terms)))) for c in C.gens):
            return "fail"
    return "pass"


def _gen_monomial(rng, cfg):
    n = rng.randint(1, min(cfg.n, 3))
    reg = registry(n)
    gens = []
    for _ in range(rng.randint(1, 4)):
        e = [rng.randint(0, 4) for _ in range(n)] + [0] * (reg.nvars - n)
        if any(e):
            gens.append(Polynomial.monomial(reg, tuple(e)))
    if not gens:
        gens.append(Polynomial.var(reg, reg.space_vars[0]))
    return Instance(GenModule(reg, 1, [[g] for g in gens]), None, {"ideal": Ideal(reg, gens)})


def _gen_small(free=False, with_h="random"):
    def gen(rng, cfg):
        M = _small(rng, cfg, free)
        if with_h == "member":
            h = random_combination(rng, M, 1)
        elif with_h == "mixed":
            kind = rng.randrange(3)
            if kind == 0:
                h = random_combination(rng, M, 1)
            elif kind == 1:
                h = M.cols[rng.randrange(M.r)]
                a = random_polynomial(rng, M.reg, 1)
                h = tuple(a * x for x in h)
            else:
                h = random_vector(rng, M.reg, M.p, 1)
        else:
            h = random_vector(rng, M.reg, M.p, 1)
        return Instance(M, tuple(h), {})

    return gen


def _gen_principal(rng, cfg):
    """Rank-k module with a single nonzero k-minor: a free truncation."""
    M = _small(rng, cfg, free=True)
    return Instance(M, None, {})


def _gen_local(rng, cfg):
    M = _small(rng, cfg)
    found = find_unit_point(M, rng)
    if found is None:
        return Instance(M, tuple(M.cols[0]), {"point": None})
    x0, T = found
    return Instance(T, random_combination(rng, T, 1), {"point": [str(a) for a in x0]})


def check_local417(inst, cfg):
    if inst.extra.get("point") is None or generic_rank(inst.M) == 0:
        return "skip"
    rep = prop417_check(inst.h, inst.M, local=True)
    for v in (rep.hyp1, rep.hyp2):
        if v.is_out or not v.verify():
            return "fail"
    return "pass" if rep.conclusion_applicable else "unknown"


@dataclass(frozen=True)
class Property:
    name: str
    hard: bool
    gen: Callable
    check: Callable
    needs_cfg: bool = False


PROPERTIES = (
    Property("double.product-rule", True, _gen_basic, check_product_rule),
    Property("double.diagonal-membership", True, _gen_basic, check_diagonal_membership),
    Property("double.diagonal-difference", True, _gen_basic, check_diagonal_difference),
    Property("double.additive", True, _gen_basic, check_additive),
    Property("double.family-equivalence", True, lambda rng, cfg: Instance(_small(rng, cfg)), check_families),
    Property("double.rank-doubling", True, _gen_basic, check_rank_doubling),
    Property("algebra.functional-linearity", True, _gen_basic, check_linearity),
    Property("algebra.cofactor-identity", True, _gen_basic, check_cofactor),
    Property("double.determinant-product", True, _gen_basic, check_detprod),
    Property("lemma.L420a", True, lambda rng, cfg: Instance(_small(rng, cfg)), _lemma_check("L420a")),
    Property("lemma.L420b", True, _gen_principal, _lemma_check("L420b")),
    Property("lemma.Lfree", True, lambda rng, cfg: Instance(_small(rng, cfg, free=True)), _lemma_check("Lfree")),
    Property("lemma.Ltilde", True, lambda rng, cfg: Instance(_small(rng, cfg)), _lemma_check("Ltilde")),
    Property("closure.rank-stability", True, _gen_small(), check_rank_stability),
    Property("closure.monomial-idempotent", True, _gen_monomial, check_monomial_closure),
    Property("saturation.chain", False, _gen_small(with_h="mixed"), check_chain, True),
    Property("closure.double-necessity", False, _gen_small(with_h="mixed"), check_double_necessity, True),
    Property("closure.functional-consistency", False, _gen_small(with_h="mixed"), check_functional_consistency, True),
    Property("saturation.prop417-local", False, _gen_local, check_local417, True),
)


@dataclass
class PropertyResult:
    name: str
    hard: bool
    counts: dict
    counterexamples: list
    seconds: float = 0.0

    def to_dict(self, timing=False) -> dict:
        out = {"name": self.name, "hard": self.hard, "counts": dict(self.counts), "counterexamples": self.counterexamples}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class SuiteReport:
    config: SuiteConfig
    results: list
    golden: dict

    @property
    def fails(self) -> int:
        return sum(r.counts["fail"] for r in self.results) + (0 if self.golden.get("ok") else 1)

    @property
    def ok(self) -> bool:
        return self.fails == 0

    def to_dict(self, timing: bool = False) -> dict:
        cfg = asdict(self.config)
        cfg["counts"] = dict(self.config.counts)
        cfg["properties"] = list(self.config.properties)
        return {
            "config": cfg,
            "golden": self.golden,
            "properties": [r.to_dict(timing) for r in self.results],
            "fails": self.fails,
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def to_text(self, timing: bool = False) -> str:
        lines = [f"suite seed={self.config.seed}"]
        g = self.golden
        lines.append(f"golden example: S3 {g['S3']}, S1 {g['S1']} -> {'ok' if g['ok'] else 'FAIL'}")
        for r in self.results:
            c = r.counts
            kind = "hard" if r.hard else "soft"
            line = f"{r.name:32s} {kind}  pass {c['pass']:3d}  fail {c['fail']:3d}  unknown {c['unknown']:3d}  skip {c['skip']:3d}"
            if timing:
                line += f"  {r.seconds:.2f}s"
            lines.append(line)
            for ce in r.counterexamples:
                lines.append("    counterexample: " + json.dumps(ce, sort_keys=True))
        lines.append(f"total fails: {self.fails}")
        return "\n".join(lines) + "\n"


def golden_example() -> dict:
    from .saturation import sat3_test

    reg = registry(2)
    M = GenModule.from_rows(reg, [["x", "0", "y"], ["y", "x", "0"]])
    from .polycore import parse

    h = (parse("x", reg), parse("3*y", reg))
    s3 = sat3_test(h, M)
    s1 = sat1_test(h, M)
    return {"S3": s3.kind.value, "S1": s1.kind.value, "ok": s3.is_in and s1.is_out and s3.verify() and s1.verify()}


def run_suite(cfg: SuiteConfig = SuiteConfig()) -> SuiteReport:
    """Run every property ``cfg.count_for(name)`` times with per-property seeded streams."""
    results = []
    for prop in PROPERTIES:
        if cfg.properties and prop.name not in cfg.properties:
            continue
        rng = random.Random(f"{cfg.seed}:{prop.name}")
        counts = {"pass": 0, "fail": 0, "unknown": 0, "skip": 0}
        dumps = []
        start = time.perf_counter()

        def check(inst, prop=prop):
            return prop.check(inst, cfg) if prop.needs_cfg else prop.check(inst)

        for _ in range(cfg.count_for(prop.name)):
            inst = prop.gen(rng, cfg)
            try:
                status = check(inst)
            except ValueError:
                status = "skip"
            counts[status] += 1
            if status == "fail":
                small = shrink(inst, check)
                dumps.append({"original": inst.to_dict(), "shrunk": small.to_dict(), "replays": check(small) == "fail"})
        results.append(PropertyResult(prop.name, prop.hard, counts, dumps, time.perf_counter() - start))
    return SuiteReport(cfg, results, golden_example())
