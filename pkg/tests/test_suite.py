import json
import random

import pytest

from lipsat import GenModule
from lipsat.suite import (
    PROPERTIES,
    Instance,
    SuiteConfig,
    random_combination,
    random_module,
    registry,
    run_suite,
    shrink,
)


class TestRandomModule:
    def test_golden_seed(self):
        M = random_module(SuiteConfig(seed=1, n=2, p=2, r=3, max_degree=1))
        assert [[str(x) for x in row] for row in M.rows()] == [
            ["3", "-x + 3", "0"],
            ["3*y - 3/2", "-x + 2", "2*x"],
        ]

    def test_deterministic(self):
        cfg = SuiteConfig(seed=11, n=3, p=3, r=4, max_degree=2)
        assert random_module(cfg) == random_module(cfg)
        assert random_module(cfg) != random_module(SuiteConfig(seed=12, n=3, p=3, r=4, max_degree=2))

    @pytest.mark.parametrize("seed", range(5))
    def test_homogeneous_linear(self, seed):
        M = random_module(SuiteConfig(seed=seed, homogeneous=True, max_degree=1))
        for col in M.cols:
            for x in col:
                assert x.is_zero() or (x.is_homogeneous() and x.degree() == 1)

    def test_minimal_caps(self):
        M = random_module(SuiteConfig(seed=0, n=1, p=1, r=1, max_degree=0))
        (x,), = M.cols
        assert not x.is_zero() and x.degree() == 0

    def test_rejects_bad_caps(self):
        with pytest.raises(ValueError):
            random_module(SuiteConfig(p=0))

    def test_combination_is_member(self):
        from lipsat import module_membership

        rng = random.Random(4)
        M = random_module(SuiteConfig(seed=4))
        v = module_membership(random_combination(rng, M), M)
        assert v.is_in and v.verify()


class TestShrink:
    def test_reduces_to_culprit(self):
        reg = registry(2)
        M = GenModule.from_rows(reg, [["x + y + 1", "y", "3"], ["x*y", "0", "x - 2"]])

        def check(inst):
            has = any("x*y" in str(e) for col in inst.M.cols for e in col)
            return "fail" if has else "pass"

        small = shrink(Instance(M), check)
        assert small.M.r == 1
        assert [str(e) for e in small.M.cols[0]] == ["0", "x*y"]


@pytest.fixture(scope="module")
def report():
    return run_suite(SuiteConfig(seed=5, count=3))


class TestRunSuite:
    def test_no_fails(self, report):
        assert report.ok and report.fails == 0
        assert {r.name for r in report.results} == {p.name for p in PROPERTIES}
        for r in report.results:
            if r.hard:
                assert r.counts["fail"] == 0 and r.counts["unknown"] == 0

    def test_golden(self, report):
        assert report.golden == {"S3": "CertifiedIn", "S1": "CertifiedOut", "ok": True}

    def test_replay_is_byte_identical(self, report):
        again = run_suite(SuiteConfig(seed=5, count=3))
        assert again.to_json() == report.to_json()
        assert again.to_text() == report.to_text()

    def test_json_schema(self, report):
        d = json.loads(report.to_json())
        assert set(d) == {"config", "golden", "properties", "fails"}
        assert d["config"]["seed"] == 5
        assert all(set(p["counts"]) == {"pass", "fail", "unknown", "skip"} for p in d["properties"])
        assert "seconds" not in d["properties"][0]
        assert "seconds" in json.loads(report.to_json(timing=True))["properties"][0]

    def test_property_filter(self):
        rep = run_suite(SuiteConfig(seed=2, count=2, properties=("double.additive",)))
        assert [r.name for r in rep.results] == ["double.additive"]
        assert rep.results[0].counts["pass"] == 2

    def test_per_property_counts(self):
        cfg = SuiteConfig(seed=2, count=1, counts=(("double.additive", 4),), properties=("double.additive", "double.product-rule"))
        rep = run_suite(cfg)
        assert [sum(r.counts.values()) for r in rep.results] == [1, 4]
