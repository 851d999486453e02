import math

import numpy as np
import pytest

from invopt.losses import gamma_constants, psi_membership
from invopt.solvers import psgd
from invopt.verify import (
    check_descent_inequality,
    check_finite_bound,
    check_spo_bound,
    check_zero_equivalence,
    designed_datasets,
    finite_iteration_bound,
    make_certified_dataset,
    psi_fraction,
    verification_suite,
)
from invopt.verify import CertifiedDataset


class TestFiniteIterationBound:
    def test_infinite_gamma_floor(self):
        assert finite_iteration_bound(math.inf) == pytest.approx(16 * math.e**2)

    def test_hand_value(self):
        # gamma = 0.5: max(100, (8 ln 4 / 0.5)^2, 16 e^2)
        expected = (8 * math.log(4.0) / 0.5) ** 2
        assert finite_iteration_bound(0.5) == pytest.approx(expected)

    def test_large_gamma_uses_floor(self):
        assert finite_iteration_bound(50.0) == pytest.approx(16 * math.e**2)


class TestDesignedDatasets:
    def test_all_certified(self):
        items = designed_datasets()
        assert len(items) == 3
        for item in items:
            assert item.cert.member and item.cert.margin > 0

    def test_gamma_values(self):
        items = designed_datasets()
        assert math.isinf(items[0].consts.gamma)
        assert items[1].consts.gamma == pytest.approx(1.0 / (8 * math.sqrt(2)), abs=1e-12)
        assert items[2].consts.gamma == pytest.approx(0.8 / (8 * math.sqrt(2)), abs=1e-12)


@pytest.fixture(scope="module")
def certified():
    rng = np.random.default_rng(5)
    return [
        make_certified_dataset("lp", 3, rng, J=6),
        make_certified_dataset("scheduling", 3, rng),
    ]


class TestChecks:
    def test_certificates_consistent(self, certified):
        for item in certified:
            cert = psi_membership(item.w_star, item.data)
            assert cert.member and cert.margin == item.cert.margin
            assert gamma_constants(item.w_star, item.data).gamma == item.consts.gamma

    def test_zero_equivalence_no_violations(self, certified, rng):
        for item in certified:
            checks, violations = check_zero_equivalence(item, 100, rng)
            assert checks == 100 and violations == 0

    def test_spo_bound_no_violations(self, certified, rng):
        for item in certified:
            checks, violations, worst = check_spo_bound(item, 2000, rng)
            assert checks == 2000 and violations == 0
            assert worst >= -1e-9

    def test_descent_inequality_holds(self, certified):
        for item in certified:
            result = psgd(item.data, "sqrt-decay", iters=300, w_star=item.w_star)
            checks, violations, worst = check_descent_inequality(item, result.trace)
            assert violations == 0
            if checks:
                assert worst >= -1e-9

    def test_finite_bound_designed_runs(self):
        for item in designed_datasets():
            qualifying, violations, _ = check_finite_bound(item, cap=1e5)
            assert violations == 0
            if math.isinf(item.consts.gamma) or item.consts.gamma > 0.08:
                assert qualifying == 1

    def test_finite_bound_skips_above_cap(self, certified):
        tiny_gamma = CertifiedDataset(
            certified[0].data,
            certified[0].w_star,
            certified[0].cert,
            type(certified[0].consts)(gamma=1e-4, G=certified[0].consts.G),
            "tiny",
        )
        qualifying, violations, detail = check_finite_bound(tiny_gamma, cap=1e5)
        assert qualifying == 0 and violations == 0 and "above cap" in detail


class TestPsiFraction:
    def test_generic_strictness(self, rng):
        for family in ("lp", "scheduling"):
            frac = psi_fraction(family, 4, rng, draws=1000)
            assert frac >= 0.99


class TestSuite:
    def test_full_suite_passes_small(self):
        report = verification_suite(
            [("lp", 3), ("scheduling", 3)],
            seed=3,
            n_phi_equivalence=40,
            n_phi_spo=500,
            psgd_iters=100,
            psi_draws=200,
        )
        names = [res.name for res in report.results]
        assert names == [
            "psi-fraction",
            "zero-equivalence",
            "spo-lower-bound",
            "descent-inequality",
            "finite-bound",
        ]
        assert report.passed
