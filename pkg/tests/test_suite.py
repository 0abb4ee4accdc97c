"""Tests for the verification suite."""

from unittest.mock import patch

import pytest

from simplehom.config import Settings
from simplehom.exceptions import VerificationFailure
from simplehom.suite import SuiteRun, run_check, run_suite


@pytest.fixture(scope="module")
def run():
    settings = Settings(suite={"torsion_trials": 5, "commutator_pairs": 10, "depth_law_max_checks": 10})
    return SuiteRun(settings, 7, None, "fast")


class TestRunCheck:
    """Tests for result collection."""

    def test_failure_is_recorded(self):
        """Errors become failed results instead of propagating."""

        def broken():
            raise VerificationFailure("nope")

        result = run_check(6, "commutator_containment", broken)
        assert result.passed is False
        assert result.error == "VerificationFailure: nope"

    def test_success(self):
        result = run_check(2, "trace_limit", lambda: {"value": 5})
        assert result.passed
        assert result.to_json()["details"] == {"value": 5}


class TestChecks:
    """Individual checks at p = 7."""

    def test_exact_checks(self, run):
        assert run.check_trace_identity()["primes"] == {"5": True, "7": True, "11": True, "13": True}
        assert run.check_trace_limit()["value"][0] == pytest.approx(5)
        assert run.check_valuations()["coprime_samples"] == 20

    def test_simple_torsion(self, run):
        details = run.check_simple_torsion()
        assert details["phi_order"] == "infinite"
        assert details["phi_witness"]["margin"] > 1e-3

    def test_depth_law(self, run):
        details = run.check_depth_law()
        assert details["distinct_cosets"] >= details["psi"]["bound"]

    def test_depth_law_needs_power_samples(self, run):
        """A level with no sampled elements fails the check."""
        with patch("simplehom.suite.filtration_exponent_check", return_value={1: 5, 2: 0, 3: 5}):
            with pytest.raises(VerificationFailure, match="p-th power law"):
                run.check_depth_law()

    def test_commutators_use_filtration_elements(self, run):
        """The level-N cover is out of reach in the fast suite."""
        details = run.check_commutators()
        assert details["source"] == "filtration"
        assert details["pairs"] == 10
        assert details["level"] == 2 * run.psi.N + 3

    def test_structure(self, run):
        details = run.check_structure()
        assert details["mod_h_order"] == 1
        assert [c["k"] for c in details["covers"]] == [0, 1]
        assert all(c["rank"] == c["degree"] + 1 for c in details["covers"])

    def test_main_theorem_fallback(self, run):
        """Without the level-N cover, the fallback needs checks 5 and 6."""
        run.passed.update({5: True, 6: True})
        details = run.check_main_theorem()
        assert details["mode"] == "fallback"
        assert details["witness_level"] == 1

    def test_main_theorem_requires_depth_law(self):
        settings = Settings(suite={"fast_max_level": 1})
        fresh = SuiteRun(settings, 7, None, "fast")
        with pytest.raises(VerificationFailure):
            fresh.check_main_theorem()


@pytest.mark.slow
def test_fast_suite_passes():
    """Every check passes at p = 7 with the fast budgets."""
    report = run_suite(Settings(), p=7, suite="fast")
    failed = [r.to_json() for r in report.results if not r.passed]
    assert failed == []
    assert [r.criterion for r in report.results] == list(range(1, 10))
