"""Unit tests for the pants representation."""

from unittest.mock import patch

import numpy as np
import pytest

from simplehom.cyclotomic import INFINITE, from_laurent
from simplehom.exceptions import InvalidParameterError, InvariantViolation
from simplehom.pantsrep import (
    PHI,
    TRACE_POLYNOMIAL,
    compare_printed_lambda,
    eval_word,
    gamma3_check,
    is_simple,
    order_witness,
    pants_rep,
    simple_torsion_suite,
    trace_identity,
    trace_limit,
    trace_sweep,
    witness_embeddings,
)
from simplehom.projmat import ProjectiveMatrix, SpectralCertificate, proj_order
from simplehom.words import GroupWord, cyclic_class_key, parse_word, reduced_words


class TestConstruction:
    """Tests for building the representation."""

    def test_default_embedding(self, rep7):
        """p = 7 uses j = 1."""
        assert rep7.p == 7
        assert rep7.j == 1

    def test_rejects_bad_prime(self):
        """Composite and small p are refused."""
        with pytest.raises(InvalidParameterError):
            pants_rep(9)
        with pytest.raises(InvalidParameterError):
            pants_rep(3)

    def test_rejects_bad_embedding(self):
        """j must be prime to p."""
        with pytest.raises(InvalidParameterError):
            pants_rep(7, j=14)

    def test_generator_inverses(self, rep7):
        """Exact inverses are stored for A and B."""
        one = ProjectiveMatrix.identity(7)
        gens = rep7.generators
        assert gens["a"] * gens["A"] == one
        assert gens["b"] * gens["B"] == one

    def test_eval_word_is_a_homomorphism(self, rep7):
        """eval(u v) = eval(u) eval(v)."""
        u, v = parse_word("a b A"), parse_word("B B a")
        assert eval_word(rep7, u * v) == eval_word(rep7, u) * eval_word(rep7, v)
        assert eval_word(rep7, GroupWord()) == ProjectiveMatrix.identity(7)


class TestTraces:
    """Tests for the trace identity and its limit."""

    @pytest.mark.parametrize("p", [5, 7, 11, 13])
    def test_trace_identity(self, p):
        """tr(rho(a) rho(b)^-1) matches the closed form."""
        identity = trace_identity(pants_rep(p))
        assert identity.holds
        assert identity.computed == from_laurent(p, TRACE_POLYNOMIAL)

    def test_trace_limit(self):
        """The closed form tends to 5."""
        assert abs(trace_limit() - 5) < 1e-9

    def test_trace_sweep(self):
        """Large primes are loxodromic at the default embedding."""
        rows = trace_sweep([7, 13, 101])
        assert [r["p"] for r in rows] == [7, 13, 101]
        assert rows[-1]["abs_trace"] == pytest.approx(5, abs=0.1)
        assert all(r["loxodromic"] for r in rows)

    def test_printed_lambda(self, rep7):
        """Only the top-left entry of the printed product disagrees."""
        assert compare_printed_lambda(rep7) == [(0, 0)]


class TestThirdBoundary:
    """Tests for the third boundary image."""

    def test_gamma3_word(self, rep7):
        """Ma Mc Mb is scalar, so the third loop is (b a)^-1."""
        result = gamma3_check(rep7)
        assert result.ordering == ("a", "c", "b")
        assert result.exponents == (1, 1, 1)
        assert str(result.word) == "A B"
        assert result.zeta_power is not None

    def test_boundary_words(self, rep7):
        """a, b and the third loop all have finite order."""
        words = rep7.boundary_words()
        assert [str(w) for w in words] == ["a", "b", "A B"]
        for w in words:
            assert proj_order(eval_word(rep7, w)) is not INFINITE

    def test_gamma3_other_prime(self, rep5):
        """The same convention holds at p = 5."""
        assert str(gamma3_check(rep5).word) == "A B"


class TestSimpleElements:
    """Tests for simplicity and torsion."""

    def test_is_simple(self):
        """Boundary-parallel classes are simple."""
        assert is_simple(parse_word("a^3"))
        assert is_simple(parse_word("a b"))
        assert is_simple(parse_word("B A B A"))
        assert is_simple(parse_word("b^2").conjugate_by(parse_word("a B a")))
        assert not is_simple(parse_word("a B"))
        assert not is_simple(parse_word("a b a B"))

    def test_is_simple_is_a_class_function(self):
        """Rotations and inverses of a word agree on simplicity."""
        verdicts = {}
        for w in reduced_words(6):
            c = w.cyclic_reduce().letters
            simple = is_simple(w)
            assert is_simple(w.inverse()) == simple
            for i in range(len(c)):
                assert is_simple(GroupWord(c[i:] + c[:i])) == simple
            assert verdicts.setdefault(cyclic_class_key(w), simple) == simple

    def test_torsion_suite(self, rep7):
        """Every simple word has finite order."""
        report = simple_torsion_suite(rep7, trials=10, rng=np.random.default_rng(0))
        assert report.all_finite
        assert len(report.orders) == 30 + 10

    def test_torsion_suite_other_prime(self, rep5):
        """At p = 5 the boundary loops still have finite order."""
        report = simple_torsion_suite(rep5, trials=3, rng=np.random.default_rng(1), max_power=2)
        assert report.to_json()["all_finite"] is True

    def test_order_witness(self, rep7):
        """Finite orders are exact; infinite ones carry a witness."""
        assert order_witness(rep7, parse_word("a")) == {"order": 7}
        result = order_witness(rep7, PHI)
        assert result["order"] == "infinite"
        assert result["witness"]["j"] == 1
        assert result["witness"]["abs_trace"] > 2

    def test_order_witness_scans_embeddings(self):
        """At p = 11 the default embedding is on the circle; another one certifies."""
        rep11 = pants_rep(11)
        assert rep11.j == 1
        result = order_witness(rep11, PHI)
        assert result["order"] == "infinite"
        assert result["witness"]["j"] == 2
        assert result["witness"]["margin"] > 1e-6
        assert witness_embeddings(rep11) == list(range(1, 11))

    def test_order_witness_without_certificate(self, rep7):
        """An infinite order with no off-circle embedding is an internal error."""
        flat = SpectralCertificate(j=1, abs_eigenvalues=(1.0, 1.0), abs_trace=2.0, margin=0.0)
        with patch("simplehom.pantsrep.spectral_certificate", return_value=flat):
            with pytest.raises(InvariantViolation):
                order_witness(rep7, PHI)
