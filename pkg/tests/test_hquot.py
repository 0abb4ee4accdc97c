"""Unit tests for the h-adic finite quotients."""

import numpy as np
import pytest

from simplehom.exceptions import BudgetExceededError, PreconditionError
from simplehom.hquot import (
    commutator_containment,
    distinct_psi_cosets,
    element_order_mod,
    expected_depth,
    filtration_elements,
    filtration_exponent_check,
    find_psi_N,
    finite_image,
    image_bfs,
    in_filtration,
    p_power_order,
    psi_power_depth_law,
    reduce_rep,
    words_mod,
)
from simplehom.pantsrep import PHI, eval_word
from simplehom.projmat import ProjectiveMatrix
from simplehom.words import commutator, parse_word, random_word


@pytest.fixture(scope="module")
def psi7():
    from simplehom.pantsrep import pants_rep

    return find_psi_N(pants_rep(7))


class TestFiniteImage:
    """Tests for BFS enumeration of G_k."""

    def test_mod_h_image_is_trivial(self, rep7):
        """Every generator is scalar modulo h."""
        img = finite_image(rep7, 0, cap=100)
        assert img.order == 1
        assert img.permutations == {"a": (0,), "b": (0,)}

    def test_first_level(self, rep7):
        """G_1 has order 49 at p = 7."""
        img = finite_image(rep7, 1, cap=10_000)
        assert img.order == 49
        assert img.is_p_group()
        assert img.word_order(parse_word("a")) == 7
        assert img.trace_word(parse_word("a^7")) == img.identity_index

    def test_permutations_are_bijections(self, rep7):
        img = finite_image(rep7, 1, cap=10_000)
        for perm in img.permutations.values():
            assert sorted(perm) == list(range(img.order))

    def test_budget(self, rep7):
        """Exceeding the cap reports how far the search got."""
        with pytest.raises(BudgetExceededError) as exc_info:
            image_bfs(reduce_rep(rep7, 1), cap=10)
        assert exc_info.value.partial_count == 10

    def test_negative_level(self, rep7):
        with pytest.raises(PreconditionError):
            reduce_rep(rep7, -1)


class TestFiltration:
    """Tests for orders and membership in R_k."""

    def test_element_orders(self, rep7):
        """a is trivial in G_0 and of order 7 in G_1."""
        a = parse_word("a")
        assert element_order_mod(rep7, a, 0) == 1
        assert element_order_mod(rep7, a, 1) == 7

    def test_membership(self, rep7):
        """a lies in R_0 but not R_1; a^7 is scalar."""
        a = parse_word("a")
        assert in_filtration(rep7, a, 0)
        assert not in_filtration(rep7, a, 1)
        assert in_filtration(rep7, a ** 7, 50)

    def test_nesting(self, rep7, rng):
        """R_(k+1) is contained in R_k."""
        for _ in range(40):
            u = random_word(rng, int(rng.integers(1, 7)))
            v = random_word(rng, int(rng.integers(1, 7)))
            w = commutator(u, v) if rng.integers(2) else u
            for k in range(6):
                if in_filtration(rep7, w, k + 1):
                    assert in_filtration(rep7, w, k)

    def test_separation(self, rep7, rng):
        """A non-scalar image leaves R_k for some k <= 4(p - 1)."""
        for _ in range(40):
            w = random_word(rng, int(rng.integers(1, 9)))
            if eval_word(rep7, w).is_scalar():
                continue
            assert any(not in_filtration(rep7, w, k) for k in range(4 * 6 + 1)), str(w)

    def test_p_power_order_of_identity(self):
        assert p_power_order(ProjectiveMatrix.identity(7, 3), 3) == 1

    def test_expected_depth(self):
        """N + 1 + (p - 1) v_p(k)."""
        assert expected_depth(7, 6, 3) == 7
        assert expected_depth(7, 6, 7) == 13
        assert expected_depth(7, 6, 98) == 19


class TestPsi:
    """Tests for psi, N and the depth law."""

    def test_find_psi(self, psi7):
        """N0 = 1, m0 = 7 and N >= 6 at p = 7."""
        assert psi7.n0 == 1
        assert psi7.m0 == 7
        assert psi7.N >= 6
        assert psi7.psi == PHI ** 7
        assert psi7.e == psi7.N // 6 + 1
        assert psi7.bound == 7 ** psi7.e

    def test_depth_law(self, rep7, psi7):
        """depth(psi^k) follows the valuation of k."""
        report = psi_power_depth_law(rep7, psi7, max_checks=20)
        assert report.checked == 20
        assert report.depths[0] == (1, psi7.N + 1)
        assert report.to_json()["below_2N_plus_2"] is True

    def test_distinct_cosets(self, rep7, psi7):
        """Powers of psi give at least p^e classes modulo R_(2N+1)."""
        assert distinct_psi_cosets(rep7, psi7) >= psi7.bound

    def test_psi_to_json(self, psi7):
        data = psi7.to_json()
        assert set(data) == {"phi", "N0", "m0", "psi", "N", "e", "bound"}
        assert data["phi"] == "a B"


class TestCommutators:
    """Tests for [R_N, R_N] inside R_(2N+1)."""

    def test_commutators_of_first_level(self, rep7):
        """Commutators of R_1 elements have depth at least 4."""
        rng = np.random.default_rng(3)
        elements = filtration_elements(rep7, 1, 6, rng)
        assert all(m.level == 5 for m in elements)
        report = commutator_containment(elements, 1, 10, rng)
        assert report.level == 5
        assert report.min_depth >= 4

    def test_wrong_level_rejected(self, rep7):
        """Elements must be reduced modulo h^(2N+3)."""
        elements = words_mod(rep7, [parse_word("a^7"), parse_word("b^7")], 3)
        with pytest.raises(PreconditionError):
            commutator_containment(elements, 1, 1, np.random.default_rng(0))

    def test_too_few_elements(self, rep7):
        with pytest.raises(PreconditionError):
            commutator_containment([], 1, 1, np.random.default_rng(0))

    def test_p_power_law(self, rep7):
        """p-th powers raise the depth by exactly p - 1."""
        found = filtration_exponent_check(rep7, np.random.default_rng(11), levels=(1, 2), per_level=2)
        assert set(found) == {1, 2}
