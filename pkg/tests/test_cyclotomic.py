"""Unit tests for cyclotomic arithmetic and h-adic quotients."""

import cmath
import math

import pytest

from simplehom.cyclotomic import (
    INFINITE,
    CyclotomicInteger,
    HQuotElement,
    check_prime,
    cyc_reduce,
    default_embedding,
    div_h_exact,
    embed,
    exact_divide,
    from_laurent,
    galois,
    h_element,
    hm_basis,
    is_unit,
    norm,
    reduce_mod_hm,
    residues,
    v_h,
    valuation_to_json,
    zeta_exponent,
    zeta_pow,
)
from simplehom.exceptions import InvalidParameterError, NonDivisibleError


class TestCyclotomicInteger:
    """Tests for exact arithmetic in Z[zeta_p]."""

    def test_zeta_has_order_p(self):
        """zeta^p folds back to 1."""
        assert zeta_pow(7, 7) == CyclotomicInteger.one(7)
        assert zeta_pow(7, -1) == zeta_pow(7, 6)

    def test_sum_of_powers_vanishes(self):
        """1 + zeta + ... + zeta^(p-1) is zero."""
        total = CyclotomicInteger.zero(5)
        for i in range(5):
            total = total + zeta_pow(5, i)
        assert total.is_zero()

    def test_ring_operations(self):
        """Products distribute and integers coerce."""
        z = CyclotomicInteger.zeta(7)
        x = from_laurent(7, {0: 2, 3: -1})
        assert x * (z + 1) == x * z + x
        assert 3 * z == z + z + z
        assert (1 - z) == h_element(7)
        assert z ** 3 == zeta_pow(7, 3)

    def test_from_laurent_negative_exponents(self):
        """Negative exponents are read modulo p."""
        assert from_laurent(7, {-1: 1}) == zeta_pow(7, 6)
        assert from_laurent(7, {-8: 2}) == zeta_pow(7, 6) * 2

    def test_mismatched_primes(self):
        """Elements of different rings do not mix."""
        with pytest.raises(InvalidParameterError):
            CyclotomicInteger.one(5) + CyclotomicInteger.one(7)

    def test_check_prime(self):
        """Only odd primes >= 5 are accepted."""
        assert check_prime(11) == 11
        for bad in (3, 9, 1, 25):
            with pytest.raises(InvalidParameterError):
                check_prime(bad)

    def test_zeta_exponent(self):
        """Signed powers of zeta are recognized."""
        assert zeta_exponent(-zeta_pow(7, 3)) == (-1, 3)
        assert zeta_exponent(CyclotomicInteger.one(7)) == (1, 0)
        assert zeta_exponent(h_element(7)) is None

    def test_galois_and_norm(self):
        """Norms of zeta and h are 1 and p."""
        assert galois(zeta_pow(7, 1), 2) == zeta_pow(7, 2)
        assert norm(zeta_pow(7, 1)) == 1
        assert norm(h_element(7)) == 7
        assert norm(CyclotomicInteger.from_int(5, 3)) == 3 ** 4

    def test_exact_divide(self):
        """Exact division succeeds only for divisors."""
        x = from_laurent(7, {0: 3, 2: -1, 5: 4})
        h = h_element(7)
        assert exact_divide(x * h, h) == x
        assert exact_divide(CyclotomicInteger.one(7), h) is None

    def test_is_unit(self):
        """Cyclotomic units have norm +-1; h does not."""
        assert is_unit(zeta_pow(7, 4))
        assert is_unit(CyclotomicInteger.one(7) + zeta_pow(7, 1))
        assert not is_unit(h_element(7))
        assert not is_unit(CyclotomicInteger.zero(7))


class TestValuation:
    """Tests for the h-adic valuation."""

    def test_valuation_of_h_powers(self):
        """v_h(h^n) = n."""
        h = h_element(7)
        for n in range(5):
            assert v_h(h ** n) == n

    def test_valuation_of_p(self):
        """v_h(p) = p - 1 with a unit cofactor."""
        for p in (5, 7, 11):
            x = CyclotomicInteger.from_int(p, p)
            assert v_h(x) == p - 1
            assert div_h_exact(x, p - 1).is_h_unit()

    def test_integers_prime_to_p(self):
        """Integers prime to p are h-adic units."""
        for k in (1, 2, 3, 6, 8, 1000):
            assert v_h(CyclotomicInteger.from_int(7, k)) == 0

    def test_zero_has_infinite_valuation(self):
        """v_h(0) is INFINITE."""
        assert v_h(CyclotomicInteger.zero(7)) is INFINITE
        assert valuation_to_json(INFINITE) == "infinite"
        assert INFINITE > 10 ** 9

    def test_div_h_exact_too_far(self):
        """Dividing past the valuation fails."""
        with pytest.raises(NonDivisibleError):
            div_h_exact(h_element(7) ** 2, 3)


class TestQuotient:
    """Tests for Z[zeta_p]/(h^m)."""

    def test_residue_count(self):
        """The quotient has exactly p^m elements."""
        assert len(list(residues(5, 1))) == 5
        assert len(list(residues(5, 3))) == 125

    def test_basis_determinant(self):
        """The echelon basis of h^m has index p^m."""
        basis = hm_basis(7, 4)
        assert math.prod(row[i] for i, row in enumerate(basis)) == 7 ** 4

    def test_reduction_is_canonical(self):
        """x and x + h^m reduce to the same residue."""
        x = from_laurent(7, {0: 5, 1: -3, 4: 9})
        hm = h_element(7) ** 3
        assert reduce_mod_hm(x, 3) == reduce_mod_hm(x + hm * zeta_pow(7, 2), 3)
        assert reduce_mod_hm(hm, 3).is_zero()

    def test_inverse(self):
        """Units of the quotient invert."""
        one = HQuotElement.one(5, 2)
        for r in residues(5, 2):
            if r.is_unit():
                assert r * r.inverse() == one

    def test_non_unit_has_no_inverse(self):
        """Multiples of h are not invertible."""
        with pytest.raises(InvalidParameterError):
            reduce_mod_hm(h_element(5), 2).inverse()

    def test_quotient_valuation(self):
        """Valuations below the level survive reduction."""
        h = h_element(7)
        assert reduce_mod_hm(h ** 2, 5).valuation() == 2
        assert reduce_mod_hm(h ** 6, 5).valuation() is INFINITE


class TestEmbedding:
    """Tests for complex embeddings."""

    def test_embed_zeta(self):
        """zeta maps to exp(2 pi i j / p)."""
        value = embed(zeta_pow(7, 1), 1)
        assert abs(value - cmath.exp(2j * math.pi / 7)) < 1e-12

    def test_embed_requires_coprime_index(self):
        """j must be prime to p."""
        with pytest.raises(InvalidParameterError):
            embed(zeta_pow(7, 1), 14)

    def test_default_embedding(self):
        """The embedding closest to A = exp(i pi / 6)."""
        assert default_embedding(5) == 1
        assert default_embedding(7) == 1
        j = default_embedding(13)
        assert j % 2 == 1 and math.gcd(j, 13) == 1


def random_element(rng, p, bound=100, max_h_power=4):
    """A random element of Z[zeta_p] times a random power of h, never zero."""
    while True:
        x = cyc_reduce(p, [int(c) for c in rng.integers(-bound, bound + 1, size=p)])
        x = x * h_element(p) ** int(rng.integers(0, max_h_power + 1))
        if not x.is_zero():
            return x


class TestRingProperties:
    """Randomized checks of valuation, reduction and embedding laws."""

    def test_valuation_is_multiplicative(self, rng):
        """v_h(xy) = v_h(x) + v_h(y)."""
        for _ in range(100):
            x, y = random_element(rng, 7), random_element(rng, 7)
            assert v_h(x * y) == v_h(x) + v_h(y)

    def test_valuation_is_ultrametric(self, rng):
        """v_h(x + y) >= min(v_h(x), v_h(y))."""
        for _ in range(100):
            x, y = random_element(rng, 7), random_element(rng, 7)
            assert v_h(x + y) >= min(v_h(x), v_h(y))

    @pytest.mark.parametrize("m", range(1, 7))
    def test_reduction_is_a_ring_homomorphism(self, rng, m):
        """Reduction modulo h^m respects sums and products."""
        for _ in range(20):
            x, y = random_element(rng, 7), random_element(rng, 7)
            assert reduce_mod_hm(x + y, m) == reduce_mod_hm(x, m) + reduce_mod_hm(y, m)
            assert reduce_mod_hm(x * y, m) == reduce_mod_hm(x, m) * reduce_mod_hm(y, m)

    def test_embedding_respects_ring_operations(self, rng):
        """Sums and products embed to within 1e-9."""
        for _ in range(50):
            x = random_element(rng, 7, max_h_power=0)
            y = random_element(rng, 7, max_h_power=0)
            for j in (1, 2, 3):
                assert abs(embed(x + y, j) - (embed(x, j) + embed(y, j))) < 1e-9
                assert abs(embed(x * y, j) - embed(x, j) * embed(y, j)) < 1e-9

    def test_quotient_negative_powers(self):
        """Negative powers of a unit are powers of its inverse."""
        u = reduce_mod_hm(from_laurent(5, {0: 2, 1: 1}), 3)
        assert u ** -2 == u.inverse() ** 2
        assert u ** -1 * u == HQuotElement.one(5, 3)

    def test_quotient_negative_power_of_non_unit(self):
        """A non-unit has no negative powers."""
        with pytest.raises(InvalidParameterError):
            reduce_mod_hm(h_element(5), 3) ** -1
