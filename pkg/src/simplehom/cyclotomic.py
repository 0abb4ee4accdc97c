"""
Exact arithmetic in the ring of integers Z[zeta_p] and its h-adic quotients.

Elements are stored in the power basis {1, zeta, ..., zeta^(p-2)}; the
relation 1 + zeta + ... + zeta^(p-1) = 0 folds every other power back into
that basis.  The prime h = 1 - zeta generates the unique prime above p, and
Z[zeta_p]/(h^m) has exactly p^m elements.
"""

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from sympy import isprime
from sympy.core.intfunc import igcdex

from .exceptions import InvalidParameterError, NonDivisibleError


Coeffs = Tuple[int, ...]


class _Infinite:
    """Valuation of zero; compares greater than every integer."""

    _instance: Optional["_Infinite"] = None

    def __new__(cls) -> "_Infinite":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __str__(self) -> str:
        return "infinite"

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("INFINITE")

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True

    def __add__(self, other: object) -> "_Infinite":
        return self

    __radd__ = __add__


INFINITE = _Infinite()
Valuation = Union[int, _Infinite]


def valuation_to_json(value: Valuation) -> Union[int, str]:
    """Render a valuation (or order) for JSON output."""
    return "infinite" if value is INFINITE else int(value)


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Validate that p is an odd prime >= 5 and return it."""
    if not isinstance(p, int) or isinstance(p, bool) or p < 5 or not isprime(p):
        raise InvalidParameterError(
            f"p must be an odd prime >= 5, got {p!r}",
            context={"p": p}
        )
    return p


def _fold(p: int, raw: Sequence[int]) -> Coeffs:
    acc = [0] * p
    for e, c in enumerate(raw):
        if c:
            acc[e % p] += c
    top = acc[p - 1]
    return tuple(c - top for c in acc[:p - 1])


def _mul_coeffs(p: int, x: Coeffs, y: Coeffs) -> Coeffs:
    raw = [0] * (2 * p - 3)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                if yj:
                    raw[i + j] += xi * yj
    return _fold(p, raw)


def _div_h_once(p: int, coeffs: Coeffs) -> Optional[Coeffs]:
    """Return y with coeffs = h*y, or None when h does not divide."""
    total = sum(coeffs)
    if total % p:
        return None
    # subtract (total/p) * (1 + t + ... + t^(p-1)) so the polynomial vanishes at t = 1
    c = total // p
    shifted = [a - c for a in coeffs] + [-c]
    out = []
    running = 0
    for a in shifted[:-1]:
        running += a
        out.append(running)
    return tuple(out)


@dataclass(frozen=True)
class CyclotomicInteger:
    """Element of Z[zeta_p] in reduced power-basis coordinates."""

    p: int
    coeffs: Coeffs

    @classmethod
    def zero(cls, p: int) -> "CyclotomicInteger":
        return cls(check_prime(p), (0,) * (p - 1))

    @classmethod
    def one(cls, p: int) -> "CyclotomicInteger":
        return cls.from_int(p, 1)

    @classmethod
    def from_int(cls, p: int, n: int) -> "CyclotomicInteger":
        check_prime(p)
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def zeta(cls, p: int) -> "CyclotomicInteger":
        return zeta_pow(p, 1)

    def _check(self, other: "CyclotomicInteger") -> None:
        if other.p != self.p:
            raise InvalidParameterError(
                f"mismatched primes {self.p} and {other.p}",
                context={"left": self.p, "right": other.p}
            )

    def _coerce(self, other: object) -> "CyclotomicInteger":
        if isinstance(other, CyclotomicInteger):
            self._check(other)
            return other
        if isinstance(other, int):
            return CyclotomicInteger.from_int(self.p, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "CyclotomicInteger":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CyclotomicInteger(self.p, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other: object) -> "CyclotomicInteger":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CyclotomicInteger(self.p, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other: object) -> "CyclotomicInteger":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self) -> "CyclotomicInteger":
        return CyclotomicInteger(self.p, tuple(-a for a in self.coeffs))

    def __mul__(self, other: object) -> "CyclotomicInteger":
        if isinstance(other, int):
            return CyclotomicInteger(self.p, tuple(other * a for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CyclotomicInteger(self.p, _mul_coeffs(self.p, self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CyclotomicInteger":
        return int_pow(self, n)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_h_unit(self) -> bool:
        """True when v_h(self) = 0, i.e. self is a unit modulo h."""
        return sum(self.coeffs) % self.p != 0

    def to_json(self) -> Dict[str, object]:
        return {"p": self.p, "coeffs": [str(c) for c in self.coeffs]}

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "1" if i == 0 else ("z" if i == 1 else f"z^{i}")
            terms.append(f"{c}*{mono}" if c != 1 else mono)
        return " + ".join(terms) if terms else "0"


def cyc_reduce(p: int, raw: Sequence[int]) -> CyclotomicInteger:
    """Canonical element of Z[zeta_p] whose i-th raw coefficient multiplies zeta^i."""
    check_prime(p)
    return CyclotomicInteger(p, _fold(p, raw))


def from_laurent(p: int, terms: Mapping[int, int]) -> CyclotomicInteger:
    """Element sum(c * zeta^e) for a Laurent polynomial {e: c} in zeta."""
    check_prime(p)
    raw = [0] * p
    for e, c in terms.items():
        raw[e % p] += c
    return CyclotomicInteger(p, _fold(p, raw))


def add(x: CyclotomicInteger, y: CyclotomicInteger) -> CyclotomicInteger:
    return x + y


def mul(x: CyclotomicInteger, y: CyclotomicInteger) -> CyclotomicInteger:
    return x * y


def neg(x: CyclotomicInteger) -> CyclotomicInteger:
    return -x


def int_pow(x: CyclotomicInteger, n: int) -> CyclotomicInteger:
    """x**n for n >= 0 by square-and-multiply."""
    if n < 0:
        raise InvalidParameterError(f"negative exponent {n}", context={"n": n})
    result = CyclotomicInteger.one(x.p)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def zeta_pow(p: int, e: int) -> CyclotomicInteger:
    """zeta^e for any integer e (zeta is a unit)."""
    check_prime(p)
    raw = [0] * p
    raw[e % p] = 1
    return CyclotomicInteger(p, _fold(p, raw))


def h_element(p: int) -> CyclotomicInteger:
    """The prime h = 1 - zeta."""
    return CyclotomicInteger.one(p) - zeta_pow(p, 1)


def zeta_exponent(x: CyclotomicInteger) -> Optional[Tuple[int, int]]:
    """Return (sign, k) with x = sign * zeta^k, or None when x is not of that form."""
    for k in range(x.p):
        z = zeta_pow(x.p, k)
        if z.coeffs == x.coeffs:
            return 1, k
        if tuple(-c for c in z.coeffs) == x.coeffs:
            return -1, k
    return None


def galois(x: CyclotomicInteger, k: int) -> CyclotomicInteger:
    """Image of x under the automorphism zeta -> zeta^k (gcd(k, p) = 1)."""
    if k % x.p == 0:
        raise InvalidParameterError(f"{k} is not coprime to {x.p}", context={"k": k})
    raw = [0] * x.p
    for i, c in enumerate(x.coeffs):
        raw[(i * k) % x.p] += c
    return CyclotomicInteger(x.p, _fold(x.p, raw))


def norm(x: CyclotomicInteger) -> int:
    """Field norm of x as a rational integer."""
    prod = x
    for k in range(2, x.p):
        prod = prod * galois(x, k)
    return prod.coeffs[0]


def exact_divide(x: CyclotomicInteger, y: CyclotomicInteger) -> Optional[CyclotomicInteger]:
    """Return q with x = q*y in Z[zeta_p], or None when y does not divide x."""
    if y.is_zero():
        raise InvalidParameterError("division by zero")
    cofactor = CyclotomicInteger.one(y.p)
    for k in range(2, y.p):
        cofactor = cofactor * galois(y, k)
    n = (y * cofactor).coeffs[0]
    numerator = x * cofactor
    if any(c % n for c in numerator.coeffs):
        return None
    return CyclotomicInteger(x.p, tuple(c // n for c in numerator.coeffs))


def is_unit(x: CyclotomicInteger) -> bool:
    return not x.is_zero() and abs(norm(x)) == 1


def div_h_exact(x: CyclotomicInteger, m: int) -> CyclotomicInteger:
    """Return y with x = h^m * y; raise NonDivisibleError when v_h(x) < m."""
    if m < 0:
        raise InvalidParameterError(f"negative power {m}", context={"m": m})
    coeffs = x.coeffs
    for step in range(m):
        nxt = _div_h_once(x.p, coeffs)
        if nxt is None:
            raise NonDivisibleError(
                f"h^{m} does not divide the element (valuation {step})",
                context={"p": x.p, "m": m, "valuation": step}
            )
        coeffs = nxt
    return CyclotomicInteger(x.p, coeffs)


def v_h(x: CyclotomicInteger) -> Valuation:
    """h-adic valuation by repeated exact division."""
    if x.is_zero():
        return INFINITE
    count = 0
    coeffs: Optional[Coeffs] = x.coeffs
    while True:
        coeffs = _div_h_once(x.p, coeffs)  # type: ignore[arg-type]
        if coeffs is None:
            return count
        count += 1


# ---------------------------------------------------------------------------
# Quotients Z[zeta_p]/(h^m)
# ---------------------------------------------------------------------------

def _echelon(rows: Sequence[Sequence[int]]) -> Tuple[Coeffs, ...]:
    """Upper-triangular basis with positive pivots spanning the same lattice."""
    basis = [list(r) for r in rows]
    n = len(basis)
    for col in range(n):
        for r in range(col + 1, n):
            a, b = basis[col][col], basis[r][col]
            if b == 0:
                continue
            s, t, g = igcdex(a, b)
            u, v = a // g, b // g
            top = [s * x + t * y for x, y in zip(basis[col], basis[r])]
            bottom = [v * x - u * y for x, y in zip(basis[col], basis[r])]
            basis[col], basis[r] = top, bottom
        if basis[col][col] < 0:
            basis[col] = [-x for x in basis[col]]
        if basis[col][col] == 0:
            raise InvalidParameterError("lattice is not of full rank")
    return tuple(tuple(r) for r in basis)


@lru_cache(maxsize=None)
def hm_basis(p: int, m: int) -> Tuple[Coeffs, ...]:
    """Echelon basis of the sublattice h^m * Z[zeta_p] in power-basis coordinates."""
    check_prime(p)
    if m < 1:
        raise InvalidParameterError(f"level must be >= 1, got {m}", context={"m": m})
    hm = int_pow(h_element(p), m)
    rows = [(hm * zeta_pow(p, i)).coeffs for i in range(p - 1)]
    return _echelon(rows)


def _reduce_coords(p: int, m: int, coeffs: Sequence[int]) -> Coeffs:
    v = list(coeffs)
    for i, row in enumerate(hm_basis(p, m)):
        q = v[i] // row[i]
        if q:
            for j in range(i, len(v)):
                v[j] -= q * row[j]
    return tuple(v)


@dataclass(frozen=True)
class HQuotElement:
    """Canonical residue of Z[zeta_p] modulo h^m."""

    p: int
    m: int
    rep: Coeffs

    def _check(self, other: "HQuotElement") -> None:
        if other.p != self.p or other.m != self.m:
            raise InvalidParameterError(
                "mismatched quotient rings",
                context={"left": (self.p, self.m), "right": (other.p, other.m)}
            )

    def __add__(self, other: "HQuotElement") -> "HQuotElement":
        self._check(other)
        return HQuotElement(self.p, self.m, _reduce_coords(
            self.p, self.m, [a + b for a, b in zip(self.rep, other.rep)]))

    def __sub__(self, other: "HQuotElement") -> "HQuotElement":
        self._check(other)
        return HQuotElement(self.p, self.m, _reduce_coords(
            self.p, self.m, [a - b for a, b in zip(self.rep, other.rep)]))

    def __neg__(self) -> "HQuotElement":
        return HQuotElement(self.p, self.m, _reduce_coords(self.p, self.m, [-a for a in self.rep]))

    def __mul__(self, other: "HQuotElement") -> "HQuotElement":
        self._check(other)
        return HQuotElement(self.p, self.m, _reduce_coords(
            self.p, self.m, _mul_coeffs(self.p, self.rep, other.rep)))

    def __pow__(self, n: int) -> "HQuotElement":
        """Negative exponents go through the inverse, which needs a unit."""
        if n < 0:
            return self.inverse() ** -n
        result = HQuotElement.one(self.p, self.m)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    @classmethod
    def one(cls, p: int, m: int) -> "HQuotElement":
        return reduce_mod_hm(CyclotomicInteger.one(p), m)

    @classmethod
    def zero(cls, p: int, m: int) -> "HQuotElement":
        return cls(p, m, (0,) * (p - 1))

    def is_zero(self) -> bool:
        return not any(self.rep)

    def is_unit(self) -> bool:
        return sum(self.rep) % self.p != 0

    def lift(self) -> CyclotomicInteger:
        return CyclotomicInteger(self.p, self.rep)

    def valuation(self) -> Valuation:
        """v_h of the residue: INFINITE for zero, otherwise a value below m."""
        return v_h(self.lift())

    def inverse(self) -> "HQuotElement":
        if not self.is_unit():
            raise InvalidParameterError(
                "residue is not a unit modulo h",
                context={"p": self.p, "m": self.m, "rep": self.rep}
            )
        return HQuotElement(self.p, self.m, _inverse_rep(self.p, self.m, self.rep))


@lru_cache(maxsize=65536)
def _inverse_rep(p: int, m: int, rep: Coeffs) -> Coeffs:
    # the unit group of Z[zeta_p]/(h^m) has order (p - 1) * p^(m - 1)
    exponent = (p - 1) * p ** (m - 1) - 1
    return (HQuotElement(p, m, rep) ** exponent).rep


def reduce_mod_hm(x: CyclotomicInteger, m: int) -> HQuotElement:
    """Canonical residue of x modulo h^m."""
    return HQuotElement(x.p, m, _reduce_coords(x.p, m, x.coeffs))


def residues(p: int, m: int) -> Iterator[HQuotElement]:
    """Enumerate the p^m canonical residues of Z[zeta_p]/(h^m)."""
    diag = [row[i] for i, row in enumerate(hm_basis(p, m))]
    for rep in itertools.product(*(range(d) for d in diag)):
        yield HQuotElement(p, m, tuple(rep))


# ---------------------------------------------------------------------------
# Complex embeddings
# ---------------------------------------------------------------------------

def embed(x: CyclotomicInteger, j: int) -> complex:
    """Evaluate x at zeta = exp(2*pi*i*j/p), summing in coefficient order."""
    if math.gcd(j, x.p) != 1:
        raise InvalidParameterError(
            f"embedding index {j} is not coprime to {x.p}",
            context={"j": j, "p": x.p}
        )
    total = 0j
    for i, c in enumerate(x.coeffs):
        if c:
            total += c * cmath.exp(2j * math.pi * ((i * j) % x.p) / x.p)
    return total


def default_embedding(p: int) -> int:
    """Odd j in [1, 2p) coprime to p with exp(i*pi*j/p) closest to exp(i*pi/6)."""
    check_prime(p)
    target = cmath.exp(1j * math.pi / 6)
    candidates = [j for j in range(1, 2 * p, 2) if j % p]
    return min(candidates, key=lambda j: (abs(cmath.exp(1j * math.pi * j / p) - target), j))


def evaluate_laurent(terms: Mapping[int, int], q: complex) -> complex:
    """Evaluate sum(c * q^e) at a nonzero complex number."""
    total = 0j
    for e in sorted(terms):
        total += terms[e] * q ** e
    return total
