"""
2x2 matrices over Z[zeta_p] and its h-adic quotients, up to unit scalars.

Matrices carry their ring implicitly: entries are either all
CyclotomicInteger (the exact ring) or all HQuotElement at one level.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import totient

from .cyclotomic import (
    INFINITE,
    CyclotomicInteger,
    HQuotElement,
    Valuation,
    embed,
    exact_divide,
    from_laurent,
    is_unit,
    reduce_mod_hm,
    v_h,
    zeta_exponent,
    zeta_pow,
)
from .exceptions import InvalidParameterError, InvariantViolation, SingularMatrixError


Entry = Union[CyclotomicInteger, HQuotElement]

# eigenvalue-ratio margins: above OFF_CIRCLE is a witness, below ON_CIRCLE is finite
OFF_CIRCLE = 1e-6
ON_CIRCLE = 1e-9


@dataclass(frozen=True)
class ProjectiveMatrix:
    """The matrix [[a, b], [c, d]], considered up to unit scalars where noted."""

    a: Entry
    b: Entry
    c: Entry
    d: Entry

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def level(self) -> Optional[int]:
        """Quotient level m, or None for the exact ring."""
        return self.a.m if isinstance(self.a, HQuotElement) else None

    @property
    def is_exact(self) -> bool:
        return self.level is None

    def entries(self) -> Tuple[Entry, Entry, Entry, Entry]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def identity(cls, p: int, level: Optional[int] = None) -> "ProjectiveMatrix":
        if level is None:
            one, zero = CyclotomicInteger.one(p), CyclotomicInteger.zero(p)
        else:
            one, zero = HQuotElement.one(p, level), HQuotElement.zero(p, level)
        return cls(one, zero, zero, one)

    @classmethod
    def from_laurent(
        cls, p: int, rows: Sequence[Sequence[Mapping[int, int]]]
    ) -> "ProjectiveMatrix":
        """Build an exact matrix whose entries are Laurent polynomials in zeta."""
        (a, b), (c, d) = rows
        return cls(*(from_laurent(p, t) for t in (a, b, c, d)))

    def _check(self, other: "ProjectiveMatrix") -> None:
        if self.p != other.p or self.level != other.level:
            raise InvalidParameterError(
                "matrices live over different rings",
                context={"left": (self.p, self.level), "right": (other.p, other.level)}
            )

    def __mul__(self, other: "ProjectiveMatrix") -> "ProjectiveMatrix":
        self._check(other)
        return ProjectiveMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int) -> "ProjectiveMatrix":
        if n < 0:
            return inverse(self) ** (-n)
        result = ProjectiveMatrix.identity(self.p, self.level)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, u: Entry) -> "ProjectiveMatrix":
        return ProjectiveMatrix(u * self.a, u * self.b, u * self.c, u * self.d)

    def det(self) -> Entry:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Entry:
        return self.a + self.d

    def adjugate(self) -> "ProjectiveMatrix":
        return ProjectiveMatrix(self.d, -self.b, -self.c, self.a)

    def is_scalar(self) -> bool:
        """Exact test for M = u*I."""
        return self.b.is_zero() and self.c.is_zero() and (self.a - self.d).is_zero()

    def reduce(self, level: int) -> "ProjectiveMatrix":
        """Entrywise reduction of an exact matrix modulo h^level."""
        if not self.is_exact:
            raise InvalidParameterError("matrix is already reduced", context={"level": self.level})
        return ProjectiveMatrix(*(reduce_mod_hm(e, level) for e in self.entries()))  # type: ignore[arg-type]

    def key(self) -> Tuple[Tuple[int, ...], ...]:
        """Hashable coordinates of the four entries."""
        return tuple(e.rep if isinstance(e, HQuotElement) else e.coeffs for e in self.entries())

    def to_json(self) -> List[List[object]]:
        if self.is_exact:
            return [[self.a.to_json(), self.b.to_json()], [self.c.to_json(), self.d.to_json()]]  # type: ignore[union-attr]
        return [[list(self.a.rep), list(self.b.rep)], [list(self.c.rep), list(self.d.rep)]]  # type: ignore[union-attr]


def mul(m: ProjectiveMatrix, n: ProjectiveMatrix) -> ProjectiveMatrix:
    return m * n


def det(m: ProjectiveMatrix) -> Entry:
    return m.det()


def trace(m: ProjectiveMatrix) -> Entry:
    return m.trace()


def adj_inverse(m: ProjectiveMatrix) -> ProjectiveMatrix:
    """Adjugate of m; adj(m)*m = det(m)*I, so it is the projective inverse."""
    if not m.is_exact and not m.det().is_unit():  # type: ignore[union-attr]
        raise SingularMatrixError(
            "determinant is not a unit in the quotient ring",
            context={"p": m.p, "level": m.level}
        )
    return m.adjugate()


def inverse(m: ProjectiveMatrix) -> ProjectiveMatrix:
    """
    Honest inverse of m.

    Over the exact ring the determinant must be +-zeta^k; over a quotient
    ring it must be a unit.
    """
    dt = m.det()
    if m.is_exact:
        form = zeta_exponent(dt)  # type: ignore[arg-type]
        if form is None:
            raise SingularMatrixError(
                "determinant is not a signed power of zeta",
                context={"p": m.p, "det": str(dt)}
            )
        sign, k = form
        return m.adjugate().scale(zeta_pow(m.p, -k) * sign)
    if not dt.is_unit():  # type: ignore[union-attr]
        raise SingularMatrixError(
            "determinant is not a unit in the quotient ring",
            context={"p": m.p, "level": m.level}
        )
    return m.adjugate().scale(dt.inverse())  # type: ignore[union-attr]


def commutator(u: ProjectiveMatrix, v: ProjectiveMatrix) -> ProjectiveMatrix:
    return u * v * inverse(u) * inverse(v)


def proj_equal(m: ProjectiveMatrix, n: ProjectiveMatrix) -> bool:
    """True iff m = u*n for a unit u of the underlying ring."""
    m._check(n)
    if not m.is_exact:
        return proj_canonical(m) == proj_canonical(n)
    pairs = list(zip(m.entries(), n.entries()))
    for i in range(4):
        for j in range(i + 1, 4):
            (x1, y1), (x2, y2) = pairs[i], pairs[j]
            if not (x1 * y2 - x2 * y1).is_zero():
                return False
    # proportional; the factor itself must be a unit
    for x, y in pairs:
        if x.is_zero() != y.is_zero():
            return False
        if not y.is_zero():
            u = exact_divide(x, y)  # type: ignore[arg-type]
            return u is not None and is_unit(u)
    return True


def proj_canonical(m: ProjectiveMatrix) -> ProjectiveMatrix:
    """Scale a quotient-ring matrix so its first unit entry (row-major) is 1."""
    if m.is_exact:
        raise InvalidParameterError("canonical forms are defined over quotient rings only")
    for e in m.entries():
        if e.is_unit():  # type: ignore[union-attr]
            return m.scale(e.inverse())  # type: ignore[union-attr]
    raise InvariantViolation(
        "no unit entry in a matrix with unit determinant",
        context={"p": m.p, "level": m.level, "key": m.key()}
    )


def _valuation(e: Entry) -> Valuation:
    return e.valuation() if isinstance(e, HQuotElement) else v_h(e)


def proj_h_depth(m: ProjectiveMatrix) -> Valuation:
    """
    Filtration depth of m: min of v_h over b, c and a - d.

    Over a quotient at level L the value is exact below L and INFINITE
    from L on; g lies in R_k iff depth >= k + 1.
    """
    return min(_valuation(m.b), _valuation(m.c), _valuation(m.a - m.d))


@lru_cache(maxsize=None)
def order_bound(p: int) -> int:
    """Largest n with phi(n) <= 2(p - 1)."""
    limit = 2 * (p - 1)
    return max(n for n in range(1, 4 * (p - 1) ** 2 + 1) if totient(n) <= limit)


def proj_order(m: ProjectiveMatrix, limit: Optional[int] = None) -> Valuation:
    """Smallest n <= order_bound(p) with m^n scalar, else INFINITE."""
    if not m.is_exact:
        raise InvalidParameterError("projective order is decided over the exact ring")
    bound = limit if limit is not None else order_bound(m.p)
    current = m
    for n in range(1, bound + 1):
        if current.is_scalar():
            return n
        current = current * m
    return INFINITE


def embed_matrix(m: ProjectiveMatrix, j: int) -> np.ndarray:
    """Complex 2x2 array of m under zeta -> exp(2*pi*i*j/p)."""
    if not m.is_exact:
        raise InvalidParameterError("only exact matrices can be embedded")
    return np.array(
        [[embed(m.a, j), embed(m.b, j)], [embed(m.c, j), embed(m.d, j)]],  # type: ignore[arg-type]
        dtype=complex,
    )


@dataclass(frozen=True)
class SpectralCertificate:
    """Numeric eigenvalue data of an embedded matrix."""

    j: int
    abs_eigenvalues: Tuple[float, float]
    abs_trace: float
    margin: float

    @property
    def off_circle(self) -> bool:
        return self.margin > OFF_CIRCLE

    @property
    def on_circle(self) -> bool:
        return self.margin < ON_CIRCLE

    def to_json(self) -> Dict[str, object]:
        return {
            "j": self.j,
            "abs_eigenvalues": list(self.abs_eigenvalues),
            "abs_trace": self.abs_trace,
            "margin": self.margin,
        }


def spectral_certificate(m: ProjectiveMatrix, j: int) -> SpectralCertificate:
    """Eigenvalue moduli of embed(m, j) and the margin ||l1/l2| - 1|."""
    numeric = embed_matrix(m, j)
    eigs = sorted(np.linalg.eigvals(numeric), key=abs, reverse=True)
    l1, l2 = abs(eigs[0]), abs(eigs[1])
    # trace of the determinant-one normalization
    scale = abs(np.sqrt(np.linalg.det(numeric)))
    abs_trace = float(abs(np.trace(numeric)) / scale)
    return SpectralCertificate(
        j=j,
        abs_eigenvalues=(float(l1), float(l2)),
        abs_trace=abs_trace,
        margin=float(abs(l1 / l2 - 1.0)),
    )
