"""
The quantum representation of the pair-of-pants group F(a, b).

Generator images are the displayed matrices of the SO(3) theory with every
even power A^(2k) rewritten as zeta^k, so all arithmetic stays in Z[zeta_p].
"""

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cyclotomic import (
    INFINITE,
    CyclotomicInteger,
    check_prime,
    default_embedding,
    embed,
    evaluate_laurent,
    from_laurent,
    valuation_to_json,
    zeta_exponent,
)
from .exceptions import ConventionError, InvalidParameterError, InvariantViolation, VerificationFailure
from .logging import get_logger
from .projmat import ProjectiveMatrix, inverse, proj_order, spectral_certificate
from .words import GroupWord, random_word


logger = get_logger(__name__)

# Laurent exponents are powers of zeta (A^2 = zeta)
GAMMA1 = (({0: 1}, {-5: 1, -1: -1}), ({}, {-6: 1}))
GAMMA2 = (({-4: 1}, {1: 1, -3: -1}), ({-5: 1, -7: -1}, {0: 1, -4: -1, -6: 1}))
GAMMA3 = (({-4: 1}, {}), ({-1: -1, -3: 1}, {0: 1}))

# tr(rho(a) rho(b)^-1) as a Laurent polynomial in zeta
TRACE_POLYNOMIAL: Dict[int, int] = {6: 1, 2: -1, 0: 2, -2: -1, -6: 1}

# lambda = rho(a) rho(b)^-1 in its published form; the top-left entry carries A^24
PRINTED_LAMBDA = (
    ({12: 1, 2: -1, 0: 2, -2: -1, -4: -1, -6: 1}, {7: -1, 3: 1, 1: -1, -3: 1}),
    ({-5: -1, -7: 1}, {-4: 1}),
)

PHI = GroupWord(("a", "B"))


@dataclass(frozen=True)
class PantsRep:
    """Generator images of rho_p with the embedding index used for numerics."""

    p: int
    j: int
    Ma: ProjectiveMatrix
    Mb: ProjectiveMatrix
    Mc: ProjectiveMatrix

    @cached_property
    def generators(self) -> Dict[str, ProjectiveMatrix]:
        """Images of a, A, b, B; inverses are exact since determinants are powers of zeta."""
        return {
            "a": self.Ma,
            "A": inverse(self.Ma),
            "b": self.Mb,
            "B": inverse(self.Mb),
        }

    @cached_property
    def gamma3(self) -> "Gamma3Result":
        return gamma3_check(self)

    def boundary_words(self) -> Tuple[GroupWord, GroupWord, GroupWord]:
        return (GroupWord(("a",)), GroupWord(("b",)), self.gamma3.word)

    def metadata(self) -> Dict[str, object]:
        return {"p": self.p, "j": self.j, "gamma3": str(self.gamma3.word)}


def pants_rep(p: int, j: Optional[int] = None) -> PantsRep:
    """Construct rho_p at embedding index j (default: closest to A = exp(i*pi/6))."""
    check_prime(p)
    if j is None:
        j = default_embedding(p)
    if math.gcd(j, p) != 1:
        raise InvalidParameterError(
            f"embedding index {j} is not coprime to {p}", context={"p": p, "j": j}
        )
    return PantsRep(
        p=p,
        j=j,
        Ma=ProjectiveMatrix.from_laurent(p, GAMMA1),
        Mb=ProjectiveMatrix.from_laurent(p, GAMMA2),
        Mc=ProjectiveMatrix.from_laurent(p, GAMMA3),
    )


def eval_word(rep: PantsRep, w: GroupWord) -> ProjectiveMatrix:
    """Product of generator images in word order."""
    result = ProjectiveMatrix.identity(rep.p)
    gens = rep.generators
    for x in w:
        result = result * gens[x]
    return result


def eval_word_mod(rep: PantsRep, w: GroupWord, level: int) -> ProjectiveMatrix:
    """Word evaluation carried out modulo h^level."""
    gens = reduced_generators(rep, level)
    result = ProjectiveMatrix.identity(rep.p, level)
    for x in w:
        result = result * gens[x]
    return result


@lru_cache(maxsize=64)
def reduced_generators(rep: PantsRep, level: int) -> Dict[str, ProjectiveMatrix]:
    """Images of a, A, b, B modulo h^level (not canonicalized)."""
    return {x: m.reduce(level) for x, m in rep.generators.items()}


def is_simple(w: GroupWord) -> bool:
    """True iff w is conjugate to a power of a, b or ab (boundary-parallel or trivial)."""
    c = w.cyclic_reduce().letters
    if not c:
        return True
    if set(c) <= {"a", "A"} or set(c) <= {"b", "B"}:
        return True
    if len(c) % 2:
        return False
    n = len(c) // 2
    return c in {("a", "b") * n, ("b", "a") * n, ("A", "B") * n, ("B", "A") * n}


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceIdentity:
    computed: CyclotomicInteger
    expected: CyclotomicInteger

    @property
    def holds(self) -> bool:
        return self.computed == self.expected


def trace_identity(rep: PantsRep) -> TraceIdentity:
    """Compare tr(rho(a) rho(b)^-1) with the closed-form polynomial."""
    computed = eval_word(rep, PHI).trace()
    return TraceIdentity(computed=computed, expected=from_laurent(rep.p, TRACE_POLYNOMIAL))  # type: ignore[arg-type]


def trace_limit(a: complex = complex(np.exp(1j * np.pi / 6))) -> complex:
    """Trace polynomial evaluated at A; the limit A -> exp(i*pi/6) gives 5."""
    in_a = {2 * e: c for e, c in TRACE_POLYNOMIAL.items()}
    return evaluate_laurent(in_a, a)


def trace_sweep(primes: Sequence[int]) -> List[Dict[str, object]]:
    """|tr rho_p(ab^-1)| at the default embedding for each prime."""
    rows = []
    for p in primes:
        j = default_embedding(p)
        value = abs(embed(from_laurent(p, TRACE_POLYNOMIAL), j))
        rows.append({"p": p, "j": j, "abs_trace": value, "loxodromic": value > 2.0})
    return rows


def compare_printed_lambda(rep: PantsRep) -> List[Tuple[int, int]]:
    """Entry positions where rho(a) rho(b)^-1 differs from the printed lambda."""
    computed = eval_word(rep, PHI)
    printed = ProjectiveMatrix.from_laurent(rep.p, PRINTED_LAMBDA)
    mismatches = []
    for pos, (x, y) in zip(((0, 0), (0, 1), (1, 0), (1, 1)), zip(computed.entries(), printed.entries())):
        if x != y:
            mismatches.append(pos)
    if mismatches:
        logger.info(
            "Printed lambda differs from the computed product",
            extra={"p": rep.p, "entries": mismatches},
        )
    return mismatches


# ---------------------------------------------------------------------------
# The third boundary loop
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gamma3Result:
    """An ordered signed product of the three images that is scalar."""

    ordering: Tuple[str, str, str]
    exponents: Tuple[int, int, int]
    scalar: CyclotomicInteger
    zeta_power: Optional[Tuple[int, int]]
    word: GroupWord

    def to_json(self) -> Dict[str, object]:
        return {
            "ordering": list(self.ordering),
            "exponents": list(self.exponents),
            "scalar": self.scalar.to_json(),
            "zeta_power": list(self.zeta_power) if self.zeta_power else None,
            "gamma3_word": str(self.word),
        }


def gamma3_check(rep: PantsRep) -> Gamma3Result:
    """
    Find an ordering and signs making Ma^s1 * Mb^s2 * Mc^s3 scalar.

    The first hit fixes the word in a, b representing the third boundary
    loop; signs are tried before orderings, +1 first.
    """
    images = {"a": rep.Ma, "b": rep.Mb, "c": rep.Mc}
    for signs in itertools.product((1, -1), repeat=3):
        for ordering in itertools.permutations(("a", "b", "c")):
            product = ProjectiveMatrix.identity(rep.p)
            for name, s in zip(ordering, signs):
                product = product * (images[name] ** s)
            if not product.is_scalar():
                continue
            # u c^s v = scalar  =>  c = (u^-1 v^-1)^s
            pos = ordering.index("c")
            u = GroupWord(tuple(
                name if s > 0 else name.upper()
                for name, s in zip(ordering[:pos], signs[:pos])
            ))
            v = GroupWord(tuple(
                name if s > 0 else name.upper()
                for name, s in zip(ordering[pos + 1:], signs[pos + 1:])
            ))
            word = (u.inverse() * v.inverse()) ** signs[pos]
            scalar = product.a
            logger.debug(
                "Scalar boundary product found",
                extra={"p": rep.p, "ordering": ordering, "signs": signs},
            )
            return Gamma3Result(
                ordering=ordering,  # type: ignore[arg-type]
                exponents=signs,  # type: ignore[arg-type]
                scalar=scalar,  # type: ignore[arg-type]
                zeta_power=zeta_exponent(scalar),  # type: ignore[arg-type]
                word=word,
            )
    raise ConventionError(
        "no ordered product of the boundary images is scalar", context={"p": rep.p}
    )


# ---------------------------------------------------------------------------
# Torsion of simple elements
# ---------------------------------------------------------------------------

@dataclass
class TorsionReport:
    p: int
    orders: List[Tuple[str, object]] = field(default_factory=list)

    @property
    def all_finite(self) -> bool:
        return all(o is not INFINITE for _, o in self.orders)

    def to_json(self) -> Dict[str, object]:
        return {
            "p": self.p,
            "checked": len(self.orders),
            "all_finite": self.all_finite,
            "orders": [[w, valuation_to_json(o)] for w, o in self.orders],  # type: ignore[arg-type]
        }


def simple_torsion_suite(
    rep: PantsRep,
    trials: int,
    rng: np.random.Generator,
    max_power: int = 5,
    conjugator_length: int = 6,
) -> TorsionReport:
    """Projective orders of boundary loops, their powers, inverses and random conjugates."""
    base = [GroupWord(("a",)), GroupWord(("b",)), GroupWord(("a", "b"))]
    words: List[GroupWord] = []
    for s in base:
        for n in range(1, max_power + 1):
            words.extend([s ** n, s ** -n])
    for _ in range(trials):
        s = base[int(rng.integers(len(base)))]
        n = int(rng.integers(1, max_power + 1)) * (1 if rng.integers(2) else -1)
        w = random_word(rng, int(rng.integers(1, conjugator_length + 1)))
        words.append((s ** n).conjugate_by(w))

    report = TorsionReport(p=rep.p)
    for w in words:
        if not is_simple(w):
            raise VerificationFailure("generated word is not simple", context={"word": str(w)})
        report.orders.append((str(w), proj_order(eval_word(rep, w))))
    if not report.all_finite:
        bad = [w for w, o in report.orders if o is INFINITE]
        raise VerificationFailure(
            "a simple element has infinite projective order",
            context={"p": rep.p, "words": bad[:5]}
        )
    logger.info("Simple torsion checked", extra={"p": rep.p, "words": len(words)})
    return report


def witness_embeddings(rep: PantsRep) -> List[int]:
    """One index per embedding of Z[zeta_p], starting with rep.j."""
    others = [j for j in range(1, rep.p) if j != rep.j % rep.p]
    return [rep.j] + others


def order_witness(rep: PantsRep, w: GroupWord) -> Dict[str, object]:
    """Projective order of w plus an off-circle eigenvalue witness when it is infinite."""
    m = eval_word(rep, w)
    order = proj_order(m)
    result: Dict[str, object] = {"order": valuation_to_json(order)}
    if order is INFINITE:
        for j in witness_embeddings(rep):
            cert = spectral_certificate(m, j)
            if cert.off_circle:
                result["witness"] = {"j": j, "abs_trace": cert.abs_trace, "margin": cert.margin}
                return result
        raise InvariantViolation(
            "infinite projective order without an off-circle embedding",
            context={"p": rep.p, "word": str(w)},
        )
    return result
