"""
Finite quotients of the representation modulo h^(k+1).

R_k is the set of words whose image is scalar modulo h^(k+1), i.e. whose
depth is at least k + 1; G_k = F(a, b) / R_k is enumerated by BFS over
canonical projective forms.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import multiplicity

from .cyclotomic import INFINITE, Valuation, valuation_to_json
from .exceptions import (
    BudgetExceededError,
    InvariantViolation,
    LawViolationError,
    PreconditionError,
    VerificationFailure,
)
from .logging import get_logger, log_function_call
from .pantsrep import PHI, PantsRep, eval_word, eval_word_mod, reduced_generators
from .projmat import ProjectiveMatrix, commutator, proj_canonical, proj_h_depth, proj_order
from .words import GroupWord, random_word
from .words import commutator as word_commutator


logger = get_logger(__name__)

GENERATORS = ("a", "b")


def reduce_rep(rep: PantsRep, k: int) -> Dict[str, ProjectiveMatrix]:
    """Canonical images of a and b over Z[zeta_p]/(h^(k+1))."""
    if k < 0:
        raise PreconditionError(f"level must be >= 0, got {k}", context={"k": k})
    gens = reduced_generators(rep, k + 1)
    return {x: proj_canonical(gens[x]) for x in GENERATORS}


@dataclass(frozen=True)
class FiniteImage:
    """The finite group G_k with right-multiplication permutations of a and b."""

    p: int
    k: int
    elements: Tuple[ProjectiveMatrix, ...]
    permutations: Dict[str, Tuple[int, ...]]
    identity_index: int = 0

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def level(self) -> int:
        return self.k + 1

    def trace_word(self, w: GroupWord, start: int = 0) -> int:
        """Index of start * w, following the generator permutations."""
        inverse = self.inverse_permutations
        pos = start
        for x in w:
            pos = self.permutations[x][pos] if x in self.permutations else inverse[x.lower()][pos]
        return pos

    @property
    def inverse_permutations(self) -> Dict[str, Tuple[int, ...]]:
        cached = self.__dict__.get("_inverse")
        if cached is None:
            cached = {}
            for x, perm in self.permutations.items():
                inv = [0] * len(perm)
                for i, target in enumerate(perm):
                    inv[target] = i
                cached[x] = tuple(inv)
            object.__setattr__(self, "_inverse", cached)
        return cached

    def word_order(self, w: GroupWord) -> int:
        """Order of the image of w, found by tracing w from the identity."""
        pos = self.trace_word(w)
        n = 1
        while pos != self.identity_index:
            pos = self.trace_word(w, pos)
            n += 1
            if n > self.order:
                raise InvariantViolation("element order exceeds the group order")
        return n

    def is_p_group(self) -> bool:
        n = self.order
        while n % self.p == 0:
            n //= self.p
        return n == 1

    def to_json(self) -> Dict[str, object]:
        return {
            "p": self.p,
            "k": self.k,
            "level": self.level,
            "order": self.order,
            "permutations": {x: list(perm) for x, perm in self.permutations.items()},
        }


def image_bfs(
    generators: Dict[str, ProjectiveMatrix],
    cap: int,
    k: Optional[int] = None,
) -> FiniteImage:
    """Breadth-first closure of the canonical generator images."""
    if cap < 1:
        raise PreconditionError(f"element budget must be >= 1, got {cap}", context={"cap": cap})
    names = sorted(generators)
    sample = generators[names[0]]
    level = sample.level
    if level is None:
        raise PreconditionError("BFS runs over a quotient ring")
    identity = ProjectiveMatrix.identity(sample.p, level)
    elements: List[ProjectiveMatrix] = [identity]
    index: Dict[tuple, int] = {identity.key(): 0}
    perms: Dict[str, List[int]] = {x: [] for x in names}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        current = elements[i]
        for x in names:
            product = proj_canonical(current * generators[x])
            key = product.key()
            target = index.get(key)
            if target is None:
                if len(elements) >= cap:
                    raise BudgetExceededError(
                        f"image exceeds the budget of {cap} elements",
                        partial_count=len(elements),
                        context={"p": sample.p, "level": level},
                    )
                target = len(elements)
                index[key] = target
                elements.append(product)
                queue.append(target)
            perms[x].append(target)
        if len(elements) % 10000 == 0:
            logger.debug("BFS progress", extra={"elements": len(elements), "level": level})
    # perms were filled in BFS order, which is element order
    logger.info(
        "Finite image enumerated",
        extra={"p": sample.p, "level": level, "order": len(elements)},
    )
    return FiniteImage(
        p=sample.p,
        k=level - 1 if k is None else k,
        elements=tuple(elements),
        permutations={x: tuple(v) for x, v in perms.items()},
    )


def finite_image(rep: PantsRep, k: int, cap: int) -> FiniteImage:
    return image_bfs(reduce_rep(rep, k), cap, k=k)


def p_power_order(m: ProjectiveMatrix, max_steps: int) -> int:
    """Least p^i with m^(p^i) scalar, for m in a quotient whose image is a p-group."""
    n = 1
    current = m
    for _ in range(max_steps + 1):
        if current.is_scalar():
            return n
        current = current ** m.p
        n *= m.p
    raise InvariantViolation(
        "element is not of p-power order in the quotient",
        context={"p": m.p, "level": m.level}
    )


def element_order_mod(rep: PantsRep, w: GroupWord, k: int) -> int:
    """Order n(w, k) of w in F(a, b) / R_k."""
    if k < 0:
        raise PreconditionError(f"level must be >= 0, got {k}", context={"k": k})
    m = eval_word_mod(rep, w, k + 1)
    return p_power_order(m, k + 1)


def in_filtration(rep: PantsRep, w: GroupWord, k: int) -> bool:
    """Membership w in R_k, by exact depth."""
    depth = proj_h_depth(eval_word(rep, w))
    return depth >= k + 1


# ---------------------------------------------------------------------------
# psi and N
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiData:
    """phi = a b^-1, its stabilizing power psi = phi^m0 and the level N of psi."""

    p: int
    phi: GroupWord
    n0: int
    m0: int
    psi: GroupWord
    N: int

    @property
    def e(self) -> int:
        return self.N // (self.p - 1) + 1

    @property
    def bound(self) -> int:
        return self.p ** self.e

    def to_json(self) -> Dict[str, object]:
        return {
            "phi": str(self.phi),
            "N0": self.n0,
            "m0": self.m0,
            "psi": str(self.psi),
            "N": self.N,
            "e": self.e,
            "bound": self.bound,
        }


def stabilization_level(rep: PantsRep, max_level: Optional[int] = None) -> int:
    """
    Smallest k at which every boundary class has its full projective order
    in F(a, b) / R_k.
    """
    limit = 4 * (rep.p - 1) if max_level is None else max_level
    boundary = rep.boundary_words()
    targets = [proj_order(eval_word(rep, s)) for s in boundary]
    if any(t is INFINITE for t in targets):
        raise InvariantViolation("a boundary class has infinite order", context={"p": rep.p})
    for k in range(limit + 1):
        if all(element_order_mod(rep, s, k) == t for s, t in zip(boundary, targets)):
            return k
    raise InvariantViolation(
        "boundary orders do not stabilize", context={"p": rep.p, "max_level": limit}
    )


@log_function_call
def find_psi_N(rep: PantsRep) -> PsiData:
    """Locate psi = phi^m0 and the level N with psi in R_N but not R_(N+1)."""
    phi_matrix = eval_word(rep, PHI)
    if proj_order(phi_matrix) is not INFINITE:
        raise PreconditionError(
            "phi = a b^-1 has finite order; choose a larger prime", context={"p": rep.p}
        )
    n0 = stabilization_level(rep)
    m0 = element_order_mod(rep, PHI, n0)
    psi = PHI ** m0
    depth = proj_h_depth(phi_matrix ** m0)
    if depth is INFINITE:
        raise InvariantViolation("psi is scalar", context={"p": rep.p, "m0": m0})
    n = int(depth) - 1
    if n < n0:
        raise InvariantViolation("psi lies below the stabilization level", context={"N": n, "N0": n0})
    logger.info("psi located", extra={"p": rep.p, "N0": n0, "m0": m0, "N": n})
    return PsiData(p=rep.p, phi=PHI, n0=n0, m0=m0, psi=psi, N=n)


def psi_matrix_mod(rep: PantsRep, data: PsiData, level: int) -> ProjectiveMatrix:
    return eval_word_mod(rep, data.phi, level) ** data.m0


@dataclass
class DepthLawReport:
    N: int
    e: int
    checked: int
    depths: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def max_depth(self) -> int:
        return max(d for _, d in self.depths) if self.depths else 0

    def to_json(self) -> Dict[str, object]:
        return {
            "N": self.N,
            "e": self.e,
            "checked": self.checked,
            "max_depth": self.max_depth,
            "below_2N_plus_2": self.max_depth < 2 * self.N + 2,
        }


def expected_depth(p: int, N: int, k: int) -> int:
    return N + 1 + (p - 1) * int(multiplicity(p, k))


def psi_power_depth_law(rep: PantsRep, data: PsiData, max_checks: int = 10_000) -> DepthLawReport:
    """
    Confirm depth(psi^k) = N + 1 + (p - 1) v_p(k) < 2N + 2 for 1 <= k < p^e,
    so no such power lies in R_(2N+1).
    """
    p, n = rep.p, data.N
    level = 2 * n + 2
    step = psi_matrix_mod(rep, data, level)
    limit = min(data.bound - 1, max_checks)
    report = DepthLawReport(N=n, e=data.e, checked=limit)
    current = step
    for k in range(1, limit + 1):
        depth = proj_h_depth(current)
        expected = expected_depth(p, n, k)
        if depth != expected or expected >= level:
            raise LawViolationError(
                f"depth of psi^{k} is {depth}, expected {expected}",
                context={"p": p, "N": n, "k": k, "depth": valuation_to_json(depth)},
            )
        report.depths.append((k, int(depth)))
        current = current * step
    logger.info("Depth law verified", extra={"p": p, "N": n, "checks": limit})
    return report


def distinct_psi_cosets(rep: PantsRep, data: PsiData) -> int:
    """Number of distinct classes of psi^k, 0 <= k < p^e, modulo R_(2N+1)."""
    level = 2 * data.N + 2
    step = proj_canonical(psi_matrix_mod(rep, data, level))
    seen = set()
    current = ProjectiveMatrix.identity(rep.p, level)
    for _ in range(data.bound):
        seen.add(current.key())
        current = proj_canonical(current * step)
    return len(seen)


# ---------------------------------------------------------------------------
# Elements of R_N and commutators
# ---------------------------------------------------------------------------

def filtration_elements(
    rep: PantsRep,
    N: int,
    count: int,
    rng: np.random.Generator,
    level: Optional[int] = None,
    max_length: int = 8,
) -> List[ProjectiveMatrix]:
    """Images modulo h^level of w^n(w, N) for random words w; all lie in R_N."""
    level = commutator_level(N) if level is None else level
    out = []
    while len(out) < count:
        w = random_word(rng, int(rng.integers(1, max_length + 1)))
        m = eval_word_mod(rep, w, level)
        n = element_order_mod(rep, w, N)
        out.append(m ** n)
    return out


def words_mod(rep: PantsRep, words: Sequence[GroupWord], level: int) -> List[ProjectiveMatrix]:
    return [eval_word_mod(rep, w, level) for w in words]


def commutator_level(N: int) -> int:
    """Reduction level for commutator checks: depths through 2N + 2 are exact there."""
    return 2 * N + 3


@dataclass
class CommutatorReport:
    N: int
    pairs: int
    level: int
    min_depth: Valuation

    def to_json(self) -> Dict[str, object]:
        return {
            "N": self.N,
            "pairs": self.pairs,
            "level": self.level,
            "min_depth": valuation_to_json(self.min_depth),
        }


def commutator_containment(
    elements: Sequence[ProjectiveMatrix],
    N: int,
    pairs: int,
    rng: np.random.Generator,
) -> CommutatorReport:
    """
    For random pairs u, v of R_N, given modulo h^(2N+3), check that [u, v]
    has depth at least 2N + 2, i.e. lies in R_(2N+1).
    """
    if len(elements) < 2:
        raise PreconditionError("need at least two elements of R_N")
    level = commutator_level(N)
    for m in elements:
        if m.level != level:
            raise PreconditionError("elements must be reduced modulo h^(2N+3)", context={"level": m.level})
        depth = proj_h_depth(m)
        if depth < N + 1:
            raise PreconditionError("element does not lie in R_N", context={"depth": valuation_to_json(depth)})
    min_depth: Valuation = INFINITE
    for _ in range(pairs):
        i, k = rng.choice(len(elements), size=2, replace=False)
        depth = proj_h_depth(commutator(elements[int(i)], elements[int(k)]))
        min_depth = min(min_depth, depth)
        if depth < 2 * N + 2:
            raise VerificationFailure(
                "commutator of R_N escapes R_(2N+1)",
                context={"N": N, "depth": valuation_to_json(depth)},
            )
    return CommutatorReport(N=N, pairs=pairs, level=level, min_depth=min_depth)


def filtration_exponent_check(
    rep: PantsRep,
    rng: np.random.Generator,
    levels: Sequence[int] = (1, 2, 3),
    per_level: int = 5,
    max_tries: int = 400,
) -> Dict[int, int]:
    """
    For w in R_j minus R_(j+1), check that w^p has depth exactly j + p.

    Candidates are iterated commutators of random words, which sit at
    depth two and beyond.
    """
    p = rep.p
    top = max(levels) + p + 1
    found = {j: 0 for j in levels}
    for _ in range(max_tries):
        if all(v >= per_level for v in found.values()):
            break
        w = commutator_word(rng)
        m = eval_word_mod(rep, w, top)
        depth = proj_h_depth(m)
        if depth is INFINITE or int(depth) - 1 not in found:
            continue
        j = int(depth) - 1
        if found[j] >= per_level:
            continue
        powered = proj_h_depth(m ** p)
        if powered != depth + p - 1:
            raise VerificationFailure(
                "p-th power does not raise the depth by p - 1",
                context={"word": str(w), "depth": int(depth), "power_depth": valuation_to_json(powered)},
            )
        found[j] += 1
    return found


def commutator_word(rng: np.random.Generator, max_length: int = 4, max_nesting: int = 3) -> GroupWord:
    """A random iterated commutator [[u1, u2], u3] ... of short random words."""
    w = word_commutator(
        random_word(rng, int(rng.integers(1, max_length + 1))),
        random_word(rng, int(rng.integers(1, max_length + 1))),
    )
    for _ in range(int(rng.integers(0, max_nesting))):
        w = word_commutator(w, random_word(rng, int(rng.integers(1, max_length + 1))))
    return w
