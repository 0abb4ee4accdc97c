"""
Regular covers of the pair of pants from the finite quotients G_k.

The cover with group R_k is the coset table of G_k acting on itself; its
first homology is the abelianization of the Schreier basis of R_k, and the
simple-loop homology is spanned by lifts of powers of the boundary loops.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .cyclotomic import INFINITE, Valuation, valuation_to_json
from .exceptions import BudgetExceededError, InvariantViolation, NotAMemberError, VerificationFailure
from .hquot import FiniteImage, PsiData, finite_image
from .logging import get_logger
from .pantsrep import PantsRep
from .smith import as_object_matrix, lattice_contains, smith_normal_form
from .words import GroupWord, invert_letter


logger = get_logger(__name__)

Edge = Tuple[int, str]


@dataclass(frozen=True)
class CosetTable:
    """Right action of a and b on cosets 0..n-1; coset 0 is the base coset."""

    degree: int
    permutations: Dict[str, Tuple[int, ...]]

    @property
    def inverse_permutations(self) -> Dict[str, Tuple[int, ...]]:
        cached = self.__dict__.get("_inverse")
        if cached is None:
            cached = {}
            for x, perm in self.permutations.items():
                inv = [0] * self.degree
                for i, target in enumerate(perm):
                    inv[target] = i
                cached[x.upper()] = tuple(inv)
            object.__setattr__(self, "_inverse", cached)
        return cached

    def act(self, coset: int, letter: str) -> int:
        if letter in self.permutations:
            return self.permutations[letter][coset]
        return self.inverse_permutations[letter][coset]

    def trace(self, w: GroupWord, start: int = 0) -> int:
        pos = start
        for x in w:
            pos = self.act(pos, x)
        return pos

    def spanning_words(self) -> List[Optional[GroupWord]]:
        """BFS words from coset 0, letters tried in the order a, A, b, B."""
        words: List[Optional[GroupWord]] = [None] * self.degree
        words[0] = GroupWord()
        queue = deque([0])
        while queue:
            c = queue.popleft()
            for x in ("a", "A", "b", "B"):
                d = self.act(c, x)
                if words[d] is None:
                    words[d] = words[c] * GroupWord((x,))  # type: ignore[operator]
                    queue.append(d)
        return words

    def is_transitive(self) -> bool:
        return all(w is not None for w in self.spanning_words())

    def is_regular(self) -> bool:
        """Deck maps sending 0 to 0*a and to 0*b exist; together they act transitively."""
        words = self.spanning_words()
        if any(w is None for w in words):
            return False
        for x in ("a", "b"):
            target = self.act(0, x)
            deck = [self.trace(w, target) for w in words]  # type: ignore[arg-type]
            for c in range(self.degree):
                for perm in self.permutations.values():
                    if deck[perm[c]] != perm[deck[c]]:
                        return False
        return True

    def cycle_lengths(self, letter: str) -> List[int]:
        perm = self.permutations[letter]
        seen = [False] * self.degree
        lengths = []
        for start in range(self.degree):
            if seen[start]:
                continue
            n, c = 0, start
            while not seen[c]:
                seen[c] = True
                c = perm[c]
                n += 1
            lengths.append(n)
        return lengths


def table_from_permutations(permutations: Dict[str, Sequence[int]]) -> CosetTable:
    """Validate permutations of a and b and wrap them in a table."""
    degree = len(permutations["a"])
    perms = {}
    for x in ("a", "b"):
        perm = tuple(int(i) for i in permutations[x])
        if len(perm) != degree or sorted(perm) != list(range(degree)):
            raise InvariantViolation(f"action of {x} is not a permutation", context={"degree": degree})
        perms[x] = perm
    table = CosetTable(degree=degree, permutations=perms)
    if not table.is_transitive():
        raise InvariantViolation("coset action is not transitive", context={"degree": degree})
    return table


def coset_table(img: FiniteImage) -> CosetTable:
    """Regular right action of G_k on itself."""
    table = table_from_permutations(img.permutations)
    if not table.is_regular():
        raise InvariantViolation("action of the finite image is not regular", context={"order": img.order})
    return table


@dataclass
class SchreierData:
    """Free basis of the subgroup fixing coset 0, one generator per non-tree edge."""

    table: CosetTable
    transversal: Tuple[GroupWord, ...]
    tree_edges: FrozenSet[Edge]
    generators: Tuple[Edge, ...]
    index: Dict[Edge, int] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def generator_word(self, i: int) -> GroupWord:
        """t_c x t_(c x)^-1 for the i-th non-tree edge (c, x)."""
        c, x = self.generators[i]
        d = self.table.act(c, x)
        return self.transversal[c] * GroupWord((x,)) * self.transversal[d].inverse()

    def trace_vector(self, w: GroupWord, start: int = 0) -> Tuple[List[int], int]:
        """Exponent sums of non-tree edges crossed by w from start, and the end coset."""
        vector = [0] * self.rank
        pos = start
        for x in w:
            if x in ("a", "b"):
                i = self.index.get((pos, x))
                if i is not None:
                    vector[i] += 1
                pos = self.table.act(pos, x)
            else:
                nxt = self.table.act(pos, x)
                i = self.index.get((nxt, invert_letter(x)))
                if i is not None:
                    vector[i] -= 1
                pos = nxt
        return vector, pos

    def rewrite(self, w: GroupWord) -> List[Tuple[int, int]]:
        """w as a sequence of (generator index, +-1) in the free basis."""
        out: List[Tuple[int, int]] = []
        pos = 0
        for x in w:
            if x in ("a", "b"):
                i = self.index.get((pos, x))
                if i is not None:
                    out.append((i, 1))
                pos = self.table.act(pos, x)
            else:
                nxt = self.table.act(pos, x)
                i = self.index.get((nxt, invert_letter(x)))
                if i is not None:
                    out.append((i, -1))
                pos = nxt
        if pos != 0:
            raise NotAMemberError(
                "word does not lie in the subgroup", context={"word": str(w), "end_coset": pos}
            )
        return out

    def evaluate(self, rewritten: Sequence[Tuple[int, int]]) -> GroupWord:
        result = GroupWord()
        for i, sign in rewritten:
            result = result * (self.generator_word(i) ** sign)
        return result

    def abelianized_vector(self, w: GroupWord) -> List[int]:
        vector, end = self.trace_vector(w)
        if end != 0:
            raise NotAMemberError(
                "word does not lie in the subgroup", context={"word": str(w), "end_coset": end}
            )
        return vector

    def base_images(self) -> List[Tuple[int, int]]:
        """Image of each free generator in H_1 of the base, Z^2."""
        cached = getattr(self, "_base", None)
        if cached is None:
            cached = [self.generator_word(i).exponent_sums() for i in range(self.rank)]
            self._base = cached
        return cached


def schreier_basis(table: CosetTable) -> SchreierData:
    """Spanning tree by BFS from coset 0 and Schreier generators for the other edges."""
    transversal: List[Optional[GroupWord]] = [None] * table.degree
    transversal[0] = GroupWord()
    tree = set()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in ("a", "A", "b", "B"):
            d = table.act(c, x)
            if transversal[d] is not None:
                continue
            transversal[d] = transversal[c] * GroupWord((x,))  # type: ignore[operator]
            tree.add((c, x) if x in ("a", "b") else (d, x.lower()))
            queue.append(d)
    if any(t is None for t in transversal):
        raise InvariantViolation("coset table is not transitive", context={"degree": table.degree})
    generators = tuple(
        (c, x) for c in range(table.degree) for x in ("a", "b") if (c, x) not in tree
    )
    data = SchreierData(
        table=table,
        transversal=tuple(transversal),  # type: ignore[arg-type]
        tree_edges=frozenset(tree),
        generators=generators,
        index={edge: i for i, edge in enumerate(generators)},
    )
    if data.rank != table.degree + 1:
        raise InvariantViolation(
            "Schreier rank differs from degree + 1",
            context={"degree": table.degree, "rank": data.rank},
        )
    return data


def abelianized_vector(s: SchreierData, w: GroupWord) -> List[int]:
    return s.abelianized_vector(w)


def project_to_base(s: SchreierData, vector: Sequence[int]) -> Tuple[int, int]:
    """Push a homology class of the cover down to H_1 of the pants."""
    images = s.base_images()
    return (
        sum(v * images[i][0] for i, v in enumerate(vector)),
        sum(v * images[i][1] for i, v in enumerate(vector)),
    )


def simple_loop_matrix(
    rep: PantsRep, img: FiniteImage, s: SchreierData
) -> Tuple[List[List[int]], List[int]]:
    """
    Rows r * s_i^o_i * r^-1 for each boundary class s_i and transversal word r.

    The row for coset c is the loop s_i^o_i traced from c, since transversal
    words only cross tree edges.  Returns the 3n rows (class-major) and the
    orders o_i.
    """
    rows: List[List[int]] = []
    orders = []
    for word in rep.boundary_words():
        o = img.word_order(word)
        orders.append(o)
        loop = word ** o
        for c in range(s.table.degree):
            vector, end = s.trace_vector(loop, c)
            if end != c:
                raise InvariantViolation(
                    "boundary power does not close up", context={"word": str(word), "coset": c}
                )
            rows.append(vector)
    return rows, orders


def transfer_consistent(
    rep: PantsRep, s: SchreierData, rows: Sequence[Sequence[int]], orders: Sequence[int]
) -> bool:
    """Rows of each class project to n * o_i * [s_i] in total."""
    n = s.table.degree
    for i, word in enumerate(rep.boundary_words()):
        total = [0, 0]
        for row in rows[i * n:(i + 1) * n]:
            x, y = project_to_base(s, row)
            total[0] += x
            total[1] += y
        sa, sb = word.exponent_sums()
        if total != [n * orders[i] * sa, n * orders[i] * sb]:
            return False
    return True


def unique_rows(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    """Drop zero and repeated rows, keeping first occurrences."""
    seen = set()
    out = []
    for row in rows:
        key = tuple(row)
        if key in seen or not any(key):
            continue
        seen.add(key)
        out.append(list(row))
    return out


# ---------------------------------------------------------------------------
# Homology reports
# ---------------------------------------------------------------------------

@dataclass
class HomologyReport:
    """H_1 of the level-k cover against its simple-loop subgroup."""

    p: int
    k: int
    N: Optional[int]
    e: int
    degree: int
    rank: int
    boundary_orders: List[int]
    elementary_divisors: List[int]
    proper: bool
    index: Valuation
    bound: int
    psi_witness_excluded: Optional[bool]
    transforms_verified: bool

    @property
    def bound_satisfied(self) -> bool:
        return self.index is INFINITE or self.index >= self.bound

    @property
    def certified(self) -> bool:
        return self.N is not None and self.k == self.N

    def to_json(self) -> Dict[str, object]:
        return {
            "p": self.p,
            "k": self.k,
            "N": self.N,
            "e": self.e,
            "degree": self.degree,
            "rank": self.rank,
            "boundary_orders": self.boundary_orders,
            "elementary_divisors": self.elementary_divisors,
            "proper": self.proper,
            "index": valuation_to_json(self.index),
            "bound": self.bound,
            "bound_satisfied": self.bound_satisfied,
            "psi_witness_excluded": self.psi_witness_excluded,
            "transforms_verified": self.transforms_verified,
        }


def homology_report(
    rep: PantsRep,
    k: int,
    psi: Optional[PsiData] = None,
    cap: int = 1_000_000,
    max_degree: int = 5_000,
    transform_limit: int = 400,
) -> HomologyReport:
    """
    Cokernel of the simple-loop matrix of the level-k cover.

    When psi is given and k <= N the abelianized psi is tested against the
    simple-loop lattice; at k = N the index bound p^e and the exclusion are
    asserted.
    """
    img = finite_image(rep, k, min(cap, max_degree))
    table = coset_table(img)
    s = schreier_basis(table)
    rows, orders = simple_loop_matrix(rep, img, s)
    if not transfer_consistent(rep, s, rows, orders):
        raise InvariantViolation("simple-loop rows fail transfer consistency", context={"k": k})

    matrix = as_object_matrix(unique_rows(rows), ncols=s.rank)
    transforms = max(matrix.shape) <= transform_limit
    form = smith_normal_form(matrix, transforms=transforms)
    form.verify(matrix)

    divisors = form.invariant_factors + [0] * (s.rank - form.rank)
    index: Valuation = INFINITE
    if form.rank == s.rank:
        index = 1
        for d in divisors:
            index *= d

    n_level = psi.N if psi is not None else None
    e = (n_level if n_level is not None else k) // (rep.p - 1) + 1
    excluded = None
    if psi is not None and k <= psi.N:
        vector = s.abelianized_vector(psi.psi)
        excluded = not lattice_contains(matrix, vector, form)

    report = HomologyReport(
        p=rep.p,
        k=k,
        N=n_level,
        e=e,
        degree=table.degree,
        rank=s.rank,
        boundary_orders=orders,
        elementary_divisors=divisors,
        proper=any(d != 1 for d in divisors),
        index=index,
        bound=rep.p ** e,
        psi_witness_excluded=excluded,
        transforms_verified=form.has_transforms,
    )
    logger.info(
        "Homology report computed",
        extra={"p": rep.p, "k": k, "degree": report.degree, "proper": report.proper},
    )
    if report.certified and not (report.bound_satisfied and report.proper and excluded):
        raise VerificationFailure(
            "certified level fails the simple-loop homology bound",
            context={"k": k, "index": valuation_to_json(index), "bound": report.bound},
        )
    return report


@dataclass
class TowerResult:
    reports: List[HomologyReport]
    stopped_at: Optional[int]
    partial_count: Optional[int]

    @property
    def largest_level(self) -> Optional[int]:
        return self.reports[-1].k if self.reports else None

    def to_json(self) -> Dict[str, object]:
        return {
            "levels": [r.to_json() for r in self.reports],
            "stopped_at": self.stopped_at,
            "partial_count": self.partial_count,
        }


def homology_tower(
    rep: PantsRep,
    psi: Optional[PsiData],
    max_level: int,
    cap: int = 1_000_000,
    max_degree: int = 5_000,
    transform_limit: int = 400,
) -> TowerResult:
    """Reports for k = 0, 1, ... up to max_level, stopping at the first level over budget."""
    reports = []
    for k in range(max_level + 1):
        try:
            reports.append(
                homology_report(rep, k, psi, cap=cap, max_degree=max_degree, transform_limit=transform_limit)
            )
        except BudgetExceededError as exc:
            logger.info("Homology tower stopped", extra={"k": k, "partial_count": exc.partial_count})
            return TowerResult(reports=reports, stopped_at=k, partial_count=exc.partial_count)
    return TowerResult(reports=reports, stopped_at=None, partial_count=None)
