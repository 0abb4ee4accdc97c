"""
Smith normal form of integer matrices with arbitrary-precision entries.

Matrices are numpy object arrays of Python ints so nothing overflows; row
and column eliminations are vectorized as outer-product updates.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .exceptions import InvariantViolation
from .logging import get_logger


logger = get_logger(__name__)


def as_object_matrix(rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> np.ndarray:
    """Integer matrix as an object array; an empty row list needs ncols."""
    if len(rows) == 0:
        return np.zeros((0, ncols or 0), dtype=object)
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        out[i, :] = [int(x) for x in row]
    return out


def _identity(n: int) -> np.ndarray:
    eye = np.zeros((n, n), dtype=object)
    for i in range(n):
        eye[i, i] = 1
    return eye


@dataclass
class SmithForm:
    """U * A * V = D with D diagonal, d1 | d2 | ..., and U, V unimodular."""

    diagonal: List[int]
    rank: int
    shape: tuple
    U: Optional[np.ndarray] = None
    V: Optional[np.ndarray] = None

    @property
    def has_transforms(self) -> bool:
        return self.U is not None and self.V is not None

    @property
    def invariant_factors(self) -> List[int]:
        """The nonzero diagonal entries."""
        return self.diagonal[: self.rank]

    def D(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=object)
        for i, d in enumerate(self.diagonal):
            out[i, i] = d
        return out

    def verify(self, A: np.ndarray) -> None:
        """Re-check U * A * V = D exactly and that U, V are unimodular."""
        if not self.has_transforms:
            return
        product = self.U.dot(A).dot(self.V)  # type: ignore[union-attr]
        if not np.array_equal(product, self.D()):
            raise InvariantViolation("U * A * V differs from D", context={"shape": self.shape})
        for name, m in (("U", self.U), ("V", self.V)):
            if abs(bareiss_det(m)) != 1:  # type: ignore[arg-type]
                raise InvariantViolation(f"{name} is not unimodular", context={"shape": self.shape})


def smith_normal_form(A: np.ndarray, transforms: bool = True) -> SmithForm:
    """
    Diagonalize A by unimodular row and column operations.

    The pivot is always the entry of smallest absolute value; a pivot of
    absolute value 1 clears its row and column in one pass.
    """
    M = np.array(A, dtype=object, copy=True)
    rows, cols = M.shape
    U = _identity(rows) if transforms else None
    V = _identity(cols) if transforms else None

    def swap_rows(i: int, k: int) -> None:
        if i != k:
            M[[i, k], :] = M[[k, i], :]
            if U is not None:
                U[[i, k], :] = U[[k, i], :]

    def swap_cols(i: int, k: int) -> None:
        if i != k:
            M[:, [i, k]] = M[:, [k, i]]
            if V is not None:
                V[:, [i, k]] = V[:, [k, i]]

    t = 0
    while t < min(rows, cols):
        sub = M[t:, t:]
        nz_r, nz_c = np.nonzero(sub)
        if len(nz_r) == 0:
            break
        best = int(np.argmin(np.abs(sub[nz_r, nz_c])))
        swap_rows(t, int(nz_r[best]) + t)
        swap_cols(t, int(nz_c[best]) + t)

        while True:
            piv = M[t, t]
            q = M[t + 1:, t] // piv
            if q.any():
                M[t + 1:, :] -= np.multiply.outer(q, M[t, :])
                if U is not None:
                    U[t + 1:, :] -= np.multiply.outer(q, U[t, :])
            q = M[t, t + 1:] // piv
            if q.any():
                M[:, t + 1:] -= np.multiply.outer(M[:, t], q)
                if V is not None:
                    V[:, t + 1:] -= np.multiply.outer(V[:, t], q)

            col_rest = np.nonzero(M[t + 1:, t])[0]
            row_rest = np.nonzero(M[t, t + 1:])[0]
            if len(col_rest) or len(row_rest):
                # remainders are smaller than the pivot; promote the smallest
                cands = [(abs(M[t + 1 + i, t]), "r", t + 1 + i) for i in col_rest]
                cands += [(abs(M[t, t + 1 + i]), "c", t + 1 + i) for i in row_rest]
                _, kind, pos = min(cands)
                if kind == "r":
                    swap_rows(t, pos)
                else:
                    swap_cols(t, pos)
                continue

            if abs(piv) != 1 and t + 1 < rows and t + 1 < cols:
                bad_r, _ = np.nonzero(M[t + 1:, t + 1:] % piv)
                if len(bad_r):
                    r = int(bad_r[0]) + t + 1
                    M[t, :] += M[r, :]
                    if U is not None:
                        U[t, :] += U[r, :]
                    continue
            break

        if M[t, t] < 0:
            M[t, :] *= -1
            if U is not None:
                U[t, :] *= -1
        t += 1

    diagonal = [int(M[i, i]) for i in range(min(rows, cols))]
    rank = sum(1 for d in diagonal if d != 0)
    logger.debug("Smith normal form computed", extra={"shape": (rows, cols), "rank": rank})
    return SmithForm(diagonal=diagonal, rank=rank, shape=(rows, cols), U=U, V=V)


def bareiss_det(M: np.ndarray) -> int:
    """Exact determinant by fraction-free elimination."""
    A = np.array(M, dtype=object, copy=True)
    n = A.shape[0]
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k, k] == 0:
            swap = np.nonzero(A[k + 1:, k])[0]
            if len(swap) == 0:
                return 0
            r = int(swap[0]) + k + 1
            A[[k, r], :] = A[[r, k], :]
            sign = -sign
        block = A[k + 1:, k + 1:] * A[k, k] - np.multiply.outer(A[k + 1:, k], A[k, k + 1:])
        A[k + 1:, k + 1:] = block // prev
        A[k + 1:, k] = 0
        prev = A[k, k]
    return sign * int(A[n - 1, n - 1])


def invariant_product(A: np.ndarray) -> tuple:
    """(rank, product of invariant factors) of A."""
    form = smith_normal_form(A, transforms=False)
    prod = 1
    for d in form.invariant_factors:
        prod *= d
    return form.rank, prod


def lattice_contains(A: np.ndarray, v: Sequence[int], form: Optional[SmithForm] = None) -> bool:
    """
    Whether v lies in the row lattice of A.

    With transforms, v is in the lattice iff v * V is divisible by the
    diagonal and vanishes past the rank.  Without them, A and A with v
    appended must have equal rank and equal invariant-factor products.
    """
    vec = np.array([int(x) for x in v], dtype=object)
    if form is not None and form.has_transforms:
        y = vec.dot(form.V)
        for i, yi in enumerate(y):
            if i < form.rank:
                if yi % form.diagonal[i]:
                    return False
            elif yi != 0:
                return False
        return True
    if form is not None:
        prod = 1
        for d in form.invariant_factors:
            prod *= d
        before = (form.rank, prod)
    else:
        before = invariant_product(A)
    after = invariant_product(np.vstack([A, vec.reshape(1, -1)]))
    return before == after
