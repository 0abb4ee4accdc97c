"""
Numeric ping-pong certificates for free subgroups of the image.

A Moebius map T = [[a, b], [c, d]] with det 1 and c != 0 sends the exterior
of its isometric circle |cz + d| = 1 onto the interior of the isometric
circle of T^-1.  Two such maps whose four isometric disks are pairwise
disjoint generate a free (Schottky) group.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .cyclotomic import INFINITE, embed
from .exceptions import NoCertificateError, PreconditionError
from .logging import get_logger, log_function_call
from .pantsrep import PHI, PantsRep, eval_word
from .projmat import embed_matrix, proj_order
from .words import GroupWord


logger = get_logger(__name__)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def to_json(self) -> Dict[str, object]:
        return {"center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True)
class SchottkyCertificate:
    """Two words with powers and the disk pairs D1-, D1+, D2-, D2+."""

    j: int
    conjugator_power: int
    words: Tuple[GroupWord, GroupWord]
    powers: Tuple[int, int]
    disks: Tuple[Disk, Disk, Disk, Disk]
    samples: int
    min_gap: float

    def to_json(self) -> Dict[str, object]:
        return {
            "j": self.j,
            "conjugator_power": self.conjugator_power,
            "words": [str(w) for w in self.words],
            "powers": list(self.powers),
            "disks": [d.to_json() for d in self.disks],
            "samples": self.samples,
            "min_gap": self.min_gap,
        }


def normalize(m: np.ndarray) -> np.ndarray:
    """Scale a complex 2x2 matrix to determinant 1."""
    return m / np.sqrt(np.linalg.det(m))


def isometric_disks(t: np.ndarray) -> Optional[Tuple[Disk, Disk]]:
    """(source, target) isometric disks of a det-1 map, or None if it fixes infinity."""
    a, c, d = t[0, 0], t[1, 0], t[1, 1]
    if abs(c) < 1e-12:
        return None
    radius = float(1.0 / abs(c))
    return Disk(complex(-d / c), radius), Disk(complex(a / c), radius)


def mobius(t: np.ndarray, z: np.ndarray) -> np.ndarray:
    return (t[0, 0] * z + t[0, 1]) / (t[1, 0] * z + t[1, 1])


def _circle(disk: Disk, samples: int) -> np.ndarray:
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    return disk.center + disk.radius * np.exp(1j * theta)


def _disjoint(disks: Tuple[Disk, ...]) -> float:
    """Smallest gap between distinct disks; negative when two overlap."""
    gap = np.inf
    for i in range(len(disks)):
        for k in range(i + 1, len(disks)):
            dist = abs(disks[i].center - disks[k].center)
            gap = min(gap, dist - disks[i].radius - disks[k].radius)
    return float(gap)


def verify_ping_pong(
    maps: Tuple[np.ndarray, np.ndarray],
    disks: Tuple[Disk, Disk, Disk, Disk],
    samples: int,
    tol: float = 1e-9,
) -> bool:
    """
    Check at sample points that each of T1, T1^-1, T2, T2^-1 sends the
    boundaries of the three disks other than its source into its target.
    """
    t1, t2 = maps
    moves = [
        (t1, disks[0], disks[1]),
        (np.linalg.inv(t1), disks[1], disks[0]),
        (t2, disks[2], disks[3]),
        (np.linalg.inv(t2), disks[3], disks[2]),
    ]
    for t, source, target in moves:
        for disk in disks:
            if disk is source:
                continue
            images = mobius(t, _circle(disk, samples))
            if np.any(np.abs(images - target.center) > target.radius * (1 + tol)):
                return False
    return True


@log_function_call
def schottky_certificate(
    rep: PantsRep,
    j: Optional[int] = None,
    max_power: int = 20,
    samples: int = 1000,
) -> SchottkyCertificate:
    """
    Search lambda = rho(a b^-1) and mu = a^t lambda a^-t for powers whose
    isometric disks play ping-pong.
    """
    j = rep.j if j is None else j
    phi_matrix = eval_word(rep, PHI)
    if proj_order(phi_matrix) is not INFINITE:
        raise PreconditionError(
            "rho(a b^-1) has finite order at this prime", context={"p": rep.p}
        )
    lam = normalize(embed_matrix(phi_matrix, j))
    ma = normalize(embed_matrix(rep.Ma, j))
    for t in range(1, rep.p):
        conj = np.linalg.matrix_power(ma, t)
        mu = conj @ lam @ np.linalg.inv(conj)
        for n in range(1, max_power + 1):
            t1 = np.linalg.matrix_power(lam, n)
            t2 = np.linalg.matrix_power(mu, n)
            first, second = isometric_disks(t1), isometric_disks(t2)
            if first is None or second is None:
                continue
            disks = (first[0], first[1], second[0], second[1])
            gap = _disjoint(disks)
            if gap <= 0:
                continue
            if not verify_ping_pong((t1, t2), disks, samples):
                continue
            w2 = PHI.conjugate_by(GroupWord(("a",)) ** t)
            logger.info(
                "Ping-pong certificate found",
                extra={"p": rep.p, "j": j, "t": t, "power": n, "gap": gap},
            )
            return SchottkyCertificate(
                j=j,
                conjugator_power=t,
                words=(PHI, w2),
                powers=(n, n),
                disks=disks,
                samples=samples,
                min_gap=gap,
            )
    raise NoCertificateError(
        "no ping-pong configuration within the search bounds",
        context={"p": rep.p, "j": j, "max_power": max_power}
    )


def gamma1_fixed_points(rep: PantsRep, j: Optional[int] = None) -> Tuple[str, complex]:
    """Fixed points of rho(a): infinity and z0 = (A^-2 - A^-10) / (1 - A^-12)."""
    j = rep.j if j is None else j
    b = embed(rep.Ma.b, j)  # type: ignore[arg-type]
    d = embed(rep.Ma.d, j)  # type: ignore[arg-type]
    return "infinity", complex(b / (d - 1))


def fixed_points(t: np.ndarray) -> List[complex]:
    """Finite fixed points of a Moebius map; infinity is omitted."""
    a, b, c, d = t[0, 0], t[0, 1], t[1, 0], t[1, 1]
    if abs(c) < 1e-12:
        return [complex(b / (d - a))] if abs(d - a) > 1e-12 else []
    disc = np.sqrt((a - d) ** 2 + 4 * b * c)
    return [complex((a - d + disc) / (2 * c)), complex((a - d - disc) / (2 * c))]
