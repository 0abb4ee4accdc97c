"""Unit tests for ping-pong certificates."""

from unittest.mock import patch

import numpy as np
import pytest

from simplehom.exceptions import PreconditionError
from simplehom.pantsrep import PHI
from simplehom.projmat import embed_matrix
from simplehom.schottky import (
    Disk,
    _disjoint,
    fixed_points,
    gamma1_fixed_points,
    isometric_disks,
    mobius,
    normalize,
    schottky_certificate,
    verify_ping_pong,
)


T1 = np.array([[3, 4], [2, 3]], dtype=complex)
T2 = np.array([[3, 4j], [-2j, 3]], dtype=complex)


class TestGeometry:
    """Tests for isometric circles."""

    def test_isometric_disks(self):
        """Source center -d/c, target a/c, radius 1/|c|."""
        source, target = isometric_disks(T1)
        assert source.center == pytest.approx(-1.5)
        assert target.center == pytest.approx(1.5)
        assert source.radius == pytest.approx(0.5)

    def test_fixes_infinity(self):
        """Upper-triangular maps have no isometric circle."""
        assert isometric_disks(np.array([[2, 1], [0, 0.5]], dtype=complex)) is None

    def test_classical_schottky_pair(self):
        """Two conjugate hyperbolic maps play ping-pong."""
        d1, d2 = isometric_disks(T1), isometric_disks(T2)
        disks = (d1[0], d1[1], d2[0], d2[1])
        assert _disjoint(disks) > 1.0
        assert verify_ping_pong((T1, T2), disks, samples=500)

    def test_overlapping_disks(self):
        """Overlapping disks give a negative gap."""
        assert _disjoint((Disk(0j, 1.0), Disk(1 + 0j, 1.0))) < 0

    def test_fixed_points(self):
        """Finite fixed points satisfy T(z) = z."""
        for z in fixed_points(T1):
            assert abs(mobius(T1, np.array([z]))[0] - z) < 1e-9

    def test_normalize(self):
        """Normalized matrices have determinant one."""
        m = normalize(np.array([[2, 1], [1, 3]], dtype=complex))
        assert abs(np.linalg.det(m) - 1) < 1e-12


class TestCertificate:
    """Tests for the certificate search on the representation."""

    def test_certificate_at_p7(self, rep7):
        """A certificate exists with four disjoint disks."""
        cert = schottky_certificate(rep7, samples=1000)
        assert cert.words[0] == PHI
        assert cert.min_gap > 0
        assert len(cert.disks) == 4
        data = cert.to_json()
        assert data["samples"] == 1000
        assert len(data["disks"]) == 4

    def test_finite_order_precondition(self, rep7):
        """No search runs when a b^-1 has finite order."""
        with patch("simplehom.schottky.proj_order", return_value=7):
            with pytest.raises(PreconditionError):
                schottky_certificate(rep7)

    def test_gamma1_fixed_point(self, rep7):
        """The finite fixed point of rho(a) is fixed numerically."""
        label, z0 = gamma1_fixed_points(rep7)
        assert label == "infinity"
        t = normalize(embed_matrix(rep7.Ma, rep7.j))
        assert abs(mobius(t, np.array([z0]))[0] - z0) < 1e-9
