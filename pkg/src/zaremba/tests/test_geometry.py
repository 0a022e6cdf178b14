"""Tests for curves, arcs and partitions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from zaremba.geometry import (
    Curve,
    Partition,
    PartitionError,
    arc_by_arclength,
    extend_all,
    extend_arc,
    make_disk,
    make_trig_curve,
    outward_normal,
    polar_grid,
    pure_dirichlet,
    require_interior,
)
from zaremba.validation import ValidationError


class TestCurves:
    def test_disk_basics(self, disk: Curve):
        """Point at tau=0, total length and curvature of the unit circle."""
        assert complex(disk.gamma(np.array(0.0))) == pytest.approx(1 + 0j)
        assert disk.length == pytest.approx(2 * math.pi, abs=1e-12)
        assert np.allclose(disk.curvature(np.linspace(0, 6, 7)), 1.0)

    def test_disk_radius_scales_length(self):
        """A disk of radius 2 has length 4 pi."""
        assert make_disk(2.0).length == pytest.approx(4 * math.pi, abs=1e-12)

    def test_non_positive_radius_rejected(self):
        """Radius must be positive."""
        with pytest.raises(ValidationError):
            make_disk(-1.0)

    def test_kite_points(self, kite: Curve):
        """The kite passes through (1, 0) and (-1, 0)."""
        assert complex(kite.gamma(np.array(0.0))) == pytest.approx(1 + 0j, abs=1e-15)
        assert complex(kite.gamma(np.array(math.pi))) == pytest.approx(-1 + 0j, abs=1e-15)

    def test_kite_length_matches_adaptive_quadrature(self, kite: Curve):
        """Spectral arclength against scipy's adaptive quadrature at two tolerances."""
        speed = lambda t: float(kite.speed(np.array(t)))  # noqa: E731
        coarse, _ = quad(speed, 0, 2 * math.pi, epsabs=1e-11, limit=200)
        fine, _ = quad(speed, 0, 2 * math.pi, epsabs=1e-13, limit=400)
        assert abs(coarse - fine) < 1e-10
        assert kite.length == pytest.approx(fine, abs=1e-10)

    @pytest.mark.parametrize(
        "tau, expected",
        [(math.pi / 2, (0.0, 1.0)), (math.pi, (-1.0, 0.0))],
    )
    def test_disk_normals(self, disk: Curve, tau: float, expected: tuple[float, float]):
        """Outward normals on the unit circle."""
        assert outward_normal(disk, tau) == pytest.approx(expected, abs=1e-15)

    def test_kite_normal_at_symmetry_point(self, kite: Curve):
        """By mirror symmetry the kite normal at tau=0 is (1, 0)."""
        assert outward_normal(kite, 0.0) == pytest.approx((1.0, 0.0), abs=1e-12)

    def test_normals_point_outward_on_disk(self, disk: Curve):
        """nu . (x - centroid) > 0 for a convex curve."""
        tau = np.linspace(0, 2 * np.pi, 50, endpoint=False)
        assert np.all(np.real(np.conj(disk.normal(tau)) * disk.gamma(tau)) > 0)

    def test_clockwise_curve_rejected(self):
        """Orientation must be counterclockwise."""
        with pytest.raises(ValidationError):
            make_trig_curve([0.0, 1.0, 0.0], [0.0, 0.0, -1.0])

    def test_trig_ellipse(self):
        """A trig-polynomial ellipse has the expected area on a polar grid."""
        ellipse = make_trig_curve([0.0, 2.0, 0.0], [0.0, 0.0, 1.0])
        grid = polar_grid(ellipse, 12, 64)
        assert float(grid.weights.sum()) == pytest.approx(2 * math.pi, abs=1e-10)

    def test_contains_and_floor(self, kite: Curve):
        """Winding test and the distance floor for interior points."""
        assert bool(kite.contains(0j)[0])
        assert not bool(kite.contains(3 + 0j)[0])
        require_interior(kite, (0.0, 0.0), floor=0.1)
        with pytest.raises(ValidationError):
            require_interior(kite, (0.0, 1.05), floor=0.1)
        with pytest.raises(ValidationError):
            require_interior(kite, (5.0, 0.0))


class TestArcs:
    def test_disk_arc_interval(self, disk: Curve):
        """On the unit circle arclength equals angle."""
        arc = arc_by_arclength(disk, math.pi / 2, 0.1)
        start, end = arc.tau_interval()
        assert start == pytest.approx(math.pi / 2 - 0.1, abs=1e-12)
        assert end == pytest.approx(math.pi / 2 + 0.1, abs=1e-12)

    def test_zero_half_length_rejected(self, disk: Curve):
        """Degenerate arcs are rejected."""
        with pytest.raises(ValidationError):
            arc_by_arclength(disk, 1.0, 0.0)

    def test_overlong_arc_rejected(self, disk: Curve):
        """An arc cannot cover the whole boundary."""
        with pytest.raises(ValidationError):
            arc_by_arclength(disk, 1.0, math.pi)

    @pytest.mark.parametrize("center_s", [0.0, 1.3, 4.0, 7.5])
    def test_kite_arc_length(self, kite: Curve, center_s: float):
        """Numerically integrated length of a kite arc is 2 * half_length."""
        arc = arc_by_arclength(kite, center_s, 0.05)
        start, end = arc.tau_interval()
        measured, _ = quad(lambda t: float(kite.speed(np.array(t))), start, end, epsabs=1e-13)
        assert measured == pytest.approx(0.1, abs=1e-10)

    def test_arclength_round_trip(self, kite: Curve):
        """s -> tau -> s on random samples."""
        rng = np.random.default_rng(11)
        s = rng.uniform(0, kite.length, 25)
        assert np.allclose(kite.arclength(kite.parameter_at(s)), s, atol=1e-10, rtol=0)


class TestPartitions:
    def test_extend_keeps_centre(self, disk: Curve):
        """Extension grows both ends by delta."""
        p = pure_dirichlet(disk).nucleate(math.pi / 2, 0.1)
        grown = extend_arc(p, 0, 0.05)
        (arc,) = grown.neumann_arcs
        assert arc.arc_length == pytest.approx(0.3, abs=1e-12)
        assert arc.center_s == pytest.approx(math.pi / 2, abs=1e-12)

    def test_touching_arcs_merge(self, disk: Curve):
        """Two arcs separated by 0.05 merge after extending one by 0.05."""
        p = pure_dirichlet(disk).nucleate(1.0, 0.1).nucleate(1.25, 0.1)
        assert len(p.neumann_arcs) == 2
        merged = extend_arc(p, 0, 0.05)
        assert len(merged.neumann_arcs) == 1
        assert merged.neumann_length == pytest.approx(0.5, abs=1e-12)

    def test_merge_across_origin(self, disk: Curve):
        """Arcs on both sides of s=0 merge through the wrap-around."""
        p = pure_dirichlet(disk).nucleate(0.1, 0.1).nucleate(2 * math.pi - 0.1, 0.1)
        assert len(p.neumann_arcs) == 1
        assert p.neumann_length == pytest.approx(0.4, abs=1e-12)

    def test_repeated_extension_hits_guard(self, disk: Curve):
        """Extending until the Dirichlet part vanishes raises."""
        p = pure_dirichlet(disk).nucleate(1.0, 0.1)
        with pytest.raises(PartitionError):
            for _ in range(100):
                p = extend_arc(p, 0, 0.1)

    def test_measure_conservation(self, kite: Curve):
        """|Gamma_D| + |Gamma_N| equals the total length after nucleate/extend."""
        p = pure_dirichlet(kite)
        rng = np.random.default_rng(5)
        for _ in range(6):
            p = p.nucleate(float(rng.uniform(0, kite.length)), 0.05)
            p = extend_all(p, 0.02)
            segments = p.segments()
            total = sum(s.length for s in segments)
            assert total == pytest.approx(kite.length, abs=1e-10)
            assert p.dirichlet_length + p.neumann_length == pytest.approx(kite.length, abs=1e-10)

    def test_segments_alternate(self, disk_mixed: Partition):
        """A single arc gives one Neumann and one Dirichlet segment."""
        kinds = [s.kind for s in disk_mixed.segments()]
        assert kinds == ["N", "D"]
        assert disk_mixed.kind_at(math.pi / 2) == "N"
        assert disk_mixed.kind_at(0.0) == "D"

    def test_snapshots_compare_equal(self, disk: Curve):
        """Restoring a stored partition gives an equal object."""
        p = pure_dirichlet(disk).nucleate(1.0, 0.1)
        snapshot = p
        grown = extend_arc(p, 0, 0.01)
        assert grown != snapshot
        assert snapshot == pure_dirichlet(disk).nucleate(1.0, 0.1)
