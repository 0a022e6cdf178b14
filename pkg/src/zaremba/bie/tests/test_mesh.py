"""Tests for boundary meshes and their log tables."""

import math
from collections.abc import Callable

import numpy as np
import pytest
from scipy.integrate import quad

from zaremba.bie.mesh import Mesh, chebyshev_nodes, fejer_weights
from zaremba.geometry import Curve, Partition, extend_arc, pure_dirichlet
from zaremba.validation import ValidationError

MakeMesh = Callable[[Partition, int], Mesh]


def _log_kernel_rows(mesh: Mesh) -> np.ndarray:
    """Quadrature-corrected matrix for the kernel log|x - y| (L = 1, no smooth remainder)."""
    with np.errstate(divide="ignore"):
        smooth = np.log(mesh.distance) - mesh.log_subtracted
    np.fill_diagonal(smooth, mesh.diag_log)
    return smooth + mesh.log_weights


def test_periodic_mesh_is_uniform(disk_dirichlet: Partition, make_mesh: MakeMesh):
    """A junction-free partition gets uniform nodes and trapezoid weights."""
    mesh = make_mesh(disk_dirichlet, 64)
    assert mesh.periodic
    assert np.allclose(np.diff(mesh.tau), 2 * math.pi / 64)
    assert float(mesh.density_weights.sum()) == pytest.approx(2 * math.pi, abs=1e-12)


def test_odd_node_count_rounded_up(disk_dirichlet: Partition, make_mesh: MakeMesh):
    """Kress weights need an even node count."""
    assert make_mesh(disk_dirichlet, 63).size == 64


def test_node_count_bounds(disk_dirichlet: Partition, make_mesh: MakeMesh):
    """Too few nodes per arc is a validation error."""
    with pytest.raises(ValidationError):
        make_mesh(disk_dirichlet, 4)


def test_panels_follow_segments(disk_mixed: Partition, make_mesh: MakeMesh):
    """One Chebyshev panel per segment, Dirichlet panels first."""
    mesh = make_mesh(disk_mixed, 32)
    assert [p.kind for p in mesh.panels] == ["D", "N"]
    assert mesh.size == 64
    assert int(mesh.is_neumann.sum()) == 32
    assert mesh.panels[1].span == pytest.approx(0.2, abs=1e-12)


def test_panel_weights_sum_to_lengths(kite: Curve, make_mesh: MakeMesh):
    """Fejer weights times the panel Jacobian integrate arclength."""
    partition = pure_dirichlet(kite).nucleate(1.0, 0.3)
    mesh = make_mesh(partition, 48)
    for panel, segment in zip(mesh.panels, sorted(partition.segments(), key=lambda s: s.kind != "D")):
        assert float(mesh.weights[panel.nodes].sum()) == pytest.approx(segment.length, abs=1e-10)


def test_fejer_rule_is_exact_for_polynomials():
    """Fejer's first rule integrates t^6 exactly with 8 nodes."""
    t = chebyshev_nodes(8)
    assert float(fejer_weights(8) @ t**6) == pytest.approx(2 / 7, abs=1e-14)


def test_junction_spacing_shrinks_quadratically(disk_mixed: Partition, make_mesh: MakeMesh):
    """Doubling nodes cuts the gap between a junction and its nearest node by four."""
    gaps = []
    for n in (32, 64):
        mesh = make_mesh(disk_mixed, n)
        panel = mesh.panels[1]
        gaps.append(float(mesh.tau[panel.offset]) - panel.tau_start)
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.01)


def test_periodic_log_table_integrates_log_on_circle(disk_dirichlet: Partition, make_mesh: MakeMesh):
    """The integral of log|x - y| over the unit circle vanishes for x on the circle."""
    mesh = make_mesh(disk_dirichlet, 32)
    integrals = _log_kernel_rows(mesh) @ mesh.density_weights
    assert np.max(np.abs(integrals)) < 1e-12


@pytest.mark.parametrize("curve_name", ["disk", "kite"])
def test_panel_log_table_matches_adaptive_quadrature(
    curve_name: str, request: pytest.FixtureRequest, make_mesh: MakeMesh
):
    """
    Integrals of log|x_i - y| / sqrt(1 - t^2) over one panel, for targets on and
    off the panel, against scipy quadrature in the angle variable.
    """
    curve: Curve = request.getfixturevalue(curve_name)
    partition = pure_dirichlet(curve).nucleate(1.0, 0.4)
    mesh = make_mesh(partition, 24)
    panel = mesh.panels[1]
    psi = 1 / np.sqrt(1 - mesh.t[panel.nodes] ** 2)
    ours = _log_kernel_rows(mesh)[:, panel.nodes] @ (mesh.density_weights[panel.nodes] * psi)

    def integrand(theta: float, target: complex) -> float:
        tau = panel.tau_start + (math.cos(theta) + 1) * panel.span / 2
        y = complex(curve.gamma(np.array(tau)))
        jacobian = float(curve.speed(np.array(tau))) * panel.span / 2
        return math.log(abs(target - y)) * jacobian

    for i in range(0, mesh.size, 5):
        on_panel = mesh.panel_index[i] == 1
        points = [math.acos(float(mesh.t[i]))] if on_panel else None
        reference, _ = quad(
            integrand, 0, math.pi, args=(complex(mesh.points[i]),), points=points, limit=400, epsabs=1e-13
        )
        assert ours[i] == pytest.approx(reference, abs=1e-9)


def test_relabel_shares_geometry(disk_mixed: Partition, make_mesh: MakeMesh):
    """Relabelling keeps nodes and cached tables but updates boundary kinds."""
    mesh = make_mesh(disk_mixed, 32)
    tables = mesh.log_weights
    grown = extend_arc(disk_mixed, 0, 0.05)
    relabelled = mesh.relabel(grown)
    assert relabelled.log_weights is tables
    assert relabelled.points is mesh.points
    assert int(relabelled.is_neumann.sum()) > int(mesh.is_neumann.sum())


def test_refined_mesh_interpolates_smooth_density(disk_dirichlet: Partition, make_mesh: MakeMesh):
    """FFT interpolation reproduces a band-limited density on the fine nodes."""
    mesh = make_mesh(disk_dirichlet, 32)
    fine = mesh.refined(4)
    coarse = np.cos(3 * mesh.tau)
    fine_tau = np.angle(fine.points)
    assert np.allclose(fine.interpolation @ coarse, np.cos(3 * fine_tau), atol=1e-12)
