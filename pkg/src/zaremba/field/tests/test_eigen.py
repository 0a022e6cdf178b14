"""Tests for eigenfunction extraction and the eigenfunction expansion of Z."""

import numpy as np
import pytest
import scipy.special

from zaremba.bie.potentials import eval_single_layer
from zaremba.field.eigen import EigenPair, eigenpair_extract, gram_matrix, spectral_sum
from zaremba.field.green import eval_field, solve_field
from zaremba.geometry import Partition
from zaremba.spectral.scan import sigma_min_scan
from zaremba.validation import ValidationError

J0_ROOT = 2.404825557695773
RECEIVER = 0.5j


def _exact(k: float) -> float:
    y0, j0 = scipy.special.y0, scipy.special.j0
    return 0.25 * (y0(k * 0.5) - j0(k * 0.5) * y0(k) / j0(k))


@pytest.fixture(scope="module")
def disk_modes(disk_dirichlet: Partition) -> list[EigenPair]:
    """The first twelve Dirichlet eigenfunctions of the unit disk."""
    values = sigma_min_scan(disk_dirichlet, (2.0, 7.8), nodes_per_arc=64)
    return [pair for value in values for pair in eigenpair_extract(value)]


def test_twelve_modes_below_7_8(disk_modes: list[EigenPair]):
    assert len(disk_modes) == 12
    assert [p.index for p in disk_modes[:5]] == [0, 0, 1, 0, 1]


def test_first_mode_is_radial_bessel(disk_modes: list[EigenPair]):
    first = disk_modes[0]
    r = np.linspace(0.0, 0.9, 30)
    u = first.evaluate(r * np.exp(0.3j))
    expected = scipy.special.j0(J0_ROOT * r)
    assert abs(np.corrcoef(u, expected)[0, 1]) > 0.9999


def test_first_mode_normalisation(disk_modes: list[EigenPair]):
    """u = J0(k r) / (sqrt(pi) |J1(k)|) for the first disk mode."""
    centre = abs(float(disk_modes[0].evaluate(0j)[0]))
    expected = 1 / (np.sqrt(np.pi) * abs(scipy.special.j1(J0_ROOT)))
    assert centre == pytest.approx(expected, rel=1e-6)


def test_eigenfunctions_are_real(disk_modes: list[EigenPair]):
    points = np.array([0.2, 0.4j, -0.5 + 0.1j])
    for pair in disk_modes[:5]:
        values = eval_single_layer(pair.density, pair.mesh, pair.k, points)
        assert np.max(np.abs(values.imag)) < 1e-6 * np.max(np.abs(values.real))


def test_orthonormal_on_interior_grid(disk_modes: list[EigenPair]):
    gram = gram_matrix(disk_modes[:4])
    assert np.max(np.abs(gram - np.eye(4))) < 2e-3


def test_mixed_mode_normalised(disk_mixed: Partition):
    (value,) = sigma_min_scan(disk_mixed, (2.3, 2.41), 0.005, nodes_per_arc=32)
    (pair,) = eigenpair_extract(value)
    assert gram_matrix([pair])[0, 0] == pytest.approx(1.0, abs=2e-3)
    assert np.max(np.abs(pair.normal_derivative()[pair.mesh.neumann_nodes])) < 1e-4 * np.max(
        np.abs(pair.normal_derivative())
    )


class TestSpectralSum:
    def test_plain_partial_sums(self, disk_modes: list[EigenPair]):
        """Only radial modes contribute at the centre; the error never grows with J."""
        exact = _exact(1.0)
        errors = [abs(spectral_sum(disk_modes[:j], 0j, RECEIVER, 1.0) - exact) for j in range(1, 13)]
        assert errors[-1] < 0.02
        assert all(later <= earlier + 1e-9 for earlier, later in zip(errors, errors[1:]))

    def test_reference_subtracted(self, disk_dirichlet: Partition, disk_modes: list[EigenPair]):
        k0 = 0.5
        z0 = float(eval_field(solve_field(k0, disk_dirichlet, 0j), RECEIVER)[0])
        total = spectral_sum(disk_modes, 0j, RECEIVER, 1.0, reference=(k0, z0))
        assert total == pytest.approx(_exact(1.0), abs=5e-3)
        plain = spectral_sum(disk_modes, 0j, RECEIVER, 1.0)
        assert abs(total - _exact(1.0)) < abs(plain - _exact(1.0))

    def test_tuple_points(self, disk_modes: list[EigenPair]):
        assert spectral_sum(disk_modes[:3], (0.0, 0.0), (0.0, 0.5), 1.0) == pytest.approx(
            spectral_sum(disk_modes[:3], 0j, RECEIVER, 1.0)
        )

    def test_wavenumber_on_eigenvalue(self, disk_modes: list[EigenPair]):
        with pytest.raises(ValidationError):
            spectral_sum(disk_modes[:1], 0j, RECEIVER, disk_modes[0].k)
