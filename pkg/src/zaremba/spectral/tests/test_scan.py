"""Tests for sigma_min scans and the forward Dirichlet search."""

import itertools

import pytest

from zaremba.geometry import Curve, Partition, pure_dirichlet, pure_neumann
from zaremba.spectral.scan import (
    CharValue,
    ScanError,
    next_higher_dirichlet,
    scan_profile,
    sigma_min_scan,
)
from zaremba.validation import ValidationError

J0_ROOT = 2.404825557695773
J1_PRIME_ROOT = 1.841183781340659
J11_ROOT = 15.589847884455485
J1_ROOT = 3.831705970207512
J2_ROOT = 5.135622301840683
J0_SECOND_ROOT = 5.520078110286311


def _expand(values: list[CharValue]) -> list[float]:
    """Characteristic values repeated by multiplicity."""
    return [v.k for v in values for _ in range(v.multiplicity)]


def test_first_dirichlet_value_of_disk(disk_dirichlet: Partition):
    """The first zero of J0, simple."""
    (value,) = sigma_min_scan(disk_dirichlet, (2.0, 2.8))
    assert value.k == pytest.approx(J0_ROOT, abs=1e-6)
    assert value.multiplicity == 1
    assert value.eigenvalue == pytest.approx(J0_ROOT**2, abs=1e-5)


@pytest.mark.timeout(60)
def test_disk_dirichlet_values_up_to_six(disk_dirichlet: Partition):
    """Bessel zeros in [2, 6]: simple J0 zeros, double J1 and J2 zeros."""
    values = sigma_min_scan(disk_dirichlet, (2.0, 6.0), nodes_per_arc=128)
    expected = [(J0_ROOT, 1), (J1_ROOT, 2), (J2_ROOT, 2), (J0_SECOND_ROOT, 1)]
    assert len(values) == len(expected)
    for value, (root, multiplicity) in zip(values, expected, strict=True):
        assert value.k == pytest.approx(root, abs=1e-6)
        assert value.multiplicity == multiplicity


def test_first_neumann_value_of_disk(disk_neumann: Partition):
    """The first zero of J1', double."""
    (value,) = sigma_min_scan(disk_neumann, (1.5, 2.2))
    assert value.k == pytest.approx(J1_PRIME_ROOT, abs=1e-6)
    assert value.multiplicity == 2


def test_double_dirichlet_value_near_15(disk_dirichlet: Partition):
    """The first zero of J11 is a double Dirichlet value."""
    values = sigma_min_scan(disk_dirichlet, (15.0, 15.8), nodes_per_arc=96)
    near = [v for v in values if abs(v.k - J11_ROOT) < 1e-4]
    assert len(near) == 1
    assert near[0].multiplicity == 2


def test_no_values_in_gap(disk_dirichlet: Partition):
    """Below the first Dirichlet value the scan is empty."""
    assert sigma_min_scan(disk_dirichlet, (1.0, 2.0)) == []


def test_profile_keeps_samples(disk_dirichlet: Partition):
    """The profile records every grid sample."""
    profile = scan_profile(disk_dirichlet, (2.0, 2.5), 0.05)
    assert profile.k.size == 11
    assert profile.sigma_min.shape == profile.k.shape
    assert len(profile.values) == 1


def test_bad_interval_rejected(disk_dirichlet: Partition):
    """The interval must be ordered and positive."""
    with pytest.raises(ValidationError):
        sigma_min_scan(disk_dirichlet, (2.0, 1.0))
    with pytest.raises(ValidationError):
        sigma_min_scan(disk_dirichlet, (1.0, 2.0), -0.1)


class TestNextHigherDirichlet:
    def test_disk_from_one(self, disk: Curve):
        """Above k = 1 the next disk value is the first J0 zero."""
        assert next_higher_dirichlet(disk, 1.0).k == pytest.approx(J0_ROOT, abs=1e-6)

    def test_strictly_above(self, disk: Curve):
        """Starting on a characteristic value skips it."""
        value = next_higher_dirichlet(disk, J0_ROOT)
        assert value.k == pytest.approx(J1_ROOT, abs=1e-6)
        assert value.multiplicity == 2

    def test_kite_from_one_and_a_half(self, kite: Curve):
        """First Dirichlet value of the kite."""
        assert next_higher_dirichlet(kite, 1.5).k == pytest.approx(2.2099, abs=5e-4)

    def test_budget_exhausted(self, disk: Curve):
        """A tiny search budget below the first value raises."""
        with pytest.raises(ScanError):
            next_higher_dirichlet(disk, 0.5, window=0.2, max_windows=2)


class TestOrdering:
    def test_nested_arcs_lower_the_first_value(self, disk_dirichlet: Partition):
        """Growing the Neumann arc strictly lowers the first characteristic value."""
        firsts = []
        for half_length in (0.1, 0.2, 0.4):
            partition = disk_dirichlet.nucleate(1.0, half_length)
            values = sigma_min_scan(partition, (1.0, 2.45), nodes_per_arc=32)
            firsts.append(values[0].k)
        assert firsts[0] < J0_ROOT
        assert firsts[0] > firsts[1] > firsts[2]

    def test_growing_arc_lowers_first_three_values(self, disk_dirichlet: Partition):
        """Arc lengths 0.2, 0.4, 0.8, 1.6 strictly lower each of the first three values."""
        lowest: list[list[float]] = []
        for half_length in (0.1, 0.2, 0.4, 0.8):
            partition = disk_dirichlet.nucleate(1.0, half_length)
            lowest.append(_expand(sigma_min_scan(partition, (0.5, 4.0), nodes_per_arc=32))[:3])
        for smaller, larger in itertools.pairwise(lowest):
            assert len(smaller) == len(larger) == 3
            for j in range(3):
                assert larger[j] < smaller[j]

    def test_mixed_values_interlace(self, disk_neumann: Partition, disk_dirichlet: Partition):
        """Neumann < mixed < Dirichlet for the first three eigenvalues of the disk."""
        neumann = [0.0] + _expand(sigma_min_scan(disk_neumann, (0.5, 4.0)))
        dirichlet = _expand(sigma_min_scan(disk_dirichlet, (0.5, 4.0)))
        mixed = _expand(sigma_min_scan(disk_dirichlet.nucleate(1.0, 0.4), (0.5, 4.0), nodes_per_arc=32))
        for j in range(3):
            assert neumann[j] < mixed[j] < dirichlet[j]

    @pytest.mark.parametrize("curve_name", ["disk", "kite"])
    def test_filonov_inequality(self, curve_name: str, request: pytest.FixtureRequest):
        """The (j+1)-th Neumann eigenvalue lies below the j-th Dirichlet one."""
        curve: Curve = request.getfixturevalue(curve_name)
        neumann = [0.0] + _expand(sigma_min_scan(pure_neumann(curve), (0.5, 5.0)))
        dirichlet = _expand(sigma_min_scan(pure_dirichlet(curve), (0.5, 5.0)))
        for j in range(min(4, len(dirichlet), len(neumann) - 1)):
            assert neumann[j + 1] < dirichlet[j]
