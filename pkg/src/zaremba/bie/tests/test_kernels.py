"""Tests for the Helmholtz kernels."""

import math

import numpy as np
import pytest

from zaremba.bie.kernels import (
    fundamental_solution,
    kernel_normal_derivative,
    kernel_split,
)
from zaremba.specfun import hankel1
from zaremba.validation import ValidationError


def test_reciprocity_is_exact():
    """Swapping source and target leaves G unchanged."""
    x, y = (0.3, -0.2), (-0.4, 0.55)
    assert fundamental_solution(2.7, x, y) == fundamental_solution(2.7, y, x)


def test_delegates_to_hankel():
    """G = -(i/4) H0(k r) at k = 1, r = 1."""
    expected = -0.25j * complex(hankel1(0, 1.0))
    assert fundamental_solution(1.0, (0.0, 0.0), (0.0, 1.0)) == pytest.approx(expected, abs=1e-15)


def test_coincident_points_rejected():
    """Both kernels are singular at x = y."""
    with pytest.raises(ValidationError):
        fundamental_solution(1.0, (0.1, 0.1), (0.1, 0.1))
    with pytest.raises(ValidationError):
        kernel_normal_derivative(1.0, (0.1, 0.1), (1.0, 0.0), (0.1, 0.1))


@pytest.mark.parametrize("k", [1.0, 5.0])
def test_helmholtz_residual(k: float):
    """Five-point Laplacian of G plus k^2 G vanishes at distance 0.5 from the source."""
    h = 1e-3
    x0 = complex(0.5, 0.0)

    def g(z: complex) -> complex:
        return fundamental_solution(k, z, 0j)

    laplacian = (g(x0 + h) + g(x0 - h) + g(x0 + 1j * h) + g(x0 - 1j * h) - 4 * g(x0)) / h**2
    assert abs(laplacian + k**2 * g(x0)) < 1e-5


def test_orthogonal_normal_gives_zero():
    """nu_x perpendicular to x - y makes the normal derivative vanish."""
    assert abs(kernel_normal_derivative(3.0, (1.0, 0.0), (0.0, 1.0), (0.0, 0.0))) == 0


@pytest.mark.parametrize("k", [1.0, 4.0 + 0.1j])
def test_normal_derivative_matches_finite_difference(k: complex):
    """dG/dnu_x against a central difference along nu_x at separation 0.3."""
    x = complex(0.2, 0.1)
    nu = complex(math.cos(0.7), math.sin(0.7))
    y = x - 0.3 * complex(math.cos(1.9), math.sin(1.9))
    h = 1e-5
    difference = (fundamental_solution(k, x + h * nu, y) - fundamental_solution(k, x - h * nu, y)) / (
        2 * h
    )
    assert kernel_normal_derivative(k, x, nu, y) == pytest.approx(difference, abs=1e-6)


def test_diagonal_limit_on_unit_circle():
    """As y -> x along the unit circle, dG/dnu_x -> kappa/(4 pi) = 1/(4 pi)."""
    values: list[float] = []
    for delta in [1e-2, 1e-3, 1e-4]:
        x = complex(1.0, 0.0)
        y = complex(math.cos(delta), math.sin(delta))
        values.append(kernel_normal_derivative(1.0, x, x, y).real)
    errors = [abs(v - 1 / (4 * math.pi)) for v in values]
    assert errors[-1] < 1e-6
    assert errors[0] > errors[1] > errors[2]


@pytest.mark.parametrize("kind", ["S", "K", "dS", "dK"])
def test_log_split_remainder_is_bounded(kind: str):
    """Kernel minus L log r stays bounded as r -> 0 (q = r^2/2 as on the unit circle)."""
    r = np.geomspace(1e-8, 1e-3, 6)
    q = r**2 / 2
    value, log_part = kernel_split(kind, 2.0, r, q)  # type: ignore[arg-type]
    remainder = value - log_part * np.log(r)
    assert np.max(np.abs(np.diff(remainder))) < 1e-2


def test_k_derivatives_match_finite_difference():
    """dS and dK kernels are the k-derivatives of S and K."""
    r = np.array([0.3, 1.1])
    q = np.array([0.05, -0.2])
    k, h = 2.3, 1e-6
    for base, derivative in [("S", "dS"), ("K", "dK")]:
        plus, _ = kernel_split(base, k + h, r, q)  # type: ignore[arg-type]
        minus, _ = kernel_split(base, k - h, r, q)  # type: ignore[arg-type]
        analytic, _ = kernel_split(derivative, k, r, q)  # type: ignore[arg-type]
        assert np.allclose(analytic, (plus - minus) / (2 * h), atol=1e-8)
