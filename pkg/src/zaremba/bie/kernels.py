"""Helmholtz kernels in the delta-source convention (Laplacian + k^2) G = delta.

    G(x, y)       = -(i/4) H0(k r)
    dG/dnu_x      = (ik/4) H1(k r) q / r,        q = nu_x . (x - y)
    dG/dk         = (i/4) r H1(k r)
    d/dk dG/dnu_x = (ik/4) H0(k r) q

Every kernel is split as L * log(r) + M with L and M smooth; the split is what
the product quadrature in ``zaremba.bie.mesh`` integrates.
"""

from typing import Literal

import numpy as np

from zaremba.geometry import as_complex
from zaremba.specfun import EULER_GAMMA, jy01
from zaremba.types import ComplexArray, FloatArray, Point
from zaremba.validation import ValidationError

KernelKind = Literal["S", "K", "dS", "dK"]
"""Single layer, its normal derivative at the target, and the k-derivatives of both."""


def kernel_split(
    kind: KernelKind, k: complex, r: FloatArray, q: FloatArray
) -> tuple[ComplexArray, ComplexArray]:
    """Kernel values and their log(r) coefficients at separations r > 0."""
    j0, j1, y0, y1 = jy01(k * r)
    match kind:
        case "S":
            value = -0.25j * (j0 + 1j * y0)
            log_part = j0 / (2 * np.pi)
        case "K":
            value = 0.25j * k * (j1 + 1j * y1) * q / r
            log_part = -(k / (2 * np.pi)) * j1 * q / r
        case "dS":
            value = 0.25j * r * (j1 + 1j * y1)
            log_part = -(r / (2 * np.pi)) * j1
        case "dK":
            value = 0.25j * k * (j0 + 1j * y0) * q
            log_part = -(k / (2 * np.pi)) * j0 * q
    return value, log_part


def kernel_diagonal(
    kind: KernelKind, k: complex, curvature: FloatArray
) -> tuple[ComplexArray, ComplexArray]:
    """Smooth remainder R and log coefficient L of each kernel as y -> x along the curve."""
    shape = np.shape(curvature)
    match kind:
        case "S":
            remainder = -0.25j + (np.log(k / 2) + EULER_GAMMA) / (2 * np.pi)
            return np.full(shape, remainder, dtype=np.complex128), np.full(
                shape, 1 / (2 * np.pi), dtype=np.complex128
            )
        case "K":
            return (curvature / (4 * np.pi)).astype(np.complex128), np.zeros(shape, dtype=np.complex128)
        case "dS":
            return np.full(shape, 1 / (2 * np.pi * k), dtype=np.complex128), np.zeros(
                shape, dtype=np.complex128
            )
        case "dK":
            return np.zeros(shape, dtype=np.complex128), np.zeros(shape, dtype=np.complex128)


def fundamental_solution(k: complex, x: Point | complex, y: Point | complex) -> complex:
    """
    G(x, y) = -(i/4) H0(k |x - y|), the free-space solution of (Laplacian + k^2) G = delta.

    Examples:
        >>> g = fundamental_solution(1.0, (0.0, 0.0), (1.0, 0.0))
        >>> round(g.real, 12), round(g.imag, 12)
        (0.022064241054, -0.191299421639)
        >>> fundamental_solution(1.0, (0.5, 0.5), (0.5, 0.5))  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: coincident points
    """
    r = abs(as_complex(x) - as_complex(y))
    if r == 0:
        raise ValidationError("fundamental_solution is singular at coincident points")
    value, _ = kernel_split("S", complex(k), np.array(r), np.array(0.0))
    return complex(value)


def kernel_normal_derivative(
    k: complex, x: Point | complex, nu_x: Point | complex, y: Point | complex
) -> complex:
    """
    dG/dnu_x (x, y) = (ik/4) H1(k r) (nu_x . (x - y)) / r.

    >>> abs(kernel_normal_derivative(1.0, (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)))
    0.0
    """
    xc, yc, nu = as_complex(x), as_complex(y), as_complex(nu_x)
    r = abs(xc - yc)
    if r == 0:
        raise ValidationError("kernel_normal_derivative is singular at coincident points")
    q = (nu.conjugate() * (xc - yc)).real
    value, _ = kernel_split("K", complex(k), np.array(r), np.array(q))
    return complex(value)


def fundamental_solution_many(k: complex, x: complex, y: ComplexArray) -> ComplexArray:
    """G(x, y_j) for a fixed x; y_j must differ from x."""
    r = np.abs(y - x)
    return kernel_split("S", complex(k), r, np.zeros_like(r))[0]


def normal_derivative_many(
    k: complex, x: ComplexArray, nu_x: ComplexArray, y: complex
) -> ComplexArray:
    """dG/dnu_x (x_j, y) at boundary points x_j with normals nu_x_j, for a fixed source y."""
    diff = x - y
    r = np.abs(diff)
    q = np.real(np.conj(nu_x) * diff)
    return kernel_split("K", complex(k), r, q)[0]
