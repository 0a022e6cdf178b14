"""Bessel and Hankel functions of order 0 and 1 for real and complex arguments.

Power series are used for |z| <= SERIES_SWITCH, backward recurrence up to
ASYMPTOTIC_SWITCH and the Hankel asymptotic expansion beyond it. Every branch
evaluates J and Y together, because every kernel in the package needs the pair.
"""

import math
from typing import Literal, overload

import numpy as np

from zaremba.types import ComplexArray, FloatArray
from zaremba.validation import ValidationError

EULER_GAMMA = 0.57721566490153286060651209008240243
SERIES_SWITCH = 8.0
ASYMPTOTIC_SWITCH = 25.0
OFF_AXIS_SWITCH = 12.0
"""Series/asymptotic switch for arguments too far off the real axis for the recurrence."""

RECURRENCE_MAX_IMAG = 8.0
RECURRENCE_GROWTH = 1.5
RECURRENCE_EXTRA = 40
RECURRENCE_RESCALE = 1e100
SERIES_TERMS = 36
ASYMPTOTIC_TERMS = 26

Order = Literal[0, 1]


def _asymptotic_coefficients(order: int) -> list[float]:
    """a_k(order) of the Hankel expansion, k = 0..ASYMPTOTIC_TERMS-1.

    >>> [round(a, 6) for a in _asymptotic_coefficients(0)[:3]]
    [1.0, -0.125, 0.070312]
    """
    mu = 4.0 * order * order
    coefficients = [1.0]
    for k in range(1, ASYMPTOTIC_TERMS):
        coefficients.append(coefficients[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return coefficients


_A0 = _asymptotic_coefficients(0)
_A1 = _asymptotic_coefficients(1)


def _series(
    z: ComplexArray,
) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
    w = -(z * z) / 4.0
    j0_term = np.ones_like(z)
    j1_term = np.ones_like(z)
    j0 = j0_term.copy()
    j1 = j1_term.copy()
    harmonic = 0.0
    y0_tail = np.zeros_like(z)
    # psi(m+1) + psi(m+2) at m = 0
    y1_tail = (-2.0 * EULER_GAMMA + 1.0) * j1_term
    for m in range(1, SERIES_TERMS):
        harmonic += 1.0 / m
        j0_term = j0_term * w / (m * m)
        j1_term = j1_term * w / (m * (m + 1))
        j0 = j0 + j0_term
        j1 = j1 + j1_term
        y0_tail = y0_tail + harmonic * j0_term
        y1_tail = y1_tail + (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (m + 1)) * j1_term
    half = z / 2.0
    j1 = half * j1
    log_half = np.log(half)
    y0 = (2.0 / math.pi) * ((log_half + EULER_GAMMA) * j0 - y0_tail)
    y1 = -2.0 / (math.pi * z) + (2.0 / math.pi) * log_half * j1 - half * y1_tail / math.pi
    return j0, j1, y0, y1


def _recurrence(
    z: ComplexArray,
) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
    """
    J_n by backward recurrence from order top down to 0, normalised with
    J0 + 2 sum J_2k = 1, and Y0, Y1 from their Neumann series in J_n:

        (pi/2) Y0 = (log(z/2) + gamma) J0 - 2 sum (-1)^k J_2k / k
        (pi/2) Y1 = (log(z/2) + gamma) J1 - J0 / z + sum (-1)^k (J_2k-1 - J_2k+1) / k
    """
    top = 2 * ((int(RECURRENCE_GROWTH * np.max(np.abs(z))) + RECURRENCE_EXTRA) // 2)
    upper = np.zeros_like(z)
    current = np.ones_like(z)
    norm = np.zeros_like(z)
    y0_sum = np.zeros_like(z)
    y1_sum = np.zeros_like(z)
    j1 = np.zeros_like(z)
    for n in range(top, 0, -1):
        if n % 2 == 0:
            k = n // 2
            norm = norm + 2.0 * current
            y0_sum = y0_sum + ((-1) ** k / k) * current
        else:
            m = n // 2
            weight = 1.0 / (m + 1) + (1.0 / m if m else 0.0)
            y1_sum = y1_sum + (-1) ** (m + 1) * weight * current
            if n == 1:
                j1 = current
        upper, current = current, (2.0 * n / z) * current - upper
        large = np.abs(current) > RECURRENCE_RESCALE
        if large.any():
            scale = np.where(large, 1.0 / RECURRENCE_RESCALE, 1.0)
            upper, current = upper * scale, current * scale
            norm, y0_sum, y1_sum, j1 = norm * scale, y0_sum * scale, y1_sum * scale, j1 * scale
    norm = norm + current
    j0 = current / norm
    j1 = j1 / norm
    log_term = np.log(z / 2.0) + EULER_GAMMA
    y0 = (2.0 / math.pi) * (log_term * j0 - 2.0 * y0_sum / norm)
    y1 = (2.0 / math.pi) * (log_term * j1 - j0 / z + y1_sum / norm)
    return j0, j1, y0, y1


def _asymptotic_pair(
    z: ComplexArray, order: int, coefficients: list[float]
) -> tuple[ComplexArray, ComplexArray]:
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    inverse = 1.0 / z
    power = np.ones_like(z)
    for k, a in enumerate(coefficients):
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p = p + sign * a * power
        else:
            q = q + sign * a * power
        power = power * inverse
    chi = z - (0.5 * order + 0.25) * math.pi
    amplitude = np.sqrt(2.0 / (math.pi * z))
    cos_chi = np.cos(chi)
    sin_chi = np.sin(chi)
    return amplitude * (p * cos_chi - q * sin_chi), amplitude * (p * sin_chi + q * cos_chi)


def _asymptotic(
    z: ComplexArray,
) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
    j0, y0 = _asymptotic_pair(z, 0, _A0)
    j1, y1 = _asymptotic_pair(z, 1, _A1)
    return j0, j1, y0, y1


def jy01(
    x: complex | ComplexArray | FloatArray,
) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
    """J0, J1, Y0, Y1 at every entry of x, as complex arrays of x's shape.

    Arguments must be non-zero with |arg x| < pi; the caller owns that check.
    """
    z = np.asarray(x, dtype=np.complex128)
    shape = z.shape
    flat = z.ravel()
    out = [np.empty_like(flat) for _ in range(4)]
    magnitude = np.abs(flat)
    middle = (
        (magnitude > SERIES_SWITCH)
        & (magnitude <= ASYMPTOTIC_SWITCH)
        & (np.abs(flat.imag) <= RECURRENCE_MAX_IMAG)
    )
    small = (magnitude <= SERIES_SWITCH) | (~middle & (magnitude <= OFF_AXIS_SWITCH))
    far = ~(small | middle)
    with np.errstate(divide="ignore", invalid="ignore"):
        for mask, branch in ((small, _series), (middle, _recurrence), (far, _asymptotic)):
            if mask.any():
                for target, values in zip(out, branch(flat[mask])):
                    target[mask] = values
    j0, j1, y0, y1 = (values.reshape(shape) for values in out)
    return j0, j1, y0, y1


def _check_order(n: int) -> None:
    if n not in (0, 1):
        raise ValidationError(f"Only orders 0 and 1 are supported, got {n}")


def bessel_j(n: Order, x: complex | ComplexArray | FloatArray) -> ComplexArray:
    """Bessel function of the first kind J_n(x), n in {0, 1}.

    Examples:
        >>> complex(bessel_j(0, 0.0))
        (1+0j)
        >>> complex(bessel_j(1, 0.0))
        0j
        >>> abs(complex(bessel_j(0, 2.404825557695773))) < 1e-10
        True
    """
    _check_order(n)
    z = np.asarray(x, dtype=np.complex128)
    shape = z.shape
    flat = z.ravel()
    zero = flat == 0
    result = np.empty_like(flat)
    result[zero] = 1.0 if n == 0 else 0.0
    if (~zero).any():
        result[~zero] = jy01(flat[~zero])[n]
    return result.reshape(shape)


@overload
def bessel_y(n: Order, x: float | FloatArray) -> FloatArray: ...


@overload
def bessel_y(n: Order, x: complex | ComplexArray) -> ComplexArray: ...


def bessel_y(
    n: Order, x: float | complex | FloatArray | ComplexArray
) -> FloatArray | ComplexArray:
    """Bessel function of the second kind Y_n(x), n in {0, 1}.

    Real arguments must be positive and give real values; complex arguments
    must lie off the closed negative real axis.

    Examples:
        >>> round(float(bessel_y(0, 1.0)), 12)
        0.088256964216
        >>> bessel_y(0, 0.0)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: Y_n needs positive real arguments
    """
    _check_order(n)
    values = np.asarray(x)
    if not np.iscomplexobj(values):
        real = values.astype(np.float64)
        if np.any(real <= 0):
            raise ValidationError(
                f"Y_n needs positive real arguments, got minimum {real.min()!r}"
            )
        return jy01(real)[2 + n].real
    z = values.astype(np.complex128)
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise ValidationError("Y_n is undefined on the closed negative real axis")
    return jy01(z)[2 + n]


def hankel1(n: Order, x: complex | ComplexArray | FloatArray) -> ComplexArray:
    """Hankel function of the first kind H_n^(1)(x) = J_n(x) + i Y_n(x).

    >>> h = complex(hankel1(0, 1.0))
    >>> round(h.real, 12), round(h.imag, 12)
    (0.765197686558, 0.088256964216)
    """
    _check_order(n)
    z = np.asarray(x, dtype=np.complex128)
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise ValidationError("H_n^(1) is undefined on the closed negative real axis")
    j0, j1, y0, y1 = jy01(z)
    if n == 0:
        return j0 + 1j * y0
    return j1 + 1j * y1
