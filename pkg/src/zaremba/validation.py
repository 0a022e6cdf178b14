"""Validation utilities for run parameters and evaluation points."""

import math

from zaremba.utils.inflect import inflect


class ValidationError(Exception):
    """
    A parameter or evaluation point outside what a numerical routine accepts,
    such as a non-positive wavenumber or a point too close to the boundary.

    >>> validate_positive("k", -1.0)  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ValidationError: k must be positive, got -1.0
    """


# Validation constraints
MIN_NODES_PER_ARC = 8
MAX_NODES_PER_ARC = 4096
MIN_CONTOUR_POINTS = 4


def validate_positive(name: str, value: float, *, allow_zero: bool = False) -> float:
    """
    Check that a real parameter is finite and positive.

    Args:
        name: Parameter name used in the error message
        value: The value to check
        allow_zero: Whether zero is accepted

    Returns:
        The value as a float

    Raises:
        ValidationError: If the value is not finite or out of range

    Examples:
        >>> validate_positive("radius", 2)
        2.0
        >>> validate_positive("eps", 0.0, allow_zero=True)
        0.0
        >>> validate_positive("radius", -1.0)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: radius must be positive, got -1.0
        >>> validate_positive("k", float("nan"))  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: k must be finite, got nan
    """
    number = float(value)
    if not math.isfinite(number):
        raise ValidationError(f"{name} must be finite, got {number!r}")
    if number < 0 or (number == 0 and not allow_zero):
        raise ValidationError(f"{name} must be positive, got {number!r}")
    return number


def validate_nodes_per_arc(nodes: int) -> int:
    """
    Check the per-arc node count used by the boundary mesh.

    Examples:
        >>> validate_nodes_per_arc(64)
        64
        >>> validate_nodes_per_arc(4)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: nodes_per_arc must be at least no('node', 8), got 4
    """
    if nodes < MIN_NODES_PER_ARC:
        raise ValidationError(
            inflect(
                f"nodes_per_arc must be at least no('node', {MIN_NODES_PER_ARC}), got {nodes}"
            )
        )
    if nodes > MAX_NODES_PER_ARC:
        raise ValidationError(
            f"nodes_per_arc cannot exceed {MAX_NODES_PER_ARC}, got {nodes}"
        )
    return nodes


def validate_interval(lo: float, hi: float, *, name: str = "interval") -> tuple[float, float]:
    """
    Check a positive wavenumber interval [lo, hi].

    Examples:
        >>> validate_interval(2.0, 2.8)
        (2.0, 2.8)
        >>> validate_interval(3.0, 2.0)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: interval must satisfy 0 < lo < hi, got [3.0, 2.0]
    """
    lo_f, hi_f = float(lo), float(hi)
    if not (math.isfinite(lo_f) and math.isfinite(hi_f)) or not 0 < lo_f < hi_f:
        raise ValidationError(f"{name} must satisfy 0 < lo < hi, got [{lo_f}, {hi_f}]")
    return lo_f, hi_f
