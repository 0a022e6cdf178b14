"""Contour-integral updates of characteristic values after a change of partition.

All three updates evaluate, with the trapezoidal rule on an ellipse,

    winding = (1/2 pi i) tr oint F(w) dw
    p_m     = (1/2 pi i) tr oint (w - k0)^m F(w) dw,   m = 1, 2

for some logarithmic-derivative-like F. With one characteristic value inside
the updated value is k0 + p_1; with two, the offsets are the roots of
x^2 - p_1 x + (p_1^2 - p_2)/2.
"""

import cmath
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from zaremba.bie.mesh import Mesh, build_mesh
from zaremba.bie.operator import assemble, assemble_dk
from zaremba.geometry import Partition
from zaremba.spectral.scan import DEFAULT_NODES, CharValue, sigma_min_scan
from zaremba.types import ComplexArray
from zaremba.utils.inflect import count
from zaremba.utils.parallel import ordered_map
from zaremba.validation import (
    MIN_CONTOUR_POINTS,
    ValidationError,
    validate_interval,
    validate_positive,
)

DEFAULT_POINTS = 32
FORWARD_STEP = 0.01
MIN_SEMI_MINOR = 1e-12
WINDING_SLACK = 0.25
"""The winding integral must lie within this distance of an integer."""

MAJOR_FACTOR = 0.55
MINOR_FACTOR = 0.1

RANDOM_SEMI_MAJOR = (0.1, 0.4)
RANDOM_ASPECT = (0.5, 0.9)
END_CLEARANCE = 0.15
"""Random contours keep characteristic values this many semi-major axes away from their real ends."""

MAX_DRAWS_PER_SAMPLE = 10

DerivativeRule = Literal["forward", "richardson", "analytic"]
UpdateMethod = Literal["exact", "firstorder", "fast"]


class ContourError(Exception):
    """The contour does not isolate a usable set of characteristic values."""

    pass


class NotInContourError(ContourError):
    """No characteristic value lies inside the contour."""

    pass


@dataclass(frozen=True)
class EllipseContour:
    """w(theta) = center + semi_major cos(theta) + i semi_minor sin(theta)."""

    center: complex
    semi_major: float
    semi_minor: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        validate_positive("semi_major", self.semi_major)
        if not self.semi_minor >= MIN_SEMI_MINOR:
            raise ValidationError(
                f"Degenerate contour: semi_minor={self.semi_minor!r} is below {MIN_SEMI_MINOR:g}"
            )
        if self.points < MIN_CONTOUR_POINTS:
            raise ValidationError(
                f"A contour needs at least {MIN_CONTOUR_POINTS} points, got {self.points}"
            )

    @classmethod
    def toward(cls, k: float, k_star: float, points: int = DEFAULT_POINTS) -> "EllipseContour":
        """
        The thin ellipse between the current value k and the target k_star.

        >>> c = EllipseContour.toward(2.0, 1.0)
        >>> c.center, round(c.semi_major, 12), round(c.semi_minor, 12)
        ((1.5+0j), 0.55, 0.1)
        """
        gap = abs(k - k_star)
        return cls(
            center=complex((k + k_star) / 2),
            semi_major=MAJOR_FACTOR * gap,
            semi_minor=MINOR_FACTOR * gap,
            points=points,
        )

    def quadrature(self) -> tuple[ComplexArray, ComplexArray]:
        """Nodes w_m and weights dw_m with oint f dw ~ sum f(w_m) dw_m."""
        theta = 2 * np.pi * np.arange(self.points) / self.points
        nodes = self.center + self.semi_major * np.cos(theta) + 1j * self.semi_minor * np.sin(theta)
        tangent = -self.semi_major * np.sin(theta) + 1j * self.semi_minor * np.cos(theta)
        return nodes, tangent * (2 * np.pi / self.points)

    def contains(self, z: complex) -> bool:
        """
        >>> EllipseContour(2.0, 0.5, 0.1).contains(2.4)
        True
        """
        offset = complex(z) - self.center
        return (offset.real / self.semi_major) ** 2 + (offset.imag / self.semi_minor) ** 2 < 1


@dataclass(frozen=True)
class ContourUpdate:
    """Characteristic values recovered from the contour moments."""

    k0: float
    roots: tuple[float, ...]
    """Real parts, ascending"""

    winding: int
    imaginary: float
    """Largest |imaginary part| among the recovered roots"""

    method: UpdateMethod

    @property
    def k(self) -> float:
        """The single updated value."""
        if len(self.roots) != 1:
            raise ContourError(f"Expected one characteristic value, the contour holds {len(self.roots)}")
        return self.roots[0]

    @property
    def shift(self) -> float:
        return self.k - self.k0

    def closest_above(self, k_star: float) -> float:
        """
        The root closest to k_star that is still above it; the largest root if none is.

        >>> ContourUpdate(2.0, (1.2, 1.6), 2, 0.0, "fast").closest_above(1.4)
        1.6
        """
        above = [r for r in self.roots if r > k_star]
        return min(above) if above else max(self.roots)


def _k0(k0: float | CharValue) -> float:
    return k0.k if isinstance(k0, CharValue) else float(k0)


def _mesh(partition: Partition, nodes_per_arc: int, mesh: Mesh | None) -> Mesh:
    if mesh is None:
        return build_mesh(partition, nodes_per_arc).precompute()
    if mesh.partition != partition:
        return mesh.relabel(partition).precompute()
    return mesh.precompute()


def _winding(value: complex) -> int:
    nearest = round(value.real)
    if abs(value - nearest) > WINDING_SLACK:
        raise ContourError(
            f"Winding integral {value:.4f} is not near an integer: "
            "a characteristic value sits on or next to the contour"
        )
    return int(nearest)


def roots_from_moments(k0: float, winding: int, p1: complex, p2: complex) -> tuple[complex, ...]:
    """
    Recover up to two characteristic values from the shifted moments.

    >>> [round(r.real, 12) for r in roots_from_moments(1.0, 2, 0.5, 0.13)]
    [1.2, 1.3]
    """
    if winding == 1:
        return (k0 + p1,)
    root = cmath.sqrt(2 * p2 - p1 * p1)
    offsets = sorted(((p1 - root) / 2, (p1 + root) / 2), key=lambda z: z.real)
    return tuple(k0 + d for d in offsets)


def _update(
    k0: float,
    contour: EllipseContour,
    traces: ComplexArray,
    method: UpdateMethod,
    max_roots: int,
) -> ContourUpdate:
    nodes, weights = contour.quadrature()
    shifted = nodes - k0
    moments = [complex(np.sum(weights * shifted**m * traces)) / (2j * np.pi) for m in range(3)]
    winding = _winding(moments[0])
    if winding == 0:
        raise NotInContourError(
            f"No characteristic value inside the contour around {contour.center.real:.6f} ({method})"
        )
    if winding < 0 or winding > max_roots:
        raise ContourError(
            f"The contour holds {count('characteristic value', abs(winding))}; "
            f"at most {max_roots} can be extracted"
        )
    roots = roots_from_moments(k0, winding, moments[1], moments[2])
    update = ContourUpdate(
        k0=k0,
        roots=tuple(sorted(r.real for r in roots)),
        winding=winding,
        imaginary=max(abs(r.imag) for r in roots),
        method=method,
    )
    logging.debug(
        f"{method} update from {k0:.10f}: roots {[f'{r:.10f}' for r in update.roots]}, "
        f"max |Im| {update.imaginary:.2e}"
    )
    return update


def operator_derivative(
    partition: Partition,
    mesh: Mesh,
    k: float,
    rule: DerivativeRule = "forward",
    step: float = FORWARD_STEP,
    *,
    base: ComplexArray | None = None,
) -> ComplexArray:
    """
    dA/dk at k: forward difference with the given step, its Richardson
    extrapolation 2 D(h/2) - D(h), or the analytic derivative kernels.
    """
    if rule == "analytic":
        return assemble_dk(k, partition, mesh).matrix
    step = validate_positive("step", step)
    matrix = assemble(k, partition, mesh).matrix if base is None else base

    def forward(h: float) -> ComplexArray:
        return (assemble(k + h, partition, mesh).matrix - matrix) / h

    if rule == "forward":
        return forward(step)
    if rule == "richardson":
        return 2 * forward(step / 2) - forward(step)
    raise ValidationError(f"Unknown derivative rule {rule!r}")


def char_update_exact(
    partition_eps: Partition,
    k0: float | CharValue,
    contour: EllipseContour,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    mesh: Mesh | None = None,
    max_roots: int = 2,
) -> ContourUpdate:
    """
    Characteristic values of the perturbed operator inside the contour from
    tr A(w)^{-1} A'(w), with one factorisation per quadrature node.

    Raises:
        NotInContourError: If the contour holds no characteristic value
        ContourError: If the winding count is not usable
    """
    k = _k0(k0)
    mesh = _mesh(partition_eps, nodes_per_arc, mesh)
    nodes, _ = contour.quadrature()

    def trace(w: complex) -> complex:
        operator = assemble(w, partition_eps, mesh)
        return complex(np.trace(operator.solve_matrix(assemble_dk(w, partition_eps, mesh).matrix)))

    traces = np.array(ordered_map(trace, nodes))
    return _update(k, contour, traces, "exact", max_roots)


def char_update_firstorder(
    partition0: Partition,
    partition_eps: Partition,
    k0: float | CharValue,
    contour: EllipseContour,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    mesh: Mesh | None = None,
) -> ContourUpdate:
    """
    First-order shift -(1/2 pi i) tr oint A0(w)^{-1} (A_eps(w) - A0(w)) dw.

    Both operators are assembled on the perturbed partition's nodes so that
    their difference is confined to the rows whose boundary kind changed.

    Raises:
        NotInContourError: If the unperturbed operator has no characteristic value inside
        ContourError: If it has more than one
    """
    if partition0.curve is not partition_eps.curve:
        raise ValidationError("Both partitions must live on the same curve")
    k = _k0(k0)
    mesh_eps = _mesh(partition_eps, nodes_per_arc, mesh)
    mesh0 = mesh_eps.relabel(partition0)
    nodes, weights = contour.quadrature()

    def traces(w: complex) -> tuple[complex, complex]:
        unperturbed = assemble(w, partition0, mesh0)
        rhs = np.concatenate(
            [
                assemble_dk(w, partition0, mesh0).matrix,
                assemble(w, partition_eps, mesh_eps).matrix - unperturbed.matrix,
            ],
            axis=1,
        )
        solved = unperturbed.solve_matrix(rhs)
        n = mesh_eps.size
        return complex(np.trace(solved[:, :n])), complex(np.trace(solved[:, n:]))

    pairs = ordered_map(traces, nodes)
    winding_traces = np.array([p[0] for p in pairs])
    perturbation = np.array([p[1] for p in pairs])
    winding = _winding(complex(np.sum(weights * winding_traces)) / (2j * np.pi))
    if winding == 0:
        raise NotInContourError(
            f"No unperturbed characteristic value inside the contour around {contour.center.real:.6f}"
        )
    if winding != 1:
        raise ContourError(
            f"First-order update needs a simple characteristic value, the contour holds {winding}"
        )
    shift = -complex(np.sum(weights * perturbation)) / (2j * np.pi)
    logging.debug(f"firstorder update from {k:.10f}: shift {shift.real:+.3e}")
    return ContourUpdate(
        k0=k,
        roots=(k + shift.real,),
        winding=1,
        imaginary=abs(shift.imag),
        method="firstorder",
    )


def char_update_fast(
    partition_eps: Partition,
    k0: float | CharValue,
    contour: EllipseContour,
    *,
    derivative: DerivativeRule = "forward",
    step: float = FORWARD_STEP,
    nodes_per_arc: int = DEFAULT_NODES,
    mesh: Mesh | None = None,
    max_roots: int = 2,
) -> ContourUpdate:
    """
    Update from the linearisation A(k0) (I + (w - k0) B), B = A(k0)^{-1} A'(k0).

    Only A(k0) and the finite-difference neighbour are assembled and A(k0) is
    factorised once; the contour traces then follow from the eigenvalues
    mu of B as tr (I + (w - k0) B)^{-1} B = sum mu / (1 + (w - k0) mu).

    Raises:
        NotInContourError: If the linearisation has no root inside the contour,
            which happens when the true value has left it
        ContourError: If the winding count is not usable
    """
    k = _k0(k0)
    if not contour.contains(k):
        logging.debug(f"k0={k:.10f} lies outside the contour around {contour.center.real:.6f}")
    mesh = _mesh(partition_eps, nodes_per_arc, mesh)
    operator = assemble(k, partition_eps, mesh)
    derivative_matrix = operator_derivative(
        partition_eps, mesh, k, derivative, step, base=operator.matrix
    )
    mu = scipy.linalg.eigvals(operator.solve_matrix(derivative_matrix))
    nodes, _ = contour.quadrature()
    shifted = (nodes - k)[:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        terms = mu[None, :] / (1 + shifted * mu[None, :])
    traces = np.sum(np.where(np.isfinite(terms), terms, 0), axis=1)
    return _update(k, contour, traces, "fast", max_roots)


def sample_winding(
    partition: Partition,
    contour: EllipseContour,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    mesh: Mesh | None = None,
) -> int:
    """Number of characteristic values inside the contour, from tr A^{-1} A'."""
    mesh = _mesh(partition, nodes_per_arc, mesh)
    nodes, weights = contour.quadrature()

    def trace(w: complex) -> complex:
        operator = assemble(w, partition, mesh)
        return complex(np.trace(operator.solve_matrix(assemble_dk(w, partition, mesh).matrix)))

    traces = np.array(ordered_map(trace, nodes))
    return _winding(complex(np.sum(weights * traces)) / (2j * np.pi))


@dataclass(frozen=True)
class WindingSample:
    contour: EllipseContour
    winding: int
    scanned: int
    """Characteristic values found by sigma_min on the real axis inside the contour, with multiplicity"""


def winding_against_scan(
    partition: Partition,
    rng: np.random.Generator,
    interval: tuple[float, float],
    samples: int,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    mesh: Mesh | None = None,
) -> list[WindingSample]:
    """
    Winding numbers of random ellipses centred in the interval, each next to
    the sigma_min count on its real axis.

    Ellipses with a characteristic value near one of their real ends are
    redrawn, so every kept contour is well separated from the spectrum.

    Raises:
        ContourError: If too many draws land next to characteristic values
    """
    lo, hi = validate_interval(*interval)
    reach = RANDOM_SEMI_MAJOR[1] * (1 + END_CLEARANCE)
    if lo <= reach:
        raise ValidationError(f"Random contours need interval start above {reach:g}, got {lo!r}")
    mesh = _mesh(partition, nodes_per_arc, mesh)
    kept: list[WindingSample] = []
    for _ in range(MAX_DRAWS_PER_SAMPLE * samples):
        if len(kept) == samples:
            break
        semi_major = float(rng.uniform(*RANDOM_SEMI_MAJOR))
        contour = EllipseContour(
            center=complex(rng.uniform(lo, hi)),
            semi_major=semi_major,
            semi_minor=semi_major * float(rng.uniform(*RANDOM_ASPECT)),
        )
        left = contour.center.real - semi_major
        right = contour.center.real + semi_major
        margin = END_CLEARANCE * semi_major
        values = sigma_min_scan(partition, (left - margin, right + margin), mesh=mesh)
        if any(min(abs(v.k - left), abs(v.k - right)) < margin for v in values):
            logging.debug(f"Redrawing contour at {contour.center.real:.3f}: value next to its end")
            continue
        scanned = sum(v.multiplicity for v in values if left < v.k < right)
        kept.append(WindingSample(contour, sample_winding(partition, contour, mesh=mesh), scanned))
    if len(kept) < samples:
        raise ContourError(
            f"Only {count('contour', len(kept))} of {samples} cleared the spectrum in {interval}"
        )
    return kept
