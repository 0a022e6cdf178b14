"""Closed analytic curves, arcs measured in arclength, and Dirichlet/Neumann partitions.

Points in the plane are carried as complex numbers (x + iy) throughout the
numerical code; the public helpers accept and return ``(x, y)`` tuples where a
single point is involved.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from zaremba.types import BoolArray, BoundaryKind, ComplexArray, FloatArray, Point
from zaremba.validation import ValidationError, validate_positive

ARCLENGTH_SAMPLES = 1024
POLYGON_SAMPLES = 2048
MERGE_TOLERANCE = 1e-12
"""Relative gap (times the total length) under which neighbouring arcs merge."""

CurveMap = Callable[[FloatArray], ComplexArray]


class PartitionError(Exception):
    """Raised when a partition operation would break its invariants."""

    pass


@dataclass(frozen=True, eq=False)
class Curve:
    """A smooth, closed, counterclockwise curve tau -> gamma(tau), tau in [0, 2pi)."""

    name: str
    """E.g. "disk", "kite", "trig" """

    gamma: CurveMap
    """Position as a complex number"""

    d_gamma: CurveMap
    """First parametric derivative"""

    dd_gamma: CurveMap
    """Second parametric derivative"""

    center: complex = 0j
    """Star centre used for mapped polar grids"""

    length: float = field(init=False)
    """Total arclength"""

    _speed_cos: FloatArray = field(init=False, repr=False)
    _speed_sin: FloatArray = field(init=False, repr=False)
    _polygon: ComplexArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        tau = np.linspace(0.0, 2 * np.pi, ARCLENGTH_SAMPLES, endpoint=False)
        speed = np.abs(self.d_gamma(tau))
        if not np.all(speed > 0):
            raise ValidationError(f"Curve {self.name!r} is not regular")
        ends = self.gamma(np.array([0.0, 2 * np.pi]))
        scale = float(np.max(np.abs(self.gamma(tau))))
        if abs(ends[1] - ends[0]) > 1e-12 * max(scale, 1.0):
            raise ValidationError(f"Curve {self.name!r} is not closed")
        position = self.gamma(tau)
        signed_area = np.pi * float(np.mean(np.imag(np.conj(position) * self.d_gamma(tau))))
        if signed_area <= 0:
            raise ValidationError(f"Curve {self.name!r} must be counterclockwise")

        # speed = a0 + sum a_n cos(n tau) + b_n sin(n tau)
        coefficients = np.fft.rfft(speed) / ARCLENGTH_SAMPLES
        modes = ARCLENGTH_SAMPLES // 2
        cos_part = np.empty(modes)
        sin_part = np.empty(modes)
        cos_part[0] = coefficients[0].real
        sin_part[0] = 0.0
        cos_part[1:] = 2 * coefficients[1:modes].real
        sin_part[1:] = -2 * coefficients[1:modes].imag
        object.__setattr__(self, "_speed_cos", cos_part)
        object.__setattr__(self, "_speed_sin", sin_part)
        object.__setattr__(self, "length", float(2 * np.pi * cos_part[0]))
        polygon = self.gamma(np.linspace(0.0, 2 * np.pi, POLYGON_SAMPLES, endpoint=False))
        object.__setattr__(self, "_polygon", polygon)

    def __repr__(self) -> str:
        return f"Curve({self.name!r}, length={self.length:.6f})"

    def speed(self, tau: FloatArray) -> FloatArray:
        return np.abs(self.d_gamma(tau))

    def normal(self, tau: FloatArray) -> ComplexArray:
        """Outward unit normal: the unit tangent rotated by -pi/2."""
        tangent = self.d_gamma(tau)
        return -1j * tangent / np.abs(tangent)

    def curvature(self, tau: FloatArray) -> FloatArray:
        d1 = self.d_gamma(tau)
        d2 = self.dd_gamma(tau)
        return np.imag(np.conj(d1) * d2) / np.abs(d1) ** 3

    def arclength(self, tau: FloatArray | float) -> FloatArray:
        """Arclength from tau = 0, continued linearly beyond one period."""
        t = np.asarray(tau, dtype=np.float64)
        n = np.arange(1, self._speed_cos.size)
        phase = np.multiply.outer(t, n)
        return (
            self._speed_cos[0] * t
            + np.sum(self._speed_cos[1:] * np.sin(phase) / n, axis=-1)
            + np.sum(self._speed_sin[1:] * (1 - np.cos(phase)) / n, axis=-1)
        )

    def parameter_at(self, s: FloatArray | float) -> FloatArray:
        """Invert the arclength map; s is wrapped into [0, length)."""
        targets = np.mod(np.asarray(s, dtype=np.float64), self.length)
        flat = targets.ravel()
        out = np.empty_like(flat)
        for i, target in enumerate(flat):
            if target == 0.0:
                out[i] = 0.0
                continue
            out[i] = brentq(
                lambda t, goal=target: float(self.arclength(t)) - goal,
                0.0,
                2 * np.pi,
                xtol=1e-14,
                rtol=4 * np.finfo(float).eps,
            )
        return out.reshape(targets.shape)

    def contains(self, points: ComplexArray | complex) -> BoolArray:
        """Winding-number test against a dense polygon of the curve."""
        z = np.atleast_1d(np.asarray(points, dtype=np.complex128))
        flat = z.ravel()
        inside = np.empty(flat.shape, dtype=np.bool_)
        vertices = self._polygon
        following = np.roll(vertices, -1)
        for start in range(0, flat.size, 256):
            block = flat[start : start + 256, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                turn = np.angle((following - block) / (vertices - block))
            winding = np.nansum(turn, axis=1) / (2 * np.pi)
            inside[start : start + 256] = np.rint(winding) == 1
        return inside.reshape(z.shape)

    def distance_to_boundary(self, points: ComplexArray | complex) -> FloatArray:
        """Distance to the nearest point of the dense boundary polygon."""
        z = np.atleast_1d(np.asarray(points, dtype=np.complex128))
        flat = z.ravel()
        out = np.empty(flat.shape)
        for start in range(0, flat.size, 256):
            block = flat[start : start + 256, None]
            out[start : start + 256] = np.min(np.abs(self._polygon - block), axis=1)
        return out.reshape(z.shape)

    def star_weight(self, tau: FloatArray) -> FloatArray:
        """Im(conj(gamma - c) * gamma'), positive everywhere iff star-shaped about c."""
        return np.imag(np.conj(self.gamma(tau) - self.center) * self.d_gamma(tau))


def as_complex(point: Point | complex) -> complex:
    if isinstance(point, complex):
        return point
    x, y = point
    return complex(float(x), float(y))


def make_disk(radius: float = 1.0) -> Curve:
    """
    Circle of the given radius centred at the origin.

    Examples:
        >>> disk = make_disk(1.0)
        >>> round(disk.length, 12) == round(2 * math.pi, 12)
        True
        >>> make_disk(0.0)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: radius must be positive, got 0.0
    """
    r = validate_positive("radius", radius)
    return Curve(
        name="disk",
        gamma=lambda t: r * np.exp(1j * t),
        d_gamma=lambda t: 1j * r * np.exp(1j * t),
        dd_gamma=lambda t: -r * np.exp(1j * t),
    )


def make_kite() -> Curve:
    """
    The kite (cos t + 0.65 cos 2t - 0.65, 1.5 sin t), star-shaped about the origin.

    >>> z = complex(make_kite().gamma(np.array(math.pi)))
    >>> round(z.real, 12), round(z.imag, 12)
    (-1.0, 0.0)
    """
    return Curve(
        name="kite",
        gamma=lambda t: (np.cos(t) + 0.65 * np.cos(2 * t) - 0.65) + 1.5j * np.sin(t),
        d_gamma=lambda t: (-np.sin(t) - 1.3 * np.sin(2 * t)) + 1.5j * np.cos(t),
        dd_gamma=lambda t: (-np.cos(t) - 2.6 * np.cos(2 * t)) - 1.5j * np.sin(t),
    )


def _trig_series(coefficients: Sequence[float], derivative: int) -> Callable[[FloatArray], FloatArray]:
    values = [float(c) for c in coefficients]
    if len(values) % 2 == 0:
        raise ValidationError(
            f"Trigonometric coefficients must be [a0, a1, b1, a2, b2, ...], got {len(values)} values"
        )
    constant = values[0] if derivative == 0 else 0.0
    pairs = list(zip(values[1::2], values[2::2]))

    def evaluate(t: FloatArray) -> FloatArray:
        out = np.full(np.shape(t), constant, dtype=np.float64)
        for n, (a, b) in enumerate(pairs, start=1):
            # d^m/dt^m of a cos(nt) + b sin(nt)
            c = np.cos(n * t + derivative * np.pi / 2)
            s = np.sin(n * t + derivative * np.pi / 2)
            out = out + n**derivative * (a * c + b * s)
        return out

    return evaluate


def make_trig_curve(trig_x: Sequence[float], trig_y: Sequence[float]) -> Curve:
    """
    Curve with truncated Fourier series in both coordinates.

    >>> ellipse = make_trig_curve([0.0, 2.0, 0.0], [0.0, 0.0, 1.0])
    >>> complex(ellipse.gamma(np.array(0.0)))
    (2+0j)
    """
    fx = [_trig_series(trig_x, m) for m in range(3)]
    fy = [_trig_series(trig_y, m) for m in range(3)]
    center = complex(float(trig_x[0]), float(trig_y[0]))
    return Curve(
        name="trig",
        gamma=lambda t: fx[0](t) + 1j * fy[0](t),
        d_gamma=lambda t: fx[1](t) + 1j * fy[1](t),
        dd_gamma=lambda t: fx[2](t) + 1j * fy[2](t),
        center=center,
    )


def outward_normal(curve: Curve, tau: float) -> Point:
    """
    Outward unit normal at a parameter value.

    >>> nx, ny = outward_normal(make_disk(), math.pi)
    >>> round(nx, 12), round(ny, 12)
    (-1.0, 0.0)
    """
    nu = complex(curve.normal(np.array(float(tau))))
    return (nu.real, nu.imag)


def require_interior(curve: Curve, point: Point | complex, *, floor: float = 0.0) -> complex:
    """Return the point as a complex number if it is inside and at least `floor` from the boundary."""
    z = as_complex(point)
    if not bool(curve.contains(z)[0]):
        raise ValidationError(f"Point {(z.real, z.imag)} is not inside the {curve.name}")
    if floor > 0:
        distance = float(curve.distance_to_boundary(z)[0])
        if distance < floor:
            raise ValidationError(
                f"Point {(z.real, z.imag)} is {distance:.3g} from the boundary, below the floor {floor:.3g}"
            )
    return z


@dataclass(frozen=True)
class Arc:
    """A boundary interval of length 2 * half_length centred at arclength center_s."""

    curve: Curve
    center_s: float
    """Arclength coordinate of the centre, in [0, length)"""

    half_length: float
    """Half the arclength of the arc"""

    @property
    def start_s(self) -> float:
        return self.center_s - self.half_length

    @property
    def end_s(self) -> float:
        return self.center_s + self.half_length

    @property
    def arc_length(self) -> float:
        return 2 * self.half_length

    def tau_interval(self) -> tuple[float, float]:
        """Parameter interval (tau_start, tau_end) with tau_end > tau_start, possibly past 2pi."""
        tau_start = float(self.curve.parameter_at(self.start_s))
        tau_end = float(self.curve.parameter_at(self.end_s))
        if tau_end <= tau_start:
            tau_end += 2 * np.pi
        return tau_start, tau_end

    def center_point(self) -> complex:
        return complex(self.curve.gamma(self.curve.parameter_at(self.center_s)))


def arc_by_arclength(curve: Curve, center_s: float, half_length: float) -> Arc:
    """
    Arc of arclength 2 * half_length centred at arclength center_s.

    Examples:
        >>> arc = arc_by_arclength(make_disk(), math.pi / 2, 0.1)
        >>> [round(t, 10) for t in arc.tau_interval()]
        [1.4707963268, 1.6707963268]
        >>> arc_by_arclength(make_disk(), 0.0, 0.0)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValidationError: half_length must be positive, got 0.0
    """
    h = validate_positive("half_length", half_length)
    if 2 * h >= curve.length:
        raise ValidationError(
            f"Arc of length {2 * h:.6g} does not fit on a boundary of length {curve.length:.6g}"
        )
    return Arc(curve=curve, center_s=float(np.mod(center_s, curve.length)), half_length=h)


@dataclass(frozen=True)
class Segment:
    """One piece of the boundary carrying a single condition."""

    kind: BoundaryKind
    start_s: float
    end_s: float
    """Unwrapped; end_s > start_s"""

    @property
    def length(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class Partition:
    """Neumann arcs on a curve; the Dirichlet part is their complement."""

    curve: Curve
    neumann_arcs: tuple[Arc, ...] = ()
    """Pairwise disjoint, ordered by start"""

    full_neumann: bool = False
    """The whole boundary is Neumann (no arcs, no Dirichlet part)"""

    @property
    def is_pure_dirichlet(self) -> bool:
        return not self.full_neumann and not self.neumann_arcs

    @property
    def has_junctions(self) -> bool:
        return bool(self.neumann_arcs)

    @property
    def neumann_length(self) -> float:
        if self.full_neumann:
            return self.curve.length
        return sum(arc.arc_length for arc in self.neumann_arcs)

    @property
    def dirichlet_length(self) -> float:
        return self.curve.length - self.neumann_length

    def segments(self) -> list[Segment]:
        """Boundary pieces in arclength order, each Neumann arc followed by the Dirichlet gap after it."""
        if self.full_neumann:
            return [Segment("N", 0.0, self.curve.length)]
        if not self.neumann_arcs:
            return [Segment("D", 0.0, self.curve.length)]
        length = self.curve.length
        starts = [float(np.mod(arc.start_s, length)) for arc in self.neumann_arcs]
        out: list[Segment] = []
        for i, (start, arc) in enumerate(zip(starts, self.neumann_arcs)):
            end = start + arc.arc_length
            following = starts[i + 1] if i + 1 < len(starts) else starts[0] + length
            out.append(Segment("N", start, end))
            out.append(Segment("D", end, following))
        return out

    def dirichlet_segments(self) -> list[Segment]:
        return [s for s in self.segments() if s.kind == "D"]

    def kind_at(self, s: float) -> BoundaryKind:
        """Condition at arclength s (junction points count as Dirichlet)."""
        if self.full_neumann:
            return "N"
        length = self.curve.length
        for arc in self.neumann_arcs:
            offset = np.mod(s - arc.start_s, length)
            if 0 < offset < arc.arc_length:
                return "N"
        return "D"

    def describe(self) -> str:
        """
        Short fingerprint used in logs and reports.

        >>> pure_dirichlet(make_disk()).describe()
        'disk[D]'
        """
        if self.full_neumann:
            return f"{self.curve.name}[N]"
        if not self.neumann_arcs:
            return f"{self.curve.name}[D]"
        arcs = ", ".join(f"N@{a.center_s:.6f}+-{a.half_length:.6f}" for a in self.neumann_arcs)
        return f"{self.curve.name}[{arcs}]"

    def nucleate(self, center_s: float, half_length: float) -> "Partition":
        """Add a Neumann arc, merging with neighbours it touches."""
        if self.full_neumann:
            raise PartitionError("Cannot nucleate on a pure Neumann boundary")
        arc = arc_by_arclength(self.curve, center_s, half_length)
        return _normalized(self, [*self.neumann_arcs, arc])

    def with_arcs(self, arcs: Sequence[Arc]) -> "Partition":
        return _normalized(self, list(arcs))


def pure_dirichlet(curve: Curve) -> Partition:
    return Partition(curve=curve)


def pure_neumann(curve: Curve) -> Partition:
    return Partition(curve=curve, full_neumann=True)


def _normalized(partition: Partition, arcs: list[Arc]) -> Partition:
    """Sort arcs, merge touching ones, and reject an empty Dirichlet part."""
    length = partition.curve.length
    tolerance = MERGE_TOLERANCE * length
    intervals = sorted(
        (float(np.mod(arc.start_s, length)), float(np.mod(arc.start_s, length) + arc.arc_length))
        for arc in arcs
    )
    merged: list[list[float]] = []
    for start, end in intervals:
        if merged and start <= merged[-1][1] + tolerance:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    # wrap-around: the last interval may reach the first one past s = length
    while len(merged) > 1 and merged[-1][1] + tolerance >= merged[0][0] + length:
        first = merged.pop(0)
        merged[-1][1] = max(merged[-1][1], first[1] + length)
    for start, end in merged:
        if end - start >= length - tolerance:
            raise PartitionError("Neumann arcs would cover the whole boundary; the Dirichlet part must stay non-empty")
    new_arcs = tuple(
        Arc(
            curve=partition.curve,
            center_s=float(np.mod((start + end) / 2, length)),
            half_length=(end - start) / 2,
        )
        for start, end in merged
    )
    new_arcs = tuple(sorted(new_arcs, key=lambda a: np.mod(a.start_s, length)))
    if len(new_arcs) != len(arcs):
        logging.debug(f"Merged {len(arcs)} Neumann arcs into {len(new_arcs)}")
    return replace(partition, neumann_arcs=new_arcs, full_neumann=False)


def nucleate(partition: Partition, center_s: float, half_length: float) -> Partition:
    return partition.nucleate(center_s, half_length)


def extend_arc(partition: Partition, arc_index: int, delta: float) -> Partition:
    """
    Grow one Neumann arc by delta of arclength on each end, keeping its centre.

    Examples:
        >>> disk = make_disk()
        >>> p = pure_dirichlet(disk).nucleate(math.pi / 2, 0.1)
        >>> round(extend_arc(p, 0, 0.05).neumann_length, 12)
        0.3
    """
    validate_positive("delta", delta)
    if not 0 <= arc_index < len(partition.neumann_arcs):
        raise PartitionError(f"No Neumann arc with index {arc_index}")
    arc = partition.neumann_arcs[arc_index]
    if 2 * (arc.half_length + delta) >= partition.curve.length:
        raise PartitionError("Extension would consume the whole boundary")
    grown = replace(arc, half_length=arc.half_length + delta)
    arcs = list(partition.neumann_arcs)
    arcs[arc_index] = grown
    return _normalized(partition, arcs)


def extend_all(partition: Partition, delta: float) -> Partition:
    """Grow every Neumann arc by delta on each end."""
    validate_positive("delta", delta)
    arcs = [replace(a, half_length=a.half_length + delta) for a in partition.neumann_arcs]
    if any(2 * a.half_length >= partition.curve.length for a in arcs):
        raise PartitionError("Extension would consume the whole boundary")
    return _normalized(partition, arcs)


@dataclass(frozen=True)
class PolarGrid:
    """Mapped polar quadrature c + rho * (gamma(tau) - c) over the interior."""

    points: ComplexArray
    weights: FloatArray
    rho: FloatArray
    tau: FloatArray


def polar_grid(
    curve: Curve, n_radial: int, n_angular: int, *, rho_max: float = 1.0
) -> PolarGrid:
    """
    Gauss-Legendre in rho on [0, rho_max], trapezoid in tau.

    The Jacobian is rho * Im(conj(gamma - c) gamma'), so the curve must be
    star-shaped about its centre.

    >>> grid = polar_grid(make_disk(), 16, 32)
    >>> round(float(grid.weights.sum()), 10) == round(math.pi, 10)
    True
    """
    tau = np.linspace(0.0, 2 * np.pi, n_angular, endpoint=False)
    jacobian = curve.star_weight(tau)
    if np.any(jacobian <= 0):
        raise ValidationError(
            f"The {curve.name} is not star-shaped about {curve.center}; mapped polar grids need that"
        )
    nodes, gauss_weights = np.polynomial.legendre.leggauss(n_radial)
    rho = 0.5 * rho_max * (nodes + 1)
    rho_weights = 0.5 * rho_max * gauss_weights
    points = curve.center + np.multiply.outer(rho, curve.gamma(tau) - curve.center)
    weights = np.multiply.outer(rho_weights * rho, jacobian * (2 * np.pi / n_angular))
    return PolarGrid(points=points, weights=weights, rho=rho, tau=tau)
