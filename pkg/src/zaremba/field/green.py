"""The Zaremba function Z = G(x_S, .) + R: zero on Dirichlet arcs, zero normal derivative on Neumann arcs.

The remainder R is a single layer whose density solves A(k) psi = f with
f = -G(x_S, .) on Dirichlet nodes and f = -dG(x_S, .)/dnu on Neumann nodes.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from zaremba.bie.kernels import fundamental_solution_many, normal_derivative_many
from zaremba.bie.mesh import Mesh, build_mesh, chebyshev_coefficient_matrix
from zaremba.bie.operator import (
    SINGULAR_RELATIVE,
    Density,
    SingularOperatorError,
    assemble,
    solve,
)
from zaremba.bie.potentials import (
    OVERSAMPLE,
    eval_single_layer,
    eval_trace_dn,
    eval_trace_single,
    far_from_boundary,
)
from zaremba.geometry import Partition, as_complex, require_interior
from zaremba.types import BoolArray, ComplexArray, FloatArray, Point
from zaremba.validation import ValidationError, validate_nodes_per_arc, validate_positive

DEFAULT_NODES = 128
SOURCE_GAP = 1e-10
IMAGINARY_WARNING = 1e-4
"""|Im Z| / |Re Z| above this is logged as a quadrature warning."""


@dataclass
class NearResonanceError(Exception):
    """k is (numerically) a characteristic value of the partition: Z does not exist there."""

    k: float
    sigma_min: float
    sigma_max: float

    def __str__(self) -> str:
        return (
            f"k={self.k:.10g} is too close to a characteristic value of the partition: "
            f"sigma_min={self.sigma_min:.3e} (sigma_max={self.sigma_max:.3e})"
        )


@dataclass(frozen=True, eq=False)
class ZarembaField:
    """A solved Zaremba function for one wavenumber, partition and source."""

    k: float
    partition: Partition
    source: complex
    mesh: Mesh
    density: Density
    """Remainder density"""

    @property
    def residual(self) -> float:
        return self.density.residual

    def boundary_data(self) -> ComplexArray:
        """The right-hand side the remainder density was solved against."""
        return _boundary_data(self.k, self.mesh, self.source)


def _boundary_data(k: float, mesh: Mesh, source: complex) -> ComplexArray:
    data = np.empty(mesh.size, dtype=np.complex128)
    dirichlet = mesh.dirichlet_nodes
    neumann = mesh.neumann_nodes
    data[dirichlet] = -fundamental_solution_many(k, source, mesh.points[dirichlet])
    data[neumann] = -normal_derivative_many(k, mesh.points[neumann], mesh.normals[neumann], source)
    return data


def solve_field(
    k: float,
    partition: Partition,
    source: Point | complex,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    mesh: Mesh | None = None,
    threshold: float = SINGULAR_RELATIVE,
) -> ZarembaField:
    """
    Solve for the remainder density of the Zaremba function with the given source.

    threshold is the relative sigma_min below which A(k) counts as singular;
    lowering it evaluates Z close to a characteristic value.

    Raises:
        NearResonanceError: If A(k) is numerically singular
        ValidationError: If the source is not inside the curve
    """
    k = validate_positive("k", k)
    x_s = require_interior(partition.curve, source)
    if mesh is None:
        mesh = build_mesh(partition, validate_nodes_per_arc(nodes_per_arc))
    elif mesh.partition != partition:
        mesh = mesh.relabel(partition)
    operator = assemble(k, partition, mesh)
    try:
        density = solve(operator, _boundary_data(k, mesh, x_s), threshold=threshold)
    except SingularOperatorError as e:
        raise NearResonanceError(k, e.sigma_min, e.sigma_max) from e
    logging.debug(
        f"Solved Zaremba field at k={k:g} on {partition.describe()}, "
        f"source {(x_s.real, x_s.imag)}: residual {density.residual:.2e}"
    )
    return ZarembaField(k=k, partition=partition, source=x_s, mesh=mesh, density=density)


def eval_complex(
    field: ZarembaField, points: ComplexArray | Point | complex, *, oversample: int = OVERSAMPLE
) -> ComplexArray:
    """
    G(x_S, y) + S[psi](y) at interior points y, complex.

    Raises:
        ValidationError: If a point coincides with the source or is too close to the boundary
    """
    z = _as_points(points)
    outside = ~field.partition.curve.contains(z)
    if np.any(outside):
        bad = z[outside].flat[0]
        raise ValidationError(f"Point {(bad.real, bad.imag)} is not inside the {field.partition.curve.name}")
    if np.any(np.abs(z - field.source) < SOURCE_GAP):
        raise ValidationError(f"Cannot evaluate at the source {(field.source.real, field.source.imag)}")
    incident = fundamental_solution_many(field.k, field.source, z.ravel()).reshape(z.shape)
    scattered = eval_single_layer(field.density, field.mesh, field.k, z, oversample=oversample)
    return incident + scattered


def eval_field(
    field: ZarembaField, points: ComplexArray | Point | complex, *, oversample: int = OVERSAMPLE
) -> FloatArray:
    """
    Re Z(x_S, y); the imaginary part is only a diagnostic and is logged when large.
    """
    values = eval_complex(field, points, oversample=oversample)
    ratio = _imaginary_ratio(values)
    if ratio > IMAGINARY_WARNING:
        logging.warning(f"Zaremba field at k={field.k:g}: |Im Z| / |Re Z| reaches {ratio:.2e}")
    return np.real(values)


def _imaginary_ratio(values: ComplexArray) -> float:
    if values.size == 0:
        return 0.0
    scale = float(np.max(np.abs(values.real)))
    return float(np.max(np.abs(values.imag))) / scale if scale > 0 else 0.0


def _as_points(points: ComplexArray | Point | complex) -> ComplexArray:
    if isinstance(points, tuple):
        return np.atleast_1d(np.asarray(as_complex(points), dtype=np.complex128))
    return np.atleast_1d(np.asarray(points, dtype=np.complex128))


def evaluable(field: ZarembaField, points: ComplexArray, *, oversample: int = OVERSAMPLE) -> BoolArray:
    """Mask of the points at which eval_field accepts to evaluate."""
    z = np.asarray(points, dtype=np.complex128)
    return far_from_boundary(field.mesh, z, oversample=oversample) & (np.abs(z - field.source) >= SOURCE_GAP)


def eval_dn_boundary(field: ZarembaField) -> ComplexArray:
    """dZ(x_S, y)/dnu_y at every mesh node, from the interior side."""
    mesh = field.mesh
    remainder = eval_trace_dn(field.density, mesh, field.k, side="interior")
    return remainder + normal_derivative_many(field.k, mesh.points, mesh.normals, field.source)


def eval_boundary(field: ZarembaField) -> ComplexArray:
    """Z(x_S, y) at every mesh node."""
    mesh = field.mesh
    remainder = eval_trace_single(field.density, mesh, field.k)
    return remainder + fundamental_solution_many(field.k, field.source, mesh.points)


def interpolate_boundary(mesh: Mesh, values: ComplexArray, s: float) -> complex:
    """
    Interpolate nodal boundary values at arclength s: trigonometric on a
    periodic mesh, Chebyshev on the panel that holds s otherwise.
    """
    curve = mesh.partition.curve
    tau = float(curve.parameter_at(s))
    if mesh.periodic:
        n = mesh.size
        coefficients = np.fft.fft(values) / n
        modes = np.fft.fftfreq(n, d=1.0 / n)
        phase = np.exp(1j * modes * (tau - mesh.tau[0]))
        if n % 2 == 0:
            # the Nyquist mode is split evenly between +n/2 and -n/2
            phase[n // 2] = np.cos(n / 2 * (tau - mesh.tau[0]))
        return complex(np.sum(coefficients * phase))
    for panel in mesh.panels:
        offset = (tau - panel.tau_start) % (2 * np.pi)
        if offset <= panel.span:
            t = 2 * offset / panel.span - 1
            local = values[panel.nodes]
            coefficients = chebyshev_coefficient_matrix(panel.size) @ local
            return complex(np.polynomial.chebyshev.chebval(t, coefficients))
    raise ValidationError(f"Arclength {s} is not covered by the mesh panels")


def site_function(field_source: ZarembaField, field_receiver: ZarembaField) -> FloatArray:
    """
    g(y) = dZ_D(x_S, y)/dnu * dZ_D(y_R, y)/dnu at the mesh nodes, real part.

    Nucleating a short Neumann arc at y changes Z(x_S, y_R) by about
    -(pi/2) eps^2 g(y).
    """
    if field_source.mesh is not field_receiver.mesh or field_source.k != field_receiver.k:
        raise ValidationError("Both fields must share the wavenumber and the mesh")
    return np.real(eval_dn_boundary(field_source) * eval_dn_boundary(field_receiver))


def nucleation_prediction(
    field_source: ZarembaField,
    field_receiver: ZarembaField,
    s_star: float,
    eps: float,
) -> float:
    """
    Predicted Z(x_S, y_R) after the Dirichlet boundary around arclength s_star
    is replaced by a Neumann arc of half-length eps:

        Z_N = Z_D - eps^2 (pi/2) dZ_D(y_R, y*)/dnu dZ_D(x_S, y*)/dnu

    field_source and field_receiver are the Zaremba functions of the current
    partition with sources x_S and y_R.
    """
    eps = validate_positive("eps", eps, allow_zero=True)
    if field_source.partition.kind_at(s_star) != "D":
        raise ValidationError(f"Nucleation site s={s_star:g} is not on a Dirichlet arc")
    z_d = float(eval_field(field_source, field_receiver.source)[0])
    if eps == 0:
        return z_d
    g = site_function(field_source, field_receiver)
    return z_d - eps**2 * (math.pi / 2) * float(interpolate_boundary(field_source.mesh, g, s_star).real)
