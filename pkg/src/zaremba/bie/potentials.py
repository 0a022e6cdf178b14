"""Single-layer potentials off the boundary and their boundary traces."""

import numpy as np

from zaremba.bie.kernels import KernelKind, kernel_split
from zaremba.bie.mesh import Mesh
from zaremba.bie.operator import Density, effective_kernel
from zaremba.types import BoolArray, ComplexArray, FloatArray
from zaremba.utils.parallel import ordered_map
from zaremba.validation import ValidationError

OVERSAMPLE = 8
DISTANCE_FLOOR_SPACINGS = 5.0
BLOCK = 256


def _nearest(
    fine_points: ComplexArray, spacing: FloatArray, flat: ComplexArray
) -> tuple[FloatArray, FloatArray]:
    """Distance of every point to the fine mesh and the floor at its nearest fine node."""
    distance = np.empty(flat.shape)
    floor = np.empty(flat.shape)
    for start in range(0, flat.size, BLOCK):
        block = flat[start : start + BLOCK]
        gaps = np.abs(block[:, None] - fine_points[None, :])
        nearest = np.argmin(gaps, axis=1)
        distance[start : start + BLOCK] = gaps[np.arange(block.size), nearest]
        floor[start : start + BLOCK] = DISTANCE_FLOOR_SPACINGS * spacing[nearest]
    return distance, floor


def far_from_boundary(mesh: Mesh, points: ComplexArray, *, oversample: int = OVERSAMPLE) -> BoolArray:
    """Interior points at which eval_single_layer accepts to evaluate."""
    z = np.asarray(points, dtype=np.complex128)
    flat = z.ravel()
    fine = mesh.refined(oversample)
    distance, floor = _nearest(fine.points, fine.density_weights, flat)
    inside = mesh.partition.curve.contains(flat)
    return (inside & (distance >= floor)).reshape(z.shape)


def _check_distance(
    mesh: Mesh, points: ComplexArray, fine_points: ComplexArray, spacing: FloatArray
) -> None:
    distance, floor = _nearest(fine_points, spacing, points)
    if np.any(distance < floor):
        bad = int(np.argmax(floor - distance))
        z = points[bad]
        raise ValidationError(
            f"Point {(z.real, z.imag)} is {distance[bad]:.3g} from the boundary of the "
            f"{mesh.partition.curve.name}, closer than {DISTANCE_FLOOR_SPACINGS:g} spacings of the evaluation mesh"
        )


def eval_single_layer(
    density: Density,
    mesh: Mesh,
    k: complex,
    points: ComplexArray | complex,
    *,
    kind: KernelKind = "S",
    oversample: int = OVERSAMPLE,
) -> ComplexArray:
    """
    S[psi](x) at interior points, with the smooth rule on an oversampled mesh.

    kind="dS" evaluates the k-derivative of the single layer instead.

    Raises:
        ValidationError: If a point is closer to the boundary than DISTANCE_FLOOR_SPACINGS
            spacings of the oversampled mesh the integral runs on
    """
    z = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    flat = z.ravel()
    fine = mesh.refined(oversample)
    _check_distance(mesh, flat, fine.points, fine.density_weights)
    charge = fine.density_weights * (fine.interpolation @ density.values)

    def block_values(start: int) -> ComplexArray:
        block = flat[start : start + BLOCK]
        r = np.abs(block[:, None] - fine.points[None, :])
        values, _ = kernel_split(kind, complex(k), r, np.zeros_like(r))
        return values @ charge

    parts = ordered_map(block_values, range(0, flat.size, BLOCK))
    out = np.concatenate(parts) if parts else np.zeros(0, dtype=np.complex128)
    return out.reshape(z.shape)


def eval_trace_single(density: Density, mesh: Mesh, k: complex, *, kind: KernelKind = "S") -> ComplexArray:
    """Boundary trace S[psi](x_i) at every mesh node (continuous across the boundary)."""
    return effective_kernel(kind, k, mesh) @ (mesh.density_weights * density.values)


def eval_trace_dn(
    density: Density, mesh: Mesh, k: complex, *, side: str = "interior", kind: KernelKind = "K"
) -> ComplexArray:
    """
    Normal derivative of S[psi] at every mesh node: (-1/2 I + K*) psi from the
    interior side, (+1/2 I + K*) psi from the exterior.

    kind="dK" gives the k-derivative of K* psi, which has no jump term.
    """
    if side not in ("interior", "exterior"):
        raise ValidationError(f"side must be 'interior' or 'exterior', got {side!r}")
    principal = effective_kernel(kind, k, mesh) @ (mesh.density_weights * density.values)
    if kind == "dK":
        return principal
    jump = -0.5 if side == "interior" else 0.5
    return principal + jump * density.values
