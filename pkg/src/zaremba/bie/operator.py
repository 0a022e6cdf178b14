"""The discretised block operator A(k) and dense solves against it.

Rows of Dirichlet nodes carry the single layer S, rows of Neumann nodes carry
-1/2 I + K*. Unknowns are u = sqrt(omega) psi and every row is scaled by
sqrt(omega), so singular values of the matrix approximate those of the L^2
operator.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from zaremba.bie.kernels import KernelKind, kernel_diagonal, kernel_split
from zaremba.bie.mesh import Mesh
from zaremba.geometry import Partition
from zaremba.types import ComplexArray, FloatArray, IntArray
from zaremba.validation import ValidationError

SINGULAR_RELATIVE = 1e-5
"""solve refuses operators with sigma_min below this fraction of sigma_max."""


@dataclass
class SingularOperatorError(Exception):
    """The operator is numerically singular: k sits on (or next to) a characteristic value."""

    k: complex
    sigma_min: float
    sigma_max: float

    def __str__(self) -> str:
        return (
            f"Operator is numerically singular at k={self.k:.10g}: "
            f"sigma_min={self.sigma_min:.3e} (sigma_max={self.sigma_max:.3e})"
        )


@dataclass(frozen=True)
class Density:
    """Boundary density psi at the mesh nodes."""

    values: ComplexArray
    """psi"""

    weighted: ComplexArray
    """sqrt(omega) * psi, the solver's unknowns"""

    residual: float = 0.0
    """Relative residual of the discrete solve"""


def density_from_weighted(mesh: Mesh, weighted: ComplexArray, residual: float = 0.0) -> Density:
    return Density(values=weighted / mesh.sqrt_weights, weighted=weighted, residual=residual)


def effective_kernel(
    kind: KernelKind, k: complex, mesh: Mesh, rows: IntArray | None = None
) -> ComplexArray:
    """
    Rows of the quadrature-corrected kernel E with sum_j E_ij omega_j psi_j ~ (K psi)(x_i).
    """
    index = np.arange(mesh.size) if rows is None else np.asarray(rows, dtype=np.int64)
    r = mesh.distance[index]
    q = mesh.normal_offset[index]
    on_diagonal = index[:, None] == np.arange(mesh.size)[None, :]
    safe_r = np.where(on_diagonal, 1.0, r)
    values, log_part = kernel_split(kind, complex(k), safe_r, q)
    smooth = values - log_part * mesh.log_subtracted[index]
    remainder, log_diag = kernel_diagonal(kind, complex(k), mesh.curvature[index])
    local = np.arange(index.size)
    smooth[local, index] = remainder + log_diag * mesh.diag_log[index]
    log_part[local, index] = log_diag
    return smooth + log_part * mesh.log_weights[index]


def _scaled(mesh: Mesh, block: ComplexArray, rows: IntArray) -> ComplexArray:
    root = mesh.sqrt_weights
    return root[rows, None] * block * root[None, :]


def _assemble_rows(
    single: KernelKind, normal: KernelKind, k: complex, mesh: Mesh, jump: float
) -> ComplexArray:
    matrix = np.empty((mesh.size, mesh.size), dtype=np.complex128)
    dirichlet = mesh.dirichlet_nodes
    neumann = mesh.neumann_nodes
    if dirichlet.size:
        matrix[dirichlet] = _scaled(mesh, effective_kernel(single, k, mesh, dirichlet), dirichlet)
    if neumann.size:
        matrix[neumann] = _scaled(mesh, effective_kernel(normal, k, mesh, neumann), neumann)
        matrix[neumann, neumann] += jump
    return matrix


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Dense discretisation of A(k) on a mesh."""

    k: complex
    partition: Partition
    mesh: Mesh
    matrix: ComplexArray

    @cached_property
    def singular_values(self) -> FloatArray:
        """Descending singular values."""
        return scipy.linalg.svdvals(self.matrix)

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1])

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0])

    @cached_property
    def lu(self) -> tuple[ComplexArray, IntArray]:
        return scipy.linalg.lu_factor(self.matrix, check_finite=False)

    def solve_matrix(self, rhs: ComplexArray) -> ComplexArray:
        """A^{-1} rhs for a vector or a matrix of right-hand sides."""
        return scipy.linalg.lu_solve(self.lu, rhs, check_finite=False)


def assemble(k: complex, partition: Partition, mesh: Mesh) -> BlockOperator:
    """A(k) with S rows on Dirichlet nodes and -1/2 I + K* rows on Neumann nodes."""
    if k == 0:
        raise ValidationError("assemble needs k != 0")
    if mesh.size == 0:
        raise ValidationError("assemble needs a non-empty boundary mesh")
    matrix = _assemble_rows("S", "K", complex(k), mesh, -0.5)
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"Non-finite operator entries at k={k}")
    return BlockOperator(k=complex(k), partition=partition, mesh=mesh, matrix=matrix)


def assemble_dk(k: complex, partition: Partition, mesh: Mesh) -> BlockOperator:
    """The analytic k-derivative of A(k); the jump term has no k dependence."""
    if k == 0:
        raise ValidationError("assemble_dk needs k != 0")
    matrix = _assemble_rows("dS", "dK", complex(k), mesh, 0.0)
    return BlockOperator(k=complex(k), partition=partition, mesh=mesh, matrix=matrix)


def solve(
    operator: BlockOperator, rhs: ComplexArray, *, threshold: float = SINGULAR_RELATIVE
) -> Density:
    """
    Solve A(k) psi = rhs, where rhs holds boundary data at the mesh nodes.

    Raises:
        SingularOperatorError: If sigma_min < threshold * sigma_max
    """
    mesh = operator.mesh
    data = np.asarray(rhs, dtype=np.complex128)
    if data.shape != (mesh.size,):
        raise ValidationError(f"rhs must have shape ({mesh.size},), got {data.shape}")
    if operator.sigma_min < threshold * operator.sigma_max:
        raise SingularOperatorError(operator.k, operator.sigma_min, operator.sigma_max)
    scaled = mesh.sqrt_weights * data
    weighted = operator.solve_matrix(scaled)
    norm = float(np.linalg.norm(scaled))
    residual = float(np.linalg.norm(operator.matrix @ weighted - scaled)) / norm if norm > 0 else 0.0
    logging.debug(
        f"Solved at k={operator.k:.8g}: sigma_min={operator.sigma_min:.3e}, residual={residual:.2e}"
    )
    return density_from_weighted(mesh, weighted, residual)
