"""Eigenfunctions at located characteristic values and the eigenfunction expansion of Z."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from zaremba.bie.mesh import Mesh, build_mesh
from zaremba.bie.operator import Density, assemble, density_from_weighted
from zaremba.bie.potentials import OVERSAMPLE, eval_single_layer, eval_trace_dn, eval_trace_single
from zaremba.geometry import polar_grid
from zaremba.spectral.scan import CharValue
from zaremba.types import ComplexArray, FloatArray, Point
from zaremba.utils.inflect import count
from zaremba.validation import ValidationError

SPECTRAL_GAP = 1e-10
GRAM_RHO_MAX = 0.98
GRAM_OVERSAMPLE = 32


@dataclass(frozen=True, eq=False)
class EigenPair:
    """A real eigenfunction u = S[psi], normalised to unit L^2 norm over the domain."""

    value: CharValue
    index: int
    """Position inside a repeated characteristic value"""

    mesh: Mesh
    density: Density

    @property
    def k(self) -> float:
        return self.value.k

    @property
    def eigenvalue(self) -> float:
        return self.value.eigenvalue

    def evaluate(self, points: ComplexArray | complex, *, oversample: int = OVERSAMPLE) -> FloatArray:
        """u at interior points."""
        return np.real(eval_single_layer(self.density, self.mesh, self.k, points, oversample=oversample))

    def normal_derivative(self) -> FloatArray:
        """du/dnu at the mesh nodes."""
        return np.real(eval_trace_dn(self.density, self.mesh, self.k, side="interior"))


def _traces(k: float, mesh: Mesh, density: Density) -> tuple[ComplexArray, ...]:
    value = eval_trace_single(density, mesh, k)
    normal = eval_trace_dn(density, mesh, k, side="interior")
    value_dk = eval_trace_single(density, mesh, k, kind="dS")
    normal_dk = eval_trace_dn(density, mesh, k, kind="dK")
    return value, normal, value_dk, normal_dk


def boundary_gram(k: float, mesh: Mesh, densities: list[Density]) -> ComplexArray:
    """
    Bilinear L^2 products of the eigenfunctions S[psi_a] from boundary data only:

        2k int u_a u_b = oint (S'[psi_a] du_b/dnu - u_b K*'[psi_a])

    where primes are k-derivatives. The products are exact at a characteristic
    value, where every u_a satisfies the mixed boundary conditions.
    """
    traces = [_traces(k, mesh, d) for d in densities]
    weights = mesh.density_weights
    size = len(densities)
    gram = np.empty((size, size), dtype=np.complex128)
    for a, (_, _, value_dk_a, normal_dk_a) in enumerate(traces):
        for b, (value_b, normal_b, _, _) in enumerate(traces):
            gram[a, b] = np.sum(weights * (value_dk_a * normal_b - value_b * normal_dk_a)) / (2 * k)
    return 0.5 * (gram + gram.T)


def eigenpair_extract(value: CharValue, *, mesh: Mesh | None = None) -> list[EigenPair]:
    """
    Real, L^2-orthonormal eigenfunctions at a refined characteristic value, one
    per unit of multiplicity.

    The densities are the right singular vectors of A(k) at its smallest
    singular values. They are rotated so that the boundary Cauchy data of every
    eigenfunction is real, then orthonormalised with boundary_gram.
    """
    partition = value.partition
    if mesh is None:
        mesh = build_mesh(partition, value.nodes_per_arc)
    elif mesh.partition != partition:
        mesh = mesh.relabel(partition)
    operator = assemble(value.k, partition, mesh)
    _, _, vh = scipy.linalg.svd(operator.matrix)
    m = value.multiplicity
    weighted = vh[-m:].conj().T

    root = np.sqrt(mesh.density_weights)
    cauchy = np.empty((2 * mesh.size, m), dtype=np.complex128)
    for j in range(m):
        trace_value, trace_normal, _, _ = _traces(value.k, mesh, density_from_weighted(mesh, weighted[:, j]))
        cauchy[:, j] = np.concatenate([root * trace_value, root * trace_normal])

    # the eigenspace is the complexification of a real one: find that real basis
    left, _, _ = np.linalg.svd(np.hstack([cauchy.real, cauchy.imag]), full_matrices=False)
    rotation = np.linalg.lstsq(cauchy, left[:, :m], rcond=None)[0]
    weighted = weighted @ rotation

    densities = [density_from_weighted(mesh, weighted[:, j]) for j in range(m)]
    gram = boundary_gram(value.k, mesh, densities).real
    eigenvalues, vectors = np.linalg.eigh(gram)
    if np.any(eigenvalues <= 0):
        raise ValidationError(
            f"Eigenfunctions at k={value.k:.10g} have a non-positive boundary Gram matrix; "
            "is k a characteristic value?"
        )
    weighted = weighted @ (vectors @ np.diag(eigenvalues**-0.5) @ vectors.T)

    pairs = []
    for j in range(m):
        column = weighted[:, j]
        data = np.concatenate(_traces(value.k, mesh, density_from_weighted(mesh, column))[:2])
        if data[np.argmax(np.abs(data))].real < 0:
            column = -column
        pairs.append(EigenPair(value=value, index=j, mesh=mesh, density=density_from_weighted(mesh, column)))
    logging.debug(f"Extracted {count('eigenfunction', m)} at k={value.k:.10f}")
    return pairs


def gram_matrix(
    pairs: list[EigenPair],
    *,
    n_radial: int = 24,
    n_angular: int = 96,
    rho_max: float = GRAM_RHO_MAX,
    oversample: int = GRAM_OVERSAMPLE,
) -> FloatArray:
    """
    Interior L^2 products of the eigenfunctions on a mapped polar grid.

    The grid stops at rho_max to respect the evaluation distance floor, which
    leaves out a boundary strip where every eigenfunction is small.
    """
    if not pairs:
        return np.zeros((0, 0))
    curve = pairs[0].value.partition.curve
    if any(p.value.partition.curve is not curve for p in pairs):
        raise ValidationError("All eigenfunctions must live on the same curve")
    grid = polar_grid(curve, n_radial, n_angular, rho_max=rho_max)
    points = grid.points.ravel()
    weights = grid.weights.ravel()
    values = np.stack([p.evaluate(points, oversample=oversample) for p in pairs])
    return (values * weights) @ values.T


def spectral_sum(
    pairs: list[EigenPair],
    source: Point | complex,
    receiver: Point | complex,
    k: float,
    *,
    reference: tuple[float, float] | None = None,
) -> float:
    """
    Partial eigenfunction expansion of Z(x_S, y):

        sum_j u_j(x_S) u_j(y) / (k^2 - lambda_j)

    With reference=(k0, Z_k0(x_S, y)) the sum is taken relative to a known
    value at another wavenumber, Z_k0 + sum_j u_j(x_S) u_j(y) (1/(k^2 - lambda_j) - 1/(k0^2 - lambda_j)),
    whose tail decays like lambda_j^-2 instead of lambda_j^-1.
    """
    x_s = complex(*source) if isinstance(source, tuple) else complex(source)
    y = complex(*receiver) if isinstance(receiver, tuple) else complex(receiver)
    total = 0.0 if reference is None else float(reference[1])
    for pair in pairs:
        lam = pair.eigenvalue
        gap = k**2 - lam
        if abs(gap) < SPECTRAL_GAP * max(1.0, lam):
            raise ValidationError(f"k^2={k**2:g} coincides with the eigenvalue {lam:.10g}")
        product = float(pair.evaluate(x_s)[0]) * float(pair.evaluate(y)[0])
        if reference is None:
            total += product / gap
        else:
            k0 = reference[0]
            total += product * (1 / gap - 1 / (k0**2 - lam))
    return total
