"""Boundary meshes and the logarithmic product-quadrature tables attached to them.

Two layouts exist. A partition without junctions gets one periodic panel of
uniform nodes and Kress log splitting. A partition with junctions gets one
panel per boundary segment, each carrying first-kind Chebyshev nodes in a
local coordinate t in [-1, 1]; the density is represented as
phi = psi * sqrt(1 - t^2), which absorbs the inverse square-root growth of
psi at Dirichlet-Neumann junctions.

For every mesh the tables below let a kernel K = L * log + M be integrated as

    sum_j (M_ij + L_ij * log_weights_ij) * density_weights_j * psi_j

with M_ij = K_ij - L_ij * log_subtracted_ij off the diagonal and
M_ii = R_ii + L_ii * diag_log_i on it.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from zaremba.geometry import Partition, Segment
from zaremba.types import BoolArray, BoundaryKind, ComplexArray, FloatArray, IntArray
from zaremba.utils.inflect import count
from zaremba.validation import validate_nodes_per_arc


@dataclass(frozen=True)
class Panel:
    """One quadrature panel: either the whole periodic boundary or one segment."""

    kind: BoundaryKind
    periodic: bool
    tau_start: float
    tau_end: float
    """Unwrapped; tau_end > tau_start"""

    offset: int
    """Index of the first node in the global arrays"""

    size: int

    @property
    def span(self) -> float:
        return self.tau_end - self.tau_start

    @property
    def nodes(self) -> slice:
        return slice(self.offset, self.offset + self.size)


def chebyshev_nodes(n: int) -> FloatArray:
    """
    First-kind Chebyshev nodes in increasing order.

    >>> [round(float(t), 6) for t in chebyshev_nodes(2)]
    [-0.707107, 0.707107]
    """
    theta = (2 * np.arange(n) + 1) * np.pi / (2 * n)
    return np.cos(theta)[::-1].copy()


def fejer_weights(n: int) -> FloatArray:
    """
    Fejer's first rule on the first-kind Chebyshev nodes (increasing order).

    >>> round(float(fejer_weights(12).sum()), 12)
    2.0
    """
    theta = (2 * np.arange(n) + 1) * np.pi / (2 * n)
    m = np.arange(1, n // 2 + 1)
    correction = np.cos(2 * np.outer(theta, m)) / (4 * m**2 - 1)
    weights = (2 / n) * (1 - 2 * correction.sum(axis=1))
    return weights[::-1].copy()


def chebyshev_coefficient_matrix(n: int) -> FloatArray:
    """C with c = C @ f giving the interpolant's Chebyshev coefficients."""
    t = chebyshev_nodes(n)
    c = (2.0 / n) * np.cos(np.outer(np.arange(n), np.arccos(t)))
    c[0] *= 0.5
    return c


def chebyshev_log_moments(x: FloatArray, n: int) -> FloatArray:
    """
    Integrals of T_m(t) * log|t - x| / sqrt(1 - t^2) over [-1, 1], m < n.

    Returns an array of shape x.shape + (n,).

    >>> moments = chebyshev_log_moments(np.array([0.3]), 3)
    >>> round(float(moments[0, 0]), 12) == round(-math.pi * math.log(2), 12)
    True
    """
    x = np.asarray(x, dtype=np.float64)
    m = np.arange(1, n)
    out = np.empty(x.shape + (n,))
    inside = np.abs(x) <= 1
    xi = x[inside]
    out[inside, 0] = -np.pi * math.log(2)
    out[inside, 1:] = -(np.pi / m) * np.cos(np.multiply.outer(np.arccos(xi), m))
    xo = x[~inside]
    rho = xo + np.sign(xo) * np.sqrt(xo * xo - 1)
    out[~inside, 0] = np.pi * np.log(np.abs(rho) / 2)
    out[~inside, 1:] = -(np.pi / m) * np.power.outer(1.0 / rho, m)
    return out


def kress_weights(n_nodes: int) -> FloatArray:
    """
    Kress weights R(tau_i - tau_j) for the integral of log(4 sin^2((t - s)/2)) f(s).

    The returned N x N matrix is circulant.

    >>> r = kress_weights(8)
    >>> bool(np.allclose(r, r.T))
    True
    """
    half = n_nodes // 2
    tau = 2 * np.pi * np.arange(n_nodes) / n_nodes
    delta = np.subtract.outer(tau, tau)
    m = np.arange(1, half)
    series = np.cos(np.multiply.outer(delta, m)) @ (1.0 / m)
    return -(2 * np.pi / half) * series - (np.pi / half**2) * np.cos(half * delta)


@dataclass(frozen=True, eq=False)
class FineMesh:
    """Oversampled copy of a mesh, used by the smooth rule for off-boundary evaluation."""

    points: ComplexArray
    normals: ComplexArray
    density_weights: FloatArray
    interpolation: FloatArray
    """Maps psi on the coarse nodes to psi on the fine nodes"""


@dataclass(frozen=True, eq=False)
class Mesh:
    """Boundary nodes, quadrature weights and log tables for one partition."""

    partition: Partition
    nodes_per_arc: int
    panels: tuple[Panel, ...]
    tau: FloatArray
    t: FloatArray
    """Local panel coordinate (equal to tau on a periodic panel)"""

    panel_index: IntArray
    is_neumann: BoolArray
    points: ComplexArray = field(repr=False)
    normals: ComplexArray = field(repr=False)
    speed: FloatArray = field(repr=False)
    curvature: FloatArray = field(repr=False)
    jacobian: FloatArray = field(repr=False)
    """|d gamma / dt| in the panel coordinate"""

    weights: FloatArray = field(repr=False)
    """Smooth-function weights; they sum to the boundary length"""

    density_weights: FloatArray = field(repr=False)
    """Nystrom weights omega_j for integrating psi"""

    @property
    def size(self) -> int:
        return int(self.tau.size)

    @property
    def periodic(self) -> bool:
        return len(self.panels) == 1 and self.panels[0].periodic

    @property
    def sqrt_weights(self) -> FloatArray:
        return np.sqrt(self.density_weights)

    @property
    def dirichlet_nodes(self) -> IntArray:
        return np.flatnonzero(~self.is_neumann)

    @property
    def neumann_nodes(self) -> IntArray:
        return np.flatnonzero(self.is_neumann)

    @cached_property
    def arclength(self) -> FloatArray:
        curve = self.partition.curve
        return np.mod(curve.arclength(self.tau), curve.length)

    @cached_property
    def distance(self) -> FloatArray:
        return np.abs(np.subtract.outer(self.points, self.points))

    @cached_property
    def normal_offset(self) -> FloatArray:
        """q_ij = nu_i . (x_i - y_j)"""
        diff = np.subtract.outer(self.points, self.points)
        return np.real(np.conj(self.normals)[:, None] * diff)

    @cached_property
    def _log_tables(self) -> tuple[FloatArray, FloatArray, FloatArray]:
        if self.periodic:
            return _periodic_log_tables(self)
        return _panel_log_tables(self)

    @property
    def log_weights(self) -> FloatArray:
        return self._log_tables[0]

    @property
    def log_subtracted(self) -> FloatArray:
        return self._log_tables[1]

    @property
    def diag_log(self) -> FloatArray:
        return self._log_tables[2]

    def precompute(self) -> "Mesh":
        """Fill the cached geometry tables; do this before sharing the mesh across threads."""
        _ = self.distance, self.normal_offset, self._log_tables
        return self

    def local_spacing(self) -> FloatArray:
        """Distance-like spacing of each node (its Nystrom weight)."""
        return self.density_weights

    def relabel(self, partition: Partition) -> "Mesh":
        """Same nodes and quadrature, boundary kinds taken from another partition."""
        if partition.curve is not self.partition.curve:
            raise ValueError("relabel needs a partition on the same curve")
        kinds = np.array([partition.kind_at(float(s)) == "N" for s in self.arclength])
        if partition.full_neumann:
            kinds[:] = True
        relabelled = Mesh(
            partition=partition,
            nodes_per_arc=self.nodes_per_arc,
            panels=self.panels,
            tau=self.tau,
            t=self.t,
            panel_index=self.panel_index,
            is_neumann=kinds,
            points=self.points,
            normals=self.normals,
            speed=self.speed,
            curvature=self.curvature,
            jacobian=self.jacobian,
            weights=self.weights,
            density_weights=self.density_weights,
        )
        # geometry tables do not depend on the kinds
        for name in ("distance", "normal_offset", "_log_tables", "arclength"):
            if name in self.__dict__:
                relabelled.__dict__[name] = self.__dict__[name]
        return relabelled

    def refined(self, factor: int) -> FineMesh:
        cache: dict[int, FineMesh] = self.__dict__.setdefault("_refined", {})
        if factor not in cache:
            cache[factor] = _refine(self, factor)
        return cache[factor]


def build_mesh(partition: Partition, nodes_per_arc: int) -> Mesh:
    """
    Nodes and weights for a partition.

    Without junctions: nodes_per_arc uniform nodes (rounded up to even).
    With junctions: nodes_per_arc Chebyshev nodes on every segment,
    Dirichlet segments first.

    >>> from zaremba.geometry import make_disk, pure_dirichlet
    >>> mesh = build_mesh(pure_dirichlet(make_disk()), 64)
    >>> mesh.size, round(float(mesh.tau[1]), 12) == round(2 * math.pi / 64, 12)
    (64, True)
    """
    n = validate_nodes_per_arc(nodes_per_arc)
    curve = partition.curve
    if not partition.has_junctions:
        n += n % 2
        kind: BoundaryKind = "N" if partition.full_neumann else "D"
        tau = 2 * np.pi * np.arange(n) / n
        panels = (Panel(kind=kind, periodic=True, tau_start=0.0, tau_end=2 * np.pi, offset=0, size=n),)
        speed = curve.speed(tau)
        weights = (2 * np.pi / n) * speed
        mesh = Mesh(
            partition=partition,
            nodes_per_arc=n,
            panels=panels,
            tau=tau,
            t=tau,
            panel_index=np.zeros(n, dtype=np.int64),
            is_neumann=np.full(n, kind == "N"),
            points=curve.gamma(tau),
            normals=curve.normal(tau),
            speed=speed,
            curvature=curve.curvature(tau),
            jacobian=speed,
            weights=weights,
            density_weights=weights.copy(),
        )
        logging.debug(f"Built periodic mesh with {count('node', n)} on {partition.describe()}")
        return mesh

    segments = sorted(partition.segments(), key=lambda s: s.kind != "D")
    t_local = chebyshev_nodes(n)
    fejer = fejer_weights(n)
    root = np.sqrt(1 - t_local**2)
    panels: list[Panel] = []
    taus: list[FloatArray] = []
    jacobians: list[FloatArray] = []
    for index, segment in enumerate(segments):
        tau_start, tau_end = _segment_tau(partition, segment)
        panels.append(
            Panel(
                kind=segment.kind,
                periodic=False,
                tau_start=tau_start,
                tau_end=tau_end,
                offset=index * n,
                size=n,
            )
        )
        tau = tau_start + (t_local + 1) * (tau_end - tau_start) / 2
        taus.append(tau)
        jacobians.append(curve.speed(tau) * (tau_end - tau_start) / 2)
    tau = np.concatenate(taus)
    jacobian = np.concatenate(jacobians)
    mesh = Mesh(
        partition=partition,
        nodes_per_arc=n,
        panels=tuple(panels),
        tau=tau,
        t=np.tile(t_local, len(panels)),
        panel_index=np.repeat(np.arange(len(panels), dtype=np.int64), n),
        is_neumann=np.repeat(np.array([p.kind == "N" for p in panels]), n),
        points=curve.gamma(tau),
        normals=curve.normal(tau),
        speed=curve.speed(tau),
        curvature=curve.curvature(tau),
        jacobian=jacobian,
        weights=np.tile(fejer, len(panels)) * jacobian,
        density_weights=np.tile((np.pi / n) * root, len(panels)) * jacobian,
    )
    logging.debug(
        f"Built {count('panel', len(panels))} x {count('node', n)} on {partition.describe()}"
    )
    return mesh


def _segment_tau(partition: Partition, segment: Segment) -> tuple[float, float]:
    curve = partition.curve
    tau_start = float(curve.parameter_at(segment.start_s))
    tau_end = float(curve.parameter_at(segment.end_s))
    if tau_end <= tau_start:
        tau_end += 2 * np.pi
    return tau_start, tau_end


def _periodic_log_tables(mesh: Mesh) -> tuple[FloatArray, FloatArray, FloatArray]:
    n = mesh.size
    weights = (n / (2 * np.pi)) * kress_weights(n) / 2
    delta = np.subtract.outer(mesh.tau, mesh.tau)
    with np.errstate(divide="ignore"):
        subtracted = 0.5 * np.log(4 * np.sin(delta / 2) ** 2)
    np.fill_diagonal(subtracted, 0.0)
    return weights, subtracted, np.log(mesh.speed)


def _panel_log_tables(mesh: Mesh) -> tuple[FloatArray, FloatArray, FloatArray]:
    size = mesh.size
    weights = np.zeros((size, size))
    subtracted = np.zeros((size, size))
    diag = np.zeros(size)
    for panel in mesh.panels:
        cols = panel.nodes
        n = panel.size
        coefficients = chebyshev_coefficient_matrix(n)
        period = 4 * np.pi / panel.span
        # nearest parameter image of every target in this panel's coordinate
        centre = panel.tau_start + panel.span / 2
        shift = np.rint((centre - mesh.tau) / (2 * np.pi))
        t1 = 2 * (mesh.tau + 2 * np.pi * shift - panel.tau_start) / panel.span - 1
        on_panel = mesh.panel_index == mesh.panel_index[panel.offset]
        t1[on_panel] = mesh.t[on_panel]
        t2 = t1 - np.where(t1 >= 0, 1.0, -1.0) * period
        moments = chebyshev_log_moments(t1, n) + chebyshev_log_moments(t2, n)
        weights[:, cols] = (n / np.pi) * moments @ coefficients
        source = mesh.t[cols]
        with np.errstate(divide="ignore"):
            subtracted[:, cols] = np.log(np.abs(source[None, :] - t1[:, None])) + np.log(
                np.abs(source[None, :] - t2[:, None])
            )
        rows = np.flatnonzero(on_panel)
        diag[rows] = np.log(mesh.jacobian[rows]) - np.log(np.abs(mesh.t[rows] - t2[rows]))
        subtracted[rows, rows] = 0.0
    return weights, subtracted, diag


def _refine(mesh: Mesh, factor: int) -> FineMesh:
    curve = mesh.partition.curve
    if mesh.periodic:
        n = mesh.size
        m = n * factor
        tau = 2 * np.pi * np.arange(m) / m
        spectrum = np.fft.fft(np.eye(n), axis=0) / n
        padded = np.zeros((m, n), dtype=np.complex128)
        half = n // 2
        padded[:half] = spectrum[:half]
        padded[m - half + 1 :] = spectrum[half + 1 :]
        padded[half] = spectrum[half] / 2
        padded[m - half] = spectrum[half] / 2
        interpolation = np.real(np.fft.ifft(padded, axis=0) * m)
        weights = (2 * np.pi / m) * curve.speed(tau)
        return FineMesh(
            points=curve.gamma(tau),
            normals=curve.normal(tau),
            density_weights=weights,
            interpolation=interpolation,
        )

    blocks: list[FloatArray] = []
    taus: list[FloatArray] = []
    density_weights: list[FloatArray] = []
    for panel in mesh.panels:
        n = panel.size
        m = n * factor
        coarse_root = np.sqrt(1 - mesh.t[panel.nodes] ** 2)
        fine_t = chebyshev_nodes(m)
        fine_root = np.sqrt(1 - fine_t**2)
        # psi -> phi -> Chebyshev coefficients -> fine phi -> fine psi
        basis = np.cos(np.outer(np.arccos(fine_t), np.arange(n)))
        block = (basis @ chebyshev_coefficient_matrix(n)) * coarse_root[None, :] / fine_root[:, None]
        blocks.append(block)
        tau = panel.tau_start + (fine_t + 1) * panel.span / 2
        taus.append(tau)
        density_weights.append((np.pi / m) * fine_root * curve.speed(tau) * panel.span / 2)
    rows = sum(b.shape[0] for b in blocks)
    interpolation = np.zeros((rows, mesh.size))
    row = 0
    for panel, block in zip(mesh.panels, blocks):
        interpolation[row : row + block.shape[0], panel.nodes] = block
        row += block.shape[0]
    tau = np.concatenate(taus)
    return FineMesh(
        points=curve.gamma(tau),
        normals=curve.normal(tau),
        density_weights=np.concatenate(density_weights),
        interpolation=interpolation,
    )
