"""Smallest-singular-value scans for characteristic values of A(k)."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.signal

from zaremba.bie.mesh import Mesh, build_mesh
from zaremba.bie.operator import assemble
from zaremba.geometry import Curve, Partition, pure_dirichlet
from zaremba.types import FloatArray
from zaremba.utils.inflect import count
from zaremba.utils.parallel import ordered_map
from zaremba.validation import validate_interval, validate_positive

DEFAULT_NODES = 64
DEFAULT_STEP = 0.01
SINGULAR_THRESHOLD = 1e-6
"""A refined minimum counts when sigma_min < SINGULAR_THRESHOLD * sigma_max."""

REFINE_TOLERANCE = 1e-8
MULTIPLICITY_FACTOR = 1e2
SEARCH_WINDOW = 1.0
MAX_WINDOWS = 40


class ScanError(Exception):
    """A forward search ran out of windows without finding a characteristic value."""

    pass


@dataclass(frozen=True)
class CharValue:
    """A located characteristic value of A(k) for one partition."""

    k: float
    multiplicity: int
    sigma_min: float
    sigma_max: float
    partition: Partition
    nodes_per_arc: int

    @property
    def eigenvalue(self) -> float:
        """The Zaremba eigenvalue k^2."""
        return self.k**2


@dataclass(frozen=True)
class ScanProfile:
    """Sampled sigma_min(k) together with the refined characteristic values."""

    k: FloatArray
    sigma_min: FloatArray
    values: list[CharValue]


def _sigma(partition: Partition, mesh: Mesh, k: float) -> tuple[float, float]:
    singular = assemble(k, partition, mesh).singular_values
    return float(singular[-1]), float(singular[0])


def refine(
    partition: Partition,
    mesh: Mesh,
    bracket: tuple[float, float, float],
    *,
    tolerance: float = REFINE_TOLERANCE,
) -> CharValue:
    """
    Golden-section search for the minimum of sigma_min(k) inside a bracket
    (lo, mid, hi) with sigma_min(mid) not above the ends.

    The result carries the multiplicity estimated from the singular values
    within MULTIPLICITY_FACTOR of the minimum.
    """
    lo, mid, hi = bracket
    scale = max(abs(mid), 1.0)

    def objective(k: float) -> float:
        return _sigma(partition, mesh, k)[0]

    try:
        result = scipy.optimize.minimize_scalar(
            objective,
            bracket=(lo, mid, hi),
            method="golden",
            options={"xtol": tolerance / (2 * scale)},
        )
        k = float(result.x)
        if not lo <= k <= hi:
            raise ValueError("golden section left the bracket")
    except (ValueError, RuntimeError):
        # flat brackets (equal samples) are not accepted by the golden method
        result = scipy.optimize.minimize_scalar(
            objective, bounds=(lo, hi), method="bounded", options={"xatol": tolerance}
        )
        k = float(result.x)
    singular = assemble(k, partition, mesh).singular_values
    sigma_min = float(singular[-1])
    multiplicity = max(1, int(np.sum(singular < MULTIPLICITY_FACTOR * max(sigma_min, 1e-300))))
    return CharValue(
        k=k,
        multiplicity=multiplicity,
        sigma_min=sigma_min,
        sigma_max=float(singular[0]),
        partition=partition,
        nodes_per_arc=mesh.nodes_per_arc,
    )


def scan_profile(
    partition: Partition,
    interval: tuple[float, float],
    grid_step: float = DEFAULT_STEP,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    threshold: float = SINGULAR_THRESHOLD,
    mesh: Mesh | None = None,
) -> ScanProfile:
    """
    Sample sigma_min on a uniform grid over the interval and refine every
    interior local minimum; minima that stay above threshold * sigma_max after
    refinement are discarded.
    """
    lo, hi = validate_interval(*interval)
    validate_positive("k_lo", lo)
    step = validate_positive("grid_step", grid_step)
    mesh = (mesh or build_mesh(partition, nodes_per_arc)).precompute()
    samples = max(3, math.ceil((hi - lo) / step - 1e-9) + 1)
    ks = np.linspace(lo, hi, samples)
    sigma = np.array([s for s, _ in ordered_map(lambda k: _sigma(partition, mesh, float(k)), ks)])
    minima, _ = scipy.signal.find_peaks(-sigma)
    candidates = [(float(ks[i - 1]), float(ks[i]), float(ks[i + 1])) for i in minima]
    refined = ordered_map(lambda b: refine(partition, mesh, b), candidates)
    values = [v for v in refined if v.sigma_min < threshold * v.sigma_max]
    logging.debug(
        f"Scanned {partition.describe()} on [{lo:g}, {hi:g}] with {count('sample', samples)}: "
        f"{count('local minimum', len(candidates))}, {count('characteristic value', len(values))}"
    )
    return ScanProfile(k=ks, sigma_min=sigma, values=values)


def sigma_min_scan(
    partition: Partition,
    interval: tuple[float, float],
    grid_step: float = DEFAULT_STEP,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    threshold: float = SINGULAR_THRESHOLD,
    mesh: Mesh | None = None,
) -> list[CharValue]:
    """
    Characteristic values of A(k) in an interval, in increasing order.

    Returns an empty list when sigma_min has no deep minimum there.
    """
    return scan_profile(
        partition,
        interval,
        grid_step,
        nodes_per_arc=nodes_per_arc,
        threshold=threshold,
        mesh=mesh,
    ).values


def next_higher_dirichlet(
    curve: Curve,
    k_star: float,
    *,
    nodes_per_arc: int = DEFAULT_NODES,
    grid_step: float = DEFAULT_STEP,
    window: float = SEARCH_WINDOW,
    max_windows: int = MAX_WINDOWS,
) -> CharValue:
    """
    The smallest pure-Dirichlet characteristic value strictly above k_star.

    Windows of the given width are scanned forward from k_star; consecutive
    windows overlap by two grid steps so a minimum on a window edge is not lost.

    Raises:
        ScanError: If max_windows windows contain no characteristic value
    """
    k_star = validate_positive("k_star", k_star)
    partition = pure_dirichlet(curve)
    mesh = build_mesh(partition, nodes_per_arc)
    lo = k_star
    for _ in range(max_windows):
        hi = lo + window
        found = [
            v
            for v in sigma_min_scan(partition, (lo, hi), grid_step, mesh=mesh)
            if v.k > k_star + REFINE_TOLERANCE
        ]
        if found:
            best = min(found, key=lambda v: v.k)
            logging.info(
                f"Next Dirichlet characteristic value above {k_star:g} on the {curve.name}: "
                f"{best.k:.10f} (multiplicity {best.multiplicity})"
            )
            return best
        lo = hi - 2 * grid_step
    raise ScanError(
        f"No Dirichlet characteristic value in [{k_star:g}, {lo + 2 * grid_step:g}] "
        f"after {count('window', max_windows)}"
    )
