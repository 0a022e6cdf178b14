"""
Drive a characteristic value down onto a target k_star by editing the boundary partition.

Starting from the first pure-Dirichlet value above k_star, a short Neumann arc
is nucleated where it raises |Z(x_S, y_R)| most, then grown symmetrically. Every
edit must lower the tracked value; a step that lands below k_star - c_tol or
raises the value is rolled back and retried with a smaller increment.
"""

import logging
import math
import uuid
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from zaremba.bie.mesh import build_mesh
from zaremba.database import RunLedger
from zaremba.field.green import eval_field, solve_field
from zaremba.geometry import Arc, Curve, Partition, PartitionError, extend_all, pure_dirichlet, require_interior
from zaremba.optimize.site import Site, nucleation_sites
from zaremba.spectral.contour import ContourError, DerivativeRule, EllipseContour, char_update_fast
from zaremba.spectral.scan import SINGULAR_THRESHOLD, CharValue, next_higher_dirichlet, refine, sigma_min_scan
from zaremba.types import Point
from zaremba.utils.inflect import count
from zaremba.validation import ValidationError, validate_nodes_per_arc, validate_positive

SHRINK_NUCLEATION = math.sqrt(2)
SHRINK_GROWTH = 0.9
MIN_EPS_FRACTION = 1e-5
"""Runs fail once eps drops below this fraction of the boundary length."""

MAX_EPS0_FRACTION = 1 / 20
END_THRESHOLD = 1e-12
"""Relative sigma_min accepted when evaluating Z next to the reached value."""

MONOTONE_SLACK = 1e-9
REJECTED = ("overshoot", "rise")

Phase = Literal["nucleate", "grow", "confirm"]
Method = Literal["fast", "rescan", "confirm"]


@dataclass(frozen=True)
class OptimizeConfig:
    curve: Curve
    source: complex
    """x_S"""

    receiver: complex
    """y_R, where |Z(x_S, y_R)| should grow"""

    k_star: float
    c_tol: float
    eps0: float
    """Initial nucleation half-length"""

    nodes_per_arc: int = 64
    grid_step: float = 0.01
    max_iterations: int = 500
    arcs: int = 1
    """Nucleate at this many extrema, splitting eps0 evenly"""

    derivative: DerivativeRule = "forward"
    contour_points: int = 32

    def __post_init__(self):
        validate_positive("k_star", self.k_star)
        validate_positive("c_tol", self.c_tol)
        validate_positive("eps0", self.eps0)
        validate_positive("grid_step", self.grid_step)
        validate_nodes_per_arc(self.nodes_per_arc)
        if self.max_iterations < 1:
            raise ValidationError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if self.arcs < 1:
            raise ValidationError(f"arcs must be at least 1, got {self.arcs}")
        if self.eps0 >= MAX_EPS0_FRACTION * self.curve.length:
            raise ValidationError(
                f"eps0={self.eps0:g} must stay below 1/20 of the boundary length ({self.curve.length:.6g})"
            )
        require_interior(self.curve, self.source)
        require_interior(self.curve, self.receiver)
        if abs(self.source - self.receiver) < 1e-12:
            raise ValidationError("source and receiver must be different points")

    @classmethod
    def from_points(cls, curve: Curve, source: Point, receiver: Point, **kwargs: object) -> "OptimizeConfig":
        return cls(curve=curve, source=complex(*source), receiver=complex(*receiver), **kwargs)  # type: ignore[arg-type]


@dataclass(frozen=True)
class IterationStep:
    index: int
    phase: Phase
    eps: float
    k: float
    """NaN when a re-scan found no value in its window"""

    method: Method
    partition: Partition
    accepted: bool


@dataclass
class OptimizeTrace:
    """Everything a run did, filled in as it goes."""

    config: OptimizeConfig
    start: CharValue | None = None
    sites: list[Site] = field(default_factory=list[Site])
    steps: list[IterationStep] = field(default_factory=list[IterationStep])
    partition: Partition | None = None
    """Last accepted partition"""

    k: float | None = None
    z_dirichlet: float | None = None
    z_end: float | None = None
    success: bool = False

    @property
    def gain(self) -> float | None:
        if self.z_end is None or not self.z_dirichlet:
            return None
        return abs(self.z_end / self.z_dirichlet)

    @property
    def main_arc(self) -> Arc | None:
        if self.partition is None or not self.partition.neumann_arcs:
            return None
        return max(self.partition.neumann_arcs, key=lambda a: a.half_length)

    @property
    def theta_center(self) -> float | None:
        """Polar angle of the centre of the longest Neumann arc, in units of pi."""
        arc = self.main_arc
        if arc is None:
            return None
        return float(np.mod(np.angle(arc.center_point() - self.config.curve.center) / np.pi, 2.0))

    @property
    def neumann_length(self) -> float:
        return self.partition.neumann_length if self.partition else 0.0


class OptimizeError(Exception):
    """A run gave up; the trace holds every step taken."""

    def __init__(self, message: str, trace: OptimizeTrace):
        super().__init__(message)
        self.trace = trace


@dataclass
class RunState:
    """Bookkeeping shared by the phases of one run."""

    config: OptimizeConfig
    trace: OptimizeTrace
    ledger: RunLedger | None
    run_id: uuid.UUID

    def step(self, phase: Phase, eps: float, k: float, method: Method, partition: Partition, accepted: bool):
        step = IterationStep(
            index=len(self.trace.steps),
            phase=phase,
            eps=eps,
            k=k,
            method=method,
            partition=partition,
            accepted=accepted,
        )
        self.trace.steps.append(step)
        if self.ledger is not None:
            self.ledger.record(self.run_id, step)

    def check_budget(self, eps: float):
        config = self.config
        if len(self.trace.steps) >= config.max_iterations:
            raise OptimizeError(
                f"No partition reached k_star={config.k_star:g} within {count('iteration', config.max_iterations)}",
                self.trace,
            )
        if eps < MIN_EPS_FRACTION * config.curve.length:
            raise OptimizeError(f"Step size underflow: eps={eps:.3e}", self.trace)

    def track(self, partition: Partition, k_prev: float) -> tuple[float, Method]:
        """
        The value the tracked one moved to on the new partition.

        The fast contour update comes first; a failed update falls back to a
        sigma_min scan of [k_star - 2 c_tol, k_prev].
        """
        config = self.config
        contour = EllipseContour.toward(k_prev, config.k_star, config.contour_points)
        try:
            update = char_update_fast(
                partition,
                k_prev,
                contour,
                derivative=config.derivative,
                nodes_per_arc=config.nodes_per_arc,
                max_roots=2,
            )
            return update.closest_above(config.k_star), "fast"
        except ContourError as e:
            logging.info(f"🔁 Fast update failed at k={k_prev:.8f} ({e}); rescanning")
        lo = max(config.k_star - 2 * config.c_tol - 2 * config.grid_step, config.grid_step)
        window = (lo, k_prev + 2 * config.grid_step)
        values = sigma_min_scan(partition, window, config.grid_step, nodes_per_arc=config.nodes_per_arc)
        return select_rescan([v.k for v in values], config.k_star, config.c_tol), "rescan"

    def confirm(self, partition: Partition, k: float) -> float:
        """Golden-section sigma_min refinement around a fast estimate."""
        config = self.config
        half = max(config.c_tol, config.grid_step)
        mesh = build_mesh(partition, config.nodes_per_arc)
        value = refine(partition, mesh, (k - half, k, k + half))
        if value.sigma_min >= SINGULAR_THRESHOLD * value.sigma_max:
            logging.warning(
                f"Refinement near k={k:.8f} ends at sigma_min/sigma_max={value.sigma_min / value.sigma_max:.2e}"
            )
        return value.k

    def attempt(self, phase: Phase, eps: float, partition: Partition, k_prev: float) -> tuple[str, float]:
        """
        Track, confirm when close, and classify the result as
        "done", "overshoot", "rise" or "continue". A value above k_prev is
        a "rise" and is rejected like an overshoot.
        """
        config = self.config
        k, method = self.track(partition, k_prev)
        if not math.isnan(k) and abs(k - config.k_star) <= config.c_tol:
            self.step(phase, eps, k, method, partition, accepted=True)
            k = self.confirm(partition, k)
            phase, method = "confirm", "confirm"
        outcome = classify(k, config.k_star, config.c_tol)
        if outcome != "overshoot" and k > k_prev + MONOTONE_SLACK:
            logging.warning(
                f"↩️ Tracked value rose from {k_prev:.10f} to {k:.10f} on {partition.describe()}; rolling back"
            )
            outcome = "rise"
        self.step(phase, eps, k, method, partition, accepted=outcome not in REJECTED)
        return outcome, k


def classify(k: float, k_star: float, c_tol: float) -> str:
    """
    >>> classify(1.0005, 1.0, 1e-3), classify(0.99, 1.0, 1e-3), classify(1.2, 1.0, 1e-3)
    ('done', 'overshoot', 'continue')
    """
    if math.isnan(k) or k < k_star - c_tol:
        return "overshoot"
    if k <= k_star + c_tol:
        return "done"
    return "continue"


def select_rescan(values: list[float], k_star: float, c_tol: float) -> float:
    """
    Pick the re-scanned value closest to k_star that is not below
    k_star - c_tol; the largest one if every value is below; NaN if none.

    >>> select_rescan([0.95, 1.02, 1.3], 1.0, 1e-2)
    1.02
    >>> select_rescan([0.8, 0.9], 1.0, 1e-2)
    0.9
    >>> select_rescan([], 1.0, 1e-2)
    nan
    """
    if not values:
        return math.nan
    admissible = [k for k in values if k >= k_star - c_tol]
    if not admissible:
        return max(values)
    return min(admissible, key=lambda k: abs(k - k_star))


def _nucleated(partition: Partition, sites: list[Site], half_length: float) -> Partition:
    for site in sites:
        partition = partition.nucleate(site.s, half_length)
    return partition


def run(config: OptimizeConfig, *, ledger: RunLedger | None = None, run_id: uuid.UUID | None = None) -> OptimizeTrace:
    """
    Tune the partition of config.curve until one of its characteristic values
    lies within c_tol of k_star.

    Raises:
        OptimizeError: If the iteration budget runs out or eps underflows
        ScanError: If there is no Dirichlet characteristic value above k_star
        NearResonanceError: If k_star itself is a Dirichlet characteristic value
    """
    trace = OptimizeTrace(config=config)
    state = RunState(config=config, trace=trace, ledger=ledger, run_id=run_id or uuid.uuid4())
    try:
        _run(state)
    finally:
        if ledger is not None:
            ledger.finish(state.run_id, trace)
    return trace


def _run(state: RunState):
    config, trace = state.config, state.trace
    m = config.arcs

    start = next_higher_dirichlet(
        config.curve, config.k_star, nodes_per_arc=config.nodes_per_arc, grid_step=config.grid_step
    )
    trace.start = start
    dirichlet = pure_dirichlet(config.curve)
    trace.partition = dirichlet
    trace.k = start.k

    # Z has a pole at the Dirichlet value itself; sites come from Z at the target
    mesh = build_mesh(dirichlet, config.nodes_per_arc)
    field_source = solve_field(config.k_star, dirichlet, config.source, mesh=mesh)
    field_receiver = solve_field(config.k_star, dirichlet, config.receiver, mesh=mesh)
    trace.z_dirichlet = float(eval_field(field_source, config.receiver)[0])
    trace.sites = nucleation_sites(field_source, field_receiver, m)
    logging.info(
        f"🎯 Target k*={config.k_star:g}, starting from {start.k:.8f} "
        f"(multiplicity {start.multiplicity}); Z_D={trace.z_dirichlet:.6e}"
    )

    eps = config.eps0
    k = start.k
    while True:
        state.check_budget(eps)
        candidate = _nucleated(dirichlet, trace.sites, eps / m)
        outcome, k_new = state.attempt("nucleate", eps, candidate, k)
        if outcome in REJECTED:
            eps /= SHRINK_NUCLEATION
            continue
        trace.partition, trace.k, k = candidate, k_new, k_new
        if outcome == "done":
            return _finish(state)
        break

    while True:
        state.check_budget(eps)
        try:
            candidate = extend_all(trace.partition, eps / 2 / m)
        except PartitionError as e:
            logging.info(f"🔁 {e}; shrinking the growth step")
            eps *= SHRINK_GROWTH
            continue
        outcome, k_new = state.attempt("grow", eps, candidate, k)
        if outcome in REJECTED:
            eps *= SHRINK_GROWTH
            continue
        trace.partition, trace.k, k = candidate, k_new, k_new
        if outcome == "done":
            return _finish(state)


def _finish(state: RunState):
    config, trace = state.config, state.trace
    assert trace.partition is not None
    end_field = solve_field(
        config.k_star,
        trace.partition,
        config.source,
        nodes_per_arc=config.nodes_per_arc,
        threshold=END_THRESHOLD,
    )
    trace.z_end = float(eval_field(end_field, config.receiver)[0])
    trace.success = True
    logging.info(
        f"✅ Reached k={trace.k:.8f} after {count('step', len(trace.steps))} on {trace.partition.describe()}: "
        f"Z {trace.z_dirichlet:.6e} -> {trace.z_end:.6e}"
    )
