"""
The property suite run by `zaremba validate`.

Every check returns a CheckResult; a check that raises is reported as failed
rather than stopping the suite.
"""

import itertools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from zaremba.bie.kernels import fundamental_solution
from zaremba.bie.mesh import build_mesh
from zaremba.bie.operator import Density
from zaremba.bie.potentials import eval_trace_dn
from zaremba.field.green import eval_boundary, eval_dn_boundary, eval_field, solve_field
from zaremba.geometry import extend_all, make_disk, make_kite, pure_dirichlet, pure_neumann
from zaremba.specfun import bessel_j, hankel1, jy01
from zaremba.spectral.contour import (
    EllipseContour,
    char_update_exact,
    char_update_fast,
    winding_against_scan,
)
from zaremba.spectral.scan import CharValue, sigma_min_scan
from zaremba.utils.inflect import count

DEFAULT_NODES = 128

J0_ROOT = 2.404825557695773
J1_PRIME_ROOT = 1.841183781340659

WINDING_SEED = 20
WINDING_SAMPLES = 20


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    """Measured error (or count, for integer checks)"""

    tolerance: float
    detail: str = ""


def _within(name: str, error: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(error <= tolerance), value=float(error), tolerance=tolerance, detail=detail)


def check_wronskian(nodes: int) -> CheckResult:
    """J0 Y0' - J0' Y0 = 2/(pi x) across every branch switch."""
    x = np.geomspace(0.1, 50.0, 200)
    j0, j1, y0, y1 = (v.real for v in jy01(x))
    error = float(np.max(np.abs(-j0 * y1 + j1 * y0 - 2 / (np.pi * x))))
    return _within("wronskian", error, 1e-10)


def check_recurrence(nodes: int) -> CheckResult:
    """J0' = -J1 against a five-point stencil."""
    x = np.geomspace(0.2, 45.0, 40)
    h = 1e-3
    j = [bessel_j(0, x + d * h).real for d in (-2, -1, 1, 2)]
    derivative = (j[0] - 8 * j[1] + 8 * j[2] - j[3]) / (12 * h)
    j1 = bessel_j(1, x).real
    error = float(np.max(np.abs(derivative + j1) / np.maximum(np.abs(j1), 1.0)))
    return _within("bessel recurrence", error, 1e-8)


def check_arclength(nodes: int) -> CheckResult:
    kite = make_kite()
    s = np.linspace(0, kite.length, 97, endpoint=False)
    error = float(np.max(np.abs(kite.arclength(kite.parameter_at(s)) - s)))
    return _within("arclength round trip", error, 1e-10, "kite")


def check_measure(nodes: int) -> CheckResult:
    disk = make_disk()
    partition = pure_dirichlet(disk).nucleate(math.pi / 2, 0.1).nucleate(3.0, 0.2)
    partition = extend_all(partition, 0.3)
    error = abs(partition.dirichlet_length + partition.neumann_length - disk.length)
    return _within("partition measure", error, 1e-10, partition.describe())


def check_kernel_reciprocity(nodes: int) -> CheckResult:
    pairs = [(0.3 + 0.1j, -0.4 + 0.2j), (0.0j, 0.5j), (1.2 - 0.7j, -0.3j)]
    error = max(abs(fundamental_solution(2.5, x, y) - fundamental_solution(2.5, y, x)) for x, y in pairs)
    return _within("kernel reciprocity", error, 1e-14)


def check_jump_relation(nodes: int) -> CheckResult:
    """Interior normal trace of S[1] on the unit circle against -(i pi / 2) k J0'(k) H0(k)."""
    k = 1.5
    partition = pure_dirichlet(make_disk())
    mesh = build_mesh(partition, nodes)
    ones = np.ones(mesh.size, dtype=np.complex128)
    density = Density(values=ones, weighted=mesh.sqrt_weights * ones)
    trace = eval_trace_dn(density, mesh, k, side="interior")
    expected = 0.5j * np.pi * k * complex(bessel_j(1, k)) * complex(hankel1(0, k))
    error = float(np.max(np.abs(trace - expected)))
    return _within("jump relation", error, 1e-10, "disk, constant density")


def check_boundary_conditions(nodes: int) -> CheckResult:
    partition = pure_dirichlet(make_disk()).nucleate(math.pi / 2, 0.1)
    field = solve_field(1.0, partition, 0j, nodes_per_arc=nodes)
    dirichlet = float(np.max(np.abs(eval_boundary(field)[field.mesh.dirichlet_nodes])))
    neumann = float(np.max(np.abs(eval_dn_boundary(field)[field.mesh.neumann_nodes])))
    return _within(
        "boundary conditions", max(dirichlet, neumann), 1e-8, f"D {dirichlet:.1e}, N {neumann:.1e}"
    )


def check_green_reciprocity(nodes: int) -> CheckResult:
    """Z(x, y) = Z(y, x) on a mixed partition; junctions limit the accuracy."""
    partition = pure_dirichlet(make_disk()).nucleate(math.pi / 2, 0.1)
    mesh = build_mesh(partition, nodes)
    x, y = 0.3 + 0.1j, -0.2 + 0.4j
    forward = float(eval_field(solve_field(1.0, partition, x, mesh=mesh), y)[0])
    backward = float(eval_field(solve_field(1.0, partition, y, mesh=mesh), x)[0])
    return _within("green reciprocity", abs(forward - backward), 1e-4, "disk, mixed")


def _first_value(name: str, partition_name: str, interval: tuple[float, float], expected: float, nodes: int) -> CheckResult:
    disk = make_disk()
    partition = pure_dirichlet(disk) if partition_name == "dirichlet" else pure_neumann(disk)
    values = sigma_min_scan(partition, interval, 0.01, nodes_per_arc=nodes)
    if not values:
        return CheckResult(name, False, math.inf, 1e-6, f"no characteristic value in {interval}")
    error = min(abs(v.k - expected) for v in values)
    return _within(name, error, 1e-6, f"expected {expected}")


def check_dirichlet_value(nodes: int) -> CheckResult:
    return _first_value("disk dirichlet value", "dirichlet", (2.3, 2.5), J0_ROOT, nodes)


def check_neumann_value(nodes: int) -> CheckResult:
    return _first_value("disk neumann value", "neumann", (1.7, 1.95), J1_PRIME_ROOT, nodes)


def check_winding(nodes: int) -> CheckResult:
    """Windings of seeded random ellipses against sigma_min counts on the disk."""
    samples = winding_against_scan(
        pure_dirichlet(make_disk()),
        np.random.default_rng(WINDING_SEED),
        (2.0, 6.0),
        WINDING_SAMPLES,
        nodes_per_arc=nodes,
    )
    misses = [s for s in samples if s.winding != s.scanned]
    detail = ", ".join(f"{s.contour.center.real:.2f}: {s.winding} vs {s.scanned}" for s in misses)
    return _within("contour winding", len(misses), 0, detail or f"{count('contour', len(samples))} agree")


def _expand(values: list[CharValue]) -> list[float]:
    return [v.k for v in values for _ in range(v.multiplicity)]


def check_neumann_growth(nodes: int) -> CheckResult:
    """Growing one Neumann arc strictly lowers each of the first three disk values."""
    disk = pure_dirichlet(make_disk())
    lowest = [
        _expand(sigma_min_scan(disk.nucleate(1.0, half_length), (0.5, 4.0), nodes_per_arc=nodes))[:3]
        for half_length in (0.1, 0.2, 0.4, 0.8)
    ]
    rises = sum(
        min(len(smaller), len(larger)) < 3 or larger[j] >= smaller[j]
        for smaller, larger in itertools.pairwise(lowest)
        for j in range(3)
    )
    return _within("neumann growth", rises, 0, "arc lengths 0.2 to 1.6")


def check_fast_update(nodes: int) -> CheckResult:
    """Fast and exact contour updates agree after nucleating short arcs."""
    k_star = 2.3
    disk = pure_dirichlet(make_disk())
    contour = EllipseContour.toward(J0_ROOT, k_star)
    errors: list[float] = []
    for half_length in (0.1, 0.05, 0.025):
        partition = disk.nucleate(math.pi / 2, half_length)
        fast = char_update_fast(partition, J0_ROOT, contour, nodes_per_arc=nodes)
        exact = char_update_exact(partition, J0_ROOT, contour, nodes_per_arc=nodes)
        errors.append(abs(fast.k - exact.k) / abs(J0_ROOT - k_star))
    return _within("fast update", max(errors), 1e-3, f"relative to |k0 - k_star|, k_star = {k_star}")


CHECKS: list[Callable[[int], CheckResult]] = [
    check_wronskian,
    check_recurrence,
    check_arclength,
    check_measure,
    check_kernel_reciprocity,
    check_jump_relation,
    check_boundary_conditions,
    check_green_reciprocity,
    check_dirichlet_value,
    check_neumann_value,
    check_winding,
    check_neumann_growth,
    check_fast_update,
]


def run_checks(nodes: int = DEFAULT_NODES) -> list[CheckResult]:
    results: list[CheckResult] = []
    for check in CHECKS:
        try:
            result = check(nodes)
        except Exception as e:
            logging.exception(f"Check {check.__name__} raised")
            result = CheckResult(check.__name__, False, math.nan, math.nan, f"{type(e).__name__}: {e}")
        logging.info(f"{'✅' if result.passed else '❌'} {result.name}: {result.value:.3e} (tolerance {result.tolerance:.0e})")
        results.append(result)
    failed = sum(not r.passed for r in results)
    logging.info(f"{count('check', len(results))} run, {count('failure', failed)}")
    return results
