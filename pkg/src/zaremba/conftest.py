"""Pytest configuration and fixtures.

Test Fixtures:
- disk: Unit disk curve
- kite: Kite curve
- disk_dirichlet: Pure Dirichlet partition of the unit disk
- disk_neumann: Pure Neumann partition of the unit disk
- disk_mixed: Unit disk with one Neumann arc of length 0.2 centred at angle pi/2
- make_mesh: Factory for cached meshes, keyed by partition and node count
- output_dir: Temporary directory for emitted files
- ledger: Temporary iteration ledger

Examples:
    # Mesh for a partition
    mesh = make_mesh(disk_dirichlet, 64)

    # Operator at a wavenumber
    operator = assemble(2.0, disk_dirichlet, make_mesh(disk_dirichlet, 64))
"""

import logging
import math
import tempfile
from collections.abc import Callable, Generator
from pathlib import Path
from typing import Any

import pytest

from zaremba.bie.mesh import Mesh, build_mesh
from zaremba.database import RunLedger
from zaremba.geometry import Curve, Partition, make_disk, make_kite, pure_dirichlet, pure_neumann

# Configure logging for tests
logging.basicConfig(
    level=logging.DEBUG, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)


@pytest.fixture(scope="session")
def disk() -> Curve:
    """Unit disk."""
    return make_disk(1.0)


@pytest.fixture(scope="session")
def kite() -> Curve:
    """Kite domain."""
    return make_kite()


@pytest.fixture(scope="session")
def disk_dirichlet(disk: Curve) -> Partition:
    return pure_dirichlet(disk)


@pytest.fixture(scope="session")
def disk_neumann(disk: Curve) -> Partition:
    return pure_neumann(disk)


@pytest.fixture(scope="session")
def disk_mixed(disk: Curve) -> Partition:
    """One Neumann arc of length 0.2 centred at angle pi/2."""
    return pure_dirichlet(disk).nucleate(math.pi / 2, 0.1)


@pytest.fixture(scope="session")
def make_mesh() -> Callable[[Partition, int], Mesh]:
    """Build meshes once per session; log tables are cached on the mesh."""
    cache: dict[tuple[Partition, int], Mesh] = {}

    def _make(partition: Partition, nodes_per_arc: int) -> Mesh:
        key = (partition, nodes_per_arc)
        if key not in cache:
            cache[key] = build_mesh(partition, nodes_per_arc)
        return cache[key]

    return _make


@pytest.fixture
def output_dir() -> Generator[Path, Any, None]:
    """Create a temporary output directory."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir) / "out"


@pytest.fixture
def ledger() -> Generator[RunLedger, Any, None]:
    """Create a temporary iteration ledger."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield RunLedger(data_dir=Path(temp_dir) / "data")
