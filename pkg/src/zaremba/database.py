from dataclasses import dataclass
from datetime import datetime
import uuid
from pathlib import Path
from typing import TYPE_CHECKING, Literal, Optional
from typed_json_db import JsonDB

if TYPE_CHECKING:
    from zaremba.optimize.algorithm import IterationStep, OptimizeTrace


@dataclass
class IterationRecord:
    """Rows in the `iterations` table, one per optimizer step"""

    id: uuid.UUID
    """Unique ID"""

    run_id: uuid.UUID
    """Which optimize run the step belongs to"""

    index: int
    """Position of the step inside its run"""

    phase: Literal["nucleate", "grow", "confirm"]

    eps: float
    """Nucleation half-length or growth increment at this step"""

    k: float
    """Tracked characteristic value; NaN when a re-scan found none"""

    method: Literal["fast", "rescan", "confirm"]

    neumann_length: float
    center_s: float
    """Arclength of the centre of the longest Neumann arc"""

    accepted: bool
    """False when the step overshot the target and was rolled back"""

    created_at: str  # ISO format datetime string


@dataclass
class RunRecord:
    """Rows in the `runs` table, written once a run ends"""

    id: uuid.UUID
    curve: str
    k_star: float
    start_k: float
    final_k: Optional[float]
    success: bool
    z_dirichlet: Optional[float]
    z_end: Optional[float]
    partition: str
    """Partition.describe() of the last accepted partition"""

    created_at: str


class RunLedger:
    def __init__(self, data_dir: Path = Path("data")) -> None:
        data_dir.mkdir(parents=True, exist_ok=True)

        self.iterations_db = JsonDB[IterationRecord](
            IterationRecord, data_dir / "iterations.json", primary_key="id"
        )
        self.runs_db = JsonDB[RunRecord](RunRecord, data_dir / "runs.json", primary_key="id")

    def record(self, run_id: uuid.UUID, step: "IterationStep") -> IterationRecord:
        """Append one optimizer step."""
        arcs = step.partition.neumann_arcs
        longest = max(arcs, key=lambda a: a.half_length) if arcs else None
        entry = IterationRecord(
            id=uuid.uuid4(),
            run_id=run_id,
            index=step.index,
            phase=step.phase,
            eps=step.eps,
            k=step.k,
            method=step.method,
            neumann_length=step.partition.neumann_length,
            center_s=longest.center_s if longest else 0.0,
            accepted=step.accepted,
            created_at=datetime.now().isoformat(),
        )
        self.iterations_db.add(entry)
        return entry

    def finish(self, run_id: uuid.UUID, trace: "OptimizeTrace") -> RunRecord:
        """Store the outcome of a run, successful or not."""
        config = trace.config
        entry = RunRecord(
            id=run_id,
            curve=config.curve.name,
            k_star=config.k_star,
            start_k=trace.start.k if trace.start else float("nan"),
            final_k=trace.k,
            success=trace.success,
            z_dirichlet=trace.z_dirichlet,
            z_end=trace.z_end,
            partition=trace.partition.describe() if trace.partition else "",
            created_at=datetime.now().isoformat(),
        )
        self.runs_db.add(entry)
        return entry

    def iterations(self, run_id: uuid.UUID) -> list[IterationRecord]:
        """The steps of one run, in the order they were taken."""
        return sorted(self.iterations_db.find(run_id=run_id), key=lambda r: r.index)

    def run(self, run_id: uuid.UUID) -> Optional[RunRecord]:
        found = self.runs_db.find(id=run_id)
        return found[0] if found else None
