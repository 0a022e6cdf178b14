import logging
import math
import uuid
from dataclasses import replace
from pathlib import Path

from zaremba.config import RunConfig
from zaremba.database import RunLedger
from zaremba.optimize.algorithm import OptimizeConfig, OptimizeError, OptimizeTrace, run
from zaremba.report import Cell, ReportError, emit_table
from zaremba.utils.inflect import count

ITERATION_COLUMNS = ("index", "phase", "eps", "k", "method", "neumann_length", "center_s", "accepted")
TABLE_COLUMNS = ("r", "Z_D", "Z_End", "ratio", "theta_center", "l_N")


def optimize_config(config: RunConfig) -> OptimizeConfig:
    assert config.k_star is not None and config.c_tol is not None and config.eps0 is not None
    assert config.source is not None and config.receiver is not None
    return OptimizeConfig.from_points(
        config.build_curve(),
        config.source,
        config.receiver,
        k_star=config.k_star,
        c_tol=config.c_tol,
        eps0=config.eps0,
        nodes_per_arc=config.nodes_per_arc,
        grid_step=config.grid_step,
        max_iterations=config.max_iterations,
        arcs=config.arcs,
        derivative=config.derivative,
        contour_points=config.contour_points,
    )


def format_trace(trace: OptimizeTrace) -> str:
    """The structured text report of one run."""
    config = trace.config
    lines = [
        "[run]",
        f"curve = {config.curve.name}",
        f"source = ({config.source.real:g}, {config.source.imag:g})",
        f"receiver = ({config.receiver.real:g}, {config.receiver.imag:g})",
        f"k_star = {config.k_star:g}",
        f"c_tol = {config.c_tol:g}",
        f"eps0 = {config.eps0:g}",
        "",
        "[result]",
        f"success = {str(trace.success).lower()}",
        f"iterations = {len(trace.steps)}",
    ]
    if trace.start is not None:
        lines.append(f"start_k = {trace.start.k:.10f}")
        lines.append(f"start_multiplicity = {trace.start.multiplicity}")
    if trace.k is not None:
        lines.append(f"final_k = {trace.k:.10f}")
    if trace.partition is not None:
        lines.append(f"partition = {trace.partition.describe()}")
        lines.append(f"neumann_length = {trace.neumann_length:.10f} ({trace.neumann_length / math.pi:.4f} pi)")
    if trace.theta_center is not None and trace.main_arc is not None:
        center = trace.main_arc.center_point()
        lines.append(f"theta_center = {trace.theta_center:.4f} pi")
        lines.append(f"arc_center = ({center.real:.6f}, {center.imag:.6f})")
    if trace.z_dirichlet is not None:
        lines.append(f"z_dirichlet = {trace.z_dirichlet:.10e}")
    if trace.z_end is not None:
        lines.append(f"z_end = {trace.z_end:.10e}")
    if trace.gain is not None:
        lines.append(f"gain = {trace.gain:.6g}")
    return "\n".join(lines) + "\n"


def _iteration_rows(trace: OptimizeTrace) -> list[dict[str, Cell]]:
    rows: list[dict[str, Cell]] = []
    for step in trace.steps:
        arcs = step.partition.neumann_arcs
        longest = max(arcs, key=lambda a: a.half_length) if arcs else None
        rows.append(
            {
                "index": step.index,
                "phase": step.phase,
                "eps": step.eps,
                "k": step.k,
                "method": step.method,
                "neumann_length": step.partition.neumann_length,
                "center_s": longest.center_s if longest else None,
                "accepted": step.accepted,
            }
        )
    return rows


def _write_run(trace: OptimizeTrace, output_dir: Path, stem: str) -> Path:
    report = output_dir / f"{stem}.txt"
    try:
        report.parent.mkdir(parents=True, exist_ok=True)
        report.write_text(format_trace(trace), encoding="utf-8")
    except OSError as e:
        raise ReportError(f"Cannot write {report}: {e.strerror or e}") from e
    emit_table(_iteration_rows(trace), output_dir / f"{stem}_iterations.csv", columns=ITERATION_COLUMNS)
    return report


def _run_one(config: RunConfig, ledger: RunLedger, output_dir: Path, stem: str) -> tuple[OptimizeTrace, Path]:
    try:
        trace = run(optimize_config(config), ledger=ledger, run_id=uuid.uuid4())
    except OptimizeError as e:
        report = _write_run(e.trace, output_dir, stem)
        logging.warning(f"⚠️ Partial run written to {report}")
        raise
    return trace, _write_run(trace, output_dir, stem)


def cmd_optimize(config: RunConfig, output_dir: Path) -> str:
    """
    `zaremba optimize`: one run for the configured receiver, or with
    receiver_radii one run per receiver (0, r) and a summary table.
    """
    ledger = RunLedger(data_dir=output_dir / "data")
    if not config.receiver_radii:
        trace, report = _run_one(config, ledger, output_dir, "optimize")
        gain = "n/a" if trace.gain is None else f"{trace.gain:.6g}"
        return f"✅ k = {trace.k:.10f}, gain {gain}; report in {report}"

    rows: list[dict[str, Cell]] = []
    for r in config.receiver_radii:
        logging.info(f"📏 Receiver at (0, {r:g})")
        trace, _ = _run_one(replace(config, receiver=(0.0, r)), ledger, output_dir, f"optimize_r{r:g}")
        rows.append(
            {
                "r": r,
                "Z_D": trace.z_dirichlet,
                "Z_End": trace.z_end,
                "ratio": trace.gain,
                "theta_center": trace.theta_center,
                "l_N": trace.neumann_length,
            }
        )
    path = output_dir / "optimize_table.csv"
    emit_table(rows, path, columns=TABLE_COLUMNS)
    return f"✅ {count('receiver', len(rows))} optimized; table in {path}"
