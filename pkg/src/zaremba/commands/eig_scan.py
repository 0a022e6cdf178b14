from pathlib import Path

from zaremba.config import RunConfig
from zaremba.report import emit_table
from zaremba.spectral.scan import CharValue, scan_profile
from zaremba.utils.inflect import count

VALUE_COLUMNS = ("k", "eigenvalue", "multiplicity", "sigma_min", "sigma_max")


def format_scan_summary(values: list[CharValue], interval: tuple[float, float]) -> str:
    """
    One line per located value under a headline.

    >>> format_scan_summary([], (2.0, 3.0))
    '🔍 no characteristic values in [2, 3]'
    """
    lines = [f"🔍 {count('characteristic value', len(values))} in [{interval[0]:g}, {interval[1]:g}]"]
    for v in values:
        suffix = f" (multiplicity {v.multiplicity})" if v.multiplicity > 1 else ""
        lines.append(f"  k = {v.k:.10f}, k^2 = {v.eigenvalue:.10f}{suffix}")
    return "\n".join(lines)


def cmd_eig_scan(config: RunConfig, output_dir: Path) -> str:
    """`zaremba eig-scan`: characteristic values of the configured partition in [k_lo, k_hi]."""
    assert config.k_lo is not None and config.k_hi is not None
    interval = (config.k_lo, config.k_hi)
    profile = scan_profile(
        config.build_partition(), interval, config.grid_step, nodes_per_arc=config.nodes_per_arc
    )
    emit_table(
        [
            {
                "k": v.k,
                "eigenvalue": v.eigenvalue,
                "multiplicity": v.multiplicity,
                "sigma_min": v.sigma_min,
                "sigma_max": v.sigma_max,
            }
            for v in profile.values
        ],
        output_dir / "eigenvalues.csv",
        columns=VALUE_COLUMNS,
    )
    emit_table(
        [{"k": float(k), "sigma_min": float(s)} for k, s in zip(profile.k, profile.sigma_min)],
        output_dir / "sigma_profile.csv",
        columns=("k", "sigma_min"),
    )
    return format_scan_summary(profile.values, interval)
