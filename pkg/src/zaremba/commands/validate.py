from dataclasses import asdict
from pathlib import Path

from zaremba.checks import CheckResult, run_checks
from zaremba.report import emit_table
from zaremba.utils.inflect import count


def format_checks(results: list[CheckResult]) -> str:
    failed = [r for r in results if not r.passed]
    lines = [f"{'✅' if r.passed else '❌'} {r.name}: {r.value:.3e} <= {r.tolerance:.0e} {r.detail}".rstrip() for r in results]
    lines.append(f"{count('check', len(results))}, {count('failure', len(failed))}")
    return "\n".join(lines)


def cmd_validate(nodes: int, output_dir: Path) -> tuple[bool, str]:
    """`zaremba validate`: the property suite; returns whether every check passed."""
    results = run_checks(nodes)
    emit_table([asdict(r) for r in results], output_dir / "checks.csv", columns=("name", "passed", "value", "tolerance", "detail"))
    return all(r.passed for r in results), format_checks(results)
