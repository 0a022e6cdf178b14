from pathlib import Path

from zaremba.bie.mesh import build_mesh
from zaremba.config import RunConfig
from zaremba.field.green import eval_complex, nucleation_prediction, solve_field
from zaremba.optimize.site import nucleation_site
from zaremba.report import Cell, emit_table


def cmd_zaremba_eval(config: RunConfig, output_dir: Path) -> str:
    """
    `zaremba zaremba-eval`: Z(x_S, y_R) for the configured partition.

    With eps0 set, also predicts Z after nucleating a Neumann arc of
    half-length eps0 at the best site for this source and receiver.
    """
    assert config.k is not None and config.source is not None and config.receiver is not None
    partition = config.build_partition()
    mesh = build_mesh(partition, config.nodes_per_arc)
    field = solve_field(config.k, partition, config.source, mesh=mesh)
    value = complex(eval_complex(field, config.receiver)[0])
    row: dict[str, Cell] = {
        "k": config.k,
        "source_x": config.source[0],
        "source_y": config.source[1],
        "receiver_x": config.receiver[0],
        "receiver_y": config.receiver[1],
        "re_z": value.real,
        "im_z": value.imag,
        "residual": field.residual,
    }
    lines = [f"📍 Z = {value.real:.10e} (imaginary part {value.imag:.2e}) on {partition.describe()}"]
    if config.eps0 is not None:
        field_receiver = solve_field(config.k, partition, config.receiver, mesh=mesh)
        site = nucleation_site(field, field_receiver)
        predicted = nucleation_prediction(field, field_receiver, site.s, config.eps0)
        row |= {"site_s": site.s, "eps": config.eps0, "z_predicted": predicted}
        lines.append(
            f"🧪 A Neumann arc of half-length {config.eps0:g} at s={site.s:.6f} should move Z to {predicted:.10e}"
        )
    emit_table([row], output_dir / "zaremba_eval.csv")
    return "\n".join(lines)
