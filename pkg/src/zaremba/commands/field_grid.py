from pathlib import Path

import numpy as np

from zaremba.config import RunConfig
from zaremba.field.green import ZarembaField, eval_complex, evaluable, solve_field
from zaremba.report import GridSamples, emit_grid
from zaremba.types import ComplexArray
from zaremba.utils.inflect import count
from zaremba.utils.parallel import ordered_map

BOX_SAMPLES = 512


def grid_points(field: ZarembaField, resolution: int) -> ComplexArray:
    """A resolution x resolution grid over the bounding box of the curve, row-major in y."""
    curve = field.partition.curve
    outline = curve.gamma(np.linspace(0, 2 * np.pi, BOX_SAMPLES, endpoint=False))
    x = np.linspace(outline.real.min(), outline.real.max(), resolution)
    y = np.linspace(outline.imag.min(), outline.imag.max(), resolution)
    xx, yy = np.meshgrid(x, y)
    return xx + 1j * yy


def sample_grid(field: ZarembaField, resolution: int) -> GridSamples:
    """
    Z on a rectangular grid. `inside` is the winding-number test; `evaluated`
    also drops points within the distance floor of the boundary and the
    source itself.
    """
    points = grid_points(field, resolution)
    inside = field.partition.curve.contains(points)
    evaluated = evaluable(field, points)
    values = np.full(points.shape, np.nan + 1j * np.nan, dtype=np.complex128)
    rows = [i for i in range(resolution) if evaluated[i].any()]
    computed = ordered_map(lambda i: eval_complex(field, points[i][evaluated[i]]), rows)
    for i, row in zip(rows, computed):
        values[i][evaluated[i]] = row
    return GridSamples(points=points, values=values, inside=inside, evaluated=evaluated)


def cmd_field_grid(config: RunConfig, output_dir: Path) -> str:
    """`zaremba field-grid`: Z(x_S, .) on a grid, for plotting."""
    assert config.k is not None and config.source is not None
    field = solve_field(
        config.k, config.build_partition(), config.source, nodes_per_arc=config.nodes_per_arc
    )
    samples = sample_grid(field, config.grid_resolution)
    path = output_dir / "field_grid.csv"
    emit_grid(samples, path)
    evaluated = int(samples.evaluated.sum())
    inside = int(samples.inside.sum())
    return (
        f"🗺️ {count('grid point', evaluated)} evaluated of {inside} inside "
        f"({samples.inside.size} total), written to {path}"
    )
