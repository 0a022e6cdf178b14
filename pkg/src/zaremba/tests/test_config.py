"""Tests for run config parsing and formatting."""

import math
from pathlib import Path

import pytest

from zaremba.config import ConfigError, RunConfig, format_config, load_config, parse_config

KITE_EXPERIMENT = """
command = "optimize"
curve = "kite"
k_star = 1.5
c_tol = 1e-2
eps0 = 0.05
source = [-1.25, 1.25]
receiver = [-1.25, -1.25]
"""


def _violations(text: str) -> list[str]:
    with pytest.raises(ConfigError) as e:
        parse_config(text)
    return e.value.violations


class TestParse:
    def test_defaults_filled(self):
        config = parse_config('command = "eig-scan"\nk_lo = 2.0\nk_hi = 6.0')
        assert config.nodes_per_arc == 64
        assert config.grid_step == 0.01
        assert config.curve == "disk"
        assert config.build_partition().is_pure_dirichlet

    def test_negative_tolerance_itemized(self):
        violations = _violations(
            'command = "optimize"\nk_star = 1.0\nc_tol = -1.0\neps0 = 0.1\n'
            "source = [0.0, 0.0]\nreceiver = [0.0, 0.5]"
        )
        assert violations == ["c_tol must be a positive number, got -1.0"]

    def test_every_violation_reported(self):
        violations = _violations(
            'command = "eig-scan"\nk_lo = 3.0\nk_hi = 2.0\nnodes_per_arc = 2\ncurve = "square"'
        )
        assert len(violations) == 3
        assert any("curve must be one of" in v for v in violations)
        assert any("nodes_per_arc" in v for v in violations)
        assert any("k_lo must be below k_hi" in v for v in violations)

    def test_message_counts_violations(self):
        with pytest.raises(ConfigError, match="2 violations in run config"):
            parse_config('command = "field-grid"')

    def test_unknown_key_rejected(self):
        violations = _violations('command = "eig-scan"\nk_lo = 2.0\nk_hi = 6.0\nk_high = 7.0')
        assert violations == ["unknown key 'k_high'"]

    def test_invalid_toml(self):
        violations = _violations("command = ")
        assert violations[0].startswith("not valid TOML")

    def test_points_inside_curve(self):
        violations = _violations(
            'command = "zaremba-eval"\nk = 1.0\nsource = [0.0, 0.0]\nreceiver = [0.0, 1.5]'
        )
        assert violations == ["receiver (0.0, 1.5) is not inside the disk"]

    def test_eps0_bounded_by_length(self):
        violations = _violations(
            'command = "optimize"\nk_star = 1.0\nc_tol = 1e-3\neps0 = 0.5\n'
            "source = [0.0, 0.0]\nreceiver = [0.0, 0.5]"
        )
        assert len(violations) == 1
        assert "1/20" in violations[0]

    def test_full_neumann_excludes_arcs(self):
        violations = _violations(
            'command = "eig-scan"\nk_lo = 1.0\nk_hi = 2.0\nfull_neumann = true\nneumann_arcs = [[0.0, 0.1]]'
        )
        assert violations == ["full_neumann cannot be combined with neumann_arcs"]

    def test_neumann_arcs(self):
        config = parse_config(
            'command = "eig-scan"\nk_lo = 1.0\nk_hi = 2.0\nneumann_arcs = [[1.5707963267948966, 0.1]]'
        )
        partition = config.build_partition()
        assert partition.neumann_length == pytest.approx(0.2, abs=1e-12)
        assert partition.kind_at(math.pi / 2) == "N"

    def test_table_mode_receivers_inside(self):
        violations = _violations(
            'command = "optimize"\nk_star = 1.0\nc_tol = 1e-3\neps0 = 0.1\n'
            "source = [0.0, 0.0]\nreceiver_radii = [0.5, 1.2]"
        )
        assert violations == ["receiver (0, 1.2) from receiver_radii is not inside the disk"]

    def test_kite_experiment(self):
        config = parse_config(KITE_EXPERIMENT)
        assert config.curve == "kite"
        assert config.k_star == 1.5
        assert config.c_tol == 1e-2
        assert config.eps0 == 0.05
        assert config.source == (-1.25, 1.25)
        assert config.receiver == (-1.25, -1.25)
        assert config.build_curve().name == "kite"


class TestFormat:
    @pytest.mark.parametrize(
        "text",
        [
            'command = "eig-scan"\nk_lo = 2.0\nk_hi = 6.0\nneumann_arcs = [[0.5, 0.1], [3.0, 0.25]]',
            'command = "validate"\ncurve = "trig"\ntrig_x = [0.0, 1.0, 0.0, 0.1, 0.0]\ntrig_y = [0.0, 0.0, 1.0]',
            'command = "optimize"\nk_star = 1.0\nc_tol = 1e-3\neps0 = 0.1\nsource = [0.0, 0.0]\n'
            'receiver_radii = [0.25, 0.5]\nderivative = "richardson"\noutput_dir = "tables"',
            KITE_EXPERIMENT,
        ],
    )
    def test_round_trip(self, text: str):
        config = parse_config(text)
        assert parse_config(format_config(config)) == config

    def test_unset_fields_left_out(self):
        text = format_config(RunConfig(command="eig-scan", k_lo=2.0, k_hi=6.0))
        assert "k_star" not in text
        assert "neumann_arcs" not in text
        assert "full_neumann = false" in text

    def test_load(self, tmp_path: Path):
        path = tmp_path / "run.toml"
        path.write_text(KITE_EXPERIMENT, encoding="utf-8")
        assert load_config(path) == parse_config(KITE_EXPERIMENT)


REPO = Path(__file__).parents[3]


@pytest.mark.parametrize("path", sorted((REPO / "configs").glob("*.toml")) + [REPO / "config.toml"], ids=lambda p: p.name)
def test_shipped_configs_parse(path: Path):
    config = load_config(path)
    assert parse_config(format_config(config)) == config
