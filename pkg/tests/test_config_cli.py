"""Config loading/validation, presets, CLI exit codes, and output stability."""

import json
import math

import pytest

from mmwnoma.cli import main
from mmwnoma.config import (
    ConfigError,
    load_config,
    parse_config,
    preset_names,
    preset_path,
)

MINIMAL_BEAMPATTERN = """
experiment = "beampattern"
[system]
antennas = 16
[channel]
lambda1 = 0.9
lambda2 = 0.4
omega1 = -0.7
omega2 = 0.5
"""


def write(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadConfig:
    def test_minimal_config_fills_defaults(self, tmp_path):
        cfg = load_config(write(tmp_path, MINIMAL_BEAMPATTERN))
        assert cfg.phase_candidates == 20
        assert cfg.trials == 1000
        assert cfg.grid_points == 1001
        assert cfg.format == "csv"
        assert cfg.gain_fraction_user1 == pytest.approx(2.0 / 3.0)

    def test_missing_sweep_for_sweep_experiment(self, tmp_path):
        text = MINIMAL_BEAMPATTERN.replace('"beampattern"', '"gain-vs-n"')
        with pytest.raises(ConfigError, match="sweep"):
            load_config(write(tmp_path, text))

    def test_all_violations_reported_at_once(self):
        with pytest.raises(ConfigError) as err:
            parse_config(
                {
                    "experiment": "rate-vs-constraint",
                    "system": {"antennas": 1},
                    "run": {"trials": 0, "format": "xml"},
                }
            )
        message = str(err.value)
        for fragment in ("antennas", "trials", "format", "power_mw", "sweep", "channel"):
            assert fragment in message

    def test_parse_error_has_location(self, tmp_path):
        with pytest.raises(ConfigError, match="parse error"):
            load_config(write(tmp_path, "experiment = [unclosed"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.toml")

    def test_overrides_apply(self, tmp_path):
        cfg = load_config(
            write(tmp_path, MINIMAL_BEAMPATTERN),
            {"seed": 99, "format": "json", "output": "elsewhere"},
        )
        assert cfg.seed == 99
        assert cfg.format == "json"
        assert cfg.output == "elsewhere"

    def test_noma_axis_requirements(self):
        base = {
            "experiment": "noma-vs-oma",
            "system": {"antennas": 32},
            "scenario": {"kind": "los", "paths": 4, "nlos_path_power": 0.03},
            "run": {"sweep": [1.0], "sweep_axis": "rate"},
        }
        with pytest.raises(ConfigError, match="snr_db"):
            parse_config(base)
        base["system"]["snr_db"] = 25.0
        cfg = parse_config(base)
        assert cfg.scenario.user_power_scales == (1.0, 1.0)


class TestPresets:
    def test_all_figures_shipped(self):
        assert preset_names() == ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"]

    def test_fig6_parameters(self):
        cfg = load_config(preset_path("fig6"))
        assert cfg.experiment == "rate-vs-constraint"
        assert cfg.noise_mw == 1.0
        assert cfg.power_mw == 100.0
        assert cfg.antennas == 32
        assert cfg.channel.omega1 == -0.7
        assert cfg.channel.omega2 == 0.5
        assert cfg.channel.lambda1 == 0.9
        assert cfg.channel.lambda2 == 0.2
        assert cfg.sweep == tuple(x / 2 for x in range(1, 11))

    def test_fig7_parameters(self):
        cfg = load_config(preset_path("fig7"))
        assert cfg.experiment == "noma-vs-oma"
        assert cfg.scenario.kind == "los"
        assert cfg.scenario.paths == 4
        assert cfg.scenario.user_power_scales == (1.0, 0.3)
        assert cfg.snr_db == 25.0
        assert cfg.scenario.nlos_path_power == pytest.approx(10**-1.5)


class TestCli:
    def test_beampattern_csv_schema(self, tmp_path, capsys):
        code = main(
            ["run", "--preset", "fig2", "--out", str(tmp_path)]
        )
        assert code == 0
        table = tmp_path / "beampattern.csv"
        lines = table.read_text().splitlines()
        assert lines[0] == "omega,gain_designed,gain_ideal"
        assert len(lines) == 1002  # header + 1001 grid points
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["experiment"] == "beampattern"
        assert manifest["config"]["antennas"] == 32

    def test_rerun_is_byte_identical(self, tmp_path):
        config = write(
            tmp_path,
            """
experiment = "rate-vs-constraint"
[system]
antennas = 16
power_mw = 100.0
[channel]
lambda1 = 0.9
lambda2 = 0.2
omega1 = -0.7
omega2 = 0.5
[run]
sweep = [1.0, 2.0, 3.0]
seed = 5
""",
        )
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", str(config), "--out", str(out_a)]) == 0
        assert main(["run", "--config", str(config), "--out", str(out_b)]) == 0
        name = "rate-vs-constraint.csv"
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
        assert (out_a / "manifest.json").read_bytes() == (out_b / "manifest.json").read_bytes()

    def test_json_format(self, tmp_path):
        code = main(
            ["run", "--preset", "fig2", "--out", str(tmp_path), "--format", "json"]
        )
        assert code == 0
        payload = json.loads((tmp_path / "beampattern.json").read_text())
        assert payload["columns"] == ["omega", "gain_designed", "gain_ideal"]
        assert len(payload["rows"]) == 1001

    def test_config_error_exit_code(self, tmp_path):
        bad = write(tmp_path, "experiment = 'nope'")
        assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_universally_infeasible_exit_code(self, tmp_path):
        config = write(
            tmp_path,
            """
experiment = "rate-vs-constraint"
[system]
antennas = 16
power_mw = 1.0
[channel]
lambda1 = 0.9
lambda2 = 0.2
omega1 = -0.7
omega2 = 0.5
[run]
sweep = [30.0]
""",
        )
        assert main(["run", "--config", str(config), "--out", str(tmp_path)]) == 3

    def test_partial_infeasibility_in_band(self, tmp_path):
        config = write(
            tmp_path,
            """
experiment = "rate-vs-constraint"
[system]
antennas = 16
power_mw = 1.0
[channel]
lambda1 = 0.9
lambda2 = 0.2
omega1 = -0.7
omega2 = 0.5
[run]
sweep = [1.0, 30.0]
""",
        )
        assert main(["run", "--config", str(config), "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "rate-vs-constraint.csv").read_text().splitlines()
        assert len(rows) == 3
        feasible = rows[1].split(",")
        infeasible = rows[2].split(",")
        assert not any(v == "nan" for v in feasible)
        assert all(v == "nan" for v in infeasible[1:])

    def test_io_error_exit_code(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        code = main(["run", "--preset", "fig2", "--out", str(blocker / "sub")])
        assert code == 4

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MMWNOMA_OUT", str(tmp_path / "env_out"))
        assert main(["run", "--preset", "fig2"]) == 0
        assert (tmp_path / "env_out" / "beampattern.csv").exists()

    def test_presets_list(self, capsys):
        assert main(["presets", "list"]) == 0
        out = capsys.readouterr().out
        for name in ("fig2", "fig6", "fig8"):
            assert name in out

    def test_seed_override_recorded_in_manifest(self, tmp_path):
        assert (
            main(["run", "--preset", "fig2", "--out", str(tmp_path), "--seed", "77"]) == 0
        )
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 77


def test_rate_vs_snr_uses_db_conversion(tmp_path):
    config = tmp_path / "snr.toml"
    config.write_text(
        """
experiment = "rate-vs-snr"
[system]
antennas = 32
r1 = 3.0
r2 = 3.0
[channel]
lambda1 = 0.9
lambda2 = 0.2
omega1 = -0.7
omega2 = 0.5
[run]
sweep = [20.0]
""",
        encoding="utf-8",
    )
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "rate-vs-snr.csv").read_text().splitlines()
    header = rows[0].split(",")
    values = dict(zip(header, rows[1].split(",")))
    # 20 dB with unit noise is the 100 mW reference point
    assert float(values["R2_bound"]) == pytest.approx(3.0)
    assert float(values["sum_bound"]) == pytest.approx(11.263415927557217, rel=1e-9)
    assert float(values["R2_designed"]) == pytest.approx(3.0, abs=1e-3)
    assert math.isfinite(float(values["R1_designed"]))
