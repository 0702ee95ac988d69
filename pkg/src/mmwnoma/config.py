"""Experiment configuration: TOML loading, validation, and presets.

Config files are TOML with an `experiment` key and `[system]`, `[channel]`,
`[scenario]`, and `[run]` tables; which tables are required depends on the
experiment. Validation collects every violation before failing so a bad
file is diagnosed in one pass.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXPERIMENTS = (
    "beampattern",
    "gain-vs-n",
    "gain-error",
    "rate-vs-constraint",
    "rate-vs-snr",
    "noma-vs-oma",
)

DEFAULT_PHASE_CANDIDATES = 20
DEFAULT_TRIALS = 1000
DEFAULT_GRID_POINTS = 1001
DEFAULT_GAIN_FRACTION = 2.0 / 3.0


class ConfigError(Exception):
    """Unparseable or invalid experiment configuration."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class FixedChannelConfig:
    """Effective channels given directly as (modulus, cos-AoA) per user."""

    lambda1: float
    lambda2: float
    omega1: float | None = None
    omega2: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    """Stochastic multipath scenario shared by both users up to power scale."""

    kind: str
    paths: int
    los_power: float
    nlos_path_power: float
    user_power_scales: tuple[float, float]


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    antennas: int
    noise_mw: float = 1.0
    power_mw: float | None = None
    snr_db: float | None = None
    r1: float | None = None
    r2: float | None = None
    phase_candidates: int = DEFAULT_PHASE_CANDIDATES
    channel: FixedChannelConfig | None = None
    scenario: ScenarioConfig | None = None
    sweep: tuple[float, ...] = ()
    sweep_axis: str | None = None
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    grid_points: int = DEFAULT_GRID_POINTS
    gain_fraction_user1: float = DEFAULT_GAIN_FRACTION
    output: str = "results"
    format: str = "csv"

    def to_dict(self) -> dict:
        return asdict(self)


def _get(table: dict, key: str, kind, errors: list, context: str, default=None, required=False):
    if key not in table:
        if required:
            errors.append(f"{context}: missing required key '{key}'")
        return default
    value = table[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        errors.append(f"{context}: '{key}' must be {kind.__name__}, got {value!r}")
        return default
    return value


def _parse_channel(table: dict, errors: list) -> FixedChannelConfig:
    lam1 = _get(table, "lambda1", float, errors, "[channel]", required=True)
    lam2 = _get(table, "lambda2", float, errors, "[channel]", required=True)
    om1 = _get(table, "omega1", float, errors, "[channel]")
    om2 = _get(table, "omega2", float, errors, "[channel]")
    for name, lam in (("lambda1", lam1), ("lambda2", lam2)):
        if lam is not None and lam <= 0:
            errors.append(f"[channel]: '{name}' must be positive")
    for name, om in (("omega1", om1), ("omega2", om2)):
        if om is not None and abs(om) > 1:
            errors.append(f"[channel]: '{name}' must lie in [-1, 1]")
    return FixedChannelConfig(lambda1=lam1, lambda2=lam2, omega1=om1, omega2=om2)


def _parse_scenario(table: dict, errors: list) -> ScenarioConfig:
    kind = _get(table, "kind", str, errors, "[scenario]", required=True)
    if kind is not None and kind not in ("los", "nlos"):
        errors.append(f"[scenario]: 'kind' must be 'los' or 'nlos', got {kind!r}")
    paths = _get(table, "paths", int, errors, "[scenario]", required=True)
    if paths is not None and paths < 1:
        errors.append("[scenario]: 'paths' must be >= 1")
    los_power = _get(table, "los_power", float, errors, "[scenario]", default=1.0)
    nlos = _get(table, "nlos_path_power", float, errors, "[scenario]", required=True)
    if nlos is not None and nlos < 0:
        errors.append("[scenario]: 'nlos_path_power' must be nonnegative")
    scales = table.get("user_power_scales", [1.0, 1.0])
    if (
        not isinstance(scales, list)
        or len(scales) != 2
        or not all(isinstance(s, (int, float)) and not isinstance(s, bool) and s > 0 for s in scales)
    ):
        errors.append("[scenario]: 'user_power_scales' must be two positive numbers")
        scales = [1.0, 1.0]
    return ScenarioConfig(
        kind=kind,
        paths=paths,
        los_power=los_power,
        nlos_path_power=nlos,
        user_power_scales=(float(scales[0]), float(scales[1])),
    )


def parse_config(data: dict, source: str = "<config>") -> ExperimentConfig:
    """Validate a parsed TOML tree and return the experiment configuration.

    Raises ConfigError listing every violated requirement.
    """
    errors: list[str] = []
    experiment = data.get("experiment")
    if experiment not in EXPERIMENTS:
        errors.append(
            f"'experiment' must be one of {', '.join(EXPERIMENTS)}; got {experiment!r}"
        )
        raise ConfigError(errors)

    system = data.get("system", {})
    run = data.get("run", {})
    for name, table in (("system", system), ("run", run)):
        if not isinstance(table, dict):
            raise ConfigError([f"[{name}] must be a table"])

    antennas = _get(system, "antennas", int, errors, "[system]", required=True)
    if antennas is not None and antennas < 2:
        errors.append("[system]: 'antennas' must be >= 2")
    noise_mw = _get(system, "noise_mw", float, errors, "[system]", default=1.0)
    if noise_mw is not None and noise_mw <= 0:
        errors.append("[system]: 'noise_mw' must be positive")
    power_mw = _get(system, "power_mw", float, errors, "[system]")
    if power_mw is not None and power_mw <= 0:
        errors.append("[system]: 'power_mw' must be positive")
    snr_db = _get(system, "snr_db", float, errors, "[system]")
    r1 = _get(system, "r1", float, errors, "[system]")
    r2 = _get(system, "r2", float, errors, "[system]")
    for name, r in (("r1", r1), ("r2", r2)):
        if r is not None and r < 0:
            errors.append(f"[system]: '{name}' must be nonnegative")
    phase_candidates = _get(
        system, "phase_candidates", int, errors, "[system]", default=DEFAULT_PHASE_CANDIDATES
    )
    if phase_candidates is not None and phase_candidates < 1:
        errors.append("[system]: 'phase_candidates' must be >= 1")

    channel = None
    if "channel" in data:
        if not isinstance(data["channel"], dict):
            errors.append("[channel] must be a table")
        else:
            channel = _parse_channel(data["channel"], errors)
    scenario = None
    if "scenario" in data:
        if not isinstance(data["scenario"], dict):
            errors.append("[scenario] must be a table")
        else:
            scenario = _parse_scenario(data["scenario"], errors)

    sweep_raw = run.get("sweep")
    sweep: tuple[float, ...] = ()
    if sweep_raw is not None:
        if not isinstance(sweep_raw, list) or not sweep_raw or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in sweep_raw
        ):
            errors.append("[run]: 'sweep' must be a non-empty list of numbers")
        else:
            sweep = tuple(float(v) for v in sweep_raw)
    sweep_axis = _get(run, "sweep_axis", str, errors, "[run]")
    trials = _get(run, "trials", int, errors, "[run]", default=DEFAULT_TRIALS)
    if trials is not None and trials < 1:
        errors.append("[run]: 'trials' must be >= 1")
    seed = _get(run, "seed", int, errors, "[run]", default=0)
    if seed is not None and not 0 <= seed < 2**64:
        errors.append("[run]: 'seed' must be an unsigned 64-bit integer")
    grid_points = _get(run, "grid_points", int, errors, "[run]", default=DEFAULT_GRID_POINTS)
    if grid_points is not None and grid_points < 2:
        errors.append("[run]: 'grid_points' must be >= 2")
    gain_fraction = _get(
        run, "gain_fraction_user1", float, errors, "[run]", default=DEFAULT_GAIN_FRACTION
    )
    if gain_fraction is not None and not 0 < gain_fraction < 1:
        errors.append("[run]: 'gain_fraction_user1' must be in (0, 1)")
    output = _get(run, "output", str, errors, "[run]", default="results")
    fmt = _get(run, "format", str, errors, "[run]", default="csv")
    if fmt not in ("csv", "json"):
        errors.append(f"[run]: 'format' must be 'csv' or 'json', got {fmt!r}")

    # per-experiment requirements
    needs_channel = experiment in (
        "beampattern",
        "gain-vs-n",
        "gain-error",
        "rate-vs-constraint",
        "rate-vs-snr",
    )
    if needs_channel and channel is None:
        errors.append(f"{experiment}: requires a [channel] table")
    needs_omegas = experiment in ("beampattern", "gain-vs-n", "rate-vs-constraint", "rate-vs-snr")
    if needs_omegas and channel is not None and (channel.omega1 is None or channel.omega2 is None):
        errors.append(f"{experiment}: [channel] requires 'omega1' and 'omega2'")
    if experiment in ("gain-vs-n", "gain-error"):
        if not sweep:
            errors.append(f"{experiment}: [run] 'sweep' (antenna counts) is required")
        elif not all(v == int(v) and v >= 2 for v in sweep):
            errors.append(f"{experiment}: sweep values must be integer antenna counts >= 2")
    if experiment == "rate-vs-constraint":
        if power_mw is None:
            errors.append("rate-vs-constraint: [system] 'power_mw' is required")
        if not sweep:
            errors.append("rate-vs-constraint: [run] 'sweep' (rate constraints) is required")
        elif any(v < 0 for v in sweep):
            errors.append("rate-vs-constraint: sweep rates must be nonnegative")
    if experiment == "rate-vs-snr":
        if r1 is None or r2 is None:
            errors.append("rate-vs-snr: [system] 'r1' and 'r2' are required")
        if not sweep:
            errors.append("rate-vs-snr: [run] 'sweep' (P/sigma^2 in dB) is required")
    if experiment == "noma-vs-oma":
        if scenario is None:
            errors.append("noma-vs-oma: requires a [scenario] table")
        if not sweep:
            errors.append("noma-vs-oma: [run] 'sweep' is required")
        if sweep_axis not in ("rate", "snr_db"):
            errors.append("noma-vs-oma: [run] 'sweep_axis' must be 'rate' or 'snr_db'")
        elif sweep_axis == "rate" and snr_db is None:
            errors.append("noma-vs-oma: [system] 'snr_db' is required when sweeping rates")
        elif sweep_axis == "snr_db" and (r1 is None or r2 is None):
            errors.append("noma-vs-oma: [system] 'r1' and 'r2' are required when sweeping SNR")

    if errors:
        raise ConfigError([f"{source}: {e}" for e in errors])
    return ExperimentConfig(
        experiment=experiment,
        antennas=antennas,
        noise_mw=noise_mw,
        power_mw=power_mw,
        snr_db=snr_db,
        r1=r1,
        r2=r2,
        phase_candidates=phase_candidates,
        channel=channel,
        scenario=scenario,
        sweep=sweep,
        sweep_axis=sweep_axis,
        trials=trials,
        seed=seed,
        grid_points=grid_points,
        gain_fraction_user1=gain_fraction,
        output=output,
        format=fmt,
    )


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Load and validate a TOML config file, applying CLI overrides.

    Overrides may set 'seed', 'output', and 'format'.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError([f"{path}: parse error: {exc}"]) from exc
    if overrides:
        run = data.setdefault("run", {})
        for key in ("seed", "output", "format"):
            if overrides.get(key) is not None:
                run[key] = overrides[key]
    return parse_config(data, source=str(path))


def preset_names() -> list[str]:
    """Names of the experiment presets shipped with the package."""
    root = resources.files("mmwnoma") / "presets"
    return sorted(p.name[: -len(".toml")] for p in root.iterdir() if p.name.endswith(".toml"))


def preset_path(name: str) -> Path:
    root = resources.files("mmwnoma") / "presets"
    candidate = root / f"{name}.toml"
    if not candidate.is_file():
        raise ConfigError(
            [f"unknown preset {name!r}; available: {', '.join(preset_names())}"]
        )
    return Path(str(candidate))


def preset_description(name: str) -> str:
    data = tomllib.loads(preset_path(name).read_text(encoding="utf-8"))
    return data.get("description", "")
