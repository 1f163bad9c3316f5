"""TOML experiment configuration: schema, defaults, validation.

Angles are degrees in the file (converted to radians on load), lengths
meters, frequencies hertz.  Validation errors carry the dotted field
path so the CLI can point at the offending key.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

METHODS = ("two_stage", "omp_near", "omp_far", "ls_oracle")
SWEEP_AXES = ("distance", "pilot_size", "snr")
PILOT_SCHEMES = ("sign", "orthogonal")
GRID_MODES = ("absolute", "relative")


class ConfigError(Exception):
    """Malformed or inconsistent experiment configuration."""


@dataclass
class SystemConfig:
    n1: int = 64
    n2: int = 32
    n_rf: int = 8
    freq_hz: float = 50e9
    spacing: float | None = None  # None: half wavelength


@dataclass
class SceneSection:
    angle_range: tuple[float, float] = (-np.pi / 3, np.pi / 3)
    phi_range: tuple[float, float] = (-np.pi / 3, np.pi / 3)
    distance_range: tuple[float, float] = (50.0, 500.0)
    scatter_range: tuple[float, float] | None = None
    num_paths: int = 3
    nlos_power_ratio: float = 0.1
    channel_file: str | None = None


@dataclass
class SweepConfig:
    axis: str = "distance"
    values: tuple[float, ...] = ()
    snr_db: float = 5.0
    pilot_size: int = 32
    distance: float | None = 100.0


@dataclass
class RunConfig:
    methods: tuple[str, ...] = ("two_stage", "omp_near", "omp_far")
    trials: int = 50
    seed: int = 1234
    workers: int = 1


@dataclass
class GridSection:
    mode: str = "relative"
    r_span: tuple[float, float] = (0.6, 1.5)  # relative mode: multiples of the scene distance
    r_min: float = 50.0  # absolute mode
    r_max: float = 500.0
    r_steps: int = 32
    theta_steps: int = 64
    phi_steps: int = 16


@dataclass
class RefineSection:
    max_iters: int = 100
    tol: float = 1e-6
    max_backtracks: int = 20


@dataclass
class CodebookSection:
    beta: float = 1.2
    r_min: float = 10.0
    r_max: float = 600.0


@dataclass
class PilotSection:
    scheme: str = "sign"


@dataclass
class ExperimentConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    scene: SceneSection = field(default_factory=SceneSection)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    run: RunConfig = field(default_factory=RunConfig)
    grid: GridSection = field(default_factory=GridSection)
    refine: RefineSection = field(default_factory=RefineSection)
    codebook: CodebookSection = field(default_factory=CodebookSection)
    pilot: PilotSection = field(default_factory=PilotSection)

    @property
    def wavelength(self) -> float:
        from .boundaries import SPEED_OF_LIGHT

        return SPEED_OF_LIGHT / self.system.freq_hz

    @property
    def spacing(self) -> float:
        return self.system.spacing if self.system.spacing is not None else self.wavelength / 2.0

    def digest(self) -> str:
        """Stable hash of the resolved configuration.

        Excludes execution details (worker count) that cannot change
        results; two runs with the same digest and seed must produce
        identical rows.
        """
        plain = _as_plain(self)
        plain["run"].pop("workers", None)
        blob = json.dumps(plain, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def _as_plain(obj):
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _as_plain(getattr(obj, k)) for k in obj.__dataclass_fields__}
    if isinstance(obj, (list, tuple)):
        return [_as_plain(v) for v in obj]
    return obj


def _expect(table: dict, key: str, kinds, path: str, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"{path}.{key}: required field is missing")
        return default
    value = table[key]
    if not isinstance(value, kinds):
        names = kinds.__name__ if isinstance(kinds, type) else "/".join(k.__name__ for k in kinds)
        raise ConfigError(f"{path}.{key}: expected {names}, got {type(value).__name__}")
    return value


def _num(table, key, path, default=None, required=False, positive=False):
    value = _expect(table, key, (int, float), path, default, required)
    if value is not None and isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected a number, got a boolean")
    if positive and value is not None and value <= 0:
        raise ConfigError(f"{path}.{key}: must be positive, got {value}")
    return float(value) if value is not None else None


def _int(table, key, path, default=None, required=False, minimum=None):
    value = _expect(table, key, int, path, default, required)
    if isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected an integer, got a boolean")
    if value is not None and minimum is not None and value < minimum:
        raise ConfigError(f"{path}.{key}: must be >= {minimum}, got {value}")
    return value


def _pair(table, key, path, default=None, ordered=True):
    raw = _expect(table, key, list, path, None)
    if raw is None:
        return default
    if len(raw) != 2 or not all(isinstance(v, (int, float)) for v in raw):
        raise ConfigError(f"{path}.{key}: expected a pair of numbers")
    lo, hi = float(raw[0]), float(raw[1])
    if ordered and lo >= hi:
        raise ConfigError(f"{path}.{key}: lower bound must be below upper bound")
    return lo, hi


def _check_tables(raw: dict) -> None:
    known = {"system", "scene", "sweep", "run", "grid", "refine", "codebook", "pilot"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{key}: unknown top-level table (expected one of {sorted(known)})")


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from exc
    _check_tables(raw)

    sys_t = raw.get("system", {})
    system = SystemConfig(
        n1=_int(sys_t, "n1", "system", default=64, minimum=1),
        n2=_int(sys_t, "n2", "system", default=32, minimum=1),
        n_rf=_int(sys_t, "n_rf", "system", default=0, minimum=0),
        freq_hz=_num(sys_t, "freq_hz", "system", default=50e9, positive=True),
        spacing=_num(sys_t, "spacing", "system", default=None, positive=True),
    )
    if system.n_rf == 0:
        system.n_rf = max(1, system.n2 // 4)

    sc_t = raw.get("scene", {})
    deg = np.pi / 180.0
    angle_deg = _pair(sc_t, "angle_range_deg", "scene", default=(-60.0, 60.0))
    phi_deg = _pair(sc_t, "phi_range_deg", "scene", default=(-60.0, 60.0))
    scene = SceneSection(
        angle_range=(angle_deg[0] * deg, angle_deg[1] * deg),
        phi_range=(phi_deg[0] * deg, phi_deg[1] * deg),
        distance_range=_pair(sc_t, "distance_range", "scene", default=(50.0, 500.0)),
        scatter_range=_pair(sc_t, "scatter_range", "scene", default=None),
        num_paths=_int(sc_t, "num_paths", "scene", default=3, minimum=0),
        nlos_power_ratio=_num(sc_t, "nlos_power_ratio", "scene", default=0.1),
        channel_file=_expect(sc_t, "channel_file", str, "scene", default=None),
    )
    if scene.nlos_power_ratio < 0:
        raise ConfigError("scene.nlos_power_ratio: must be nonnegative")
    if abs(scene.angle_range[0]) >= np.pi / 2 or abs(scene.angle_range[1]) >= np.pi / 2:
        raise ConfigError("scene.angle_range_deg: must stay inside (-90, 90)")

    sw_t = raw.get("sweep", {})
    axis = _expect(sw_t, "axis", str, "sweep", default="distance")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis: expected one of {SWEEP_AXES}, got {axis!r}")
    values_raw = _expect(sw_t, "values", list, "sweep", required=True)
    if not values_raw or not all(isinstance(v, (int, float)) for v in values_raw):
        raise ConfigError("sweep.values: expected a nonempty list of numbers")
    sweep = SweepConfig(
        axis=axis,
        values=tuple(float(v) for v in values_raw),
        snr_db=_num(sw_t, "snr_db", "sweep", default=5.0),
        pilot_size=_int(sw_t, "pilot_size", "sweep", default=32, minimum=1),
        distance=_num(sw_t, "distance", "sweep", default=100.0, positive=True),
    )
    if axis == "distance" and any(v <= 0 for v in sweep.values):
        raise ConfigError("sweep.values: distances must be positive")
    if axis == "pilot_size" and any(v < 1 or v != int(v) for v in sweep.values):
        raise ConfigError("sweep.values: pilot sizes must be positive integers")

    run_t = raw.get("run", {})
    methods_raw = _expect(run_t, "methods", list, "run", default=list(RunConfig().methods))
    if not methods_raw:
        raise ConfigError("run.methods: at least one method is required")
    for m in methods_raw:
        if m not in METHODS:
            raise ConfigError(f"run.methods: unknown method {m!r} (expected one of {METHODS})")
    run = RunConfig(
        methods=tuple(methods_raw),
        trials=_int(run_t, "trials", "run", default=50, minimum=1),
        seed=_int(run_t, "seed", "run", default=1234),
        workers=_int(run_t, "workers", "run", default=1, minimum=1),
    )

    gr_t = raw.get("grid", {})
    mode = _expect(gr_t, "mode", str, "grid", default="relative")
    if mode not in GRID_MODES:
        raise ConfigError(f"grid.mode: expected one of {GRID_MODES}, got {mode!r}")
    grid = GridSection(
        mode=mode,
        r_span=_pair(gr_t, "r_span", "grid", default=(0.6, 1.5)),
        r_min=_num(gr_t, "r_min", "grid", default=50.0, positive=True),
        r_max=_num(gr_t, "r_max", "grid", default=500.0, positive=True),
        r_steps=_int(gr_t, "r_steps", "grid", default=32, minimum=1),
        theta_steps=_int(gr_t, "theta_steps", "grid", default=64, minimum=1),
        phi_steps=_int(gr_t, "phi_steps", "grid", default=16, minimum=1),
    )
    if grid.mode == "relative" and grid.r_span[0] <= 0:
        raise ConfigError("grid.r_span: relative bounds must be positive")
    if grid.mode == "absolute" and grid.r_min >= grid.r_max:
        raise ConfigError("grid.r_min: must be below grid.r_max")

    rf_t = raw.get("refine", {})
    refine = RefineSection(
        max_iters=_int(rf_t, "max_iters", "refine", default=100, minimum=1),
        tol=_num(rf_t, "tol", "refine", default=1e-6, positive=True),
        max_backtracks=_int(rf_t, "max_backtracks", "refine", default=20, minimum=0),
    )

    cb_t = raw.get("codebook", {})
    codebook = CodebookSection(
        beta=_num(cb_t, "beta", "codebook", default=1.2, positive=True),
        r_min=_num(cb_t, "r_min", "codebook", default=10.0, positive=True),
        r_max=_num(cb_t, "r_max", "codebook", default=600.0, positive=True),
    )
    if codebook.r_min >= codebook.r_max:
        raise ConfigError("codebook.r_min: must be below codebook.r_max")

    pl_t = raw.get("pilot", {})
    scheme = _expect(pl_t, "scheme", str, "pilot", default="sign")
    if scheme not in PILOT_SCHEMES:
        raise ConfigError(f"pilot.scheme: expected one of {PILOT_SCHEMES}, got {scheme!r}")
    pilot = PilotSection(scheme=scheme)

    return ExperimentConfig(
        system=system,
        scene=scene,
        sweep=sweep,
        run=run,
        grid=grid,
        refine=refine,
        codebook=codebook,
        pilot=pilot,
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)
