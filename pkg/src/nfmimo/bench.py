"""Seeded Monte-Carlo sweeps, CSV emission, and the complexity probe.

Reproducibility contract: all randomness derives from the master seed
through two documented streams (scene/pilot draws shared across sweep
points, observation noise fresh per point; see scene_seed/noise_seed),
metric reduction is index-ordered, and CSV formatting is fixed, so a
(config, seed) pair maps to a byte-identical CSV.  Wall-clock times go
to the ``ms`` column only when timing is explicitly requested, because
measured times would break that contract.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import estimation, measurement, metrics
from .channel import SceneConfig, los_channel, mixed_channel, nlos_channel, sample_scene
from .config import ConfigError, ExperimentConfig
from .geometry import ArrayGeometry
from .polar import build_codebook, farfield_codebook, read_matrix_cache, sample_grid

CSV_HEADER = "sweep,method,nmse_db,bound_db,trials,ms,seed,digest"


@dataclass
class ResultRow:
    sweep_value: float
    method: str
    nmse_db: float
    nmse_bound_db: float
    trials: int
    wall_time_ms: int
    seed: int
    config_digest: str

    def to_csv(self) -> str:
        def db(x: float) -> str:
            return "nan" if np.isnan(x) else f"{x:.4f}"

        return (
            f"{self.sweep_value:.10g},{self.method},{db(self.nmse_db)},{db(self.nmse_bound_db)},"
            f"{self.trials},{self.wall_time_ms},{self.seed},{self.config_digest}"
        )


_SCENE_STREAM = 11
_NOISE_STREAM = 13


def scene_seed(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    """Seed split for scene/pilot draws: shared across sweep points.

    Sweep points reuse the same scenes and pilots (common random
    numbers), so cross-point comparisons such as monotone-in-SNR trends
    are paired instead of batch-vs-batch.
    """
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(_SCENE_STREAM, trial_index))


def noise_seed(master_seed: int, sweep_index: int, trial_index: int) -> np.random.SeedSequence:
    """Seed split for the observation noise: fresh per (sweep point, trial)."""
    return np.random.SeedSequence(
        entropy=master_seed, spawn_key=(_NOISE_STREAM, sweep_index, trial_index)
    )


def trial_seed(master_seed: int, sweep_index: int, trial_index: int) -> np.random.SeedSequence:
    """One distinct child sequence per (sweep point, trial); probe/ad-hoc use."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(sweep_index, trial_index))


def _orthogonal_pilot(n1: int, m: int) -> np.ndarray:
    """First N1 rows of a +-1 Hadamard matrix of order M (requires a power of two)."""
    if m < n1:
        raise ConfigError("pilot.scheme=orthogonal needs sweep.pilot_size >= system.n1")
    if m & (m - 1):
        raise ConfigError("pilot.scheme=orthogonal needs a power-of-two pilot size")
    return scipy.linalg.hadamard(m)[:n1, :].astype(float)


def _orthogonal_combiner(n_rf: int, n2: int) -> np.ndarray:
    if n_rf < n2:
        raise ConfigError("pilot.scheme=orthogonal needs system.n_rf >= system.n2")
    if n_rf & (n_rf - 1):
        raise ConfigError("pilot.scheme=orthogonal needs a power-of-two RF chain count")
    return scipy.linalg.hadamard(n_rf)[:, :n2].astype(float)


@dataclass
class _SweepContext:
    """Everything fixed across the trials of one sweep point."""

    distance: float | None
    pilot_size: int
    snr_db: float
    grid: estimation.GridSpec
    refine: estimation.RefineSpec


class _Runner:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.wavelength = cfg.wavelength
        self.geom_t = ArrayGeometry(cfg.system.n1, cfg.spacing)
        self.geom_r = ArrayGeometry(cfg.system.n2, cfg.spacing)
        needs_polar = any(m in cfg.run.methods for m in ("two_stage", "omp_near"))
        self.cb_t = self.cb_r = None
        if needs_polar:
            grid_t = sample_grid(
                self.geom_t, self.wavelength, cfg.codebook.beta, cfg.codebook.r_min, cfg.codebook.r_max
            )
            grid_r = sample_grid(
                self.geom_r, self.wavelength, cfg.codebook.beta, cfg.codebook.r_min, cfg.codebook.r_max
            )
            self.cb_t = build_codebook(grid_t, self.geom_t, self.wavelength)
            self.cb_r = build_codebook(grid_r, self.geom_r, self.wavelength)
        self.far_t = self.far_r = None
        if "omp_far" in cfg.run.methods:
            self.far_t = farfield_codebook(self.geom_t, self.wavelength)
            self.far_r = farfield_codebook(self.geom_r, self.wavelength)
        self.imported_channel = None
        if cfg.scene.channel_file is not None:
            mat, _, _ = read_matrix_cache(cfg.scene.channel_file)
            if mat.shape != (cfg.system.n2, cfg.system.n1):
                raise ConfigError(
                    f"scene.channel_file: matrix shape {mat.shape} does not match "
                    f"(n2={cfg.system.n2}, n1={cfg.system.n1})"
                )
            self.imported_channel = mat

    def sweep_context(self, value: float) -> _SweepContext:
        cfg = self.cfg
        distance = cfg.sweep.distance
        pilot_size = cfg.sweep.pilot_size
        snr_db = cfg.sweep.snr_db
        if cfg.sweep.axis == "distance":
            distance = value
        elif cfg.sweep.axis == "pilot_size":
            pilot_size = int(value)
        else:
            snr_db = value

        if cfg.grid.mode == "relative":
            anchor = distance if distance is not None else float(np.mean(cfg.scene.distance_range))
            r_lo, r_hi = cfg.grid.r_span[0] * anchor, cfg.grid.r_span[1] * anchor
        else:
            r_lo, r_hi = cfg.grid.r_min, cfg.grid.r_max
        grid = estimation.GridSpec(
            r_min=r_lo,
            r_max=r_hi,
            theta_min=cfg.scene.angle_range[0],
            theta_max=cfg.scene.angle_range[1],
            phi_min=cfg.scene.phi_range[0],
            phi_max=cfg.scene.phi_range[1],
            r_steps=cfg.grid.r_steps,
            theta_steps=cfg.grid.theta_steps,
            phi_steps=cfg.grid.phi_steps,
        )
        refine = estimation.RefineSpec(
            max_iters=cfg.refine.max_iters,
            tol=cfg.refine.tol,
            max_backtracks=cfg.refine.max_backtracks,
        )
        return _SweepContext(distance, pilot_size, snr_db, grid, refine)

    def run_trial(self, ctx: _SweepContext, sweep_index: int, trial_index: int, timing: bool):
        """One scene/pilot/noise draw evaluated by every configured method."""
        cfg = self.cfg
        rng = np.random.default_rng(scene_seed(cfg.run.seed, trial_index))
        rng_noise = np.random.default_rng(noise_seed(cfg.run.seed, sweep_index, trial_index))

        if self.imported_channel is not None:
            h = self.imported_channel
        else:
            scene_cfg = SceneConfig(
                angle_range=cfg.scene.angle_range,
                distance_range=cfg.scene.distance_range,
                phi_range=cfg.scene.phi_range,
                num_paths=cfg.scene.num_paths,
                nlos_power_ratio=cfg.scene.nlos_power_ratio,
                scatter_range=cfg.scene.scatter_range,
                los_distance=ctx.distance,
            )
            los, paths = sample_scene(rng, scene_cfg, self.geom_t, self.geom_r)
            h_los = los_channel(los, self.geom_t, self.geom_r, self.wavelength)
            h_nlos = nlos_channel(paths, self.geom_t, self.geom_r, self.wavelength, allow_empty=True)
            h = mixed_channel(h_los, h_nlos).entries

        if cfg.pilot.scheme == "orthogonal":
            pilot = _orthogonal_pilot(cfg.system.n1, ctx.pilot_size)
            combiner = _orthogonal_combiner(cfg.system.n_rf, cfg.system.n2)
        else:
            pilot = measurement.gen_pilot(cfg.system.n1, ctx.pilot_size, rng)
            combiner = measurement.gen_combiner(cfg.system.n_rf, cfg.system.n2, rng)
        sigma2 = measurement.calibrate_sigma2(h, pilot, combiner, ctx.snr_db)
        obs = measurement.observe(h, pilot, combiner, sigma2, rng_noise, snr_db=ctx.snr_db)

        energy = float(np.linalg.norm(h) ** 2)
        # crlb() takes the per-component variance; observation entries carry sigma2 total.
        bound = metrics.crlb(sigma2 / 2.0, cfg.system.n1, cfg.system.n2, ctx.pilot_size, cfg.system.n_rf)

        results: dict[str, tuple[float, float, int]] = {}
        for method in cfg.run.methods:
            start = time.perf_counter() if timing else 0.0
            try:
                h_hat = self._dispatch(method, obs, ctx)
                err = float(np.linalg.norm(h - h_hat) ** 2)
                elapsed = int(1000 * (time.perf_counter() - start)) if timing else 0
                results[method] = (err, energy, elapsed)
            except Exception:
                results[method] = (np.nan, np.nan, 0)
        return results, bound, energy

    def _dispatch(self, method: str, obs: measurement.MeasurementSet, ctx: _SweepContext) -> np.ndarray:
        if method == "two_stage":
            ts_cfg = estimation.TwoStageConfig(
                geom_t=self.geom_t,
                geom_r=self.geom_r,
                wavelength=self.wavelength,
                grid=ctx.grid,
                refine=ctx.refine,
                codebook_t=self.cb_t,
                codebook_r=self.cb_r,
                num_paths=self.cfg.scene.num_paths,
            )
            return estimation.two_stage(obs.y, obs.pilot, obs.combiner, ts_cfg).h_hat
        sparsity = self.cfg.scene.num_paths + 1
        if method == "omp_near":
            return estimation.baseline_omp(
                obs.y, obs.pilot, obs.combiner, self.cb_t, self.cb_r, sparsity, "near"
            ).h_hat
        if method == "omp_far":
            return estimation.baseline_omp(
                obs.y, obs.pilot, obs.combiner, self.far_t, self.far_r, sparsity, "far"
            ).h_hat
        if method == "ls_oracle":
            return metrics.ls_oracle(obs.y, obs.pilot, obs.combiner)
        raise ValueError(f"unknown method {method!r}")


def run_experiment(cfg: ExperimentConfig, timing: bool = False) -> list[ResultRow]:
    """Execute every (sweep value, trial, method) cell and reduce to one row per pair."""
    runner = _Runner(cfg)
    digest = cfg.digest()
    rows: list[ResultRow] = []

    for sweep_index, value in enumerate(cfg.sweep.values):
        ctx = runner.sweep_context(value)
        trials = cfg.run.trials

        if cfg.run.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.run.workers) as pool:
                outcomes = list(
                    pool.map(lambda t: runner.run_trial(ctx, sweep_index, t, timing), range(trials))
                )
        else:
            outcomes = [runner.run_trial(ctx, sweep_index, t, timing) for t in range(trials)]

        per_method = {m: [0.0, 0.0, 0, 0] for m in cfg.run.methods}  # err, ref, count, ms
        bound_sum = 0.0
        energy_sum = 0.0
        for results, bound, energy in outcomes:  # index order: deterministic reduction
            bound_sum += bound
            energy_sum += energy
            for method, (err, ref, ms) in results.items():
                acc = per_method[method]
                if np.isfinite(err):
                    acc[0] += err
                    acc[1] += ref
                    acc[2] += 1
                    acc[3] += ms

        bound_db = (
            metrics.to_db(bound_sum / energy_sum) if energy_sum > 0 and bound_sum > 0 else np.nan
        )
        for method in sorted(cfg.run.methods):
            err, ref, count, ms = per_method[method]
            nmse_db = metrics.to_db(err / ref) if count > 0 and ref > 0 and err > 0 else (
                -np.inf if count > 0 and err == 0 else np.nan
            )
            rows.append(
                ResultRow(
                    sweep_value=value,
                    method=method,
                    nmse_db=nmse_db,
                    nmse_bound_db=bound_db,
                    trials=count,
                    wall_time_ms=ms,
                    seed=cfg.run.seed,
                    config_digest=digest,
                )
            )

    rows.sort(key=lambda r: (r.sweep_value, r.method))
    return rows


def write_csv(rows: list[ResultRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")


def complexity_probe(
    cfg: ExperimentConfig, sizes: list[tuple[int, int]], repeats: int = 1
) -> list[dict]:
    """Log-log slope of single-trial wall time against N1*N2 for each method.

    Informational only: no pass/fail semantics.  Needs at least three
    sizes to fit a slope.
    """
    if len(sizes) < 3:
        raise ValueError("complexity probe needs at least 3 sizes")
    samples: dict[str, list[tuple[float, float]]] = {m: [] for m in cfg.run.methods}
    for n1, n2 in sizes:
        probe_cfg = ExperimentConfig(
            system=type(cfg.system)(
                n1=n1, n2=n2, n_rf=max(1, n2 // 4), freq_hz=cfg.system.freq_hz, spacing=cfg.system.spacing
            ),
            scene=cfg.scene,
            sweep=type(cfg.sweep)(
                axis=cfg.sweep.axis,
                values=(cfg.sweep.values[0],),
                snr_db=cfg.sweep.snr_db,
                pilot_size=max(4, n1 // 2),
                distance=cfg.sweep.distance,
            ),
            run=type(cfg.run)(methods=cfg.run.methods, trials=1, seed=cfg.run.seed, workers=1),
            grid=cfg.grid,
            refine=cfg.refine,
            codebook=cfg.codebook,
            pilot=cfg.pilot,
        )
        runner = _Runner(probe_cfg)
        ctx = runner.sweep_context(probe_cfg.sweep.values[0])
        for method in cfg.run.methods:
            best = np.inf
            for _ in range(repeats):
                start = time.perf_counter()
                obs_rng = np.random.default_rng(trial_seed(probe_cfg.run.seed, 0, 0))
                scene_cfg = SceneConfig(
                    angle_range=cfg.scene.angle_range,
                    distance_range=cfg.scene.distance_range,
                    phi_range=cfg.scene.phi_range,
                    num_paths=cfg.scene.num_paths,
                    nlos_power_ratio=cfg.scene.nlos_power_ratio,
                    scatter_range=cfg.scene.scatter_range,
                    los_distance=ctx.distance,
                )
                los, paths = sample_scene(obs_rng, scene_cfg, runner.geom_t, runner.geom_r)
                h = mixed_channel(
                    los_channel(los, runner.geom_t, runner.geom_r, runner.wavelength),
                    nlos_channel(paths, runner.geom_t, runner.geom_r, runner.wavelength, allow_empty=True),
                ).entries
                pilot = measurement.gen_pilot(n1, ctx.pilot_size, obs_rng)
                combiner = measurement.gen_combiner(probe_cfg.system.n_rf, n2, obs_rng)
                sigma2 = measurement.calibrate_sigma2(h, pilot, combiner, ctx.snr_db)
                obs = measurement.observe(h, pilot, combiner, sigma2, obs_rng)
                runner._dispatch(method, obs, ctx)
                best = min(best, time.perf_counter() - start)
            samples[method].append((float(n1 * n2), best))
    table = []
    for method, pts in samples.items():
        xs = np.log([p[0] for p in pts])
        ys = np.log([max(p[1], 1e-9) for p in pts])
        slope = float(np.polyfit(xs, ys, 1)[0])
        table.append(
            {
                "method": method,
                "slope": slope,
                "sizes": [int(p[0]) for p in pts],
                "seconds": [p[1] for p in pts],
            }
        )
    return table
