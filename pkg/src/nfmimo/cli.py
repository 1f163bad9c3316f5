"""Command-line entry point.

Subcommands: ``run`` (Monte-Carlo sweep to CSV), ``boundaries`` (JSON
boundary report), ``codebook-info`` (polar grid sizes for a config),
``selftest`` (fast invariant checks).  Exit codes: 0 success, 2 config
error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bench import run_experiment, write_csv
from .boundaries import boundary_report
from .config import ConfigError, load_config
from .geometry import ArrayGeometry
from .polar import sample_grid


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfmimo", description=__doc__)
    parser.add_argument("--version", action="version", version=f"nfmimo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a Monte-Carlo experiment and write a CSV")
    p_run.add_argument("config", help="TOML experiment configuration")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_run.add_argument(
        "--timing",
        action="store_true",
        help="record wall times in the ms column (breaks byte-level reproducibility)",
    )

    p_b = sub.add_parser("boundaries", help="print field-boundary distances as JSON")
    p_b.add_argument("--n1", type=int, required=True, help="transmitter antenna count")
    p_b.add_argument("--n2", type=int, required=True, help="receiver antenna count")
    p_b.add_argument("--freq", type=float, required=True, help="carrier frequency in Hz")
    p_b.add_argument("--spacing", type=float, default=None, help="element spacing in m (default lambda/2)")

    p_cb = sub.add_parser("codebook-info", help="report polar codebook sizes for a config")
    p_cb.add_argument("config", help="TOML experiment configuration")

    sub.add_parser("selftest", help="run fast invariant checks")
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.run.seed = args.seed
    rows = run_experiment(cfg, timing=args.timing)
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_boundaries(args) -> int:
    report = boundary_report(args.n1, args.n2, args.freq, spacing=args.spacing)
    print(report.to_json())
    return 0


def _cmd_codebook_info(args) -> int:
    cfg = load_config(args.config)
    info = {"beta": cfg.codebook.beta, "r_min": cfg.codebook.r_min, "r_max": cfg.codebook.r_max}
    for side, n in (("transmitter", cfg.system.n1), ("receiver", cfg.system.n2)):
        geom = ArrayGeometry(n, cfg.spacing)
        grid = sample_grid(geom, cfg.wavelength, cfg.codebook.beta, cfg.codebook.r_min, cfg.codebook.r_max)
        rings = [int(d.size) for d in grid.distances_per_angle]
        info[side] = {
            "antennas": n,
            "angles": int(grid.angles.size),
            "atoms": int(grid.size),
            "max_rings_per_angle": max(rings),
            "min_rings_per_angle": min(rings),
        }
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def _selftest_checks():
    from . import channel, estimation, measurement
    from .boundaries import max_discrepancy_far, max_discrepancy_near, mimo_ard, mimo_rd

    rng = np.random.default_rng(7)
    lam = 0.006

    def check_steering_norm():
        geom = ArrayGeometry(32, lam / 2)
        for _ in range(20):
            v = channel.nearfield_steering(rng.uniform(-1.0, 1.0), rng.uniform(5, 300), geom, lam)
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                return False
        return True

    def check_boundary_identities():
        d1, d2 = 0.768, 0.384
        rd, ard = mimo_rd(d1, d2, lam), mimo_ard(d1, d2, lam)
        return (
            abs(max_discrepancy_far(rd, d1, d2, lam) - np.pi / 8) < 1e-12
            and abs(max_discrepancy_near(ard, d1, d2, lam) - np.pi / 8) < 1e-12
        )

    def check_vec_identity():
        h = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
        p = measurement.gen_pilot(6, 5, rng)
        w = measurement.gen_combiner(3, 4, rng)
        q = measurement.kron_sensing(p, w)
        lhs = measurement.vec(w @ h @ p)
        rhs = q @ measurement.vec(h)
        return np.allclose(lhs, rhs, atol=1e-12)

    def check_gradient():
        geom_t, geom_r = ArrayGeometry(16, lam / 2), ArrayGeometry(8, lam / 2)
        params = channel.LosParams(80.0, 0.2, -0.1)
        p = measurement.gen_pilot(16, 8, rng)
        w = measurement.gen_combiner(2, 8, rng)
        y = rng.standard_normal((2, 8)) + 1j * rng.standard_normal((2, 8))
        grad = estimation.gradient_g(params, y, p, w, lam, geom_t, geom_r)
        fd = np.empty(3)
        x = [params.r, params.theta, params.phi]
        for a, h_step in enumerate((3e-5, 3e-4, 3e-4)):
            vals = []
            for k in (-2, -1, 1, 2):
                v = list(x)
                v[a] += k * h_step
                vals.append(
                    estimation.objective_g(channel.LosParams(*v), y, p, w, lam, geom_t, geom_r)
                )
            fd[a] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h_step)
        return np.linalg.norm(grad - fd) / np.linalg.norm(fd) < 1e-6

    return [
        ("steering-norm", check_steering_norm),
        ("boundary-identities", check_boundary_identities),
        ("vec-identity", check_vec_identity),
        ("gradient-finite-difference", check_gradient),
    ]


def _cmd_selftest() -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            ok = check()
        except Exception as exc:  # a crash is a failure, not an abort
            print(f"selftest {name}: FAIL ({exc})")
            failures += 1
            continue
        print(f"selftest {name}: {'PASS' if ok else 'FAIL'}")
        failures += 0 if ok else 1
    return 0 if failures == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "boundaries":
            return _cmd_boundaries(args)
        if args.command == "codebook-info":
            return _cmd_codebook_info(args)
        if args.command == "selftest":
            return _cmd_selftest()
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
