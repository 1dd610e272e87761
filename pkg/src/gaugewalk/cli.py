"""Command-line driver: ``gaugewalk <experiment> [--config PATH] [--seed N] [--out DIR] [--threads N]``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import EXPERIMENTS, ConfigError, RunConfig, config_from_mapping, parse_config
from .disorder import RNG_IDENTIFIER, DisorderConfig, sample_disorder
from .io import write_columns, write_grid, write_json, write_rows
from .lattice import LatticeSpec
from .operators import (
    build_step,
    build_step_nonabelian,
    dense_matrix,
    plaquette_holonomy,
    rectangle_loop,
    unitarity_error,
    wilson_loop,
)
from .single_photon import AbsorberModel, PhotonState, ensemble_run, evolve, make_step
from .spectrum import butterfly_points, butterfly_sweep
from .two_photon import correlation_matrix, correlation_triples, evolve_pair, init_pair, pair_observables

log = logging.getLogger("gaugewalk")


def _disorder(cfg: RunConfig, spec: LatticeSpec, delta: float):
    if delta == 0.0:
        return None
    return sample_disorder(spec, DisorderConfig(delta, cfg.seed))


def run_step_check(cfg: RunConfig, out: Path, n_jobs: int) -> list:
    phis = cfg.phi_grid or [cfg.flux]
    deltas = cfg.deltas or [cfg.delta]
    rows = []
    for phi in phis:
        spec = cfg.lattice(phi)
        for delta in deltas:
            u = dense_matrix(build_step(spec, _disorder(cfg, spec, delta)))
            rows.append((cfg.M, phi, delta, unitarity_error(u)))
    files = [write_rows(out / "unitarity.csv", ("M", "phi", "delta", "unitarity_error"), rows)]
    hol = []
    for phi in phis:
        spec = cfg.lattice(phi)
        for x in range(1, cfg.M):
            for y in range(1, cfg.M):
                h = plaquette_holonomy(spec, rectangle_loop(x, y, 1, 1))
                hol.append((x, y, phi, h.real, h.imag, abs(h - np.exp(1j * phi))))
    files.append(write_rows(out / "holonomy.csv", ("x", "y", "phi", "re", "im", "error"), hol))
    return files


def run_evolve(cfg: RunConfig, out: Path, n_jobs: int) -> list:
    spec = cfg.lattice()
    op = build_step(spec, _disorder(cfg, spec, cfg.delta))
    absorber = AbsorberModel(cfg.absorber, cfg.target if cfg.absorber != "none" else None)
    series = evolve(PhotonState.localized(spec, cfg.start), op, cfg.steps, absorber, cfg.snapshot_stride)
    files = [write_columns(out / "series.csv", series.columns())]
    for t, prob in sorted(series.snapshots.items()):
        files.append(write_grid(out / f"snapshot_t{t:05d}.csv", prob))
    return files


def _absorber(cfg: RunConfig) -> AbsorberModel:
    return AbsorberModel(cfg.absorber, cfg.target if cfg.absorber != "none" else None)


def run_transport(cfg: RunConfig, out: Path, n_jobs: int) -> list:
    rows = []
    for phi in cfg.phi_grid:
        ens = ensemble_run(
            cfg.lattice(phi), DisorderConfig(cfg.delta, cfg.seed), cfg.steps, cfg.start,
            _absorber(cfg), cfg.realizations, n_jobs=n_jobs,
        )
        for t in ens.steps:
            rows.append((t, phi, ens.mean["eta_cum"][t], ens.stderr["eta_cum"][t], ens.mean["norm2"][t]))
    header = ("step", "phi", "eta_mean", "eta_se", "norm2_mean")
    return [write_rows(out / "eta_vs_step.csv", header, rows)]


def run_ensemble(cfg: RunConfig, out: Path, n_jobs: int) -> list:
    ens = ensemble_run(
        cfg.lattice(), DisorderConfig(cfg.delta, cfg.seed), cfg.steps, cfg.start,
        _absorber(cfg), cfg.realizations, cfg.snapshot_stride, n_jobs,
    )
    files = [write_columns(out / "ensemble_series.csv", ens.columns())]
    for t, prob in sorted(ens.mean_snapshots.items()):
        files.append(write_grid(out / f"mean_snapshot_t{t:05d}.csv", prob))
    return files


def run_two_photon(cfg: RunConfig, out: Path, n_jobs: int) -> list:
    rows, files = [], []
    for k, phi in enumerate(cfg.phi_grid):
        spec = cfg.lattice(phi)
        op = make_step(spec)
        for sym in cfg.symmetries:
            state = evolve_pair(init_pair(spec, cfg.start, cfg.second_start, sym), op, cfg.steps)
            obs = pair_observables(state, cfg.metric)
            rows.append((phi, sym, obs["mean_distance"], obs["both_edge_prob"]))
            if cfg.correlations:
                idx, val = correlation_triples(correlation_matrix(state))
                trip = ((i1, i2, v) for (i1, i2), v in zip(idx, val))
                files.append(write_rows(out / f"correlations_{sym}_{k:04d}.csv", ("i1", "i2", "value"), trip))
    header = ("phi", "symmetry", "mean_distance", "both_edge_prob")
    return [write_rows(out / "two_photon_sweep.csv", header, rows)] + files


def run_spectrum(cfg: RunConfig, out: Path, n_jobs: int) -> list:
    pts = butterfly_points(butterfly_sweep(cfg.M, cfg.phi_grid, n_jobs))
    return [write_rows(out / "butterfly.csv", ("phi", "energy"), pts)]


def run_nonabelian(cfg: RunConfig, out: Path, n_jobs: int) -> list:
    spec = cfg.lattice()
    op = build_step_nonabelian(spec, _disorder(cfg, spec, cfg.delta))
    absorber = _absorber(cfg)
    series = evolve(PhotonState.localized(spec, cfg.start), op, cfg.steps, absorber, cfg.snapshot_stride)
    files = [write_columns(out / "series.csv", series.columns())]
    for t, prob in sorted(series.snapshots.items()):
        files.append(write_grid(out / f"snapshot_t{t:05d}.csv", prob))
    w = wilson_loop(spec.rashba_angle)
    tr = np.trace(w)
    files.append(
        write_rows(
            out / "wilson_loop.csv",
            ("alpha", "trace_re", "trace_im", "w00_re", "w00_im", "w01_re", "w01_im", "w10_re", "w10_im", "w11_re", "w11_im"),
            [(spec.rashba_angle, tr.real, tr.imag, *np.column_stack([w.ravel().real, w.ravel().imag]).ravel())],
        )
    )
    return files


RUNNERS = {
    "step-check": run_step_check,
    "evolve": run_evolve,
    "transport": run_transport,
    "ensemble": run_ensemble,
    "two-photon": run_two_photon,
    "spectrum": run_spectrum,
    "nonabelian": run_nonabelian,
}


def run(cfg: RunConfig, out=None, n_jobs: int = 1) -> list:
    """Run the configured experiment, write its CSV files and ``manifest.json``."""
    out = Path(out if out is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    files = RUNNERS[cfg.experiment](cfg, out, n_jobs)
    wall = time.perf_counter() - t0
    manifest = {
        "experiment": cfg.experiment,
        "config": cfg.to_dict(),
        "base_seed": cfg.seed,
        "version": __version__,
        "absorber": cfg.absorber,
        "metric": cfg.metric,
        "rng": RNG_IDENTIFIER,
        "disorder_model": "independent phase pair per coupler, static across steps",
        "subseed": "SeedSequence(base_seed, spawn_key=(r,)) -> one uint64",
        "quasienergy_convention": "eigenvalue exp(i t) -> energy -t in (-pi, pi]",
        "wall_time_s": wall,
        "files": [Path(f).name for f in files],
    }
    files.append(write_json(out / "manifest.json", manifest))
    return files


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaugewalk", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="YAML run configuration")
        sp.add_argument("--seed", type=int, help="base seed (overrides the config)")
        sp.add_argument("--out", type=Path, help="output directory (overrides the config)")
        sp.add_argument("--threads", type=int, default=1, help="worker count; never changes results")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.config is not None:
            cfg = parse_config(args.config.read_text(), args.experiment)
        else:
            cfg = config_from_mapping({}, args.experiment)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
            cfg.seed = args.seed
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        files = run(cfg, args.out, args.threads)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"gaugewalk: error: {exc}", file=sys.stderr)
        return 2
    for f in files:
        log.info("wrote %s", f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
