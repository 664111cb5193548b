"""Command-line front end.

Subcommands: simulate, reconstruct, qudit-experiment, sweep-map,
continuous-experiment. Data goes to files under --out; progress goes to
stderr. Exit codes: 0 success, 2 config error, 1 runtime failure.
"""

import argparse
import os
import sys

import numpy as np

from . import io as pio
from .config import RunConfig, parse_config, serialize_config
from .errors import ConfigError, PdisimError
from .experiments import (LensScene, QuditScene, continuous_experiment,
                          fidelity_map, fidelity_sweep)
from .reconstruct import c0_analytic, c0_empirical, combine, extract_phase
from .sensor import apply_noise
from .forward import simulate_interferograms


def _progress(args, message):
    if not args.quiet:
        print(message, file=sys.stderr)


def _load_config(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("--config is required for this subcommand")
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    if args.seed is not None:
        import dataclasses

        cfg = dataclasses.replace(
            cfg, noise=dataclasses.replace(cfg.noise, seed=args.seed)
        )
    if args.out is not None:
        import dataclasses

        cfg = dataclasses.replace(cfg, output_directory=args.out)
    if cfg.output_directory is None:
        raise ConfigError("no output directory: set [output] directory or --out")
    return cfg


def _write_run_manifest(outdir, cfg: RunConfig, subcommand: str):
    import dataclasses

    os.makedirs(outdir, exist_ok=True)
    # Omit the output path so reruns into different directories stay
    # byte-identical.
    portable = dataclasses.replace(cfg, output_directory=None)
    text = (f"# pdisim run manifest\nsubcommand = {subcommand}\n"
            f"seed = {cfg.noise.seed}\n\n" + serialize_config(portable))
    with open(os.path.join(outdir, "manifest.txt"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(text)


def _noise_label(cfg):
    if cfg.sweep.nsamps is not None:
        return [(s, n) for s, n in zip(cfg.sweep.sigmas, cfg.sweep.nsamps)]
    return [(s, None) for s in cfg.sweep.sigmas]


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    outdir = cfg.output_directory
    _write_run_manifest(outdir, cfg, "simulate")
    fld = cfg.scene.field()
    frames = simulate_interferograms(fld, cfg.psi, cfg.illumination,
                                     region=cfg.scene.region())
    if cfg.noise_enabled:
        frames = apply_noise(frames, cfg.noise)
        _progress(args, f"simulated {frames.n_steps} noisy frames "
                        f"(sigma={cfg.noise.readout_sigma} e-)")
    else:
        _progress(args, f"simulated {frames.n_steps} noiseless frames")
    pio.write_interferogram_set(os.path.join(outdir, "frames"), frames)
    return 0


def cmd_reconstruct(args) -> int:
    if args.out is None:
        raise ConfigError("--out is required for reconstruct")
    iset = pio.read_interferogram_set(args.frames_manifest)
    if args.c0_mode == "empirical":
        c, _ = combine(iset)
        dark = iset.frames[0] <= args.dark_threshold
        c0 = c0_empirical(c, dark)
    else:
        c0 = c0_analytic(iset.reference, iset.n_steps)
    result = extract_phase(iset, c0=c0, mu_sign=args.mu_sign)
    os.makedirs(args.out, exist_ok=True)
    pio.write_phase_map(os.path.join(args.out, "phase.phmap"), result.phase)
    pio.write_amplitude_map(os.path.join(args.out, "amplitude.ammap"),
                            result.amplitude)
    summary = (f"n_frames = {iset.n_steps}\n"
               f"c0_used = {pio.fmt_float(result.c0_used)}\n"
               f"mu_used = {pio.fmt_float(result.mu_used)}\n")
    with open(os.path.join(args.out, "summary.txt"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(summary)
    _progress(args, "reconstruction written")
    return 0


def _require_qudit(cfg):
    if not isinstance(cfg.scene, QuditScene):
        raise ConfigError("this subcommand requires a qudit scene")


def cmd_qudit_experiment(args) -> int:
    cfg = _load_config(args)
    _require_qudit(cfg)
    outdir = cfg.output_directory
    _write_run_manifest(outdir, cfg, "qudit-experiment")
    results = fidelity_sweep(cfg.scene, cfg.sweep, seed=cfg.noise.seed,
                             jobs=args.jobs, quantize=cfg.noise.quantize)
    rows = []
    for cell in results:
        noise_val = cell.nsamp if cell.nsamp is not None else cell.sigma
        if cell.stats is None:
            rows.append((cell.illumination, noise_val, cell.n_bin,
                         float("nan"), float("nan"), float("nan")))
            _progress(args, f"cell failed: {cell.error}")
        else:
            rows.append((cell.illumination, noise_val, cell.n_bin,
                         cell.stats.mean, cell.stats.std, cell.stats.stderr))
    pio.write_csv(
        os.path.join(outdir, "fidelity.csv"),
        ["illumination", "readout_sigma_or_nsamp", "n_bin",
         "mean_fidelity", "std", "stderr"],
        rows,
    )
    _progress(args, f"wrote {len(rows)} cells")
    return 0


def cmd_sweep_map(args) -> int:
    cfg = _load_config(args)
    _require_qudit(cfg)
    outdir = cfg.output_directory
    _write_run_manifest(outdir, cfg, "sweep-map")
    fmap = fidelity_map(cfg.scene, cfg.sweep.illuminations, cfg.sweep.sigmas,
                        cfg.sweep.repetitions, seed=cfg.noise.seed,
                        n_bin=cfg.sweep.n_bins[0], jobs=args.jobs)
    rows = []
    for i, illum in enumerate(fmap.illuminations):
        for j, sigma in enumerate(fmap.sigmas):
            rows.append((illum, sigma, float(fmap.mean[i, j]),
                         float(fmap.stderr[i, j])))
    pio.write_csv(
        os.path.join(outdir, "fidelity_map.csv"),
        ["illumination", "readout_sigma_or_nsamp", "mean_fidelity", "stderr"],
        rows,
    )
    _progress(args, f"wrote {len(rows)} map cells")
    return 0


def cmd_continuous(args) -> int:
    cfg = _load_config(args)
    if not isinstance(cfg.scene, LensScene):
        raise ConfigError("continuous-experiment requires a lens scene")
    outdir = cfg.output_directory
    _write_run_manifest(outdir, cfg, "continuous-experiment")
    sigma_pair = (max(cfg.sweep.sigmas), min(cfg.sweep.sigmas))
    ref_phase, cases = continuous_experiment(
        cfg.scene, cfg.sweep.illuminations, sigma_pair=sigma_pair,
        reference_illumination=cfg.reference_illumination,
        seed=cfg.noise.seed, quantize=cfg.noise.quantize,
    )
    pio.write_phase_map(os.path.join(outdir, "reference.phmap"), ref_phase)
    stat_rows = []
    for idx, case in enumerate(cases):
        tag = f"case_{idx}"
        pio.write_phase_map(os.path.join(outdir, f"{tag}.phmap"), case.phase_map)
        hist_rows = [
            (float(lo), float(hi), int(n))
            for lo, hi, n in zip(case.stats.bin_edges[:-1],
                                 case.stats.bin_edges[1:], case.stats.counts)
        ]
        pio.write_csv(os.path.join(outdir, f"{tag}_hist.csv"),
                      ["bin_lo", "bin_hi", "count"], hist_rows)
        stat_rows.append((case.illumination, case.sigma,
                          case.stats.circ_std, case.stats.n_pixels))
    pio.write_csv(os.path.join(outdir, "phase_error.csv"),
                  ["illumination", "readout_sigma_or_nsamp", "circ_std",
                   "n_pixels"], stat_rows)
    _progress(args, f"wrote {len(cases)} continuous cases")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdisim",
        description="Phase-shifting point-diffraction interferometry "
                    "simulation at few-photon illumination",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run configuration file")
        p.add_argument("--seed", type=int, help="override the RNG seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="worker parallelism (results are jobs-independent)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress output")

    p = sub.add_parser("simulate", help="forward-simulate interferograms")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="invert a recorded interferogram set")
    p.add_argument("frames_manifest", help="path to an interferogram manifest")
    p.add_argument("--c0-mode", choices=("analytic", "empirical"),
                   default="analytic")
    p.add_argument("--dark-threshold", type=float, default=0.0,
                   help="frame-0 level below which pixels count as dark "
                        "(empirical C0 mode)")
    p.add_argument("--mu-sign", type=int, choices=(1, -1), default=1)
    common(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("qudit-experiment",
                       help="fidelity sweep over the configured grid")
    common(p)
    p.set_defaults(func=cmd_qudit_experiment)

    p = sub.add_parser("sweep-map",
                       help="2D mean-fidelity map over illumination x noise")
    common(p)
    p.set_defaults(func=cmd_sweep_map)

    p = sub.add_parser("continuous-experiment",
                       help="lens-phase error statistics vs a high-flux reference")
    common(p)
    p.set_defaults(func=cmd_continuous)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PdisimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
