"""Command-line experiment runner.

    abcage run --preset fig2a --out results/
    abcage run --config my_run.json --out results/ --svg
    abcage run --sweep fig2a fig2b fig5a --out results/
    abcage validate --preset fig5a
    abcage preset fig3a > fig3a.json

Exit status: 0 on success, 1 on configuration errors, 2 on numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, gauge_algebra
from .config import PRESET_NAMES, RunConfig, config_to_dict, load_config, preset, with_overrides
from .dynamics import Trajectory, evolve_lindblad, evolve_unitary, max_stable_step
from .errors import CagingError, ConfigError
from .lattice import (
    build_ideal_hamiltonian,
    build_ion_hamiltonian,
    link_to_laser,
    off_resonant_excitation_estimate,
)
from .lattice.encoding import detection_sites

log = logging.getLogger("abcage")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
LEAKAGE_FLOOR = 1e-6


def validate(cfg: RunConfig) -> list[str]:
    """Every reason ``cfg`` cannot run; empty when runnable."""
    problems = []
    for name, u in zip(("u1", "u2", "u3", "u4"), cfg.gauge.links):
        if not gauge_algebra.validate_unitary(u, 1e-10):
            problems.append(f"non-unitary link {name}")
    norm = sum(abs(a) ** 2 for _, a in cfg.initial_state)
    if abs(norm - 1) > 1e-9:
        problems.append(f"initial state not normalised (norm^2 = {norm:.12g})")
    for site, _ in cfg.initial_state:
        if site.cell > cfg.ion.n_max:
            problems.append(f"initial site {site} beyond simulation cutoff")
    if cfg.ion.n_detect > cfg.ion.n_max:
        problems.append("detection window exceeds simulation cutoff")
    if cfg.lindblad and not problems:
        h = hamiltonian(cfg)
        if cfg.step > max_stable_step(h):
            problems.append(f"step too large: {cfg.step} ms > {max_stable_step(h):.3g} ms")
    return problems


def hamiltonian(cfg: RunConfig) -> np.ndarray:
    if cfg.gauge.mode == "ideal":
        return build_ideal_hamiltonian(cfg.gauge, cfg.ion.n_max)
    return build_ion_hamiltonian(link_to_laser(cfg.gauge, cfg.ion), cfg.ion)


def simulate(cfg: RunConfig) -> Trajectory:
    h = hamiltonian(cfg)
    psi0 = cfg.initial_ket()
    if cfg.lindblad:
        return evolve_lindblad(h, psi0, cfg.noise, cfg.ion, cfg.times, cfg.step)
    return evolve_unitary(h, psi0, cfg.times, cfg.ion.n_max)


def _mat(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def build_report(cfg: RunConfig, traj: Trajectory) -> dict:
    imat = gauge_algebra.interference_matrix(cfg.gauge)
    wmat = gauge_algebra.loop_operator(cfg.gauge)
    report = {
        "name": cfg.name,
        "mode": cfg.gauge.mode,
        "evolution": "lindblad" if cfg.lindblad else "unitary",
        "interference_matrix": _mat(imat),
        "nilpotency_index": gauge_algebra.nilpotency_index(imat),
        "loop_operator": _mat(wmat),
        "abelian": gauge_algebra.is_abelian(wmat),
        "off_resonant_estimate": off_resonant_excitation_estimate(cfg.gauge, cfg.ion),
        "predicted": None,
        "observed": None,
    }
    start = cfg.initial_spinor()
    if start is None:
        log.warning("initial state is not on a single A site; skipping caging analysis")
        return report
    cell, chi = start
    pred = gauge_algebra.predict_caging(cfg.gauge, chi)
    report["predicted"] = {"s_right": pred.s_right, "s_left": pred.s_left, "s": pred.s}
    eps = analysis.NOISY_EPSILON if cfg.lindblad else analysis.DEFAULT_EPSILON
    obs = analysis.observed_caging(traj, cell, eps, cfg.ion.n_detect, pred)
    if not obs.caged:
        status = "uncaged"
    elif obs.max_leakage > LEAKAGE_FLOOR:
        status = "caged-with-leakage"
    else:
        status = "caged"
    report["observed"] = {
        "s_right": obs.observed_s_right,
        "s_left": obs.observed_s_left,
        "s": obs.observed_s,
        "status": status,
        "epsilon": eps,
        "max_leakage": obs.max_leakage,
        "cage_sites": sorted(s.label for s in obs.cage_sites),
    }
    return report


def write_trajectory_csv(path: Path, traj: Trajectory, n_detect: int) -> None:
    table = analysis.probability_table(traj, n_detect)
    header = ["time_ms"] + [s.label for s in detection_sites(n_detect)] + ["above_window"]
    data = np.column_stack([traj.times, table])
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt="%.17g")


def write_heatmap_svg(path: Path, traj: Trajectory, n_detect: int, title: str = "") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    table = analysis.probability_table(traj, n_detect)[:, :-1]
    sites = detection_sites(n_detect)
    fig, ax = plt.subplots(figsize=(6, 6))
    im = ax.imshow(
        table.T,
        aspect="auto",
        origin="lower",
        extent=(traj.times[0], traj.times[-1], 0.5, len(sites) + 0.5),
        cmap="viridis",
        vmin=0,
        vmax=1,
    )
    ax.set_xlabel("t (ms)")
    ax.set_ylabel("site number")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="probability")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run(cfg: RunConfig, out_dir) -> dict:
    """Simulate, analyse and write all outputs for one config."""
    problems = validate(cfg)
    if problems:
        raise ConfigError("; ".join(problems), problems[0])
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traj = simulate(cfg)
    write_trajectory_csv(out / cfg.trajectory_file, traj, cfg.ion.n_detect)
    report = build_report(cfg, traj)
    (out / cfg.report_file).write_text(json.dumps(report, indent=2) + "\n")
    if cfg.heatmap_file:
        write_heatmap_svg(out / cfg.heatmap_file, traj, cfg.ion.n_detect, cfg.name)
    return report


def _run_preset(args) -> tuple[str, int, str]:
    name, out_dir, mode, no_noise, svg = args
    try:
        cfg = with_overrides(preset(name), mode, no_noise, svg)
        report = run(cfg, Path(out_dir) / name)
    except ConfigError as exc:
        return name, EXIT_CONFIG, str(exc)
    except (CagingError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return name, EXIT_NUMERIC, str(exc)
    obs = report["observed"] or {}
    return name, EXIT_OK, f"index(I)={report['nilpotency_index']} observed={obs.get('status')} s={obs.get('s')}"


def _load(args) -> RunConfig:
    if args.preset and args.config:
        raise ConfigError("give either --preset or --config, not both", "preset")
    if args.preset:
        cfg = preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("one of --preset or --config is required", "preset")
    return with_overrides(cfg, getattr(args, "mode", None), getattr(args, "no_noise", False), getattr(args, "svg", False))


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abcage", description="Non-Abelian AB caging simulator for a trapped-ion qudit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate a preset or config file")
    r.add_argument("--preset", choices=PRESET_NAMES)
    r.add_argument("--config", type=Path)
    r.add_argument("--sweep", nargs="+", choices=PRESET_NAMES, metavar="PRESET", help="run several presets in parallel")
    r.add_argument("--out", type=Path, default=Path("results"))
    r.add_argument("--mode", choices=("ideal", "ion"))
    r.add_argument("--no-noise", action="store_true", help="drop all dissipators")
    r.add_argument("--svg", action="store_true", help="also write a heatmap")
    r.add_argument("--jobs", type=int, default=None)

    v = sub.add_parser("validate", help="list problems with a preset or config")
    v.add_argument("--preset", choices=PRESET_NAMES)
    v.add_argument("--config", type=Path)

    s = sub.add_parser("preset", help="print a preset as a JSON config")
    s.add_argument("name", choices=PRESET_NAMES)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "preset":
        print(json.dumps(config_to_dict(preset(args.name)), indent=2))
        return EXIT_OK

    if args.command == "run" and args.sweep:
        jobs = [(name, args.out, args.mode, args.no_noise, args.svg) for name in args.sweep]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_preset, jobs))
        for name, code, msg in results:
            print(f"{name}: {msg}")
        return max(code for _, code, _ in results)

    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        problems = validate(cfg)
        for msg in problems:
            print(msg)
        if not problems:
            print("ok")
        return EXIT_CONFIG if problems else EXIT_OK

    try:
        report = run(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CagingError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    obs = report["observed"] or {}
    print(
        f"{cfg.name}: index(I)={report['nilpotency_index']} abelian={str(report['abelian']).lower()} "
        f"observed={obs.get('status')} s={obs.get('s')} -> {args.out}"
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
