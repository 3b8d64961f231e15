"""Command-line entry point: ``shocklab study|profile|verify``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import ShockLabError
from .fluxes import PHYSICAL_FLUXES, SCHEMES, NumericalFlux
from .grid import Grid


def _study(args) -> int:
    from .study import RunConfig, config_from_mapping, emit, load_config, run_study

    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {
        "preset": args.preset,
        "scheme": args.flux,
        "order": args.order,
        "cfl": args.cfl,
        "t_final": args.t,
        "cells": args.cells,
        "out": args.out,
        "format": args.format,
        "integrator": args.integrator,
        "reference": args.reference,
        "normalize": args.normalize,
    }
    cfg = config_from_mapping({k: v for k, v in overrides.items() if v is not None}, cfg)
    table = run_study(cfg)
    text = emit(table, cfg.format, cfg.out)
    if cfg.out is None:
        sys.stdout.write(text)
    return 0


def _profile(args) -> int:
    from .shocks import TailTooSharp, compute_profile, fit_decay

    nf = NumericalFlux(args.flux, PHYSICAL_FLUXES[args.physical]())
    prof = compute_profile(nf, args.left, args.right, args.lam, window=args.window, tol=args.tol)
    try:
        fit = fit_decay(prof)
        decay = f"alpha={fit.alpha:.6g} beta={fit.beta:.6g} r={fit.r:.6f}"
    except TailTooSharp:
        decay = "alpha=inf (no tails)"
    header = (
        f"# {args.flux} shock {args.left:g} -> {args.right:g}, lam={args.lam:g}, "
        f"shift {prof.p}/{prof.q}, residual={prof.residual:.3e}, steps={prof.steps}, {decay}\n"
    )
    text = header + "# offset value\n" + prof.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _verify(args) -> int:
    from .duality import contractivity_experiment, mass_matched_pair, zero_mass_sources

    rng = np.random.default_rng(args.seed)
    nf = NumericalFlux(args.flux, PHYSICAL_FLUXES[args.physical]())
    grid = Grid.uniform(-0.5, 1.5, args.cells)
    worst = -np.inf
    all_cond = True
    lines = ["trial,kind,max_violation,scale,conditions,first_failure,sbp_defect,dlip_monotone"]
    last = None
    for k in range(args.trials):
        u0, v0 = mass_matched_pair(rng)
        h = g = None
        kind = "homogeneous"
        if args.sources:
            h, g = zero_mass_sources(rng, grid)
            kind = "inhomogeneous"
        rep = contractivity_experiment(u0, v0, h, g, nf, grid, args.steps, cfl_number=args.cfl)
        last = rep
        worst = max(worst, rep.max_violation / rep.scale)
        all_cond &= rep.conditions_ok
        fail = "" if rep.condition_failure is None else "step %d cell %d: %s" % rep.condition_failure
        lines.append(
            f"{k},{kind},{rep.max_violation:.6e},{rep.scale:.6e},{rep.conditions_ok},"
            f"\"{fail}\",{rep.sbp_defect:.3e},{rep.dlip_monotone}"
        )
    holds = worst <= 1e-10
    summary = (
        f"# {args.flux}: W1 bound {'holds' if holds else 'VIOLATED'} "
        f"(worst violation/scale {worst:.3e}); backward conditions "
        f"{'hold' if all_cond else 'fail'} on {'all' if all_cond else 'some'} trials\n"
    )
    out = summary + "\n".join(lines) + "\n"
    if args.steps_csv and last is not None:
        with open(args.steps_csv, "w") as fh:
            fh.write(last.to_csv())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if holds else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shocklab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("study", help="grid-refinement error table")
    s.add_argument("--config", help="flat key = value config file")
    s.add_argument("--preset", choices=["tables"], help="conventions of the reference convergence tables")
    s.add_argument("--flux", choices=SCHEMES, help="numerical flux")
    s.add_argument("--order", type=int, choices=[1, 2, 3])
    s.add_argument("--cfl", type=float)
    s.add_argument("--t", type=float, help="final time")
    s.add_argument("--cells", help="comma-separated cell counts")
    s.add_argument("--out", help="output path (stdout if omitted)")
    s.add_argument("--format", choices=["csv", "markdown"])
    s.add_argument("--integrator", choices=["euler", "ssprk3"])
    s.add_argument("--reference", choices=["exact", "projected"])
    s.add_argument("--normalize", choices=["none", "mass"])
    s.set_defaults(func=_study)

    pr = sub.add_parser("profile", help="compute and export a discrete shock profile")
    pr.add_argument("--flux", choices=SCHEMES, default="lxf")
    pr.add_argument("--physical", choices=sorted(PHYSICAL_FLUXES), default="burgers")
    pr.add_argument("--left", type=float, default=1.0)
    pr.add_argument("--right", type=float, default=-1.0)
    pr.add_argument("--lam", type=float, default=0.25)
    pr.add_argument("--window", type=int, default=60)
    pr.add_argument("--tol", type=float, default=1e-10)
    pr.add_argument("--out")
    pr.set_defaults(func=_profile)

    v = sub.add_parser("verify", help="randomized W1-contractivity experiments")
    v.add_argument("--flux", choices=SCHEMES, default="godunov")
    v.add_argument("--physical", choices=sorted(PHYSICAL_FLUXES), default="burgers")
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--cells", type=int, default=200)
    v.add_argument("--steps", type=int, default=150)
    v.add_argument("--cfl", type=float, default=0.3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--sources", action="store_true", help="add random zero-mass sources")
    v.add_argument("--steps-csv", help="write the per-step report of the last trial")
    v.add_argument("--out")
    v.set_defaults(func=_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ShockLabError, ValueError, OSError) as exc:
        print(f"shocklab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
