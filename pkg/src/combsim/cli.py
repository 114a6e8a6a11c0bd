"""Command-line entry point.

Subcommands: comb, qaa, spectrum, ensemble, gatecount, optimize, compare.
Every run is reproducible: parameters come from a sectioned key-value config
file plus ``--set section.key=value`` overrides, and a missing seed is drawn
from entropy and printed.  Data products are CSV with a JSON mirror; pass
``--plot`` to render a PNG next to them.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, plots
from ._version import __version__
from .circuits import gate_count, trotter_step_circuit
from .combing import (
    FINAL_ENERGY,
    NEG_GS_FIDELITY,
    default_search_space,
    optimize_params,
)
from .config import AppConfig, format_config, parse_config
from .errors import CombsimError, ConfigError
from .fixtures import load_sc_cost_configs
from .models import CombParams, InteractionParams
from .qaa import QaaConfig, compare_cost, run_qaa


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combsim",
        description="Spectral-comb ground-state preparation simulator",
    )
    parser.add_argument("--version", action="version", version=f"combsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="sectioned key-value config file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override one config value (repeatable)",
        )
        p.add_argument("--seed", type=int, help="run seed; drawn from entropy and printed if omitted")
        p.add_argument("--out", help="output directory (default from config)")
        p.add_argument("--plot", action="store_true", help="also render PNG figures")
        p.add_argument(
            "--threads",
            type=int,
            default=int(os.environ.get("COMBSIM_THREADS", "1") or 1),
            help="worker threads for ensembles; 0 = auto (env COMBSIM_THREADS)",
        )

    p = sub.add_parser("comb", help="run the combing loop, write the overlap trajectory")
    common(p)
    p.add_argument("--k-overlaps", type=int, help="eigenstates tracked in the trajectory")
    p.add_argument("--fixture", help="run a pinned tuned regime, e.g. trajectory_nt3_h2")

    p = sub.add_parser("qaa", help="adiabatic baseline run along the B path")
    common(p)

    p = sub.add_parser("spectrum", help="eigenvalues of the total Hamiltonian along the sweep")
    common(p)
    p.add_argument("--toy", action="store_true", help="minimal 1+2-qubit avoided-crossing demo")
    p.add_argument("--times", type=int, default=121, help="grid points over [0, tf]")

    p = sub.add_parser("ensemble", help="combing runs over many random initial states")
    common(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--sampler", choices=[analysis.HAAR_SAMPLER, analysis.BASIS_SAMPLER],
                   default=analysis.HAAR_SAMPLER)
    p.add_argument("--fixture", help="run a pinned tuned regime, e.g. ensemble_nt3_h05")

    p = sub.add_parser("gatecount", help="per-step gate budget and circuit dump")
    common(p)
    p.add_argument("--nt", type=int, default=3)
    p.add_argument("--nc", type=int, default=3)
    p.add_argument("--with-b", action="store_true", help="include the longitudinal-field gates")
    p.add_argument("--dump", nargs="?", const="-", metavar="FILE",
                   help="dump one Trotter-step circuit, one gate per line")

    p = sub.add_parser("optimize", help="random search over the sweep parameters")
    common(p)
    p.add_argument("--budget", type=int, default=100, help="number of sampled configurations")
    p.add_argument("--objective", choices=[FINAL_ENERGY, NEG_GS_FIDELITY],
                   default=FINAL_ENERGY)
    p.add_argument("--opt-seed", type=int, default=0, help="sampler seed")

    p = sub.add_parser("compare", help="gate cost against the adiabatic baseline")
    common(p)
    p.add_argument("--h-grid", default="0.4,0.5,0.6,0.8,1.0",
                   help="comma-separated transverse fields")
    p.add_argument("--fixtures", help="JSON file of tuned per-h sweep parameters")

    return parser


def _load_config(args) -> AppConfig:
    if getattr(args, "fixture", None):
        from .config import QaaSection
        from .fixtures import load_named_fixture

        ising, combing = load_named_fixture(args.fixture)
        if args.seed is not None:
            combing = replace(combing, seed=args.seed)
        return AppConfig(ising, combing, QaaSection(), args.out or "out", seed_given=True)
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs SECTION.KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["run.seed"] = str(args.seed)
    app = parse_config(args.config, overrides)
    if args.out:
        app.out_dir = args.out
    if not app.seed_given and args.seed is None:
        seed = secrets.randbits(32)
        app.combing = replace(app.combing, seed=seed)
        app.seed_given = True
        print(f"seed = {seed}")
    return app


def _out_dir(app: AppConfig) -> Path:
    path = Path(app.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_product(table: analysis.Table, out: Path, stem: str, plot_fn=None, plot: bool = False):
    csv_path = out / f"{stem}.csv"
    analysis.write_csv(csv_path, table)
    analysis.write_json(out / f"{stem}.json", table)
    written = [str(csv_path), str(out / f'{stem}.json')]
    if plot and plot_fn is not None:
        png = out / f"{stem}.png"
        plot_fn(table, png)
        written.append(str(png))
    print("wrote " + ", ".join(written))


def _cmd_comb(args) -> int:
    app = _load_config(args)
    table, result = analysis.overlap_trajectory(app.combing, app.ising, args.k_overlaps)
    table.metadata = analysis.standard_metadata(app.as_dict())
    out = _out_dir(app)
    _write_product(table, out, "trajectory", plots.plot_trajectory, args.plot)
    print(
        f"initial gs fidelity {result.initial_fidelity:.6f} -> final "
        f"{result.final_fidelity:.6f} after {result.total_steps} steps"
        + (f", {result.total_gates} gates" if result.total_gates else "")
    )
    return 0


def _cmd_qaa(args) -> int:
    app = _load_config(args)
    cfg = QaaConfig(app.ising, app.qaa.n_steps, app.qaa.dt, app.combing.mode)
    result = run_qaa(cfg)
    per_step = gate_count(app.ising.nt, 3, with_b=True).target
    table = analysis.Table(
        ["nt", "h", "n_steps", "dt", "fidelity", "gates"],
        [(app.ising.nt, app.ising.h, cfg.n_steps, cfg.dt, result.fidelity,
          cfg.n_steps * per_step)],
        analysis.standard_metadata(app.as_dict()),
    )
    out = _out_dir(app)
    _write_product(table, out, "qaa", None, False)
    print(f"fidelity with the B=-1 ground state: {result.fidelity:.6f}")
    return 0


def _cmd_spectrum(args) -> int:
    app = _load_config(args)
    if args.toy:
        h_targ, a_op, comb, g = analysis.toy_spectrum_setup()
    else:
        from .models import coupling_operator, ising_hamiltonian

        c = app.combing
        h_targ = ising_hamiltonian(app.ising)
        a_op = coupling_operator(
            InteractionParams(c.g, c.coupling, c.coupling_seed), app.ising
        )
        comb = CombParams(c.nc, c.nu0, c.kappa, c.tf, c.resolved_phis())
        g = c.g
    sweep = analysis.spectrum_sweep(h_targ, a_op, comb, g, args.times)
    table = analysis.spectrum_table(
        sweep, analysis.standard_metadata({"toy": args.toy, **app.as_dict()})
    )
    out = _out_dir(app)
    analysis.write_csv(out / "spectrum.csv", table)
    analysis.write_json(out / "spectrum.json", table)
    written = [str(out / "spectrum.csv"), str(out / "spectrum.json")]
    if args.plot:
        plots.plot_spectrum(sweep, out / "spectrum.png")
        written.append(str(out / "spectrum.png"))
    print("wrote " + ", ".join(written))
    return 0


def _cmd_ensemble(args) -> int:
    app = _load_config(args)
    threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    records = analysis.ensemble_success(
        app.ising,
        app.combing,
        args.samples,
        sampler=args.sampler,
        seed=app.combing.seed,
        threads=threads,
    )
    table = analysis.ensemble_table(
        records,
        analysis.standard_metadata(
            {"samples": args.samples, "sampler": args.sampler, **app.as_dict()}
        ),
    )
    out = _out_dir(app)
    csv_path = out / "ensemble.csv"
    analysis.write_csv(csv_path, table)
    analysis.write_json(out / "ensemble.json", table)
    written = [str(csv_path), str(out / "ensemble.json")]
    if args.plot:
        plots.plot_ensemble(records, out / "ensemble.png")
        written.append(str(out / "ensemble.png"))
    print("wrote " + ", ".join(written))
    finals = np.array([r.final_fidelity for r in records])
    improved = np.mean([r.final_fidelity > r.initial_fidelity for r in records])
    print(
        f"{len(records)} runs: {100 * improved:.1f}% improved, "
        f"median final fidelity {np.median(finals):.4f}"
    )
    return 0


def _cmd_gatecount(args) -> int:
    gc = gate_count(args.nt, args.nc, args.with_b)
    print(f"total gates per Trotter step: {gc.total}")
    print(f"  target      {gc.target:6d} gates, {gc.target_rotations} rotations")
    print(f"  comb        {gc.comb:6d} gates, {gc.comb_rotations} rotations")
    print(f"  interaction {gc.interaction:6d} gates, {gc.interaction_rotations} rotations")
    print(f"total rotations per step: {gc.rotations}")
    if args.dump is not None:
        app = _load_config(args)
        c = app.combing
        ising = replace(app.ising, nt=args.nt)
        comb = CombParams(args.nc, c.nu0, c.kappa, c.tf, (1.0,) * args.nc)
        inter = InteractionParams(c.g)
        circ = trotter_step_circuit(ising, comb, inter, 0.0, c.dt(0))
        text = circ.dump() + "\n"
        if args.dump == "-":
            sys.stdout.write(text)
        else:
            Path(args.dump).write_text(text)
            print(f"wrote {args.dump}")
    return 0


def _cmd_optimize(args) -> int:
    app = _load_config(args)
    space = default_search_space(app.ising)
    result = optimize_params(
        space, args.objective, args.budget, args.opt_seed, app.combing, app.ising
    )
    out = _out_dir(app)
    best_app = AppConfig(
        app.ising, result.best_config, app.qaa, app.out_dir, seed_given=True
    )
    (out / "best_config.ini").write_text(format_config(best_app))
    history = analysis.Table(
        ["nu0", "tf", "kappa", "g", "eta", "score"],
        [
            tuple(params.get(k, getattr(app.combing, k)) for k in ("nu0", "tf", "kappa", "g", "eta"))
            + (score,)
            for params, score in result.evaluations
        ],
        analysis.standard_metadata(
            {"objective": args.objective, "budget": args.budget, "opt_seed": args.opt_seed}
        ),
    )
    analysis.write_csv(out / "optimize_history.csv", history)
    analysis.write_json(out / "optimize_history.json", history)
    print(f"best score ({args.objective}): {result.best_score:.6f}")
    print(f"wrote {out / 'best_config.ini'}, {out / 'optimize_history.csv'}")
    return 0


def _cmd_compare(args) -> int:
    app = _load_config(args)
    h_grid = tuple(float(x) for x in args.h_grid.split(","))
    provider = load_sc_cost_configs(app.ising.nt, args.fixtures)
    points = compare_cost(h_grid, app.ising.nt, provider)
    table = analysis.cost_table(
        points, analysis.standard_metadata({"h_grid": list(h_grid), "nt": app.ising.nt})
    )
    out = _out_dir(app)
    _write_product(table, out, "cost", plots.plot_cost, args.plot)
    return 0


_COMMANDS = {
    "comb": _cmd_comb,
    "qaa": _cmd_qaa,
    "spectrum": _cmd_spectrum,
    "ensemble": _cmd_ensemble,
    "gatecount": _cmd_gatecount,
    "optimize": _cmd_optimize,
    "compare": _cmd_compare,
}


def dispatch(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


def main(argv=None) -> int:
    try:
        return dispatch(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CombsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
