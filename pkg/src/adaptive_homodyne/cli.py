"""Command-line front end.

Subcommands::

    simulate   mutual-information estimate for one (ensemble, policy) pair
    table1     all three policies on 8psk, 16qam and star, plus reference rows
    bounds     capacity-bound curves I1, I2, I3 over a photon-number grid (CSV)
    holevo     Holevo information of an ensemble
    povm       sampled projector ellipses (CSV)
    rerun      repeat a run from the config embedded in one of its artifacts

Every artifact carries the fully resolved config (JSON artifacts inline,
CSV artifacts in a ``.config.json`` sidecar) so ``rerun`` reproduces it.
Wall-clock data lives only under the ``metadata`` key.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .ensemble import Ensemble, mean_photon_number, resolve
from .information import bound_curves, holevo_information
from .montecarlo import POLICY_ROWS, compare_policies, prior_entropy, run_batch
from .policy import KINDS, PolicySpec
from .povm import sample_povm, write_ellipses_csv
from .trajectory import SimConfig

log = logging.getLogger("adaptive_homodyne")

OUT_ENV = "ADAPTIVE_HOMODYNE_OUT"
TABLE1_ENSEMBLES = ("8psk", "16qam", "star")
EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# -- argument parsing -------------------------------------------------------

def _add_sim_args(p: argparse.ArgumentParser, n_default: int) -> None:
    p.add_argument("--n", type=int, default=n_default, help="number of trajectories")
    p.add_argument("--dt", type=float, default=5e-3)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=1, help="master seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--crn", action="store_true", help="share random streams across policies")


def _add_policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=KINDS, default="lmmi")
    p.add_argument("--het-step", type=float, default=0.1, help="heterodyne phase step (rad)")
    p.add_argument("--fixed-phase", type=float, default=0.0, help="phase of the fixed policy (rad)")
    p.add_argument("--wiseman-phase", type=float, default=0.0, help="initial phase of Wiseman's rule")


def _add_out_args(p: argparse.ArgumentParser, formats=("json", "csv")) -> None:
    p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./results)")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptive-homodyne", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="estimate mutual information for one policy")
    p.add_argument("--ensemble", required=True, help="8psk, 16qam, star, or a JSON file")
    _add_policy_args(p)
    _add_sim_args(p, n_default=10000)
    _add_out_args(p)

    p = sub.add_parser("table1", help="all policies on the three benchmark ensembles")
    _add_sim_args(p, n_default=10000)
    p.add_argument("--fock-nmax", type=int, default=100)
    _add_out_args(p, formats=("json",))

    p = sub.add_parser("bounds", help="capacity-bound curves as CSV")
    p.add_argument("--nmax", type=float, default=10.0, help="largest mean photon number")
    p.add_argument("--steps", type=int, default=100, help="number of grid points")
    _add_out_args(p, formats=("csv",))

    p = sub.add_parser("holevo", help="Holevo information of an ensemble")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--fock-nmax", type=int, default=100)
    _add_out_args(p, formats=("json",))

    p = sub.add_parser("povm", help="sample projector ellipses as CSV")
    p.add_argument("--ensemble", required=True)
    _add_policy_args(p)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--dt", type=float, default=5e-3)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--crn", action="store_true")
    _add_out_args(p, formats=("csv",))

    p = sub.add_parser("rerun", help="repeat a run from an artifact's embedded config")
    p.add_argument("artifact", help="JSON artifact or .config.json sidecar")
    p.add_argument("--out", default=None)
    return parser


# -- config resolution ------------------------------------------------------

def _ensemble(source: str) -> dict:
    try:
        return resolve(source).to_dict()
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from exc
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad ensemble {source!r}: {exc}") from exc


def _sim(args) -> dict:
    try:
        return SimConfig(dt=args.dt, t_max=args.tmax, seed=args.seed).to_dict()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _policy(args) -> dict:
    try:
        return PolicySpec(
            args.policy, het_step=args.het_step, initial_phase=args.wiseman_phase,
            fixed_phase=args.fixed_phase,
        ).to_dict()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def resolve_config(args) -> dict:
    """Turn parsed arguments into a self-contained, JSON-serializable config."""
    cmd = args.command
    cfg: dict = {"command": cmd, "format": args.format}
    if cmd in ("simulate", "holevo", "povm"):
        cfg["ensemble_source"] = args.ensemble
        cfg["ensemble"] = _ensemble(args.ensemble)
    if cmd in ("simulate", "povm"):
        cfg["policy"] = _policy(args)
        cfg["sim"] = _sim(args)
        cfg["workers"] = args.workers
        cfg["crn"] = args.crn
    if cmd == "simulate":
        if args.n < 1:
            raise ConfigError("--n must be >= 1")
        cfg["n_trajectories"] = args.n
    elif cmd == "table1":
        if args.n < 1:
            raise ConfigError("--n must be >= 1")
        cfg.update(sim=_sim(args), n_trajectories=args.n, workers=args.workers, crn=args.crn,
                   fock_nmax=args.fock_nmax, ensembles=list(TABLE1_ENSEMBLES))
    elif cmd == "bounds":
        if not (args.nmax > 0 and args.steps >= 1):
            raise ConfigError("--nmax must be > 0 and --steps >= 1")
        cfg.update(nmax=args.nmax, steps=args.steps)
    elif cmd == "holevo":
        if args.fock_nmax < 0:
            raise ConfigError("--fock-nmax must be >= 0")
        cfg["fock_nmax"] = args.fock_nmax
    elif cmd == "povm":
        if args.samples < 1:
            raise ConfigError("--samples must be >= 1")
        cfg["n_samples"] = args.samples
    return cfg


def output_dir(arg: str | None) -> Path:
    return Path(arg or os.environ.get(OUT_ENV) or "results")


# -- writers ----------------------------------------------------------------

def _metadata() -> dict:
    return {
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
    }


def write_json(path: Path, config: dict, result) -> None:
    doc = {"config": config, "result": result, "metadata": _metadata()}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_sidecar(csv_path: Path, config: dict) -> None:
    side = csv_path.with_suffix(".config.json")
    write_json(side, config, None)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def format_table(tables) -> str:
    """Aligned-text rendering of the policy comparison table."""
    head = ["quantity"] + [t.label for t in tables]
    rows = [
        ["<n>"] + [f"{t.mean_photons:.3f}" for t in tables],
        ["I1(<n>), bits"] + [f"{t.i1:.3f}" for t in tables],
        ["chi(E), bits"] + [f"{t.holevo:.3f}" for t in tables],
    ]
    for kind in POLICY_ROWS:
        cells = []
        for t in tables:
            st = t.results[kind]
            hw = "n/a" if st.ci_half_width is None else f"{st.ci_half_width:.3f}"
            cells.append(f"{st.mean_gain:.3f} +- {hw}")
        rows.append([f"I_{kind}, bits"] + cells)
    rows.append(
        ["lmmi vs het, %"]
        + [f"{100 * (t.results['lmmi'].mean_gain / t.results['heterodyne'].mean_gain - 1):+.1f}"
           for t in tables]
    )
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [head] + rows]
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------

def _objects(cfg: dict):
    ens = Ensemble.from_dict(cfg["ensemble"]) if "ensemble" in cfg else None
    pol = PolicySpec(**cfg["policy"]) if "policy" in cfg else None
    sim = SimConfig(**cfg["sim"]) if "sim" in cfg else None
    return ens, pol, sim


def _stats_ok(stats, ensemble) -> bool:
    bad = stats.invariant_violations(prior_entropy(ensemble))
    for msg in bad:
        log.error("invariant violated (%s): %s", ensemble.label, msg)
    return not bad


def cmd_simulate(cfg: dict, out: Path) -> int:
    ens, pol, sim = _objects(cfg)
    n = cfg["n_trajectories"]
    stats = run_batch(ens, pol, sim, n, workers=cfg["workers"], crn=cfg["crn"])
    if stats.std_gain is None:
        log.warning("only one trajectory: standard deviation and interval are undefined")
    stem = f"simulate_{ens.label}_{pol.kind}_n{n}_seed{sim.seed}"
    if cfg["format"] == "json":
        path = out / f"{stem}.json"
        write_json(path, cfg, stats.to_dict())
    else:
        path = out / f"{stem}.csv"
        write_csv(
            path,
            ["ensemble", "policy", "n_trajectories", "mean_gain", "std_gain", "ci_half_width"],
            [[ens.label, pol.kind, n, repr(stats.mean_gain),
              "" if stats.std_gain is None else repr(stats.std_gain),
              "" if stats.ci_half_width is None else repr(stats.ci_half_width)]],
        )
        write_sidecar(path, cfg)
    hw = "n/a" if stats.ci_half_width is None else f"{stats.ci_half_width:.4f}"
    print(f"{ens.label} {pol.kind}: I = {stats.mean_gain:.4f} +- {hw} bits (n={n}) -> {path}")
    return EXIT_OK if _stats_ok(stats, ens) else EXIT_INVARIANT


def cmd_table1(cfg: dict, out: Path) -> int:
    _, _, sim = _objects(cfg)
    tables = []
    ok = True
    for name in cfg["ensembles"]:
        ens = resolve(name)
        t = compare_policies(ens, sim, cfg["n_trajectories"], workers=cfg["workers"],
                             crn=cfg["crn"], fock_nmax=cfg["fock_nmax"])
        for st in t.results.values():
            ok &= _stats_ok(st, ens)
        tables.append(t)
    text = format_table(tables)
    write_json(out / "table1.json", cfg, [t.to_dict() for t in tables])
    (out / "table1.txt").write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_bounds(cfg: dict, out: Path) -> int:
    steps, nmax = cfg["steps"], cfg["nmax"]
    grid = [nmax * (i + 1) / steps for i in range(steps)]
    path = out / "bounds.csv"
    write_csv(path, ["n", "I1", "I2", "I3"], [[repr(v) for v in row] for row in bound_curves(grid)])
    write_sidecar(path, cfg)
    print(f"{steps} rows -> {path}")
    return EXIT_OK


def cmd_holevo(cfg: dict, out: Path) -> int:
    ens, _, _ = _objects(cfg)
    try:
        chi = holevo_information(ens, cfg["fock_nmax"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    n = mean_photon_number(ens)
    path = out / f"holevo_{ens.label}.json"
    write_json(path, cfg, {"ensemble": ens.label, "holevo_bits": chi, "mean_photon_number": n})
    print(f"{ens.label}: chi = {chi:.6f} bits (<n> = {n:.4g}) -> {path}")
    return EXIT_OK


def cmd_povm(cfg: dict, out: Path) -> int:
    ens, pol, sim = _objects(cfg)
    ellipses = sample_povm(ens, pol, sim, cfg["n_samples"], workers=cfg["workers"], crn=cfg["crn"])
    path = out / f"povm_{ens.label}_{pol.kind}_seed{sim.seed}.csv"
    write_ellipses_csv(ellipses, path)
    write_sidecar(path, cfg)
    worst = max(e.aspect_ratio for e in ellipses)
    print(f"{len(ellipses)} ellipses (max aspect {worst:.4g}) -> {path}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "table1": cmd_table1,
    "bounds": cmd_bounds,
    "holevo": cmd_holevo,
    "povm": cmd_povm,
}


def execute(cfg: dict, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    return COMMANDS[cfg["command"]](cfg, out)


def load_embedded_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)["config"]
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config from {path}: {exc}") from exc
    if cfg.get("command") not in COMMANDS:
        raise ConfigError(f"{path} does not hold a runnable config")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "rerun":
            cfg = load_embedded_config(args.artifact)
        else:
            cfg = resolve_config(args)
        return execute(cfg, output_dir(args.out))
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except AssertionError as exc:
        log.error("invariant violated: %s", exc)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
