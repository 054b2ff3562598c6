"""Command-line front end: ``debond {solve,verify,converge,oracle}``.

A run is described by a JSON config::

    {"problem": {"preset": "counterexample", "params": {"k": 4}},
     "T": 1.0,
     "solver": {"h": 0.0078125, "tol_fp": 1e-10},
     "convergence": {"ks": [2, 3, 4, 5, 6], "T": 0.875, "counterexample_ks": [4, 8, 16, 32]}}

``--preset`` replaces the config file for one-line runs; ``--h`` and
``--tol`` override the solver section.  Every artifact is computed in memory
before the output directory is touched, so a failed run writes nothing.

Exit codes: 0 success, 2 bad configuration, 3 invalid problem data,
4 fixed point not converged, 5 window below grid resolution.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys

from . import convergence, energy, griffith, oracle
from .exceptions import ConvergenceError, DataError, ResolutionError
from .field import to_csv
from .problem import problem_from_dict, problem_to_dict, validate
from .solver import SolverConfig, solve

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_CONVERGENCE, EXIT_RESOLUTION = 0, 2, 3, 4, 5


class ConfigError(Exception):
    pass


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_config(args):
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.preset:
        cfg = {"problem": {"preset": args.preset}}
    elif args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    else:
        raise ConfigError("one of --config or --preset is required")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _setup(args):
    """Problem, horizon and solver config from the command line."""
    cfg = _load_config(args)
    try:
        data = problem_from_dict(cfg.get("problem", cfg))
    except DataError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad problem section: {exc}") from None
    sc = dict(cfg.get("solver", {}))
    if args.h is not None:
        sc["h"] = args.h
    if args.tol is not None:
        sc["tol_fp"] = args.tol
    try:
        config = SolverConfig(**sc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver section: {exc}") from None
    T = float(cfg.get("T", data.l0))
    n = round(T / config.h)
    if not (T > 0 and math.isclose(n * config.h, T, rel_tol=0, abs_tol=1e-9 * max(1.0, T))):
        raise ConfigError(f"T={T} must be a positive multiple of h={config.h}")
    validate(data, T)
    return cfg, data, T, config


def _solution_files(sol):
    return {
        "u.csv": to_csv(sol.u_field()),
        "front.csv": sol.front_csv(),
        "traces.csv": sol.traces_csv(),
    }


def _diagnostics(sol, data, T, config):
    return {"problem": problem_to_dict(data), "T": T, "solver": dataclasses.asdict(config),
            "windows": [d.as_dict() for d in sol.diagnostics]}


def cmd_solve(args):
    _, data, T, config = _setup(args)
    sol = solve(data, T, config)
    files = _solution_files(sol)
    files["diagnostics.json"] = _dump(_diagnostics(sol, data, T, config))
    return files


def cmd_verify(args):
    _, data, T, config = _setup(args)
    sol = solve(data, T, config)
    res = griffith.criterion_residuals(sol)
    led = energy.ledger(sol)
    files = _solution_files(sol)
    files["residuals.csv"] = res.to_csv()
    files["energy.csv"] = led.to_csv()
    summary = {"residual_sup": res.sup, "residual_l1": res.l1,
               "balance_sup": float(max(abs(led.residual))), "E0": float(led.E[0])}
    if data.name == "counterexample":
        start = float(data.u1.breakpoints[0])
        k = int(round(data.l0 / (data.l0 - start)))
        rep = convergence.bound_report(sol, k, start, min(T, 0.5 * data.l0))
        summary["linfty_bound"] = rep.as_dict()
    files["verify.json"] = _dump(summary)
    return files


def cmd_converge(args):
    cfg, data, T, config = _setup(args)
    cc = cfg.get("convergence", {})
    seq = convergence.DataSequence(base=data, ks=tuple(cc.get("ks", (2, 3, 4, 5, 6))),
                                   T=float(cc.get("T", T)))
    table = convergence.run_sequence(seq, config)
    rates = {c: dataclasses.asdict(convergence.fit_rate(table, c)) for c in table.columns}
    files = {"table.csv": table.to_csv(), "table.json": table.to_json(),
             "plot_data.json": _dump(table.plot_data()), "rates.json": _dump(rates)}
    if data.name == "counterexample":
        reps = [convergence.linfty_counterexample(k, config).as_dict()
                for k in cc.get("counterexample_ks", (4, 8, 16, 32))]
        files["counterexample.json"] = _dump({"bound": convergence.LINFTY_BOUND, "members": reps})
    return files


def cmd_oracle(args):
    _, data, T, config = _setup(args)
    sol = solve(data, T, config)
    fd = oracle.fd_solve(data, T, config.h)
    rep = oracle.compare(sol, fd, T)
    return {"compare.json": _dump(rep.as_dict()), "front.csv": sol.front_csv(),
            "oracle_front.csv": fd.front_csv()}


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "converge": cmd_converge,
            "oracle": cmd_oracle}


def _write(files, out):
    os.makedirs(out, exist_ok=True)
    for name, text in sorted(files.items()):
        with open(os.path.join(out, name), "w", newline="\n") as fh:
            fh.write(text)


def build_parser():
    p = argparse.ArgumentParser(prog="debond", description="Dynamic debonding solver.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        s = sub.add_parser(name, help=fn.__doc__)
        s.add_argument("--config", metavar="PATH", help="JSON run configuration")
        s.add_argument("--preset", metavar="NAME", help="named problem instead of a config file")
        s.add_argument("--out", metavar="DIR", default=".", help="output directory")
        s.add_argument("--h", type=float, metavar="SPACING", help="grid spacing")
        s.add_argument("--tol", type=float, metavar="TOL", help="fixed-point tolerance")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        files = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"debond: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print("debond: invalid problem data:", file=sys.stderr)
        for msg in exc.diagnostics:
            print(f"  - {msg}", file=sys.stderr)
        return EXIT_DATA
    except ConvergenceError as exc:
        print(f"debond: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ResolutionError as exc:
        print(f"debond: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    _write(files, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
