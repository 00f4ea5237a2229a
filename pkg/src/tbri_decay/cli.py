"""Command line front end: ``tbri-decay {run,sweep,figure1,verify}``.

Settings come from (lowest to highest priority) the built-in defaults, the
``--config`` file, ``TBRI_*`` environment variables and command-line flags.

Environment variables: TBRI_CONFIG, TBRI_SEED, TBRI_OUT, TBRI_REALIZATIONS,
TBRI_THREADS, TBRI_FORMAT.

Exit codes: 0 success, 1 verify mismatch, 2 configuration error, 3 numerical
failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import ConfigError, TBRIError
from .export import verify_manifest
from .experiment import load_config, parse_config, run_experiment, run_sweep, with_overrides, write_figure1

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

ENV_PREFIX = "TBRI_"

DEFAULT_CONFIG = """\
[model]
n = 6
m = 12
v0 = 0.2
seed = 1

[ensemble]
realizations = 20

[initial_state]
select = energy:center
count = 10
"""

log = logging.getLogger("tbri_decay")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI experiment file (env TBRI_CONFIG)")
    p.add_argument("--seed", type=lambda s: int(s, 0), help="master seed, unsigned 64-bit (env TBRI_SEED)")
    p.add_argument("--out", type=Path, help="output directory (env TBRI_OUT)")
    p.add_argument("--realizations", type=int, help="ensemble size (env TBRI_REALIZATIONS)")
    p.add_argument("--threads", type=int, help="worker threads, 0 = one per CPU (env TBRI_THREADS)")
    p.add_argument("--format", choices=("csv", "json", "both"), help="output files (env TBRI_FORMAT)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tbri-decay", description="Decay of excited states in the TBRI model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="ensemble run: survival probability, strength function, fits")
    _common(p)

    p = sub.add_parser("sweep", help="one run per interaction strength plus an aggregate table")
    _common(p)
    p.add_argument("--v0", type=float, nargs="+", required=True, metavar="V0", help="interaction strengths")

    p = sub.add_parser("figure1", help="schematic crossover curves and t_c markers")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--delta-e", type=float, default=1.2)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=301)
    p.add_argument("--out", type=Path, help="output directory (env TBRI_OUT)")

    p = sub.add_parser("verify", help="re-hash the files listed in a manifest")
    p.add_argument("directory", type=Path)
    return parser


def _env(name, conv=str):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return None
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"environment variable {ENV_PREFIX}{name}={raw!r} is invalid") from None


def resolve_config(args):
    """Merge config file, environment and flags into one ExperimentConfig."""
    path = args.config or _env("CONFIG", Path)
    cfg = load_config(path) if path is not None else parse_config(DEFAULT_CONFIG)
    fmt = args.format or _env("FORMAT")
    if fmt is not None and fmt not in ("csv", "json", "both"):
        raise ConfigError(f"format must be csv, json or both, not {fmt!r}")
    seed = args.seed if args.seed is not None else _env("SEED", lambda s: int(s, 0))
    if seed is not None and not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    try:
        return _apply(cfg, args, seed, fmt)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _apply(cfg, args, seed, fmt):
    return with_overrides(
        cfg,
        seed=seed,
        out=args.out or _env("OUT", Path),
        realizations=args.realizations if args.realizations is not None else _env("REALIZATIONS", int),
        threads=args.threads if args.threads is not None else _env("THREADS", int),
        fmt=fmt,
    )


def _cmd_run(args) -> int:
    cfg = resolve_config(args)
    s = run_experiment(cfg)
    e = s.ensemble
    print(f"regime: {s.regime}")
    print(f"Delta_E^2: theory {e['delta_e_sq_theory']:.6g}, empirical {e['delta_e_sq_empirical']:.6g}")
    print(f"Gamma_0: {e['gamma0']:.6g}  (Gamma_0/Delta_E = {e['gamma0_over_delta_e']:.4g})")
    print(f"W_inf * N_pc / 3: {e['saturation_ratio']:.4g}")
    print(f"decay fit: {s.data['decay_fit']['status']}")
    print(f"output: {s.directory}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    res = run_sweep(cfg, args.v0)
    for row in res.points:
        print(f"v0={row['v0']:g}  regime={row['regime']}  Gamma_0/Delta_E={row['gamma0_over_delta_e']:.4g}"
              f"  status={row['status']}")
    print(f"table: {res.aggregate}")
    failed = [r for r in res.points if r["regime"] == "error"]
    return EXIT_NUMERIC if len(failed) == len(res.points) else EXIT_OK


def _cmd_figure1(args) -> int:
    out = args.out or _env("OUT", Path) or Path("figure1")
    try:
        files = write_figure1(out, args.gamma, args.delta_e, args.t_max, args.points)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for f in files:
        print(f)
    return EXIT_OK


def _cmd_verify(args) -> int:
    status = verify_manifest(args.directory)
    bad = 0
    for name, st in status.items():
        print(f"{st:8s} {name}")
        bad += st != "ok"
    return EXIT_MISMATCH if bad else EXIT_OK


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "figure1": _cmd_figure1, "verify": _cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TBRIError, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
