"""
Command-line front end.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 enumeration
budget exceeded, 4 internal error.  Every failure prints one line on
stderr.  Flags override config values, which override defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .algebra import make_rng
from .codes import LinearCode, alpha_of_ensemble, goodness, sample_code
from .errors import BudgetExceededError, ConfigError, DomainError, UsageError
from .experiments import (
    bound_only,
    config_from_dict,
    load_config,
    results_to_csv,
    results_to_json,
    simulate,
    sweep,
)
from .experiments.config import build_code
from .experiments.presets import DESCRIPTIONS, PRESET_NAMES, preset_dict
from .spectra import ambient_spectrum, function_spectrum

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_BUDGET, EXIT_INTERNAL = range(5)

SUBCOMMANDS = ("spectrum", "alpha", "goodness", "simulate", "bound", "sweep", "preset-list")

# Substreams of the run seed used outside the Monte Carlo trial blocks.
_CODE_STREAM = 1
_SPECTRUM_STREAM = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {text} is outside 0..2^64-1")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--preset", choices=PRESET_NAMES, help="start from a named preset instead of a file")
    common.add_argument("--seed", type=_u64, metavar="U64")
    common.add_argument("--trials", type=_positive, metavar="N")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=_positive, metavar="N")
    common.add_argument("--budget", type=_positive, metavar="N", help="max states for exact enumeration")
    common.add_argument("--quiet", action="store_true", help="no progress messages on stderr")
    common.add_argument("--timing", action="store_true",
                        help="fill runtime_ms (makes output differ between runs)")

    parser = _Parser(prog="jscc", description="Linear-code joint source-channel coding toolkit")
    parser.add_argument("--version", action="version", version=f"jscc {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True

    sp = sub.add_parser("spectrum", parents=[common], help="joint spectrum of the configured code")
    sp.add_argument("--ambient", action="store_true", help="spectrum of GF(q)^n instead")
    sp.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    sub.add_parser("alpha", parents=[common], help="alpha table of the code or ensemble")
    sub.add_parser("goodness", parents=[common], help="max alpha and its normalized log")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo error rates and the exact bound")
    sub.add_parser("bound", parents=[common], help="exact error bound only")
    sub.add_parser("sweep", parents=[common], help="simulate every point of the sweep grid")
    sub.add_parser("preset-list", parents=[common], help="list named presets")
    return parser


def _resolve_config(args):
    if args.config and args.preset:
        raise UsageError("give at most one of --config and --preset")
    if args.config:
        base = load_config(args.config)
        data, origin = base.to_dict(), args.config
    elif args.preset:
        data, origin = preset_dict(args.preset), f"preset {args.preset}"
    else:
        raise UsageError(f"{args.command} needs --config PATH or --preset NAME")
    for key in ("seed", "trials", "threads", "budget"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return config_from_dict(data, origin)


def _emit(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        if not args.quiet:
            print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _spectrum_json(spec, joint: bool) -> str:
    rows = []
    for key, mass in spec.items():
        if joint:
            row = {"type_counts_in": key[0].render(), "type_counts_out": key[1].render()}
        else:
            row = {"type_counts": key.render()}
        row.update(mass_num=mass.numerator, mass_den=mass.denominator)
        rows.append(row)
    return json.dumps(rows, indent=2) + "\n"


def _fixed_code(cfg) -> LinearCode:
    code = build_code(cfg)
    if isinstance(code, LinearCode):
        return code
    return sample_code(code, make_rng(cfg.seed, _CODE_STREAM))


def _cmd_spectrum(cfg, args) -> str:
    if args.ambient:
        spec = ambient_spectrum(cfg.n, cfg.q)
        return spec.to_csv() if args.format == "csv" else _spectrum_json(spec, False)
    code = _fixed_code(cfg)
    spec = function_spectrum(
        code.encode, cfg.n, cfg.q, mode=args.mode, trials=cfg.trials,
        rng=make_rng(cfg.seed, _SPECTRUM_STREAM), budget=cfg.budget,
    )
    if args.format == "csv":
        return spec.to_csv()
    return _spectrum_json(spec, True)


def _goodness_target(cfg):
    code = build_code(cfg)
    if cfg.goodness == "sampled" and not isinstance(code, LinearCode):
        return sample_code(code, make_rng(cfg.seed, _CODE_STREAM))
    return code


def _cmd_alpha(cfg, args) -> str:
    table = alpha_of_ensemble(_goodness_target(cfg), budget=cfg.budget)
    if args.format == "csv":
        return table.to_csv()
    rows = [
        {"type_counts_in": p.render(), "type_counts_out": t.render(),
         "alpha_num": v.numerator, "alpha_den": v.denominator}
        for (p, t), v in table.items()
    ]
    return json.dumps(rows, indent=2) + "\n"


def _cmd_goodness(cfg, args) -> str:
    top, log_rate = goodness(_goodness_target(cfg), budget=cfg.budget)
    row = {
        "n": cfg.n, "l": cfg.l, "q": cfg.q,
        "reading": "sampled" if cfg.goodness == "sampled" else "ensemble",
        "max_alpha_num": top.numerator, "max_alpha_den": top.denominator,
        "max_alpha": float(top), "log_rate": log_rate, "log_rate_bits": log_rate / math.log(2),
    }
    if args.format == "json":
        return json.dumps(row, indent=2) + "\n"
    return ",".join(row) + "\n" + ",".join(repr(v) if isinstance(v, float) else str(v) for v in row.values()) + "\n"


def _write_results(results, args) -> str:
    if args.format == "csv":
        return results_to_csv(results, timing=args.timing)
    return results_to_json(results, timing=args.timing)


def _cmd_preset_list(args) -> str:
    if args.format == "json":
        return json.dumps({name: DESCRIPTIONS[name] for name in PRESET_NAMES}, indent=2) + "\n"
    return "".join(f"{name}\t{DESCRIPTIONS[name]}\n" for name in PRESET_NAMES)


def run(args) -> None:
    if args.command == "preset-list":
        _emit(_cmd_preset_list(args), args)
        return
    cfg = _resolve_config(args)
    if args.command == "spectrum":
        text = _cmd_spectrum(cfg, args)
    elif args.command == "alpha":
        text = _cmd_alpha(cfg, args)
    elif args.command == "goodness":
        text = _cmd_goodness(cfg, args)
    elif args.command == "simulate":
        text = _write_results([simulate(cfg)], args)
    elif args.command == "bound":
        text = _write_results([bound_only(cfg)], args)
    else:
        text = _write_results(sweep(cfg), args)
    _emit(text, args)


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def parse_and_run(argv=None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
        run(args)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except (UsageError, DomainError) as exc:
        print(f"jscc: usage error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"jscc: config error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        print(f"jscc: budget exceeded: {_one_line(exc)}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"jscc: i/o error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"jscc: internal error: {type(exc).__name__}: {_one_line(exc)}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(parse_and_run())


if __name__ == "__main__":
    main()
