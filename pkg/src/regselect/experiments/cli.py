"""Command-line front end for the experiment drivers.

Every subcommand accepts the same flags plus an optional key=value config
file; flags win over the file.  All outputs are CSV (or the dataset
container for `generate`) written into --out.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .studies import (
    FILTER_CHOICES,
    LOSS_CHOICES,
    MODEL_CHOICES,
    StudyConfig,
    run_bound_check,
    run_generate,
    run_noise_study,
    run_plateau_study,
    run_qo_comparison,
    run_rate_study,
    run_risk_curve,
)

SUBCOMMANDS = ("generate", "risk-curve", "rate-study", "noise-study",
               "plateau-study", "compare-qo", "bound-check")


def parse_grid(text: str) -> tuple[float, float, int]:
    """Parse lo:hi:N into (float, float, int)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like lo:hi:N, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValueError(f"bad grid {text!r}: {exc}") from None
    return lo, hi, count


# flag name -> (config attribute, parser); config files share the same keys.
_FIELDS = {
    "model": ("model", str),
    "d": ("d", int),
    "s": ("source_exponent", float),
    "sparsity": ("sparsity", int),
    "tau": ("tau", float),
    "n": ("n", int),
    "n_mc": ("n_mc", int),
    "grid": ("grid", parse_grid),
    "filter": ("filter", str),
    "loss": ("loss", str),
    "seed": ("seed", int),
    "trials": ("trials", int),
    "out": ("out", str),
}


def read_config_file(path: str | Path) -> dict:
    """Flat key=value text; '#' starts a comment; keys mirror the flags."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _FIELDS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        attr, convert = _FIELDS[key]
        values[attr] = convert(value.strip())
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regselect",
        description="Reproducible studies of learned regularization strengths.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--model", choices=MODEL_CHOICES, default=None)
        p.add_argument("--d", type=int, default=None, help="signal dimension")
        p.add_argument("--s", type=float, default=None, help="source smoothness exponent")
        p.add_argument("--sparsity", type=int, default=None)
        p.add_argument("--tau", type=float, default=None, help="noise level")
        p.add_argument("--n", type=int, default=None, help="training pairs per trial")
        p.add_argument("--n-mc", type=int, default=None, help="Monte Carlo sample count")
        p.add_argument("--grid", type=parse_grid, default=None, metavar="LO:HI:N")
        p.add_argument("--filter", choices=FILTER_CHOICES, default=None)
        p.add_argument("--loss", choices=LOSS_CHOICES, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
    return parser


def config_from_args(args: argparse.Namespace) -> StudyConfig:
    values: dict = {}
    if args.config is not None:
        values.update(read_config_file(args.config))
    for flag, (attr, _) in _FIELDS.items():
        given = getattr(args, flag)
        if given is not None:
            values[attr] = given
    return StudyConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    command = args.command
    if command == "generate":
        path = run_generate(cfg)
        print(f"wrote {path}")
    elif command == "risk-curve":
        run_risk_curve(cfg)
        print(f"wrote {cfg.out_dir / 'risk_curve.csv'} and {cfg.out_dir / 'risk_curve_trials.csv'}")
    elif command == "rate-study":
        run_rate_study(cfg)
        print(f"wrote {cfg.out_dir / ('rate_' + cfg.filter + '.csv')}")
    elif command == "noise-study":
        run_noise_study(cfg)
        print(f"wrote {cfg.out_dir / 'noise_study.csv'}")
    elif command == "plateau-study":
        run_plateau_study(cfg)
        print(f"wrote {cfg.out_dir / 'plateau.csv'} and {cfg.out_dir / 'plateau_trials.csv'}")
    elif command == "compare-qo":
        run_qo_comparison(cfg)
        print(f"wrote {cfg.out_dir / 'qo_comparison.csv'}")
    else:
        run_bound_check(cfg)
        print(f"wrote {cfg.out_dir / 'bound_curve.csv'} and {cfg.out_dir / 'bound_summary.csv'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
