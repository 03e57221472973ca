"""Command line entry point.

Exit codes: 0 when every check passes, 1 on a bound violation (or a failed
scan/oracle check), 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError, DumbbellError
from .experiments import EXIT_CONFIG, MODES, ExperimentConfig, run, to_csv, write_result
from .model import PhysState


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dumbbell",
        description="Dumbbell-on-a-floor scattering experiments.",
    )
    p.add_argument("--config", help="JSON file with experiment settings; flags override it")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--m1", type=float)
    p.add_argument("--m2", type=float)
    p.add_argument("--ratios", type=_floats, help="mass ratios m2/m1, comma separated")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--delta-ladder", type=_floats, help="comma-separated delta values")
    p.add_argument("--out", help="output path; tables go to stdout when omitted")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--max-bounces", type=int)
    init = p.add_argument_group("initial state (simulate mode)")
    init.add_argument("--y", type=float)
    init.add_argument("--phi", type=float)
    init.add_argument("--y-dot", type=float)
    init.add_argument("--phi-dot", type=float)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    for name in ("mode", "m1", "m2", "ratios", "trials", "seed", "delta_ladder", "out",
                 "format", "max_bounces"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    state = (args.y, args.phi, args.y_dot, args.phi_dot)
    if any(v is not None for v in state):
        if any(v is None for v in state):
            raise ConfigError("initial", "give all of --y, --phi, --y-dot, --phi-dot")
        config.initial = PhysState(*state)
    return config.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        result = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DumbbellError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if config.out:
        for path in write_result(result, config.out, config.format):
            logging.getLogger(__name__).info("wrote %s", path)
    elif config.format == "json":
        sys.stdout.write(json.dumps({"summary": result.summary}, indent=2, default=str) + "\n")
    else:
        sys.stdout.write(to_csv(result.summary))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
