"""Command line entry point: ``sphereoid run`` and ``sphereoid body``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bodies import cap_body
from .errors import SphereoidError
from .experiments import EXPERIMENTS, ExperimentConfig, random_symmetric_body, run, trial_rng
from .sphere import SphericalCap

EXIT_PASS, EXIT_VIOLATION, EXIT_NUMERICAL = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sphereoid", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment and write its report")
    r.add_argument("--experiment", choices=EXPERIMENTS, required=True)
    r.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--out", type=Path, default=Path("out"))

    b = sub.add_parser("body", help="emit a spherical body as JSON")
    b.add_argument("--make", choices=("cap", "random"), required=True)
    b.add_argument("--radius", type=float, default=math.pi / 4, help="cap radius")
    b.add_argument("--center", type=float, nargs="+", help="cap center (default north pole)")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--complexity", type=int, default=8)
    b.add_argument("--eccentricity", type=float, default=0.5)
    b.add_argument("--out", type=Path, help="output file (default stdout)")
    return p


def _run(args) -> int:
    obj = json.loads(args.config.read_text()) if args.config else {}
    obj["experiment"] = args.experiment
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.trials is not None:
        obj["trials"] = args.trials
    report = run(ExperimentConfig.from_json(obj))
    out = report.write(args.out)
    print(f"{args.experiment}: {report.status} ({out})")
    return EXIT_PASS if report.passed else EXIT_VIOLATION


def _body(args) -> int:
    if args.make == "cap":
        center = np.asarray(args.center if args.center else [0.0, 0.0, 1.0], float)
        K = cap_body(SphericalCap(center / np.linalg.norm(center), args.radius))
    else:
        K = random_symmetric_body(trial_rng(args.seed, 0), args.complexity, args.eccentricity)
    text = json.dumps(K.to_json(), indent=2)
    if args.out:
        args.out.write_text(text)
    else:
        print(text)
    return EXIT_PASS


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args) if args.command == "run" else _body(args)
    except (SphereoidError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
