"""Command-line driver.

    f2sumset --command find --n 12 --alpha 1/4 --trials 5 --seed 7 --out report.json
    f2sumset --command sweep --n 10 --trials 20 --format csv --out sweep.csv

Exit status: 0 when every assertion held, 1 on an assertion failure, 2 on a
usage or capacity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .experiments import COMMANDS, ExperimentConfig, Outcome, UsageError
from .f2core import CapacityError, load_set
from .increment import FinderError

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def rational(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    return q


def grid(text: str) -> tuple[Fraction, ...]:
    return tuple(rational(part) for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="f2sumset", description=__doc__.split("\n\n")[0])
    p.add_argument("--command", required=True, choices=sorted(COMMANDS))
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=rational, help="density as p/q")
    p.add_argument("--epsilon", type=rational, help="density deficit from 1/2 as p/q")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stopping", default="plain", help="plain | metsch:<d>")
    p.add_argument("--sampling", default="exact-card", choices=["exact-card", "bernoulli"])
    p.add_argument("--d", type=int, help="subspace dimension for the metsch command")
    p.add_argument("--size", type=int, help="|S| for the metsch command")
    p.add_argument("--w-star", type=int, dest="w_star", help="explicit weight threshold (niveau)")
    p.add_argument("--max-codim", type=int, dest="max_codim",
                   help="largest codimension of sampled subspaces (niveau)")
    p.add_argument("--bases", type=int, default=20, help="random bases (concentration)")
    p.add_argument("--grid", type=grid, default=(), help="comma-separated C values (sweep)")
    p.add_argument("--in", dest="input", help="input set file (JSON or F2SET binary)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    return p


def render(cfg: ExperimentConfig, outcome: Outcome, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        rows = outcome.rows
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
        return buf.getvalue()
    doc = {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "passed": outcome.passed,
        "summary": outcome.summary,
        "rows": outcome.rows,
    }
    if outcome.reports:
        doc["reports"] = outcome.reports
    return json.dumps(doc, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        input_set = load_set(args.input) if args.input else None
        if args.trials < 1:
            raise UsageError("--trials must be positive")
        if args.seed < 0 or args.seed >= 1 << 64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        cfg = ExperimentConfig(
            command=args.command, n=args.n, alpha=args.alpha, epsilon=args.epsilon,
            trials=args.trials, seed=args.seed, stopping=args.stopping, sampling=args.sampling,
            d=args.d, size=args.size, w_star=args.w_star, max_codim=args.max_codim,
            bases=args.bases, grid=args.grid, input_set=input_set,
        )
        if args.command == "hyperplane" and cfg.epsilon is not None and cfg.n is not None:
            from .experiments import in_hyperplane_regime
            if not in_hyperplane_regime(cfg.n, cfg.epsilon):
                print("warning: epsilon outside the hyperplane regime; results are observations only",
                      file=sys.stderr)
        outcome = COMMANDS[args.command](cfg)
    except (UsageError, CapacityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FinderError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    text = render(cfg, outcome, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not outcome.passed:
        print("assertion failed: see report", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
