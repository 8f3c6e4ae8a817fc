"""Command line entry point: ``grmorita validate | check | search | explain``.

Exit codes: 0 all checks pass, 1 some check fails, 2 input or validation
error, 3 only undecided checks (budget exhausted) besides passes.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .io import InstanceError, load_instance
from .search import SearchBoundError, search
from .suites import SUITES, explain, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2, 3


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    v = os.environ.get(name)
    if v is None or v == "":
        return default
    try:
        return int(v)
    except ValueError:
        raise SystemExit(f"{name} must be an integer, got {v!r}") from None


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grmorita", description="Verify graded Morita context properties on finite instances.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="load an instance file and check ring and module axioms")
    v.add_argument("file")

    c = sub.add_parser("check", help="run a check suite on an instance file")
    c.add_argument("suite", choices=SUITES)
    c.add_argument("file")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--budget", type=int, default=None, help="lattice enumeration cap (env GRMORITA_BUDGET)")
    c.add_argument("--jobs", type=int, default=None, help="parallel workers (env GRMORITA_JOBS)")
    c.add_argument("--format", choices=("text", "machine"), default="text")
    c.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")

    s = sub.add_parser("search", help="random census of small contexts")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--group", default="Z/2")
    s.add_argument("--max-dim", type=int, default=2)
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=("text", "machine"), default="text")

    e = sub.add_parser("explain", help="print the statement behind a check id")
    e.add_argument("check_id")
    return ap


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.cmd == "explain":
        text = explain(args.check_id)
        if text is None:
            print(f"no explanation for {args.check_id!r}", file=sys.stderr)
            return EXIT_INPUT
        print(text)
        return EXIT_OK
    if args.cmd == "search":
        try:
            census = search(args.p, args.group, args.max_dim, args.count, args.seed)
        except (SearchBoundError, ValueError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        sys.stdout.write(census.machine() if args.format == "machine" else census.text())
        return EXIT_OK
    try:
        inst = load_instance(args.file)
    except (InstanceError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.cmd == "validate":
        print(f"ok: {len(inst.rings)} rings, {len(inst.modules)} modules, {len(inst.contexts)} contexts")
        return EXIT_OK
    budget = args.budget if args.budget is not None else _env_int("GRMORITA_BUDGET", None)
    jobs = args.jobs if args.jobs is not None else _env_int("GRMORITA_JOBS", 1)
    report = run_suite(args.suite, inst, seed=args.seed, budget=budget, jobs=max(1, jobs))
    _emit(report.machine() if args.format == "machine" else report.text(), args.output)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
