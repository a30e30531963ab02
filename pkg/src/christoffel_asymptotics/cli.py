"""Command line interface: ``run``, ``list`` and ``verify``.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 acceptance failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import (
    ScenarioConfig,
    ScenarioError,
    export,
    ladder_for,
    list_scenarios,
    parse_config_blocks,
    run_scenario,
    to_csv,
    to_json,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 1, 2, 3

log = logging.getLogger("christoffel_asymptotics")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="christoffel-asymptotics", description="Christoffel function convergence experiments.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one scenario or a config file")
    r.add_argument("--scenario", help="scenario id (see `list`)")
    r.add_argument("--config", help="file of key=value blocks, one scenario per block")
    r.add_argument("--alpha", type=float)
    r.add_argument("--nmax", type=int, help="cut the default ladder at N and end it with N")
    r.add_argument("--ladder", help="explicit comma-separated ladder")
    r.add_argument("--precision-bits", type=int)
    r.add_argument("--tau", type=float)
    r.add_argument("--kappa", type=float, help="override the scaling exponent")
    r.add_argument("--out", help="output path; stdout when omitted")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--timing", action="store_true", help="include wall time in JSON (breaks byte identity)")

    sub.add_parser("list", help="list registered scenarios")

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _emit(report, fmt, out, timing):
    if out:
        export(report, fmt, out, include_timing=timing)
    else:
        sys.stdout.write(to_csv(report) if fmt == "csv" else to_json(report, timing))


def _cmd_run(args) -> int:
    jobs = []
    if args.config:
        if args.scenario:
            raise ScenarioError("use either --scenario or --config")
        with open(args.config, encoding="utf-8") as fh:
            blocks = parse_config_blocks(fh.read())
        for k, (cfg, out) in enumerate(blocks):
            path = out or (f"{args.out}.{k}.{cfg.output}" if args.out and len(blocks) > 1 else args.out)
            jobs.append((cfg, path, cfg.output))
    else:
        if not args.scenario:
            raise ScenarioError("--scenario or --config is required")
        if args.ladder and args.nmax:
            raise ScenarioError("use either --ladder or --nmax")
        if args.ladder:
            ladder = tuple(int(x) for x in args.ladder.split(","))
        elif args.nmax:
            ladder = ladder_for(args.scenario, args.nmax)
        else:
            ladder = ()
        cfg = ScenarioConfig(
            args.scenario,
            alpha=args.alpha,
            n_ladder=ladder,
            precision_bits=args.precision_bits,
            tau=args.tau,
            kappa=args.kappa,
            output=args.format,
        )
        jobs.append((cfg, args.out, args.format))
    status = EXIT_OK
    for cfg, path, fmt in jobs:
        log.info("running %s", cfg.scenario_id)
        report = run_scenario(cfg)
        _emit(report, fmt, path, args.timing)
        if report.failed:
            status = EXIT_NUMERICAL
    return status


def _cmd_list() -> int:
    for sid, sc in list_scenarios().items():
        print(f"{sid:24s} {sc.kind:12s} alpha={sc.default_alpha:g}  {sc.description}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .acceptance import run_acceptance

    only = None
    if args.only:
        only = [int(x) for x in args.only.split(",")]
    results = run_acceptance(only, stream=sys.stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list()
        return _cmd_verify(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
