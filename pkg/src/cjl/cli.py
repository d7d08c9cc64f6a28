"""Command-line driver: ``cjl <subcommand> [flags]``.

Exit status: 0 all acceptance thresholds met, 1 some threshold missed,
2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import traceback
from dataclasses import asdict, dataclass

from . import __version__
from .experiments import (SCHEMA, SUITE, Settings, default_groups, run_groups, suite_groups,
                          thread_cap)

SUBCOMMANDS = ("sample", "rank", "identity", "charts", "roundtrip", "tangent", "fermat", "bundle", "all")

# fields each subcommand may run over; the first entry is the default
FIELDS = {
    "sample": ("rational",), "rank": ("complex",), "identity": ("complex",), "charts": ("complex",),
    "roundtrip": ("complex",), "tangent": ("rational", "prime"), "fermat": ("prime", "rational"),
    "bundle": ("rational", "prime"), "all": ("rational", "prime", "complex"),
}

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    degree: int | None
    trials: int | None
    seed: int
    field: str | None
    prime: int
    precision: int
    tol_zero: float
    tol_rank: float
    out: str | None
    format: str

    def settings(self) -> Settings:
        # for `all` a field flag applies only to the experiments that accept it
        return Settings(self.field, self.prime, self.precision, self.tol_zero, self.tol_rank)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--degree", type=int, default=None, help="curve degree d (default: the criterion's set)")
    common.add_argument("--trials", type=int, default=None, help="trials per degree")
    common.add_argument("--seed", type=int, default=0, help="64-bit base seed")
    common.add_argument("--field", choices=("rational", "prime", "complex"), default=None)
    common.add_argument("--prime", type=int, default=2**61 - 1, help="modulus for --field prime")
    common.add_argument("--precision", type=int, default=53, help="starting precision in bits for complex work")
    common.add_argument("--tol-zero", type=float, default=1e-8, help="relative structural-zero threshold")
    common.add_argument("--tol-rank", type=float, default=1e-8, help="relative singular-value threshold")
    common.add_argument("--out", default=None, help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    p = _Parser(prog="cjl", description="Rational curves on quintic threefolds: seeded experiments.")
    p.add_argument("--version", action="version", version=f"cjl {__version__}")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    helps = {
        "sample": "sample exact incidence points (c, f)",
        "rank": "assemble the incidence Jacobian, check block structure and rank",
        "identity": "closed-form vs brute-force J; chart determinant factorization",
        "charts": "chart differentials vs finite differences",
        "roundtrip": "polar <-> coefficient roundtrip",
        "tangent": "tangent-space dimension of the incidence scheme",
        "fermat": "det3 scan for the Fermat quintic",
        "bundle": "normal sheaf splitting, torsion, h1",
        "all": "full acceptance suite (d <= 3)",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def parse_config(argv: list[str]) -> ExperimentConfig:
    ns = build_parser().parse_args(argv)
    if ns.subcommand is None:
        raise UsageError("a subcommand is required")
    if ns.degree is not None and ns.degree < 1:
        raise UsageError("--degree must be >= 1")
    if ns.trials is not None and ns.trials < 1:
        raise UsageError("--trials must be >= 1")
    if ns.precision < 53:
        raise UsageError("--precision must be >= 53")
    if ns.field is not None and ns.field not in FIELDS[ns.subcommand]:
        raise UsageError(f"--field {ns.field} is not available for {ns.subcommand} "
                         f"(choose from {', '.join(FIELDS[ns.subcommand])})")
    if ns.field == "prime":
        from .algebra import PrimeField
        try:
            PrimeField(ns.prime)
        except ValueError as e:
            raise UsageError(str(e)) from e
    return ExperimentConfig(ns.subcommand, ns.degree, ns.trials, ns.seed, ns.field, ns.prime,
                            ns.precision, ns.tol_zero, ns.tol_rank, ns.out, ns.format)


def run(cfg: ExperimentConfig) -> tuple[dict, int]:
    t0 = time.perf_counter()
    if cfg.subcommand == "all":
        specs = suite_groups(cfg.degree, cfg.trials)
        if cfg.degree is None:
            specs = [g for g in specs if g.degree <= 3 or g.experiment in ("identity", "roundtrip")]
    else:
        specs = default_groups(cfg.subcommand, cfg.degree, cfg.trials)
    groups = []
    for spec in specs:
        s = cfg.settings()
        if s.field is not None and s.field not in FIELDS[spec.experiment]:
            s = Settings(None, s.prime, s.precision, s.tol_zero, s.tol_rank)
        groups += run_groups([spec], cfg.seed, s)
    ok = all(g["aggregates"]["ok"] for g in groups)
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "config": asdict(cfg),
        "threads": thread_cap(),
        "groups": groups,
        "ok": ok,
        "elapsed_s": time.perf_counter() - t0,
    }
    return report, EXIT_OK if ok else EXIT_FAIL


CSV_FIELDS = ("experiment", "degree", "trial", "seed", "passed", "resamples", "error",
              "verdicts", "margins", "hashes", "timings")


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_FIELDS)
    for g in report["groups"]:
        for r in g["records"]:
            w.writerow([g["experiment"], g["degree"], r["trial"], r["seed"], r["passed"],
                        r["resamples"], r["error"] or "",
                        json.dumps(r["verdicts"], sort_keys=True), json.dumps(r["margins"], sort_keys=True),
                        json.dumps(r["hashes"], sort_keys=True), json.dumps(r["timings"], sort_keys=True)])
    return buf.getvalue()


def summary_lines(report: dict) -> list[str]:
    lines = []
    for g in report["groups"]:
        a = g["aggregates"]
        mark = "PASS" if a["ok"] else "FAIL"
        lines.append(f"[{mark}] {g['experiment']} d={g['degree']}: {a['passed']}/{a['trials']} "
                     f"(required: {a['threshold']}) in {g['elapsed_s']:.1f}s")
    return lines


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as e:
        print(f"cjl: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, status = run(cfg)
        text = json.dumps(report, indent=1, default=str) + "\n" if cfg.format == "json" else to_csv(report)
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL
    try:
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as e:
        print(f"cjl: cannot write report: {e}", file=sys.stderr)
        return EXIT_USAGE
    for line in summary_lines(report):
        print(line, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
