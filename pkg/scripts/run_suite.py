"""Run the full seeded suite and write the JSON report plus a per-trial CSV.

    python3 scripts/run_suite.py --seed 0 --out-dir results
"""
import argparse
import json
from pathlib import Path

from cjl.cli import parse_config, run, summary_lines, to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()

    cfg = parse_config(["all", "--seed", str(args.seed)])
    report, status = run(cfg)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / f"suite_seed{args.seed}.json").write_text(json.dumps(report, indent=1, default=str))
    (args.out_dir / f"suite_seed{args.seed}.csv").write_text(to_csv(report))
    for line in summary_lines(report):
        print(line)
    print(f"total {report['elapsed_s']:.1f}s, exit status {status}")
    raise SystemExit(status)


if __name__ == "__main__":
    main()
