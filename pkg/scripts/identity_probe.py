"""Compare the closed-form determinant with the brute-force one on random charts.

    python3 scripts/identity_probe.py --degree 2 --trials 5
"""
import argparse

from cjl.experiments import Settings, trial_identity


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=1)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    s = Settings()
    for k in range(args.trials):
        r = trial_identity(args.degree, args.seed, k, s)
        print(f"trial {k}: rel error {r.margins['rel_error']:.3e}  identity {r.verdicts['identity']}"
              f"  factorization {r.verdicts['factorization']}")


if __name__ == "__main__":
    main()
