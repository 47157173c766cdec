"""Two-Gausson interaction runs; density snapshots land in <out>/case_<c>/.

Desk scale (256^2, eps = 1e-6) takes about 12 s per unit of time per case.
"""
import argparse

from logsplit import harness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", default="i,ii,iii")
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--tau", type=float, default=1e-3)
    ap.add_argument("--full", action="store_true", help="h = 1/16 and eps = 1e-12 (slow)")
    ap.add_argument("--snapshots", type=int, default=5, help="evenly spaced snapshot count including t=0")
    ap.add_argument("--out", default="results/scenarios")
    args = ap.parse_args()

    times = [args.T * k / (args.snapshots - 1) for k in range(args.snapshots)]
    for case in args.cases.split(","):
        res = harness.scenario_2d(case, f"{args.out}/case_{case}", full=args.full, T=args.T, tau=args.tau,
                                  snapshot_times=times)
        print(f"case {case}: mass drift {res.mass_drift:.1e}, momentum drift {res.momentum_drift:.1e}, "
              f"mirror error {res.max_mirror_error:.1e}, {len(res.files)} files")


if __name__ == "__main__":
    main()
