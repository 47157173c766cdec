"""Error table on the eps_i = eps0/4^i by tau_j = tau0/2^j ladder (about 70 s on one core).

    python3 scripts/reproduce_table.py --out results/table
"""
import argparse
from pathlib import Path

import numpy as np

from logsplit import harness, io
from logsplit.config import config_from_dict


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps0", type=float, default=0.025)
    ap.add_argument("--tau0", type=float, default=0.1)
    ap.add_argument("--eps-steps", type=int, default=9)
    ap.add_argument("--tau-steps", type=int, default=10)
    ap.add_argument("--scheme", default="strang_bab")
    ap.add_argument("--norm", default="l2")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="results/table")
    args = ap.parse_args()

    cfg = config_from_dict({"scheme": args.scheme})
    tab = harness.table_eps_tau(cfg, args.eps0, args.tau0, args.eps_steps, args.tau_steps, args.norm, args.workers)
    out = Path(args.out)
    io.write_csv(out / "table.csv", tab.header(), tab.rows())
    io.write_meta(out, cfg.to_dict(), table=tab.metadata)

    diag = set(tab.diagonal())
    print("eps \\ tau  " + " ".join(f"{t:>10.3g}" for t in tab.taus))
    for i, eps in enumerate(tab.epsilons):
        cells = [f"{'*' if (i, j) in diag else ' '}{v:9.2e}" for j, v in enumerate(tab.matrix[i])]
        print(f"{eps:10.3g} " + " ".join(cells))
        print(" " * 11 + " ".join(f"{r:>10.2f}" if np.isfinite(r) else " " * 10 for r in tab.rates[i]))
    print("* marks cells with tau^2 ~ eps; diagonal rates:", np.round(tab.diagonal_rates(), 3))


if __name__ == "__main__":
    main()
