"""Convergence of the regularized model to the Gausson as eps -> 0, per regularization kind.

Prints the initial-energy gap slope and the L2/H1 slopes of the solution at T.
The solution sweep (tau = 1e-4, T = 3) takes roughly 30 s per kind.
"""
import argparse
from pathlib import Path

import numpy as np

from logsplit import harness, io
from logsplit.analytic import GaussonSpec, gausson_field
from logsplit.config import config_from_dict
from logsplit.grid import DomainSpec
from logsplit.observables import energy_error
from logsplit.regularization import Regularization

KINDS = ("local_energy", "sqrt_shift", "square_shift")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--tau", type=float, default=1e-4)
    ap.add_argument("--T", type=float, default=3.0)
    ap.add_argument("--energy-only", action="store_true")
    ap.add_argument("--out", default="results/eps")
    args = ap.parse_args()

    u0 = gausson_field(GaussonSpec(), DomainSpec.cube(1))
    eps_energy = 0.1 / 4.0 ** np.arange(5)
    print("energy gap |E(u0) - E_reg(u0)| vs eps", " ".join(f"{e:.3g}" for e in eps_energy))
    for kind in KINDS:
        gaps = [energy_error(u0, -1.0, Regularization(kind, e, args.n)) for e in eps_energy]
        print(f"  {kind:13s} slope {harness.observed_order(gaps, eps_energy):.3f}  "
              + " ".join(f"{g:.2e}" for g in gaps))
    if args.energy_only:
        return

    eps = 1e-2 / 4.0 ** np.arange(4)
    print(f"solution error at T={args.T} vs eps", " ".join(f"{e:.3g}" for e in eps))
    for kind in KINDS:
        cfg = config_from_dict({"T": args.T, "reg": {"kind": kind, "n": args.n}})
        res = harness.converge_in_eps(cfg, eps, tau=args.tau)
        io.write_csv(Path(args.out) / kind / "sweep.csv",
                     ["param_name", "param_value", *harness.SWEEP_COLUMNS, "fitted_order"], res.rows())
        io.write_meta(Path(args.out) / kind, cfg.to_dict(), sweep=res.metadata, orders=res.orders)
        print(f"  {kind:13s} L2 slope {res.orders['err_l2']:.3f}  H1 slope {res.orders['err_h1']:.3f}")


if __name__ == "__main__":
    main()
