"""Temporal order of the four splittings against a same-eps fine solution.

The reference (StrangBAB, tau_ref = 1e-5, T = 3) dominates the runtime at
roughly 80 s; pass a larger --tau-ref for a quick look.
"""
import argparse

import numpy as np

from logsplit import harness
from logsplit.config import config_from_dict
from logsplit.integrators import SplitScheme


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, default=1e-4)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--tau-ref", type=float, default=1e-5)
    ap.add_argument("--norm", default="h1")
    args = ap.parse_args()

    reg = {"kind": "local_energy", "n": args.n, "epsilon": args.eps}
    taus = 0.1 / 2.0 ** np.arange(6)
    reference = harness.fine_reference(config_from_dict({"reg": reg}), args.tau_ref)
    for scheme in SplitScheme:
        cfg = config_from_dict({"reg": reg, "scheme": scheme.value})
        res = harness.converge_in_tau(cfg, taus, reference_state=reference, tau_ref=args.tau_ref,
                                      fit_column=f"err_{args.norm}")
        errs = res.errors[f"err_{args.norm}"]
        print(f"{scheme.value:11s} order {res.fitted_order:.3f}  " + " ".join(f"{e:.2e}" for e in errs))


if __name__ == "__main__":
    main()
