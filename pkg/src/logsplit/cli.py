"""Command-line entry point: ``logsplit <subcommand> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure
(including the blow-up guard).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness, io
from .config import ConfigError, RunConfig, config_from_dict, parse_config
from .integrators import IntegrationBlowupError
from .regularization import KINDS, Regularization, RegularizationDomainError, big_f, f_prime, f_second, f_value

log = logging.getLogger("logsplit")

SWEEP_HEADER = ("param_name", "param_value", "err_l2", "err_h1", "err_linf", "err_density_l1",
                "energy_err", "fitted_order")
REGFUN_HEADER = ("rho", "F", "f", "fprime", "fsecond")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _load(path) -> RunConfig:
    return config_from_dict({}) if path is None else parse_config(path)


def _out_dir(args, cfg: RunConfig) -> Path:
    return Path(args.out if args.out is not None else cfg.out)


def _warn_eps(reg: Regularization) -> None:
    if reg.kind != "exact_log" and reg.epsilon == 1:
        log.warning("epsilon = 1 is allowed but the regularization is meant for eps << 1")


def cmd_run(args) -> int:
    cfg = _load(args.config)
    _warn_eps(cfg.reg)
    out = _out_dir(args, cfg)
    final, series = harness.run(cfg)
    io.write_columns(out / "series.csv", series.columns())
    io.write_field(out / "final_state.csv", final)
    io.write_meta(out, cfg.to_dict(), command="run", mass_drift=series.max_mass_drift())
    log.info("run: %d steps, wrote %s", cfg.steps, out)
    return 0


def _write_sweep(out: Path, cfg: RunConfig, result: harness.SweepResult, command: str) -> None:
    io.write_csv(out / "sweep.csv", SWEEP_HEADER, result.rows())
    io.write_meta(out, cfg.to_dict(), command=command, sweep=result.metadata, orders=result.orders,
                  mass_drift=result.mass_drift)


def cmd_converge_tau(args) -> int:
    cfg = _load(args.config)
    out = _out_dir(args, cfg)
    result = harness.converge_in_tau(cfg, args.taus, reference=args.reference, tau_ref=args.tau_ref,
                                     fit_column=f"err_{args.norm}", workers=args.workers)
    _write_sweep(out, cfg, result, "converge-tau")
    log.info("fitted order (%s): %s", result.fit_column, result.fitted_order)
    return 0


def cmd_converge_eps(args) -> int:
    cfg = _load(args.config)
    out = _out_dir(args, cfg)
    result = harness.converge_in_eps(cfg, args.epsilons, tau=args.tau,
                                     fit_column=f"err_{args.norm}", workers=args.workers)
    _write_sweep(out, cfg, result, "converge-eps")
    log.info("fitted order (%s): %s", result.fit_column, result.fitted_order)
    return 0


def cmd_table(args) -> int:
    cfg = _load(args.config)
    out = _out_dir(args, cfg)
    table = harness.table_eps_tau(cfg, args.eps0, args.tau0, args.eps_steps, args.tau_steps,
                                  norm=args.norm, workers=args.workers)
    io.write_csv(out / "table.csv", table.header(), table.rows())
    io.write_meta(out, cfg.to_dict(), command="table", table=table.metadata,
                  max_mass_drift=float(np.max(table.mass_drift)))
    return 0


def regfun_samples(kind: str, eps: float, n: int, rho_max: float, samples: int) -> np.ndarray:
    """Columns ``rho, F, f, f', f''``; singular values at ``rho = 0`` are reported as their limits."""
    reg = Regularization(kind, eps, n)
    rho = np.linspace(0.0, rho_max, samples)
    cols = [rho, big_f(reg, rho)]
    for fn, limit in ((f_value, -np.inf), (f_prime, np.inf), (f_second, -np.inf)):
        vals = np.empty_like(rho)
        pos = rho > 0
        vals[pos] = fn(reg, rho[pos])
        if (~pos).any():
            try:
                vals[~pos] = fn(reg, rho[~pos])
            except RegularizationDomainError:
                vals[~pos] = limit
        cols.append(vals)
    return np.column_stack(cols)


def cmd_regfun(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.rho_max < 0:
        raise UsageError("--rho-max must be >= 0")
    try:
        reg = Regularization(args.kind, args.eps, args.n)
    except ValueError as exc:
        raise UsageError(str(exc))
    _warn_eps(reg)
    out = Path(args.out or ".")
    io.write_csv(out / "regfun.csv", REGFUN_HEADER,
                 regfun_samples(args.kind, args.eps, args.n, args.rho_max, args.samples))
    return 0


def cmd_scenario2d(args) -> int:
    out = Path(args.out or f"scenario_{args.case}")
    result = harness.scenario_2d(args.case, out, full=args.full, T=args.T, tau=args.tau,
                                 epsilon=args.eps, n=args.n, points=args.points)
    log.info("case %s: mass drift %.2e, mirror error %.2e", args.case, result.mass_drift,
             result.max_mirror_error)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="logsplit", description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=None,
                   help="sweep worker processes (default: CPU count; LOGSPLIT_WORKERS overrides)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", default=None, help="JSON run config (default: reference 1D setup)")
        sp.add_argument("--out", default=None, help="output directory (default: config 'out')")

    sp = sub.add_parser("run", help="single evolution")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("converge-tau", help="error versus time step")
    common(sp)
    sp.add_argument("--taus", type=_float_list, required=True)
    sp.add_argument("--reference", choices=("fine", "analytic"), default="fine")
    sp.add_argument("--tau-ref", type=float, default=None)
    sp.add_argument("--norm", choices=("l2", "h1", "linf", "density_l1"), default="h1")
    sp.set_defaults(func=cmd_converge_tau)

    sp = sub.add_parser("converge-eps", help="error versus regularization parameter")
    common(sp)
    sp.add_argument("--epsilons", type=_float_list, required=True)
    sp.add_argument("--tau", type=float, default=1e-4)
    sp.add_argument("--norm", choices=("l2", "h1", "linf", "density_l1"), default="l2")
    sp.set_defaults(func=cmd_converge_eps)

    sp = sub.add_parser("table", help="eps x tau error table")
    common(sp)
    sp.add_argument("--eps0", type=float, default=0.025)
    sp.add_argument("--tau0", type=float, default=0.1)
    sp.add_argument("--eps-steps", type=int, default=9)
    sp.add_argument("--tau-steps", type=int, default=10)
    sp.add_argument("--norm", choices=("l2", "h1", "linf", "density_l1"), default="l2")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("regfun", help="sample F, f, f', f'' of a regularization")
    sp.add_argument("--kind", choices=KINDS, required=True)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--rho-max", type=float, required=True)
    sp.add_argument("--samples", type=int, default=201)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_regfun)

    sp = sub.add_parser("scenario2d", help="two-Gausson interaction presets")
    sp.add_argument("--case", choices=sorted(harness.SCENARIOS), required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--full", action="store_true", help="h = 1/16 and eps = 1e-12")
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--tau", type=float, default=1e-3)
    sp.add_argument("--eps", type=float, default=1e-6)
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--points", type=int, default=256)
    sp.set_defaults(func=cmd_scenario2d)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"logsplit: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"logsplit: error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationBlowupError, RegularizationDomainError, OSError, ValueError) as exc:
        print(f"logsplit: runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
