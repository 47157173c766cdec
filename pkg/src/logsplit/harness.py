"""Convergence sweeps, the eps x tau error table and 2D interaction scenarios.

Every sweep cell is an independent evolution from the same initial data, so
cells may run in worker processes; results are assembled in input order.
"""
from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import io
from . import observables as obs
from .analytic import GaussonSpec, gausson_field, superpose
from .config import RunConfig
from .grid import DomainSpec, Field
from .integrators import EvolveConfig, IntegrationBlowupError, SplitScheme, _Stepper, evolve, evolve_state
from .regularization import Regularization

PLATEAU_CHANGE = 0.05
TAU_REF_FLOOR = 1e-5
SWEEP_COLUMNS = ("err_l2", "err_h1", "err_linf", "err_density_l1", "energy_err")


# -- order fitting ----------------------------------------------------------

def _positive_pair(errors, params):
    errors = np.asarray(errors, dtype=float)
    params = np.asarray(params, dtype=float)
    if errors.shape != params.shape or errors.ndim != 1:
        raise ValueError("errors and params must be 1D arrays of the same length")
    if len(errors) < 2:
        raise ValueError("need at least two points to estimate an order")
    if np.any(errors <= 0) or np.any(params <= 0):
        raise ValueError("errors and params must be positive (a zero error marks a converged cell)")
    return errors, params


def observed_order(errors, params) -> float:
    """Least-squares slope of ``log(error)`` against ``log(param)``."""
    errors, params = _positive_pair(errors, params)
    return float(np.polyfit(np.log(params), np.log(errors), 1)[0])


def pairwise_rates(errors, params) -> np.ndarray:
    """``log(e_i/e_{i+1}) / log(p_i/p_{i+1})`` for consecutive entries."""
    errors, params = _positive_pair(errors, params)
    return np.log(errors[:-1] / errors[1:]) / np.log(params[:-1] / params[1:])


def plateau_mask(errors) -> np.ndarray:
    """True from the first entry whose change against its predecessor is below 5% onwards."""
    errors = np.asarray(errors, dtype=float)
    mask = np.zeros(len(errors), dtype=bool)
    for i in range(1, len(errors)):
        if abs(errors[i] - errors[i - 1]) < PLATEAU_CHANGE * abs(errors[i - 1]):
            mask[i:] = True
            break
    return mask


def fitted_order(errors, params, min_points: int = 3) -> float | None:
    """Observed order over the non-plateaued, positive entries; ``None`` if fewer than ``min_points`` remain."""
    errors = np.asarray(errors, dtype=float)
    params = np.asarray(params, dtype=float)
    keep = ~plateau_mask(errors) & (errors > 0)
    if keep.sum() < min_points:
        return None
    return observed_order(errors[keep], params[keep])


# -- results ----------------------------------------------------------------

@dataclass
class SweepResult:
    """Errors of a one-parameter sweep; ``orders`` holds a fitted order per error column."""

    param_name: str
    param_values: np.ndarray
    errors: dict[str, np.ndarray]
    orders: dict[str, float | None]
    fit_column: str
    metadata: dict[str, Any] = field(default_factory=dict)
    mass_drift: np.ndarray | None = None

    @property
    def fitted_order(self) -> float | None:
        return self.orders.get(self.fit_column)

    def rows(self):
        fo = self.fitted_order
        for i, p in enumerate(self.param_values):
            yield [self.param_name, p, *(self.errors[c][i] for c in SWEEP_COLUMNS),
                   math.nan if fo is None else fo]


@dataclass
class TableResult:
    """Errors on the ``eps_i = eps0/4^i`` by ``tau_j = tau0/2^j`` ladder, plus per-row pairwise rates."""

    epsilons: np.ndarray
    taus: np.ndarray
    matrix: np.ndarray
    rates: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)
    mass_drift: np.ndarray | None = None

    def diagonal(self) -> list[tuple[int, int]]:
        """Cells with ``tau^2 ~ eps`` on this ladder: row ``i`` pairs with column ``i + 1``."""
        return [(i, i + 1) for i in range(len(self.epsilons)) if i + 1 < len(self.taus)]

    def diagonal_rates(self) -> np.ndarray:
        return np.array([self.rates[i, j] for i, j in self.diagonal()])

    def rows(self):
        for i, eps in enumerate(self.epsilons):
            row = [eps]
            for j in range(len(self.taus)):
                row += [self.matrix[i, j], self.rates[i, j]]
            yield row

    def header(self) -> list[str]:
        h = ["eps"]
        for tau in self.taus:
            t = io.format_number(tau)
            h += [f"tau={t}", f"rate@tau={t}"]
        return h


# -- workers ----------------------------------------------------------------

def resolve_workers(workers: int | None = None) -> int:
    env = os.environ.get("LOGSPLIT_WORKERS")
    if env:
        return max(1, int(env))
    if workers is not None:
        return max(1, int(workers))
    return os.cpu_count() or 1


def _map(fn: Callable, jobs: Sequence, workers: int | None) -> list:
    n = min(resolve_workers(workers), len(jobs))
    if n <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, jobs))


# -- single runs -------------------------------------------------------------

def initial_field(cfg: RunConfig) -> Field:
    if len(cfg.initial) == 1:
        return gausson_field(cfg.initial[0], cfg.domain, 0.0)
    return superpose(cfg.initial, cfg.domain, 0.0)


def oracle_for(cfg: RunConfig) -> Callable[[float], Field] | None:
    if not cfg.has_oracle:
        return None
    spec, domain = cfg.initial[0], cfg.domain
    return lambda t: gausson_field(spec, domain, t)


def _initial_series(f0: Field, cfg: RunConfig, oracle) -> obs.ObservableSeries:
    ee = [obs.energy(f0, cfg.lam, Regularization.exact())] if "energy_exact" in cfg.observers else None
    errors = {}
    if "errors" in cfg.observers:
        errors = {k: [v] for k, v in zip(obs.ERROR_COLUMNS, obs.error_norms(oracle(0.0), f0))}
    return obs.ObservableSeries([0.0], [obs.mass(f0)], [obs.energy(f0, cfg.lam, cfg.reg)], ee, errors)


def run(cfg: RunConfig) -> tuple[Field, obs.ObservableSeries]:
    """One evolution with observables every ``cfg.record_every`` steps (always including ``t=0``)."""
    f0 = initial_field(cfg)
    oracle = oracle_for(cfg) if "errors" in cfg.observers else None
    if cfg.steps == 0:
        return f0, _initial_series(f0, cfg, oracle)
    return evolve(f0, cfg.evolve_config(), cfg.observers, cfg.record_every, oracle)


def _base_metadata(cfg: RunConfig, **extra) -> dict[str, Any]:
    meta = {
        "scheme": cfg.scheme.value,
        "reg_kind": cfg.reg.kind,
        "n": cfg.reg.n,
        "epsilon": cfg.reg.epsilon,
        "lambda": cfg.lam,
        "grid": {"lower": cfg.domain.lower, "upper": cfg.domain.upper, "points": cfg.domain.points},
        "T": cfg.T,
    }
    meta.update(extra)
    return meta


# -- tau sweep ---------------------------------------------------------------

@dataclass(frozen=True)
class _TauCell:
    f0: Field
    cfg: EvolveConfig
    reference: Field


def _tau_cell(job: _TauCell) -> tuple[obs.ErrorNorms, float, float]:
    final, series = evolve(job.f0, job.cfg, ("mass", "energy"), record_every=1)
    return obs.error_norms(job.reference, final), series.max_energy_drift(), series.max_mass_drift()


def _check_divides(T: float, tau: float, name: str = "tau") -> int:
    steps = T / tau
    if abs(steps - round(steps)) > 1e-12 * max(1.0, steps):
        raise ValueError(f"{name}={tau} does not divide T={T}")
    return int(round(steps))


def default_tau_ref(taus) -> float:
    return max(min(taus) / 100.0, TAU_REF_FLOOR)


def fine_reference(cfg: RunConfig, tau_ref: float) -> Field:
    """Same-eps Strang solution with a small step; stands in for the exact regularized solution."""
    steps = _check_divides(cfg.T, tau_ref, "tau_ref")
    ecfg = EvolveConfig(tau_ref, steps, cfg.lam, cfg.reg, SplitScheme.STRANG_BAB)
    return evolve_state(initial_field(cfg), ecfg)


def converge_in_tau(
    base: RunConfig,
    taus: Sequence[float],
    reference: str = "fine",
    tau_ref: float | None = None,
    reference_state: Field | None = None,
    fit_column: str = "err_h1",
    workers: int | None = None,
) -> SweepResult:
    """Errors at ``T`` for each step size against either a fine same-eps solve or the analytic Gausson.

    The ``energy_err`` column holds the largest deviation of the regularized
    energy from its initial value along the run.
    """
    taus = np.asarray(taus, dtype=float)
    for tau in taus:
        _check_divides(base.T, tau)
    if reference not in ("fine", "analytic"):
        raise ValueError("reference must be 'fine' or 'analytic'")
    f0 = initial_field(base)
    meta_ref: dict[str, Any] = {"reference": reference}
    if reference_state is not None:
        ref = reference_state
        meta_ref["tau_ref"] = tau_ref
    elif reference == "fine":
        tau_ref = default_tau_ref(taus) if tau_ref is None else tau_ref
        ref = fine_reference(base, tau_ref)
        meta_ref["tau_ref"] = tau_ref
    else:
        if not base.has_oracle:
            raise ValueError("analytic reference needs a single Gausson with lambda < 0")
        ref = oracle_for(base)(base.T)

    jobs = [_TauCell(f0, base.evolve_config(tau=float(t)), ref) for t in taus]
    results = _map(_tau_cell, jobs, workers)
    errors = {c: np.array([r[0][i] for r in results]) for i, c in enumerate(obs.ERROR_COLUMNS)}
    errors["energy_err"] = np.array([r[1] for r in results])
    orders = {c: fitted_order(v, taus) for c, v in errors.items()}
    return SweepResult(
        "tau", taus, errors, orders, fit_column,
        _base_metadata(base, fit_norm=fit_column, **meta_ref,
                       energy_err="max_k |E_reg(u^k) - E_reg(u^0)|", mass_drift="max over steps"),
        mass_drift=np.array([r[2] for r in results]),
    )


# -- eps sweep ---------------------------------------------------------------

@dataclass(frozen=True)
class _EpsCell:
    f0: Field
    cfg: EvolveConfig
    exact: Field


def _endpoint_mass_drift(f0: Field, final: Field) -> float:
    return abs(obs.mass(final) / obs.mass(f0) - 1.0)


def _eps_cell(job: _EpsCell) -> tuple[obs.ErrorNorms, float, float]:
    final = evolve_state(job.f0, job.cfg)
    return (obs.error_norms(job.exact, final), obs.energy_error(job.f0, job.cfg.lam, job.cfg.reg),
            _endpoint_mass_drift(job.f0, final))


def converge_in_eps(
    base: RunConfig,
    epsilons: Sequence[float],
    tau: float = 1e-4,
    fit_column: str = "err_l2",
    workers: int | None = None,
) -> SweepResult:
    """Distance between the regularized solution (small-step Strang) and the analytic Gausson at ``T``."""
    if not base.has_oracle:
        raise ValueError("eps sweeps compare against the analytic Gausson; use a single Gausson")
    epsilons = np.asarray(epsilons, dtype=float)
    steps = _check_divides(base.T, tau)
    f0 = initial_field(base)
    exact = oracle_for(base)(base.T)
    jobs = [
        _EpsCell(f0, EvolveConfig(tau, steps, base.lam, dataclasses.replace(base.reg, epsilon=float(e)),
                                  SplitScheme.STRANG_BAB), exact)
        for e in epsilons
    ]
    results = _map(_eps_cell, jobs, workers)
    errors = {c: np.array([r[0][i] for r in results]) for i, c in enumerate(obs.ERROR_COLUMNS)}
    errors["energy_err"] = np.array([r[1] for r in results])
    # plateau trimming is for tau ladders; eps fits use every point
    orders = {c: (observed_order(v, epsilons) if len(v) >= 3 and np.all(v > 0) else None)
              for c, v in errors.items()}
    return SweepResult(
        "epsilon", epsilons, errors, orders, fit_column,
        _base_metadata(base, fit_norm=fit_column, reference="analytic", tau=tau, scheme_used="strang_bab",
                       energy_err="|E(u0) - E_reg(u0)|", mass_drift="endpoint"),
        mass_drift=np.array([r[2] for r in results]),
    )


# -- eps x tau table ---------------------------------------------------------

@dataclass(frozen=True)
class _TableCell:
    f0: Field
    cfg: EvolveConfig
    exact: Field
    norm: str


def _table_cell(job: _TableCell) -> tuple[float, float]:
    final = evolve_state(job.f0, job.cfg)
    return getattr(obs.error_norms(job.exact, final), job.norm), _endpoint_mass_drift(job.f0, final)


def table_eps_tau(
    base: RunConfig,
    eps0: float = 0.025,
    tau0: float = 0.1,
    eps_steps: int = 9,
    tau_steps: int = 10,
    norm: str = "l2",
    workers: int | None = None,
) -> TableResult:
    """``||u(T) - u^{eps,k}||`` against the analytic Gausson on geometric eps/tau ladders."""
    if not base.has_oracle:
        raise ValueError("the table compares against the analytic Gausson; use a single Gausson")
    if norm not in obs.ErrorNorms._fields:
        raise ValueError(f"norm must be one of {obs.ErrorNorms._fields}")
    epsilons = eps0 / 4.0 ** np.arange(eps_steps)
    taus = tau0 / 2.0 ** np.arange(tau_steps)
    for t in taus:
        _check_divides(base.T, t)
    f0 = initial_field(base)
    exact = oracle_for(base)(base.T)
    jobs = [
        _TableCell(f0, EvolveConfig(float(t), int(round(base.T / t)), base.lam,
                                    dataclasses.replace(base.reg, epsilon=float(e)), base.scheme),
                   exact, norm)
        for e in epsilons for t in taus
    ]
    cells = np.array(_map(_table_cell, jobs, workers))
    matrix = cells[:, 0].reshape(eps_steps, tau_steps)
    rates = np.full_like(matrix, np.nan)
    for i in range(eps_steps):
        if tau_steps > 1:
            rates[i, 1:] = pairwise_rates(matrix[i], taus)
    table = TableResult(epsilons, taus, matrix, rates, mass_drift=cells[:, 1].reshape(eps_steps, tau_steps))
    table.metadata = _base_metadata(
        base, norm=norm, reference="analytic Gausson (LogSE)",
        diagonal="bold cells tau^2 ~ eps: row i, column i+1", diagonal_cells=table.diagonal(),
    )
    return table


# -- 2D interaction scenarios -------------------------------------------------

_B = math.pi ** -0.25

SCENARIOS: dict[str, dict[str, Any]] = {
    "i": {
        "gaussons": [dict(b=_B, v=(0.0, 0.0), x0=(-2.0, 0.0)), dict(b=_B, v=(0.0, 0.0), x0=(2.0, 0.0))],
        "half_width": 16.0,
    },
    "ii": {
        "gaussons": [dict(b=_B, v=(-0.15, 0.0), x0=(0.0, 0.0)), dict(b=_B / 1.5, v=(0.0, 0.0), x0=(5.0, 0.0))],
        "half_width": 16.0,
    },
    "iii": {
        "gaussons": [dict(b=_B, v=(0.0, 0.0), x0=(-2.0, 0.0)), dict(b=_B, v=(0.0, 0.85), x0=(2.0, 0.0))],
        "half_width": 48.0,
    },
}


@dataclass
class ScenarioResult:
    case: str
    final: Field
    times: np.ndarray
    mass: np.ndarray
    momentum: np.ndarray
    mirror_error: np.ndarray
    files: list[Path]
    config: dict[str, Any]

    @property
    def mass_drift(self) -> float:
        return float(np.max(np.abs(self.mass - self.mass[0])) / self.mass[0])

    @property
    def momentum_drift(self) -> float:
        return float(np.max(np.abs(self.momentum - self.momentum[0])))

    @property
    def max_mirror_error(self) -> float:
        return float(np.max(self.mirror_error))


def mirror_x_error(f: Field) -> float:
    """``max |rho(x, y) - rho(-x, y)|``; node ``i`` mirrors to ``-i mod N`` on a symmetric box."""
    rho = f.density
    mirrored = np.roll(rho[::-1], 1, axis=0)
    return float(np.max(np.abs(rho - mirrored)))


def scenario_2d(
    case: str,
    out_dir=None,
    full: bool = False,
    T: float = 1.0,
    tau: float = 1e-3,
    epsilon: float = 1e-6,
    n: int = 4,
    points: int = 256,
    snapshot_times: Sequence[float] | None = None,
    record_every: int = 10,
) -> ScenarioResult:
    """Two-Gausson interaction with Strang splitting.

    Desk scale uses ``points`` nodes per axis; ``full=True`` switches to the
    mesh size ``h = 1/16`` and ``eps = 1e-12``.  Density snapshots are written as
    CSV to ``out_dir`` when it is given.
    """
    if case not in SCENARIOS:
        raise ValueError(f"case must be one of {sorted(SCENARIOS)}")
    preset = SCENARIOS[case]
    hw = preset["half_width"]
    if full:
        points, epsilon = int(round(2 * hw * 16)), 1e-12
    domain = DomainSpec((-hw, -hw), (hw, hw), (points, points))
    lam = -1.0
    specs = [GaussonSpec(lam=lam, **g) for g in preset["gaussons"]]
    reg = Regularization.local(n, epsilon)
    steps = _check_divides(T, tau)
    snapshot_times = [0.0, T / 2, T] if snapshot_times is None else list(snapshot_times)
    snap_steps = {int(round(t / tau)): t for t in snapshot_times}

    f = superpose(specs, domain)
    stepper = _Stepper(domain, lam, reg)
    u = np.array(f.values)
    times, masses, moms, mirror = [], [], [], []
    files: list[Path] = []
    out = Path(out_dir) if out_dir is not None else None

    def record(k: int) -> None:
        cur = Field(domain, u)
        times.append(k * tau)
        masses.append(obs.mass(cur))
        moms.append(obs.momentum(cur))
        mirror.append(mirror_x_error(cur))

    def snapshot(k: int) -> None:
        if out is not None and k in snap_steps:
            name = f"snapshot_t{io.format_number(k * tau)}.csv"
            files.append(io.write_field(out / name, Field(domain, u)))

    record(0)
    snapshot(0)
    for k in range(1, steps + 1):
        u = stepper.step(u, tau, SplitScheme.STRANG_BAB)
        if not np.isfinite(np.max(np.abs(u))):
            raise IntegrationBlowupError(k)
        if k % record_every == 0 or k == steps:
            record(k)
        snapshot(k)

    config = {
        "case": case, "full": full, "T": T, "tau": tau, "epsilon": epsilon, "n": n,
        "lower": domain.lower, "upper": domain.upper, "points": domain.points, "lambda": lam,
        "gaussons": [{"b": s.b, "v": list(s.v), "x0": list(s.x0)} for s in specs],
    }
    result = ScenarioResult(case, Field(domain, u), np.array(times), np.array(masses), np.array(moms),
                            np.array(mirror), files, config)
    if out is not None:
        cols = {"t": result.times, "mass": result.mass}
        for j, axis in enumerate("xy"):
            cols[f"momentum_{axis}"] = result.momentum[:, j]
        cols["mirror_x_error"] = result.mirror_error
        files.append(io.write_columns(out / "series.csv", cols))
        files.append(io.write_meta(out, config, scenario=case,
                                   mass_drift=result.mass_drift, momentum_drift=result.momentum_drift,
                                   max_mirror_error=result.max_mirror_error))
    return result
