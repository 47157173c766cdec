"""Run configuration: JSON parsing, validation and canonical emission.

A config file is a JSON object.  Every key is optional; ``{}`` resolves to
the reference 1D setup (Gausson with ``lambda=-1``, ``v=1`` on
``[-16, 16]`` with ``h=1/64``, ``local_energy`` with ``n=2``,
``eps=0.025``, Strang splitting, ``tau=0.1``, ``T=3``).

Recognised keys::

    dim, lower, upper, h | points, lambda,
    reg: {kind, n, epsilon}, scheme, tau, T,
    initial: [{b, v, x0}, ...],  observers, record_every, out

``lower``/``upper``/``h``/``points`` may be scalars (applied to every axis)
or per-axis lists.  ``initial`` entries default to the unit-mass Gausson.
Only a single Gausson with ``lambda < 0`` has an analytic reference, so the
``errors`` observer is restricted to that case.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .analytic import GaussonSpec
from .grid import DomainSpec
from .integrators import OBSERVERS, EvolveConfig, SplitScheme
from .regularization import KINDS, Regularization

TOP_KEYS = {
    "dim", "lower", "upper", "h", "points", "lambda", "reg", "scheme", "tau", "T",
    "initial", "observers", "record_every", "out",
}
REG_KEYS = {"kind", "n", "epsilon"}
GAUSSON_KEYS = {"b", "v", "x0"}
STEP_TOLERANCE = 1e-12


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    domain: DomainSpec = field(default_factory=lambda: DomainSpec.cube(1))
    lam: float = -1.0
    reg: Regularization = field(default_factory=Regularization)
    scheme: SplitScheme = SplitScheme.STRANG_BAB
    tau: float = 0.1
    T: float = 3.0
    initial: tuple[GaussonSpec, ...] = ()
    observers: tuple[str, ...] = ("mass", "energy", "energy_exact", "errors")
    record_every: int = 1
    out: str = "out"

    def __post_init__(self):
        if not self.initial:
            object.__setattr__(
                self, "initial", (GaussonSpec.unit_mass(self.domain.dim, self.lam if self.lam < 0 else -1.0),)
            )
        for g in self.initial:
            if g.dim != self.domain.dim:
                raise ConfigError(f"initial: Gausson dimension {g.dim} does not match dim={self.domain.dim}")
            if self.lam < 0 and g.lam != self.lam:
                raise ConfigError("initial: Gausson lambda must equal the run lambda")
        if "errors" in self.observers and not self.has_oracle:
            raise ConfigError("observers: 'errors' needs a single-Gausson initial state with lambda < 0")
        if not self.tau > 0:
            raise ConfigError(f"tau: must be positive, got {self.tau}")
        if not self.T >= 0:
            raise ConfigError(f"T: must be non-negative, got {self.T}")
        steps = self.T / self.tau
        if abs(steps - round(steps)) > STEP_TOLERANCE * max(1.0, steps):
            raise ConfigError(f"T/tau not integral: T={self.T}, tau={self.tau}")
        if self.record_every < 1:
            raise ConfigError("record_every: must be >= 1")
        bad = set(self.observers) - set(OBSERVERS)
        if bad:
            raise ConfigError(f"observers: unknown {sorted(bad)}")

    @property
    def steps(self) -> int:
        return int(round(self.T / self.tau))

    @property
    def has_oracle(self) -> bool:
        """A single Gausson evolves exactly, so its analytic form is a reference solution."""
        return len(self.initial) == 1 and self.initial[0].lam == self.lam

    def evolve_config(self, tau: float | None = None, scheme: SplitScheme | None = None,
                      reg: Regularization | None = None) -> EvolveConfig:
        tau = self.tau if tau is None else tau
        return EvolveConfig(
            tau=tau,
            steps=int(round(self.T / tau)),
            lam=self.lam,
            reg=self.reg if reg is None else reg,
            scheme=self.scheme if scheme is None else scheme,
        )

    def to_dict(self) -> dict[str, Any]:
        d = self.domain
        return {
            "dim": d.dim,
            "lower": list(d.lower),
            "upper": list(d.upper),
            "points": list(d.points),
            "lambda": self.lam,
            "reg": {"kind": self.reg.kind, "n": self.reg.n, "epsilon": self.reg.epsilon},
            "scheme": self.scheme.value,
            "tau": self.tau,
            "T": self.T,
            "initial": [{"b": g.b, "v": list(g.v), "x0": list(g.x0)} for g in self.initial],
            "observers": list(self.observers),
            "record_every": self.record_every,
            "out": self.out,
        }


def _per_axis(value, dim: int, name: str) -> list:
    if isinstance(value, (list, tuple)):
        if len(value) != dim:
            raise ConfigError(f"{name}: expected {dim} entries, got {len(value)}")
        return list(value)
    return [value] * dim


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(unknown)}")


def config_from_dict(raw: dict[str, Any]) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(raw, TOP_KEYS, "config")
    try:
        dim = int(raw.get("dim", 1))
        if dim not in (1, 2):
            raise ConfigError(f"dim: must be 1 or 2, got {dim}")
        lower = _per_axis(raw.get("lower", -16.0), dim, "lower")
        upper = _per_axis(raw.get("upper", 16.0), dim, "upper")
        if "h" in raw and "points" in raw:
            raise ConfigError("give either h or points, not both")
        if "points" in raw:
            points = [int(p) for p in _per_axis(raw["points"], dim, "points")]
        else:
            hs = _per_axis(raw.get("h", 1 / 64), dim, "h")
            points = []
            for a, b, h in zip(lower, upper, hs):
                n = (b - a) / h
                if abs(n - round(n)) > 1e-9 * n:
                    raise ConfigError(f"h: box length {b - a} is not a multiple of h={h}")
                points.append(int(round(n)))
        try:
            domain = DomainSpec(tuple(lower), tuple(upper), tuple(points))
        except ValueError as exc:
            raise ConfigError(f"domain: {exc}") from None

        lam = float(raw.get("lambda", -1.0))
        if lam == 0:
            raise ConfigError("lambda: must be nonzero")

        reg_raw = raw.get("reg", {})
        if not isinstance(reg_raw, dict):
            raise ConfigError("reg: must be an object")
        _check_keys(reg_raw, REG_KEYS, "reg")
        kind = reg_raw.get("kind", "local_energy")
        if kind not in KINDS:
            raise ConfigError(f"reg.kind: must be one of {KINDS}, got {kind!r}")
        n = reg_raw.get("n", 2)
        if kind == "local_energy" and (int(n) != n or n < 2):
            raise ConfigError("reg.n: n must be ≥ 2")
        eps = float(reg_raw.get("epsilon", 0.025))
        if kind != "exact_log" and not 0 < eps <= 1:
            raise ConfigError(f"reg.epsilon: must satisfy 0 < epsilon <= 1, got {eps}")
        reg = Regularization(kind, eps, int(n))

        try:
            scheme = SplitScheme(raw.get("scheme", "strang_bab"))
        except ValueError:
            raise ConfigError(
                f"scheme: must be one of {[s.value for s in SplitScheme]}, got {raw.get('scheme')!r}"
            ) from None

        initial = []
        init_raw = raw.get("initial", [])
        if isinstance(init_raw, dict):
            init_raw = [init_raw]
        # for lambda > 0 there is no Gausson; the profile with width lambda = -1 is used as plain initial data
        shape_lam = lam if lam < 0 else -1.0
        for i, g in enumerate(init_raw):
            _check_keys(g, GAUSSON_KEYS, f"initial[{i}]")
            b = float(g.get("b", (-shape_lam * math.pi) ** (-dim / 4)))
            v = [float(c) for c in _per_axis(g.get("v", 1.0), dim, f"initial[{i}].v")]
            x0 = [float(c) for c in _per_axis(g.get("x0", 0.0), dim, f"initial[{i}].x0")]
            try:
                initial.append(GaussonSpec(lam=shape_lam, b=b, v=tuple(v), x0=tuple(x0)))
            except ValueError as exc:
                raise ConfigError(f"initial[{i}]: {exc}") from None

        observers = raw.get("observers")
        if observers is None:
            observers = ["mass", "energy", "energy_exact"]
            if len(initial) <= 1 and lam < 0:
                observers.append("errors")
        return RunConfig(
            domain=domain,
            lam=lam,
            reg=reg,
            scheme=scheme,
            tau=float(raw.get("tau", 0.1)),
            T=float(raw.get("T", 3.0)),
            initial=tuple(initial),
            observers=tuple(observers),
            record_every=int(raw.get("record_every", 1)),
            out=str(raw.get("out", "out")),
        )
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"malformed config: {exc}") from None


def parse_config(path) -> RunConfig:
    """Load a config file.  A ``meta.json`` written by the CLI is accepted too (its ``config`` entry is used)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if isinstance(raw, dict) and "config" in raw and "conventions" in raw:
        raw = raw["config"]
    return config_from_dict(raw)


def emit_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)
