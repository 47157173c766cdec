"""Exact moving-Gausson solutions of the logarithmic Schrödinger equation.

For ``lambda < 0`` the LogSE ``i u_t = -Lap u + lambda u ln|u|^2`` admits

    u(x, t) = b exp(i(x.v - (a + |v|^2) t) + (lambda/2) |x - x0 - 2 v t|^2),
    a = -lambda (d - ln b^2),

a Gaussian that translates rigidly at speed ``2v``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import DomainSpec, Field

TAIL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GaussonSpec:
    lam: float = -1.0
    b: float = math.pi ** -0.25
    v: tuple[float, ...] = (1.0,)
    x0: tuple[float, ...] = field(default=None)

    def __post_init__(self):
        v = tuple(float(c) for c in np.atleast_1d(self.v))
        x0 = (0.0,) * len(v) if self.x0 is None else tuple(float(c) for c in np.atleast_1d(self.x0))
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "x0", x0)
        if len(v) != len(x0):
            raise ValueError("v and x0 must have the same dimension")
        if not self.lam < 0:
            raise ValueError(f"lambda must be negative for a Gausson, got {self.lam}")
        if not self.b > 0:
            raise ValueError(f"amplitude b must be positive, got {self.b}")

    @classmethod
    def unit_mass(cls, dim: int = 1, lam: float = -1.0, v=None, x0=None) -> "GaussonSpec":
        """Gausson with ``b = (-lambda pi)^(-d/4)``, which has unit mass."""
        v = (1.0,) * dim if v is None else v
        return cls(lam=lam, b=(-lam * math.pi) ** (-dim / 4), v=v, x0=x0)

    @property
    def dim(self) -> int:
        return len(self.v)


def decay_constant(spec: GaussonSpec) -> float:
    return -spec.lam * (spec.dim - math.log(spec.b**2))


def gausson_value(spec: GaussonSpec, x: Sequence, t: float):
    """Evaluate at position ``x``; ``x`` is a sequence of per-axis scalars or arrays."""
    if spec.dim == 1 and (np.ndim(x) == 0 or isinstance(x, np.ndarray)):
        x = [x]
    x = [np.asarray(xj, dtype=float) for xj in x]
    if len(x) != spec.dim:
        raise ValueError(f"expected {spec.dim} coordinates, got {len(x)}")
    a = decay_constant(spec)
    v2 = sum(vj * vj for vj in spec.v)
    phase = sum(xj * vj for xj, vj in zip(x, spec.v)) - (a + v2) * t
    r2 = sum((xj - cj - 2 * vj * t) ** 2 for xj, cj, vj in zip(x, spec.x0, spec.v))
    return spec.b * np.exp(1j * phase + 0.5 * spec.lam * r2)


def tail_ratio(spec: GaussonSpec, domain: DomainSpec, t: float) -> float:
    """Largest ``|u|/b`` on the box faces (distance measured without wrapping)."""
    worst = 0.0
    for j in range(domain.dim):
        c = spec.x0[j] + 2 * spec.v[j] * t
        gap = min(c - domain.lower[j], domain.upper[j] - c)
        worst = max(worst, math.exp(0.5 * spec.lam * max(gap, 0.0) ** 2))
    return worst


def gausson_field(spec: GaussonSpec, domain: DomainSpec, t: float = 0.0) -> Field:
    if spec.dim != domain.dim:
        raise ValueError("Gausson and domain dimensions differ")
    ratio = tail_ratio(spec, domain, t)
    if ratio > TAIL_TOLERANCE:
        warnings.warn(
            f"Gausson tail reaches {ratio:.2e} of its peak at the box edge (t={t}); "
            "periodic wrap-around is ignored",
            stacklevel=2,
        )
    return Field(domain, gausson_value(spec, domain.mesh(), t))


def superpose(specs: Sequence[GaussonSpec], domain: DomainSpec, t: float = 0.0) -> Field:
    """Sum of Gaussons, as initial data; the sum is not a solution for ``t > 0``."""
    if t != 0:
        raise ValueError("a superposition of Gaussons is only meaningful as initial data (t=0)")
    if not specs:
        raise ValueError("need at least one Gausson")
    total = sum(gausson_field(s, domain, 0.0).values for s in specs)
    return Field(domain, total)
