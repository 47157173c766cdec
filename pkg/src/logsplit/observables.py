"""Mass, energy and the error functionals used to compare solutions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .grid import Field, gradient_norm_sq, wavenumber_mesh, norm_h1, norm_l1, norm_l2, norm_linf, trapezoid_integral
from .regularization import Regularization, big_f

ERROR_COLUMNS = ("err_l2", "err_h1", "err_linf", "err_density_l1")


class ErrorNorms(NamedTuple):
    l2: float
    h1: float
    linf: float
    density_l1: float


def mass(f: Field) -> float:
    return norm_l2(f) ** 2


def momentum(f: Field) -> np.ndarray:
    """``Im int conj(u) grad u``, one entry per axis, via Parseval."""
    d = f.domain
    power = np.abs(np.fft.fftn(f.values)) ** 2
    scale = d.cell_volume / np.prod(d.points)
    return np.array([scale * np.sum(k * power) for k in wavenumber_mesh(d)])


def kinetic_energy(f: Field) -> float:
    return gradient_norm_sq(f)


def potential_energy(f: Field, lam: float, reg: Regularization) -> float:
    return lam * trapezoid_integral(big_f(reg, f.density), f.domain)


def energy(f: Field, lam: float, reg: Regularization) -> float:
    """``int |grad u|^2 + lam F_reg(|u|^2)``; ``reg = Regularization.exact()`` gives the LogSE energy."""
    return kinetic_energy(f) + potential_energy(f, lam, reg)


def energy_error(f0: Field, lam: float, reg: Regularization) -> float:
    """``|E(u0) - E_reg(u0)|``.  The kinetic parts cancel exactly."""
    if reg.kind == "exact_log":
        return 0.0
    diff = big_f(Regularization.exact(), f0.density) - big_f(reg, f0.density)
    return abs(lam * trapezoid_integral(diff, f0.domain))


def error_norms(a: Field, b: Field) -> ErrorNorms:
    if a.domain != b.domain:
        raise ValueError("fields live on different domains")
    d = a - b
    drho = Field(a.domain, a.density - b.density)
    return ErrorNorms(norm_l2(d), norm_h1(d), norm_linf(d), norm_l1(drho))


@dataclass
class ObservableSeries:
    """Observables sampled along a trajectory.

    ``errors`` maps the names in ``ERROR_COLUMNS`` to arrays and is empty
    when no oracle was supplied.
    """

    times: np.ndarray
    mass: np.ndarray
    energy: np.ndarray
    energy_exact: np.ndarray | None = None
    errors: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.mass = np.asarray(self.mass, dtype=float)
        self.energy = np.asarray(self.energy, dtype=float)
        n = len(self.times)
        cols = [self.mass, self.energy]
        if self.energy_exact is not None:
            self.energy_exact = np.asarray(self.energy_exact, dtype=float)
            cols.append(self.energy_exact)
        self.errors = {k: np.asarray(v, dtype=float) for k, v in self.errors.items()}
        cols.extend(self.errors.values())
        if any(len(c) != n for c in cols):
            raise ValueError("all observable columns must have the same length")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    @classmethod
    def empty(cls) -> "ObservableSeries":
        return cls(np.empty(0), np.empty(0), np.empty(0))

    def columns(self) -> dict[str, np.ndarray]:
        """Columns in ``series.csv`` order."""
        out = {"t": self.times, "mass": self.mass, "energy_reg": self.energy}
        if self.energy_exact is not None:
            out["energy_exact"] = self.energy_exact
        for name in ERROR_COLUMNS:
            if name in self.errors:
                out[name] = self.errors[name]
        return out

    def max_mass_drift(self) -> float:
        """Largest relative deviation of the mass from its first sample."""
        if len(self) == 0:
            return 0.0
        return float(np.max(np.abs(self.mass - self.mass[0])) / self.mass[0])

    def max_energy_drift(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.max(np.abs(self.energy - self.energy[0])))
