"""Periodic uniform grids, FFT helpers and discrete norms.

DFT convention: unnormalized forward transform, ``1/prod(N)`` on the
inverse (numpy's default).  The grid excludes the upper box edge, so the
scaled sum ``prod(h) * sum(g)`` is the exact periodic trapezoidal rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class DomainSpec:
    """Box ``prod_j [lower[j], upper[j])`` sampled with ``points[j]`` nodes per axis."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    points: tuple[int, ...]

    def __post_init__(self):
        lower = tuple(float(a) for a in np.atleast_1d(self.lower))
        upper = tuple(float(b) for b in np.atleast_1d(self.upper))
        points = tuple(int(n) for n in np.atleast_1d(self.points))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "points", points)
        if not (len(lower) == len(upper) == len(points)):
            raise ValueError("lower, upper and points must have the same length")
        if len(points) not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {len(points)}")
        for j, (a, b, n) in enumerate(zip(lower, upper, points)):
            if not b > a:
                raise ValueError(f"upper[{j}]={b} must exceed lower[{j}]={a}")
            if n < 4 or n % 2:
                raise ValueError(f"points[{j}]={n} must be even and >= 4")

    @classmethod
    def cube(cls, dim: int = 1, half_width: float = 16.0, h: float = 1 / 64) -> "DomainSpec":
        """``[-half_width, half_width]^dim`` with mesh size ``h``."""
        n = int(round(2 * half_width / h))
        return cls((-half_width,) * dim, (half_width,) * dim, (n,) * dim)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    def axis_nodes(self, axis: int) -> np.ndarray:
        _check_axis(self, axis)
        return self.lower[axis] + np.arange(self.points[axis]) * self.spacing[axis]

    def mesh(self) -> list[np.ndarray]:
        """Coordinate arrays, one per axis, each of shape ``self.shape``."""
        return np.meshgrid(*(self.axis_nodes(j) for j in range(self.dim)), indexing="ij")


def _check_axis(domain: DomainSpec, axis: int) -> None:
    if not 0 <= axis < domain.dim:
        raise ValueError(f"axis {axis} out of range for dim={domain.dim}")


@dataclass(frozen=True, eq=False)
class Field:
    """Complex grid function on ``domain``; ``values`` has shape ``domain.shape``."""

    domain: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.size != int(np.prod(self.domain.points)):
            raise ValueError(
                f"values has {values.size} entries, domain needs {int(np.prod(self.domain.points))}"
            )
        values = values.reshape(self.domain.shape)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.domain, values)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def __sub__(self, other: "Field") -> "Field":
        _check_same_domain(self, other)
        return Field(self.domain, self.values - other.values)

    def __add__(self, other: "Field") -> "Field":
        _check_same_domain(self, other)
        return Field(self.domain, self.values + other.values)

    def __mul__(self, c: complex) -> "Field":
        return Field(self.domain, c * self.values)

    __rmul__ = __mul__


def _check_same_domain(a: Field, b: Field) -> None:
    if a.domain != b.domain:
        raise ValueError("fields live on different domains")


def wavenumbers(domain: DomainSpec, axis: int) -> np.ndarray:
    """Signed DFT wavenumbers ``2*pi*m/L`` in FFT order for ``axis``."""
    _check_axis(domain, axis)
    n = domain.points[axis]
    return 2 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / domain.lengths[axis]


def wavenumber_mesh(domain: DomainSpec) -> list[np.ndarray]:
    ks = [wavenumbers(domain, j) for j in range(domain.dim)]
    return np.meshgrid(*ks, indexing="ij")


def laplacian_symbol(domain: DomainSpec) -> np.ndarray:
    """``|k|^2`` on the FFT grid (the negative Laplacian's Fourier multiplier)."""
    return sum(k**2 for k in wavenumber_mesh(domain))


def sample(domain: DomainSpec, fn: Callable[..., np.ndarray]) -> Field:
    """Evaluate ``fn(*coords)`` on the grid; ``fn`` receives one array per axis."""
    values = np.broadcast_to(np.asarray(fn(*domain.mesh()), dtype=np.complex128), domain.shape)
    return Field(domain, values.copy())


def spectral_derivative(f: Field, axis: int) -> Field:
    _check_axis(f.domain, axis)
    shape = [1] * f.domain.dim
    shape[axis] = -1
    ik = 1j * wavenumbers(f.domain, axis).reshape(shape)
    return f.with_values(np.fft.ifftn(ik * np.fft.fftn(f.values)))


def norm_l2(f: Field) -> float:
    return float(np.sqrt(f.domain.cell_volume * np.sum(np.abs(f.values) ** 2)))


def norm_l1(f: Field) -> float:
    return float(f.domain.cell_volume * np.sum(np.abs(f.values)))


def norm_linf(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def gradient_norm_sq(f: Field) -> float:
    """``sum_axes ||d_j f||^2`` evaluated in Fourier space (Parseval)."""
    d = f.domain
    coeffs = np.abs(np.fft.fftn(f.values)) ** 2
    return float(d.cell_volume * np.sum(laplacian_symbol(d) * coeffs) / np.prod(d.points))


def norm_h1(f: Field) -> float:
    return float(np.sqrt(norm_l2(f) ** 2 + gradient_norm_sq(f)))


def norm_l2_weighted(f: Field, alpha: float) -> float:
    """Discrete ``|| <x>^alpha f ||`` with ``<x> = sqrt(1 + |x|^2)``."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    r2 = sum(x**2 for x in f.domain.mesh())
    weight = (1.0 + r2) ** alpha
    return float(np.sqrt(f.domain.cell_volume * np.sum(weight * np.abs(f.values) ** 2)))


def trapezoid_integral(g: np.ndarray, domain: DomainSpec) -> float:
    g = np.asarray(g)
    if g.size != int(np.prod(domain.points)):
        raise ValueError("array size does not match domain")
    return float(domain.cell_volume * np.sum(g))


def nearest_index(domain: DomainSpec, x: Sequence[float]) -> tuple[int, ...]:
    """Grid index closest to ``x`` under periodic identification."""
    idx = []
    for j, xj in enumerate(np.atleast_1d(x)):
        m = int(np.round((xj - domain.lower[j]) / domain.spacing[j])) % domain.points[j]
        idx.append(m)
    return tuple(idx)
