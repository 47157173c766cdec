"""Logarithmic nonlinearity and its regularizations.

Four families are supported, each described by a :class:`Regularization`:

``exact_log``
    ``f(rho) = ln rho`` and ``F(rho) = rho ln rho - rho``.
``local_energy``
    ``F`` is replaced on ``rho < eps^2`` by the degree ``n+1`` polynomial
    ``rho * Q_n(rho)``, ``Q_n`` being the order-``n`` Taylor polynomial of
    ``ln rho - 1`` at ``eps^2``.  ``F`` stays ``C^n``; ``f = F'`` is untouched
    for ``rho >= eps^2``.
``sqrt_shift``
    ``f(rho) = 2 ln(eps + sqrt(rho))``.
``square_shift``
    ``f(rho) = ln(eps^2 + rho)``.

Every polynomial piece is evaluated in ``s = 1 - rho/eps^2`` by Horner's
rule.  At exactly ``rho = eps^2`` the logarithmic branch is used.

All functions accept scalars or numpy arrays and broadcast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

KINDS = ("exact_log", "local_energy", "sqrt_shift", "square_shift")


class RegularizationDomainError(ValueError):
    """Raised when a function is evaluated where it is singular (e.g. ``ln 0``)."""


@dataclass(frozen=True)
class Regularization:
    kind: str = "local_energy"
    epsilon: float = 0.025
    n: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regularization kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "exact_log" and not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must satisfy 0 < epsilon <= 1, got {self.epsilon}")
        if self.kind == "local_energy" and (int(self.n) != self.n or self.n < 2):
            raise ValueError(f"n must be >= 2, got {self.n}")

    @classmethod
    def exact(cls) -> "Regularization":
        return cls("exact_log", 1.0, 2)

    @classmethod
    def local(cls, n: int, epsilon: float) -> "Regularization":
        return cls("local_energy", epsilon, n)

    @classmethod
    def sqrt_shift(cls, epsilon: float) -> "Regularization":
        return cls("sqrt_shift", epsilon)

    @classmethod
    def square_shift(cls, epsilon: float) -> "Regularization":
        return cls("square_shift", epsilon)

    def label(self) -> str:
        if self.kind == "exact_log":
            return "exact_log"
        if self.kind == "local_energy":
            return f"local_energy(n={self.n}, eps={self.epsilon:g})"
        return f"{self.kind}(eps={self.epsilon:g})"


# -- Horner helpers -------------------------------------------------------

def _harmonic_series(s, m):
    """``sum_{k=1}^{m} s^k / k``."""
    acc = np.zeros_like(s)
    for k in range(m, 0, -1):
        acc = acc * s + 1.0 / k
    return acc * s


def _geometric_series(s, m):
    """``sum_{k=0}^{m-1} s^k``."""
    acc = np.zeros_like(s)
    for _ in range(m):
        acc = acc * s + 1.0
    return acc


def _weighted_series(s, m):
    """``sum_{k=0}^{m} (k+1) s^k`` (empty when ``m < 0``)."""
    acc = np.zeros_like(s)
    for k in range(m, -1, -1):
        acc = acc * s + (k + 1)
    return acc


def _as_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(np.isnan(rho)):
        raise ValueError("rho must be non-negative")
    return rho


def _unwrap(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _check_n_eps(n, eps):
    if int(n) != n or n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0 < eps <= 1:
        raise ValueError(f"eps must satisfy 0 < eps <= 1, got {eps}")


def _poly_range(rho, eps):
    rho = _as_rho(rho)
    if np.any(rho > eps**2):
        raise ValueError("rho must lie in [0, eps^2]")
    return rho


# -- Local energy building blocks ----------------------------------------

def q_poly(n: int, eps: float, rho):
    """Taylor polynomial of ``ln rho - 1`` of degree ``n`` at ``eps^2``, for ``0 <= rho <= eps^2``."""
    _check_n_eps(n, eps)
    rho = _poly_range(rho, eps)
    s = 1.0 - rho / eps**2
    return _unwrap(np.log(eps**2) - 1.0 - _harmonic_series(s, n))


def taylor_remainder(n: int, eps: float, rho: float) -> float:
    """``int_{eps^2}^{rho} (s - rho)^n / s^(n+1) ds`` by adaptive quadrature.

    Equals ``(ln rho - 1) - q_poly(n, eps, rho)``; ``-inf`` at ``rho = 0``.
    """
    _check_n_eps(n, eps)
    rho = float(_poly_range(rho, eps))
    if rho == 0.0:
        return -math.inf
    val, _ = integrate.quad(
        lambda s: (s - rho) ** n / s ** (n + 1), eps**2, rho, epsabs=0.0, epsrel=1e-13, limit=200
    )
    return val


def _s(rho, eps):
    # clipped so the polynomial branch stays bounded where np.where discards it
    return np.clip(1.0 - rho / eps**2, 0.0, 1.0)


def _local_f(n, eps, rho):
    # ln(max(rho, eps^2)) plus a polynomial correction that vanishes at s = 0,
    # so no branch selection is needed
    s = _s(rho, eps)
    acc = np.full_like(s, (n + 1) / n)
    for k in range(n - 1, 0, -1):
        acc = acc * s + 1.0 / k
    return np.log(np.maximum(rho, eps**2)) - acc * s


def _local_fprime(n, eps, rho):
    s = _s(rho, eps)
    poly = (n * s ** (n - 1) + _geometric_series(s, n)) / eps**2
    return np.where(rho >= eps**2, 1.0 / np.maximum(rho, eps**2), poly)


def _local_fsecond(n, eps, rho):
    s = _s(rho, eps)
    poly = -((n * n - 1) * s ** (n - 2) + _weighted_series(s, n - 3)) / eps**4
    return np.where(rho >= eps**2, -1.0 / np.maximum(rho, eps**2) ** 2, poly)


def _local_bigf(n, eps, rho):
    s = _s(rho, eps)
    poly = rho * (np.log(eps**2) - 1.0 - _harmonic_series(s, n))
    return np.where(rho >= eps**2, special.xlogy(rho, rho) - rho, poly)


def nonlinearity_unchecked(reg: Regularization, rho: np.ndarray) -> np.ndarray:
    """``f_value`` without argument validation, for inner loops on valid densities."""
    eps = reg.epsilon
    if reg.kind == "local_energy":
        return _local_f(reg.n, eps, rho)
    if reg.kind == "exact_log":
        return np.log(rho)
    if reg.kind == "sqrt_shift":
        return 2.0 * np.log(eps + np.sqrt(rho))
    return np.log(eps**2 + rho)


# -- Public evaluators ----------------------------------------------------

def f_value(reg: Regularization, rho):
    """The (regularized) nonlinearity ``f(rho)``."""
    rho = _as_rho(rho)
    eps = reg.epsilon
    if reg.kind == "exact_log":
        if np.any(rho == 0):
            raise RegularizationDomainError("ln(rho) is undefined at rho = 0; regularize first")
        out = np.log(rho)
    elif reg.kind == "local_energy":
        out = _local_f(reg.n, eps, rho)
    elif reg.kind == "sqrt_shift":
        out = 2.0 * np.log(eps + np.sqrt(rho))
    else:
        out = np.log(eps**2 + rho)
    return _unwrap(out)


def f_prime(reg: Regularization, rho):
    rho = _as_rho(rho)
    eps = reg.epsilon
    if reg.kind in ("exact_log", "sqrt_shift") and np.any(rho == 0):
        raise RegularizationDomainError(f"f' diverges at rho = 0 for {reg.kind}")
    if reg.kind == "exact_log":
        out = 1.0 / rho
    elif reg.kind == "local_energy":
        out = _local_fprime(reg.n, eps, rho)
    elif reg.kind == "sqrt_shift":
        r = np.sqrt(rho)
        out = 1.0 / (r * (eps + r))
    else:
        out = 1.0 / (eps**2 + rho)
    return _unwrap(out)


def f_second(reg: Regularization, rho):
    rho = _as_rho(rho)
    eps = reg.epsilon
    if reg.kind in ("exact_log", "sqrt_shift") and np.any(rho == 0):
        raise RegularizationDomainError(f"f'' diverges at rho = 0 for {reg.kind}")
    if reg.kind == "exact_log":
        out = -1.0 / rho**2
    elif reg.kind == "local_energy":
        out = _local_fsecond(reg.n, eps, rho)
    elif reg.kind == "sqrt_shift":
        r = np.sqrt(rho)
        out = -(eps / (2 * r) + 1.0) / (r * (eps + r)) ** 2
    else:
        out = -1.0 / (eps**2 + rho) ** 2
    return _unwrap(out)


def big_f(reg: Regularization, rho):
    """Energy density ``F`` with ``F(0) = 0`` for every kind."""
    rho = _as_rho(rho)
    eps = reg.epsilon
    if reg.kind == "exact_log":
        out = special.xlogy(rho, rho) - rho
    elif reg.kind == "local_energy":
        out = _local_bigf(reg.n, eps, rho)
    elif reg.kind == "sqrt_shift":
        r = np.sqrt(rho)
        out = 2 * rho * np.log(eps + r) + 2 * eps * r - rho - 2 * eps**2 * np.log1p(r / eps)
    else:
        # (eps^2 + rho) ln(eps^2 + rho) - rho - eps^2 ln(eps^2), rearranged to avoid cancellation
        out = rho * np.log(eps**2 + rho) + eps**2 * np.log1p(rho / eps**2) - rho
    return _unwrap(out)


# -- Closed-form higher derivatives (used to check C^n matching) ---------

def log_branch_derivative(rho: float, k: int) -> float:
    """``k``-th derivative of ``rho ln rho - rho``."""
    if k == 0:
        return rho * math.log(rho) - rho
    if k == 1:
        return math.log(rho)
    return (-1) ** k * math.factorial(k - 2) / rho ** (k - 1)


def _q_poly_derivative(n, eps, rho, j):
    s = 1.0 - rho / eps**2
    if j == 0:
        return math.log(eps**2) - 1.0 - sum(s**m / m for m in range(1, n + 1))
    scale = (-1.0 / eps**2) ** j
    return -scale * sum(
        math.factorial(m) / (m * math.factorial(m - j)) * s ** (m - j) for m in range(j, n + 1)
    )


def poly_branch_derivative(n: int, eps: float, rho: float, k: int) -> float:
    """``k``-th derivative of ``rho * q_poly(n, eps, rho)`` (valid for any real ``rho``)."""
    _check_n_eps(n, eps)
    val = rho * _q_poly_derivative(n, eps, rho, k)
    if k >= 1:
        val += k * _q_poly_derivative(n, eps, rho, k - 1)
    return val
