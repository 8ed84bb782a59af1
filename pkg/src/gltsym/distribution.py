"""Distribution-level checks at finite n: Weyl residuals, zero-distributed
trends, SVD-tail estimates of the seminorm q, a.c.s. distances and the
normalized Frobenius (G-)norm.

Verdicts returned here are diagnostics; asymptotic properties cannot be
decided from finitely many matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .extraction import SymbolCoeffs, eval_symbol_grid, glt_inner, midpoint_grid
from .functions import FourierTable, FunctionSpec, evaluate
from .generators import grid, toeplitz
from .linalg import SymTridiagonal, hermitian_eigenvalues, singular_values, size


@dataclass(frozen=True)
class TestFunction:
    """Continuous test function with ``F(t) = 0`` for ``|t| > support``."""

    __test__ = False  # not a pytest class

    label: str
    func: Callable[[np.ndarray], np.ndarray]
    support: float

    def __call__(self, t):
        return self.func(np.asarray(t))

    def scaled(self, factor: float) -> "TestFunction":
        return TestFunction(f"{factor}*{self.label}", lambda t: factor * self.func(t), self.support)


def gaussian_bump(center: float, width: float) -> TestFunction:
    """``exp(-(t-c)^2/w)`` lowered by its value at ``|t-c| = 4 sqrt(w)`` and clipped at 0.

    The shift keeps the function continuous at the edge of its support.
    """
    floor = math.exp(-16.0)

    def func(t):
        return np.maximum(np.exp(-np.abs(t - center) ** 2 / width) - floor, 0.0)

    return TestFunction(f"gauss(c={center:g},w={width:g})", func, abs(center) + 4 * math.sqrt(width))


def quadratic_hat(radius: float = 5.0) -> TestFunction:
    def func(t):
        return np.maximum(1.0 - np.abs(t) ** 2 / radius**2, 0.0)

    return TestFunction(f"hat(r={radius:g})", func, radius)


def default_test_functions() -> list[TestFunction]:
    fs = [gaussian_bump(c, w) for c in (0.0, 2.0, 4.0, 8.0) for w in (1.0, 4.0)]
    fs.append(quadratic_hat())
    return fs


def _symbol_on_grid(symbol, points: int) -> np.ndarray:
    x, t = midpoint_grid(points)
    if isinstance(symbol, SymbolCoeffs):
        return eval_symbol_grid(symbol, x, t)
    return np.asarray(symbol(x, t))


def _residuals(values, symbol_values, fs) -> list[float]:
    out = []
    for F in fs:
        empirical = float(np.mean(F(values)))
        # midpoint mean over [0,1] x [-pi,pi] is the integral divided by mu(D) = 2 pi
        integral = float(np.mean(F(symbol_values)))
        out.append(abs(empirical - integral))
    return out


def weyl_eig_residual(a, symbol, fs=None, points: int = 256, eigenvalues=None) -> list[float]:
    """``|(1/n) sum F(lambda_i) - (1/2pi) int int F(f)|`` for each test function.

    ``symbol`` is a :class:`SymbolCoeffs` or a tensor-grid evaluator such as
    :func:`gltsym.extraction.separable`; its real part is used.
    """
    fs = default_test_functions() if fs is None else fs
    if eigenvalues is None:
        eigenvalues = hermitian_eigenvalues(a).values
    vals = _symbol_on_grid(symbol, points)
    return _residuals(np.asarray(eigenvalues), vals.real, fs)


def weyl_sv_residual(a, symbol, fs=None, points: int = 256) -> list[float]:
    """Singular-value analogue of :func:`weyl_eig_residual` using ``|f|``."""
    fs = default_test_functions() if fs is None else fs
    sv = singular_values(a).values
    vals = _symbol_on_grid(symbol, points)
    return _residuals(sv, np.abs(vals), fs)


@dataclass(frozen=True)
class ZeroDistTrend:
    ns: list
    values: list
    consistent: bool


def zero_dist_trend(family: Callable[[int], object], ns) -> ZeroDistTrend:
    """``||Z_n||_F^2 / n`` along ``ns`` with a heuristic zero-distributed verdict."""
    ns = list(ns)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("sizes must be increasing")
    values = [gnorm_squared(family(n)) for n in ns]
    if not values or values[0] == 0:
        return ZeroDistTrend(ns, values, all(v == 0 for v in values))
    # scale-free heuristic: non-increasing and at least a factor 4 below the start
    shrinking = all(b <= a * (1 + 1e-12) for a, b in zip(values, values[1:]))
    consistent = shrinking and values[-1] <= values[0] / 4
    return ZeroDistTrend(ns, values, consistent)


@dataclass(frozen=True)
class QCurve:
    ranks: np.ndarray
    values: np.ndarray
    scalar: float


def q_estimate(a, ranks=None) -> QCurve:
    """Tail estimates ``q_r(A) = sqrt(sum_{i > r} sigma_i^2 / n)``.

    ``q_r`` is the normalized Frobenius distance from ``A`` to the matrices
    of rank at most ``r``, an upper bound for the rank-plus-small-norm split
    in the seminorm. ``scalar`` is ``q_r`` at ``r = isqrt(n)``.
    """
    n = size(a)
    sv = singular_values(a).values
    # tail[r] = sum_{i >= r} sigma_i^2 (0-based), i.e. drop the r largest
    tail = np.concatenate([np.cumsum((sv**2)[::-1])[::-1], [0.0]])
    curve = np.sqrt(np.maximum(tail, 0.0) / n)
    ranks = np.arange(n) if ranks is None else np.asarray(ranks, dtype=int)
    if np.any((ranks < 0) | (ranks >= n)):
        raise ValueError("ranks must lie in [0, n)")
    r0 = min(math.isqrt(n), n)
    return QCurve(ranks, curve[ranks], float(curve[r0]))


def acs_distance(a, b, rank: int | None = None) -> float:
    """``q_r(A - B)`` with ``r = isqrt(n)`` unless given."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    n = size(diff)
    r = math.isqrt(n) if rank is None else rank
    return float(q_estimate(diff, [r]).values[0])


def gnorm_squared(a) -> float:
    """``||A||_G^2 = <A, A>_G = ||A||_F^2 / n``."""
    return glt_inner(a, a).real


def lt_gnorm_squared(a: FunctionSpec, fhat: FourierTable, n: int, m: int | None = None,
                     power: int = 1) -> float:
    """``||LT_n^m(a, f)^power||_G^2`` without forming the n x n matrix.

    ``(D (x) T)^k = D^k (x) T^k`` and the Frobenius norm is multiplicative
    over Kronecker factors.
    """
    g = grid(n, m)
    d = np.abs(evaluate(a, g.points)) ** (2 * power)
    return float(np.sum(d) * _toeplitz_power_fro_sq(fhat, g.p, power) / n)


def _toeplitz_power_fro_sq(fhat: FourierTable, p: int, power: int) -> float:
    """``||T_p(f)^power||_F^2``; closed forms avoid the dense p x p block."""
    if fhat.K == 0:
        return p * abs(fhat[0]) ** (2 * power)
    if power == 1:
        ks = np.arange(-min(fhat.K, p - 1), min(fhat.K, p - 1) + 1)
        return float(np.sum((p - np.abs(ks)) * np.abs(fhat.lookup(ks)) ** 2))
    block = np.linalg.matrix_power(toeplitz(fhat, p), power)
    return float(np.sum(np.abs(block) ** 2))


@dataclass
class DistributionReport:
    n: int
    m: int | None = None
    l: int | None = None
    metrics: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, v in {**self.metrics, **self.residuals}.items():
            if not math.isfinite(v):
                raise ValueError(f"metric {k} is not finite")
