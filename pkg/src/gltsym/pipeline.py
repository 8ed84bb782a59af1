"""Experiment pipeline behind the CLI: matrix families, cached spectra and
coefficient tables, and the computations for each output table."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import RunConfig
from .distribution import default_test_functions, lt_gnorm_squared, q_estimate, weyl_eig_residual
from .extraction import (
    SymbolCoeffs,
    comparison_vectors,
    extract_symbol,
    separable,
    symbol_l2_error,
    symbol_samples,
    vector_norm,
)
from .functions import EXPLICIT, FourierTable, FunctionSpec, evaluate, fourier_coeffs_torus
from .generators import fd_diffusion_bands, grid, lt_matrix, toeplitz, toeplitz_tridiagonal
from .linalg import SymTridiagonal, hermitian_eigenvalues


def generating_table(f: FunctionSpec, n: int) -> FourierTable:
    """Fourier table of ``f`` wide enough for ``T_n(f)``, trimmed of round-off."""
    if f.kind == EXPLICIT:
        K = max(abs(k) for k, _ in f.payload)
        return fourier_coeffs_torus(f, min(K, n - 1))
    K = n - 1
    table = fourier_coeffs_torus(f, K, max(4096, 4 * K + 4))
    c = table.coeffs.copy()
    cutoff = 1e-13 * max(float(np.max(np.abs(c))), 1e-300)
    c.real[np.abs(c.real) < cutoff] = 0
    c.imag[np.abs(c.imag) < cutoff] = 0
    nonzero = np.nonzero(c)[0]
    if len(nonzero) == 0:
        return FourierTable(np.zeros(1))
    width = int(np.max(np.abs(nonzero - K)))
    return FourierTable(c[K - width:K + width + 1], table.domain)


def _is_tridiagonal_table(t: FourierTable) -> bool:
    return t.K <= 1 and not np.any(t.coeffs.imag) and t[1] == t[-1]


def lt_tridiagonal(a: FunctionSpec, fhat: FourierTable, n: int, m: int) -> SymTridiagonal:
    """Banded ``LT_n^m(a, f)`` for real ``a`` and a real even table with ``K <= 1``."""
    g = grid(n, m)
    samples = evaluate(a, g.points)
    if np.any(samples.imag):
        raise ValueError("banded LT form needs a real coefficient")
    s = np.repeat(samples.real, g.p)
    diag = np.zeros(n)
    diag[: g.m * g.p] = s * fhat[0].real
    off = np.zeros(n - 1)
    inner = np.tile(np.r_[np.ones(g.p - 1), 0.0], g.m)[: g.m * g.p - 1]
    off[: g.m * g.p - 1] = s[:-1] * inner * fhat[1].real
    return SymTridiagonal(diag, off)


def family_matrix(cfg: RunConfig, n: int):
    """The family member of size ``n`` (banded when the structure allows)."""
    if cfg.family == "import":
        return cfg.matrix
    if cfg.family == "fd-diffusion":
        return fd_diffusion_bands(cfg.a, n)
    fhat = generating_table(cfg.f, n)
    if cfg.family == "toeplitz":
        if _is_tridiagonal_table(fhat):
            return toeplitz_tridiagonal(fhat, n)
        return toeplitz(fhat, n)
    m = math.isqrt(n)
    if _is_tridiagonal_table(fhat) and not np.any(evaluate(cfg.a, grid(n, m).points).imag):
        return lt_tridiagonal(cfg.a, fhat, n, m)
    return lt_matrix(cfg.a, fhat, n, m)


def feasible(l: int, m: int) -> bool:
    g = grid(m)
    return l < g.m and l < g.p


class Experiment:
    """Caches spectra and coefficient tables across the commands of one run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._eig = {}
        self._coeffs = {}

    def _pmap(self, fn, items):
        items = list(items)
        if self.cfg.threads > 1 and len(items) > 1:
            with ThreadPoolExecutor(self.cfg.threads) as pool:
                return list(pool.map(fn, items))
        return [fn(x) for x in items]

    def matrix(self, n: int):
        return family_matrix(self.cfg, n)

    def eigenvalues(self, n: int) -> np.ndarray:
        if n not in self._eig:
            self._eig[n] = hermitian_eigenvalues(self.matrix(n)).values
        return self._eig[n]

    def prefetch_eigenvalues(self, ns):
        missing = [n for n in dict.fromkeys(ns) if n not in self._eig]
        for n, vals in zip(missing, self._pmap(lambda n: hermitian_eigenvalues(self.matrix(n)).values, missing)):
            self._eig[n] = vals

    def coefficients(self, m: int) -> SymbolCoeffs:
        """Coefficients at estimation size ``m`` up to the largest feasible order."""
        if m not in self._coeffs:
            orders = [l for l in self.cfg.l if feasible(l, m)]
            if not orders:
                raise ValueError(f"no truncation order is feasible at m={m}")
            self._coeffs[m] = extract_symbol(
                self.matrix(m), max(orders), nodes=self.cfg.nodes,
                normalization=self.cfg.normalization, family=self.cfg.family)
        return self._coeffs[m]

    def symbol(self, m: int, l: int) -> SymbolCoeffs | None:
        if not feasible(l, m) or l > self.coefficients(m).l_x:
            return None
        return self.coefficients(m).truncate(l)

    def truth(self):
        if not self.cfg.has_truth:
            return None
        return separable(self.cfg.truth_a, self.cfg.truth_f)

    # --- tables -------------------------------------------------------------

    def coefficient_rows(self):
        rows = []
        for m in self.cfg.m:
            c = self.coefficients(m)
            for j in range(-c.l_x, c.l_x + 1):
                for k in range(-c.l_theta, c.l_theta + 1):
                    v = c[j, k]
                    rows.append([m, j, k, v.real, v.imag])
        return rows

    def gamma_table(self):
        """``||gamma_n||_2`` per estimation size m."""
        l, n = self.cfg.gamma_order, self.cfg.gamma_size
        rows = []
        for m in self.cfg.m:
            c = self.symbol(m, l)
            value = math.nan if c is None else vector_norm(symbol_samples(c, n).imag)
            rows.append([m, value])
        return rows

    def eig_error_table(self, norm: str | None = None):
        """``||zeta_n - eta_n||`` with rows l and columns n."""
        norm = norm or self.cfg.eig_norm
        m = self.cfg.estimation_size
        self.prefetch_eigenvalues(self.cfg.n)
        rows = []
        for l in self.cfg.l:
            c = self.symbol(m, l)
            row = [l]
            for n in self.cfg.n:
                if c is None:
                    row.append(math.nan)
                    continue
                cv = comparison_vectors(self.matrix(n), c, self.eigenvalues(n))
                row.append(cv.eig_error(norm))
            rows.append(row)
        return rows

    def l2_error_table(self):
        """``||f - f_l||_2`` with rows l and columns m."""
        truth = self.truth()
        rows = []
        for l in self.cfg.l:
            row = [l]
            for m in self.cfg.m:
                c = self.symbol(m, l)
                row.append(math.nan if c is None else symbol_l2_error(c, truth))
            rows.append(row)
        return rows

    def figure_columns(self):
        """Sorted spectrum, sorted ``Re f_l`` samples and sorted truth samples."""
        n, l = self.cfg.figure_size, self.cfg.figure_order
        c = self.symbol(self.cfg.estimation_size, l)
        if c is None:
            raise ValueError(f"order {l} is not feasible at m={self.cfg.estimation_size}")
        cv = comparison_vectors(self.matrix(n), c, self.eigenvalues(n))
        cols = {"zeta": cv.zeta, "eta": cv.eta}
        truth = self.truth()
        if truth is not None:
            s = math.isqrt(n)
            idx = np.arange(s)
            samples = np.asarray(truth(idx / s, 2 * np.pi * idx / s)).real.ravel()
            cols["truth"] = np.sort(samples)[::-1]
        return cols

    def weyl_rows(self):
        fs = default_test_functions()
        symbol = self.truth()
        if symbol is None:
            m = self.cfg.estimation_size
            symbol = self.symbol(m, max(l for l in self.cfg.l if feasible(l, m)))
        self.prefetch_eigenvalues(self.cfg.n)
        rows = []
        for n in self.cfg.n:
            res = weyl_eig_residual(self.matrix(n), symbol, fs, eigenvalues=self.eigenvalues(n))
            rows.append([n, *res])
        return [F.label for F in fs], rows

    def qcurve_rows(self, points: int = 16):
        """``q_r(A_n - LT_n)`` on a rank schedule; ``LT_n`` from the truth symbol if any."""
        rows = []
        for n in self.cfg.qcurve_n:
            a = self.matrix(n)
            dense = a.toarray() if isinstance(a, SymTridiagonal) else np.asarray(a)
            if self.cfg.has_truth:
                fhat = generating_table(self.cfg.truth_f, math.isqrt(n))
                dense = dense - lt_matrix(self.cfg.truth_a, fhat, n, math.isqrt(n))
            ranks = sorted(set(np.linspace(0, n - 1, points).astype(int)) | {math.isqrt(n)})
            curve = q_estimate(dense, ranks)
            rows.extend([n, int(r), float(v)] for r, v in zip(curve.ranks, curve.values))
        return rows

    def counterexample_rows(self):
        one = FourierTable.from_dict({0: 1.0})
        a = self.cfg.counterexample_a
        return [[n, lt_gnorm_squared(a, one, n), lt_gnorm_squared(a, one, n, power=2)]
                for n in self.cfg.counterexample_n]
