"""Symbol extraction by normalized-trace inner products.

The Fourier coefficient of the symbol of ``A`` against the basis element
``exp(2 pi i j x) exp(i k t)`` is estimated as ``<A, T_{n,jk}>_G`` with the
finite-n inner product ``<A, B>_G = tr(B* A) / n``.

Two estimator options change the finite-n bias but not the limit:

``nodes``
    ``"right"`` uses the grid ``I_m = {i/m}`` literally; ``"midpoint"``
    attaches each block to the centre of its x-range, removing an
    ``O(j/m)`` phase error in the j-rows.
``normalization``
    ``"trace"`` divides by ``n`` (the inner product as defined);
    ``"gram"`` divides by ``<T_jk, T_jk>_G * n = m (p - |k|)``, i.e. takes
    the orthogonal projection coefficient onto the finite section, which
    removes the ``m (p - |k|)/n`` shrinkage from padding and truncated
    diagonals.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .functions import FunctionSpec, evaluate
from .generators import RIGHT, GridSpec, basis_truncation, grid
from .linalg import SymTridiagonal, diagonal, frobenius_inner, hermitian_eigenvalues, size

TRACE = "trace"
GRAM = "gram"


def glt_inner(a, b) -> complex:
    """``tr(B* A) / n``."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return frobenius_inner(a, b) / size(a)


def _check_k(g: GridSpec, k: int):
    if abs(k) >= g.p:
        raise ValueError(f"|k|={abs(k)} must be below the block size {g.p}")


def fourier_coefficient(a, j: int, k: int, nodes: str = RIGHT) -> complex:
    """``<A, T_{n,jk}>_G`` by an explicit trace against the dense basis matrix."""
    n = size(a)
    _check_k(grid(n, nodes=nodes), k)
    return glt_inner(a, basis_truncation(j, k, n, nodes))


def block_diagonal_sums(a, k: int, g: GridSpec) -> np.ndarray:
    """Sum of the entries ``A[r + k, r]`` inside each of the m diagonal blocks."""
    _check_k(g, k)
    d = diagonal(a, k)
    # entry r of the k-th diagonal lies in block i iff i*p <= r < i*p + p - |k|
    blocks = np.zeros(g.m * g.p, dtype=complex)
    usable = min(len(d), g.m * g.p)
    blocks[:usable] = d[:usable]
    return blocks.reshape(g.m, g.p)[:, : g.p - abs(k)].sum(axis=1)


def fast_coefficient(a, j: int, k: int, nodes: str = RIGHT) -> complex:
    """Structured ``<A, T_{n,jk}>_G`` in ``O(n)``.

    Only the k-th diagonal of the m diagonal blocks meets the support of the
    basis matrix, so the trace reduces to a phase-weighted sum of block
    diagonal sums.
    """
    n = size(a)
    g = grid(n, nodes=nodes)
    sums = block_diagonal_sums(a, k, g)
    phases = np.exp(-2j * np.pi * j * g.points)
    return complex(phases @ sums) / n


@dataclass(frozen=True)
class SymbolCoeffs:
    """Truncated symbol ``f_l(x, t) = sum a_jk exp(2 pi i j x) exp(i k t)``.

    ``table[j + l_x, k + l_theta]`` holds ``a_jk``.
    """

    table: np.ndarray
    n: int = 0
    family: str = ""
    nodes: str = RIGHT
    normalization: str = TRACE
    hermitian_defect: float = field(default=0.0, compare=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=complex)
        if t.ndim != 2 or t.shape[0] % 2 != 1 or t.shape[1] % 2 != 1:
            raise ValueError("coefficient table needs odd dimensions")
        object.__setattr__(self, "table", t)

    @property
    def l_x(self) -> int:
        return self.table.shape[0] // 2

    @property
    def l_theta(self) -> int:
        return self.table.shape[1] // 2

    def __getitem__(self, jk) -> complex:
        j, k = jk
        if abs(j) > self.l_x or abs(k) > self.l_theta:
            return 0j
        return complex(self.table[j + self.l_x, k + self.l_theta])

    def truncate(self, l: int) -> "SymbolCoeffs":
        if l > self.l_x or l > self.l_theta:
            raise ValueError(f"cannot truncate an order-{self.l_x} table to order {l}")
        t = self.table[self.l_x - l:self.l_x + l + 1, self.l_theta - l:self.l_theta + l + 1]
        return SymbolCoeffs(t, self.n, self.family, self.nodes, self.normalization,
                            _hermitian_defect(t))

    def __call__(self, x, theta):
        return eval_symbol(self, x, theta)


def _hermitian_defect(t: np.ndarray) -> float:
    return float(np.max(np.abs(t[::-1, ::-1] - t.conj()), initial=0.0))


def extract_symbol(a, l: int, *, nodes: str = RIGHT, normalization: str = TRACE,
                   family: str = "", threads: int = 1) -> SymbolCoeffs:
    """All coefficients ``a_jk`` with ``|j|, |k| <= l`` via :func:`fast_coefficient`."""
    n = size(a)
    g = grid(n, nodes=nodes)
    if l >= g.p or l >= g.m:
        raise ValueError(f"order l={l} too large for n={n} (grid m={g.m}, block p={g.p})")
    if normalization not in (TRACE, GRAM):
        raise ValueError(f"unknown normalization {normalization!r}")
    js = np.arange(-l, l + 1)
    phases = np.exp(-2j * np.pi * np.outer(js, g.points))

    def column(k):
        col = phases @ block_diagonal_sums(a, k, g)
        scale = g.m * (g.p - abs(k)) if normalization == GRAM else n
        return col / scale

    ks = range(-l, l + 1)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            cols = list(pool.map(column, ks))
    else:
        cols = [column(k) for k in ks]
    table = np.stack(cols, axis=1)
    return SymbolCoeffs(table, n, family, nodes, normalization, _hermitian_defect(table))


def eval_symbol(c: SymbolCoeffs, x, theta):
    """Evaluate ``f_l`` pointwise (``x`` and ``theta`` broadcast together)."""
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x, theta = np.broadcast_arrays(x, theta)
    js = np.arange(-c.l_x, c.l_x + 1)
    ks = np.arange(-c.l_theta, c.l_theta + 1)
    ex = np.exp(2j * np.pi * np.multiply.outer(x, js))
    et = np.exp(1j * np.multiply.outer(theta, ks))
    out = np.einsum("...j,jk,...k->...", ex, c.table, et)
    return complex(out) if out.ndim == 0 else out


def eval_symbol_grid(c: SymbolCoeffs, xs, thetas) -> np.ndarray:
    """``f_l`` on the tensor grid ``xs x thetas`` (rows follow ``xs``)."""
    js = np.arange(-c.l_x, c.l_x + 1)
    ks = np.arange(-c.l_theta, c.l_theta + 1)
    ex = np.exp(2j * np.pi * np.outer(xs, js))
    et = np.exp(1j * np.outer(thetas, ks))
    return ex @ c.table @ et.T


def sample_grid(s: int):
    """Sampling nodes ``j/s`` and ``2 pi k/s`` for ``j, k = 0..s-1``."""
    idx = np.arange(s)
    return idx / s, 2 * np.pi * idx / s


@dataclass(frozen=True)
class ComparisonVectors:
    zeta: np.ndarray
    eta: np.ndarray
    gamma: np.ndarray

    def eig_error(self, norm: str = "euclidean") -> float:
        return vector_norm(self.zeta - self.eta, norm)

    def imag_norm(self, norm: str = "euclidean") -> float:
        return vector_norm(self.gamma, norm)


def vector_norm(v, norm: str = "euclidean") -> float:
    v = np.asarray(v)
    if norm == "euclidean":
        return float(np.linalg.norm(v))
    if norm == "max":
        return float(np.max(np.abs(v), initial=0.0))
    if norm == "rms":
        return float(np.linalg.norm(v) / math.sqrt(max(len(v), 1)))
    raise ValueError(f"unknown norm {norm!r}")


def _sort_desc(v):
    return v[np.argsort(-v, kind="stable")]


def symbol_samples(c: SymbolCoeffs, n: int) -> np.ndarray:
    """``f_l(j/s, 2 pi k/s)`` for ``s = isqrt(n)``, flattened row-major in j."""
    xs, ts = sample_grid(math.isqrt(n))
    return eval_symbol_grid(c, xs, ts).ravel()


def subsample_sorted(values: np.ndarray, count: int) -> np.ndarray:
    """Pick ``count`` uniformly spaced entries of a sorted vector."""
    if count >= len(values):
        return values
    idx = np.round(np.linspace(0, len(values) - 1, count)).astype(int)
    return values[idx]


def comparison_vectors(a, c: SymbolCoeffs, eigenvalues=None) -> ComparisonVectors:
    """Sorted eigenvalues against sorted real symbol samples on the sqrt(n) grid.

    ``eigenvalues`` may be passed to reuse a spectrum already computed.
    When ``n`` is not a perfect square the sorted spectrum is subsampled to
    the ``isqrt(n)**2`` grid points.
    """
    n = size(a)
    if eigenvalues is None:
        eigenvalues = hermitian_eigenvalues(a).values
    samples = symbol_samples(c, n)
    zeta = subsample_sorted(np.asarray(eigenvalues, dtype=float), len(samples))
    eta = _sort_desc(samples.real.copy())
    return ComparisonVectors(zeta, eta, samples.imag.copy())


def midpoint_grid(points: int = 256):
    """Midpoint nodes on [0, 1] and [-pi, pi]."""
    x = (np.arange(points) + 0.5) / points
    t = -np.pi + 2 * np.pi * (np.arange(points) + 0.5) / points
    return x, t


def separable(a: FunctionSpec, f: FunctionSpec):
    """Bivariate evaluator ``(x, t) -> a(x) f(t)`` on tensor grids."""

    def symbol(xs, ts):
        return np.multiply.outer(evaluate(a, np.asarray(xs)), evaluate(f, np.asarray(ts)))

    symbol.a = a
    symbol.f = f
    return symbol


def symbol_l2_error(c: SymbolCoeffs, truth, points: int = 256) -> float:
    """``||f - f_l||`` in L2 of [0,1] x [-pi,pi] with measure ``dx dt / 2pi``.

    ``truth`` maps a pair of 1-D node arrays to the tensor-grid values, as
    returned by :func:`separable`, or is another :class:`SymbolCoeffs`.
    """
    x, t = midpoint_grid(points)
    ref = eval_symbol_grid(truth, x, t) if isinstance(truth, SymbolCoeffs) else truth(x, t)
    diff = np.asarray(ref) - eval_symbol_grid(c, x, t)
    return float(np.sqrt(np.mean(np.abs(diff) ** 2)))
