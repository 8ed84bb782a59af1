"""Structured matrices: Toeplitz, diagonal samplers, locally Toeplitz
matrices, the basis truncations ``T_{n,jk}`` and the central
finite-difference diffusion matrix.

Index convention: the basis pair ``(l_i, r)`` with ``l_i`` the i-th grid node
(i = 1..m) and ``r = 0..p-1`` sits at matrix row/column ``(i - 1) * p + r``,
which is the Kronecker order of ``D_m (x) T_p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .functions import FourierTable, FunctionSpec, evaluate, explicit_fourier
from .linalg import SymTridiagonal, direct_sum_pad, kron

RIGHT = "right"
MIDPOINT = "midpoint"
NODE_OFFSETS = {RIGHT: 0.0, MIDPOINT: 0.5}


def node_offset(nodes: str) -> float:
    try:
        return NODE_OFFSETS[nodes]
    except KeyError:
        raise ValueError(f"unknown node placement {nodes!r}; use 'right' or 'midpoint'") from None


@dataclass(frozen=True)
class GridSpec:
    """Block bookkeeping for size ``n``: ``m`` blocks of size ``p`` plus ``pad`` zeros.

    ``nodes="right"`` places block i at ``i/m`` (the grid ``I_m``);
    ``"midpoint"`` places it at ``(i - 1/2)/m``, the centre of the x-range the
    block covers in a discretization ordered by x.
    """

    n: int
    m: int
    nodes: str = RIGHT

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        node_offset(self.nodes)

    @property
    def p(self) -> int:
        return self.n // self.m

    @property
    def pad(self) -> int:
        return self.n - self.m * self.p

    @cached_property
    def points(self) -> np.ndarray:
        """Node positions of the m blocks (``I_m`` for right nodes)."""
        return (np.arange(1, self.m + 1) - node_offset(self.nodes)) / self.m

    @property
    def pairs(self) -> list[tuple[float, int]]:
        """The ordered index set ``B_n``: outer loop over nodes, inner over r."""
        return [(float(l), r) for l in self.points for r in range(self.p)]

    def index(self, i: int, r: int) -> int:
        """Matrix index of the pair (i-th node, 1-based; r)."""
        return (i - 1) * self.p + r


def grid(n: int, m: int | None = None, nodes: str = RIGHT) -> GridSpec:
    return GridSpec(n, math.isqrt(n) if m is None else m, nodes)


def toeplitz(fhat: FourierTable, n: int) -> np.ndarray:
    """``T[i, j] = fhat_{i-j}``."""
    if n < 1:
        raise ValueError("n must be positive")
    idx = np.arange(n)
    return fhat.lookup(np.subtract.outer(idx, idx))


def toeplitz_tridiagonal(fhat: FourierTable, n: int) -> SymTridiagonal:
    """Banded form of ``toeplitz`` for real even tables with ``K <= 1``."""
    if fhat.K > 1 or np.any(fhat.coeffs.imag) or fhat[1] != fhat[-1]:
        raise ValueError("table is not real, even and tridiagonal")
    return SymTridiagonal(np.full(n, fhat[0].real), np.full(n - 1, fhat[1].real))


def diag_sample(a: FunctionSpec, m: int, nodes: str = RIGHT) -> np.ndarray:
    """``D_m(a) = diag(a(1/m), ..., a(m/m))``."""
    if m < 1:
        raise ValueError("m must be positive")
    return np.diag(evaluate(a, grid(m, m, nodes).points))


def lt_matrix(a: FunctionSpec, fhat: FourierTable, n: int, m: int) -> np.ndarray:
    """``[D_m(a) (x) T_{n//m}(f)] (+) O_{n mod m}``, assembled block by block."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    g = grid(n, m)
    samples = evaluate(a, g.points)
    block = toeplitz(fhat, g.p)
    out = np.zeros((n, n), dtype=complex)
    for i, s in enumerate(samples):
        lo = i * g.p
        out[lo:lo + g.p, lo:lo + g.p] = s * block
    return out


def lt_matrix_kron(a: FunctionSpec, fhat: FourierTable, n: int, m: int) -> np.ndarray:
    """Compositional form of ``lt_matrix``: kron then pad."""
    p = n // m
    return direct_sum_pad(kron(diag_sample(a, m), toeplitz(fhat, p)), n)


def shift(p: int, k: int) -> np.ndarray:
    """``S_k``: ones where ``r - s = k``."""
    return toeplitz(FourierTable.from_dict({k: 1.0}), p)


def basis_truncation(j: int, k: int, n: int, nodes: str = RIGHT) -> np.ndarray:
    """``D_m(exp(2 pi i j x)) (x) S_k (+) O_pad`` with ``m = isqrt(n)``."""
    g = grid(n, nodes=nodes)
    if abs(k) >= g.p:
        raise ValueError(f"|k|={abs(k)} must be below the block size {g.p}")
    phases = np.diag(np.exp(2j * np.pi * j * g.points))
    return direct_sum_pad(kron(phases, shift(g.p, k)), n)


def fd_diffusion_bands(a: FunctionSpec, n: int) -> SymTridiagonal:
    """Central FD matrix of ``-(a u')'`` on (0, 1), without the ``1/h^2`` factor.

    Diagonal ``a(x_{j+1/2}) + a(x_{j-1/2})``, off-diagonal ``-a(x_{j+1/2})``
    with ``x_j = j/(n+1)``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    half = (np.arange(n + 1) + 0.5) / (n + 1)  # x_{1/2}, ..., x_{n+1/2}
    vals = evaluate(a, half)
    if np.any(vals.imag):
        raise ValueError("diffusion coefficient must be real-valued")
    av = vals.real
    return SymTridiagonal(av[:-1] + av[1:], -av[1:-1])


def fd_diffusion_matrix(a: FunctionSpec, n: int) -> np.ndarray:
    return fd_diffusion_bands(a, n).toarray()


def laplacian_table() -> FourierTable:
    return FourierTable.from_dict({-1: -1.0, 0: 2.0, 1: -1.0})


def exponential(j: int) -> FunctionSpec:
    """``exp(2 pi i j x)`` on [0, 1] as an explicit Fourier function."""
    return explicit_fourier({j: 1.0}, domain="unit")
