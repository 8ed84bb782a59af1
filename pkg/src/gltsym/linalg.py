"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` (see
:func:`as_matrix`).  Real symmetric tridiagonal matrices may also be carried
by the lightweight :class:`SymTridiagonal`, which every routine in the
package accepts wherever only diagonals are needed; this keeps the
finite-difference matrices of size several thousand out of dense storage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Largest number of entries a constructed matrix may have (~4 GiB complex).
MAX_ENTRIES = 2**28

EPS = np.finfo(float).eps


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def as_matrix(a) -> np.ndarray:
    """Validate and convert ``a`` to a 2-D ``complex128`` array.

    Raises ``ValueError`` for non-2-D input or non-finite entries.
    """
    if isinstance(a, SymTridiagonal):
        return a.toarray()
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


@dataclass(frozen=True)
class SymTridiagonal:
    """Real symmetric tridiagonal matrix stored by its two bands."""

    diag: np.ndarray
    off: np.ndarray

    # make numpy defer mixed arithmetic to the methods below
    __array_ufunc__ = None

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.off, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or len(e) != max(len(d) - 1, 0):
            raise ValueError("off-diagonal must have length len(diag) - 1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal bands have non-finite entries")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "off", e)

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def diagonal(self, k: int = 0) -> np.ndarray:
        """Entries ``A[r + k, r]`` (``k > 0`` below the main diagonal)."""
        if k == 0:
            return self.diag.astype(complex)
        if abs(k) == 1:
            return self.off.astype(complex)
        return np.zeros(max(self.n - abs(k), 0), dtype=complex)

    def toarray(self) -> np.ndarray:
        a = np.diag(self.diag).astype(complex)
        if self.n > 1:
            idx = np.arange(self.n - 1)
            a[idx + 1, idx] = self.off
            a[idx, idx + 1] = self.off
        return a

    def frobenius_sq(self) -> float:
        return float(np.sum(self.diag**2) + 2 * np.sum(self.off**2))

    def __add__(self, other):
        if isinstance(other, SymTridiagonal):
            return SymTridiagonal(self.diag + other.diag, self.off + other.off)
        return self.toarray() + other

    def __sub__(self, other):
        if isinstance(other, SymTridiagonal):
            return SymTridiagonal(self.diag - other.diag, self.off - other.off)
        return self.toarray() - other

    def __radd__(self, other):
        return other + self.toarray()

    def __rsub__(self, other):
        return other - self.toarray()


def diagonal(a, k: int = 0) -> np.ndarray:
    """Entries ``A[r + k, r]`` of a dense or tridiagonal matrix."""
    if isinstance(a, SymTridiagonal):
        return a.diagonal(k)
    return np.diagonal(a, offset=-k)


def size(a) -> int:
    n, m = a.shape
    if n != m:
        raise ValueError(f"expected a square matrix, got {a.shape}")
    return n


def kron(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > MAX_ENTRIES:
        raise OverflowError(f"Kronecker product of size {rows}x{cols} is too large")
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(rows, cols)


def direct_sum_pad(a, target: int) -> np.ndarray:
    """``A (+) O``: embed square ``A`` in the leading block of a ``target``-square zero matrix."""
    a = as_matrix(a)
    n = size(a)
    if target < n:
        raise ValueError(f"target size {target} is smaller than the matrix ({n})")
    out = np.zeros((target, target), dtype=complex)
    out[:n, :n] = a
    return out


def frobenius_inner(a, b) -> complex:
    """``tr(B* A) = sum conj(B[i, j]) A[i, j]``."""
    if isinstance(a, SymTridiagonal) and isinstance(b, SymTridiagonal):
        if a.n != b.n:
            raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
        return complex(a.diag @ b.diag + 2 * (a.off @ b.off))
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(b.ravel(), a.ravel()))


def frobenius_norm(a) -> float:
    if isinstance(a, SymTridiagonal):
        return math.sqrt(a.frobenius_sq())
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class EigenResult:
    """Real spectrum sorted non-increasing.

    ``residual_bound`` bounds the distance of every reported value to the
    exact spectrum.
    """

    values: np.ndarray
    residual_bound: float
    method: str = field(default="", compare=False)

    def __len__(self):
        return len(self.values)


def _sort_desc(values) -> np.ndarray:
    # stable sort of the negated values keeps ties in encounter order
    values = np.asarray(values, dtype=float)
    return values[np.argsort(-values, kind="stable")]


def is_tridiagonal(a: np.ndarray) -> bool:
    n = a.shape[0]
    if n < 3:
        return True
    band = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) <= 1
    return not np.any(a[~band])


def _check_hermitian(a: np.ndarray, tol: float) -> None:
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > tol * max(scale, 1.0):
        raise NotHermitianError("matrix is not Hermitian within tolerance")


def hermitian_eigenvalues(a, tol: float = 1e-10, method: str = "auto") -> EigenResult:
    """Eigenvalues of a Hermitian matrix, sorted non-increasing.

    ``method`` is one of ``"auto"``, ``"bisection"``, ``"jacobi"`` or
    ``"lapack"``.  With ``"auto"`` real symmetric tridiagonal input goes to
    Sturm-sequence bisection, small dense input to cyclic Jacobi and large
    dense input to LAPACK.
    """
    if isinstance(a, SymTridiagonal):
        if method not in ("auto", "bisection"):
            a = a.toarray()
        else:
            return sturm_bisection(a, tol)
    a = as_matrix(a)
    size(a)
    _check_hermitian(a, tol)
    if method == "auto":
        if not np.any(a.imag) and is_tridiagonal(a):
            method = "bisection"
        elif a.shape[0] <= 64:
            method = "jacobi"
        else:
            method = "lapack"
    if method == "bisection":
        if np.any(a.imag) or not is_tridiagonal(a):
            raise ValueError("bisection needs a real symmetric tridiagonal matrix")
        t = SymTridiagonal(np.diagonal(a).real, np.diagonal(a, -1).real)
        return sturm_bisection(t, tol)
    if method == "jacobi":
        return jacobi_eigenvalues(a, tol)
    if method == "lapack":
        herm = (a + a.conj().T) / 2
        vals = np.linalg.eigvalsh(herm)
        n = a.shape[0]
        bound = n * EPS * max(np.linalg.norm(a), 1.0)
        return EigenResult(_sort_desc(vals), float(bound), "lapack")
    raise ValueError(f"unknown eigensolver method {method!r}")


def sturm_count(t: SymTridiagonal, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues of ``t`` strictly below each shift in ``x``."""
    d = t.diag
    e2 = t.off**2
    x = np.array(x, dtype=float, ndmin=1)
    scale = max(np.max(np.abs(d), initial=0.0), np.max(np.abs(t.off), initial=0.0), 1.0)
    pivmin = EPS * scale * 1e-3
    q = d[0] - x
    q[np.abs(q) < pivmin] = -pivmin
    count = (q < 0).astype(np.int64)
    tiny = np.empty(x.shape, dtype=bool)
    for i in range(1, len(d)):
        np.divide(e2[i - 1], q, out=q)
        np.subtract(d[i] - x, q, out=q)
        np.less(np.abs(q), pivmin, out=tiny)
        if tiny.any():
            q[tiny] = -pivmin
        count += q < 0
    return count


def sturm_bisection(t: SymTridiagonal, tol: float = 1e-10) -> EigenResult:
    """All eigenvalues of a symmetric tridiagonal matrix by bisection.

    Every eigenvalue is bracketed simultaneously; each step halves all
    brackets with one vectorized Sturm count.
    """
    n = t.n
    if n == 0:
        return EigenResult(np.zeros(0), 0.0, "bisection")
    d, e = t.diag, np.abs(t.off)
    radius = np.zeros(n)
    radius[:-1] += e
    radius[1:] += e
    lo0 = float(np.min(d - radius))
    hi0 = float(np.max(d + radius))
    width = hi0 - lo0
    pad = max(width, 1.0) * 1e-12
    lo = np.full(n, lo0 - pad)
    hi = np.full(n, hi0 + pad)
    target = np.arange(1, n + 1)  # k-th smallest: count(lo) < k <= count(hi)
    steps = max(int(math.ceil(math.log2((hi0 - lo0 + 2 * pad) / tol))), 1)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        below = sturm_count(t, mid) >= target
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    vals = 0.5 * (lo + hi)
    bound = float(np.max(hi - lo)) / 2 + 4 * EPS * max(abs(lo0), abs(hi0), 1.0)
    return EigenResult(_sort_desc(vals), bound, "bisection")


def jacobi_eigenvalues(a, tol: float = 1e-10, max_sweeps: int = 100) -> EigenResult:
    """Cyclic Jacobi for a dense Hermitian matrix.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``1e-12 * ||A||_F``; that norm is also the residual bound (Weyl).
    """
    a = np.array(as_matrix(a), dtype=complex)
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    fro = np.linalg.norm(a)
    stop = 1e-12 * fro

    def off_norm():
        # direct sum; fro^2 - ||diag||^2 cancels down to sqrt(eps) * fro
        return float(np.linalg.norm(a - np.diag(np.diagonal(a))))

    for _ in range(max_sweeps):
        if off_norm() <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j2 = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ j2
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = j2.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        if off_norm() > stop:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return EigenResult(_sort_desc(np.diagonal(a).real), off_norm(), "jacobi")


def singular_values(a, tol: float = 1e-10) -> EigenResult:
    """Singular values as square roots of the eigenvalues of ``A* A``."""
    if isinstance(a, SymTridiagonal):
        ev = sturm_bisection(a, tol)
        vals = _sort_desc(np.abs(ev.values))
        return EigenResult(vals, ev.residual_bound, "bisection")
    a = as_matrix(a)
    gram = a.conj().T @ a
    ev = hermitian_eigenvalues(gram, tol)
    vals = np.sqrt(np.clip(ev.values, 0.0, None))
    # |sqrt(a) - sqrt(b)| <= sqrt(|a - b|)
    return EigenResult(vals, math.sqrt(ev.residual_bound), ev.method)
