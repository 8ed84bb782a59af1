"""Spectral symbols of GLT matrix sequences from normalized-trace inner products."""

__version__ = "0.1.0"

from .extraction import (
    ComparisonVectors,
    SymbolCoeffs,
    comparison_vectors,
    eval_symbol,
    extract_symbol,
    fast_coefficient,
    fourier_coefficient,
    glt_inner,
    separable,
    symbol_l2_error,
)
from .functions import (
    FourierTable,
    FunctionSpec,
    builtin,
    evaluate,
    fourier_coeffs_torus,
    fourier_coeffs_unit,
    parse_expr,
)
from .generators import (
    GridSpec,
    basis_truncation,
    diag_sample,
    fd_diffusion_bands,
    fd_diffusion_matrix,
    grid,
    lt_matrix,
    toeplitz,
)
from .linalg import SymTridiagonal, hermitian_eigenvalues, singular_values
