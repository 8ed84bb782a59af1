"""Finite-n trends: Weyl residuals, a.c.s. distance of the FD matrix to its
LT approximation, and the x^(-1/4) G-norm growth.

    python3 scripts/distribution_trends.py
"""

import math

from gltsym.distribution import acs_distance, default_test_functions, lt_gnorm_squared, weyl_eig_residual
from gltsym.extraction import separable
from gltsym.functions import FourierTable, builtin, parse_expr
from gltsym.generators import fd_diffusion_bands, laplacian_table, lt_matrix, toeplitz_tridiagonal


def main():
    fs = default_test_functions()
    lap = separable(parse_expr("1"), builtin("laplacian"))
    a = builtin("diffusion_coefficient")
    fd_sym = separable(a, builtin("laplacian"))

    print("max Weyl residual over the default test functions")
    print(f"{'n':>6} {'laplacian':>12} {'fd':>12}")
    for n in (100, 400, 1600, 6400):
        r_lap = max(weyl_eig_residual(toeplitz_tridiagonal(laplacian_table(), n), lap, fs))
        r_fd = max(weyl_eig_residual(fd_diffusion_bands(a, n), fd_sym, fs))
        print(f"{n:>6} {r_lap:>12.3e} {r_fd:>12.3e}")

    print("\nq_sqrt(n)(A_fd - LT_n(a, 2-2cos t))")
    for n in (100, 400, 1600):
        lt = lt_matrix(a, laplacian_table(), n, math.isqrt(n))
        print(f"{n:>6} {acs_distance(fd_diffusion_bands(a, n).toarray(), lt):.4f}")

    print("\nx^(-1/4) with f = 1: ||LT||_G^2 and ||LT^2||_G^2")
    one = FourierTable.from_dict({0: 1.0})
    c = builtin("inverse_fourth_root")
    for n in (10**2, 10**4, 10**6, 10**8):
        print(f"{n:>10} {lt_gnorm_squared(c, one, n):.4f} {lt_gnorm_squared(c, one, n, power=2):.4f}")


if __name__ == "__main__":
    main()
