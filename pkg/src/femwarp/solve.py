"""Linear-system backends: sparse direct factorization with pattern reuse,
Gauss-Seidel sweeps, and a conjugate-gradient fallback.
"""

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .errors import DivergedError, NotPositiveDefiniteError, SingularSystemError

_SPD_OPTS = dict(
    permc_spec="MMD_AT_PLUS_A",
    diag_pivot_thresh=0.0,
    options=dict(SymmetricMode=True),
)


class Factorization:
    """Reusable factorization of a sparse weight matrix.

    For symmetric positive definite input the factorization is a Cholesky-like
    no-pivoting LU (positive pivots enforced); for the nonsymmetric schemes a
    general sparse LU is used.  ``refactor`` accepts a new matrix with the
    identical nonzero pattern, mirroring symbolic-phase reuse across the
    small steps of a warp.
    """

    def __init__(self, a, spd=True):
        a = sparse.csc_matrix(a)
        if a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        self.n = a.shape[0]
        self.spd = spd
        a.sort_indices()
        self.pattern = (a.indptr.copy(), a.indices.copy())
        self._numeric(a)
        self.n_numeric = 1

    def _numeric(self, a):
        if self.spd:
            diff = a - a.T
            if diff.nnz and abs(diff).max() > 1e-12 * max(1.0, abs(a).max()):
                raise NotPositiveDefiniteError("matrix is not symmetric")
            try:
                lu = spla.splu(a, **_SPD_OPTS)
            except RuntimeError as exc:
                raise NotPositiveDefiniteError(str(exc)) from exc
            # with a zero pivot threshold the diagonal of U carries the
            # LDL pivots; any nonpositive pivot disproves definiteness
            if np.any(lu.U.diagonal() <= 0.0):
                raise NotPositiveDefiniteError("nonpositive pivot encountered")
        else:
            try:
                lu = spla.splu(a)
            except RuntimeError as exc:
                raise SingularSystemError(str(exc)) from exc
        self._lu = lu

    def refactor(self, a):
        """Refactor a matrix sharing this factorization's nonzero pattern."""
        a = sparse.csc_matrix(a)
        a.sort_indices()
        if not (
            np.array_equal(a.indptr, self.pattern[0])
            and np.array_equal(a.indices, self.pattern[1])
        ):
            raise ValueError("nonzero pattern differs; build a new Factorization")
        self._numeric(a)
        self.n_numeric += 1
        return self

    def solve(self, b):
        b = np.asarray(b, dtype=float)
        return self._lu.solve(b)


def factor(a, spd=True):
    """Factor a sparse matrix; raises NOT_POSITIVE_DEFINITE for spd input
    that is not positive definite."""
    return Factorization(a, spd=spd)


def solve_multi(f, b):
    """Columnwise solves against one factorization.

    Columns are independent: a (m, k) solve is bitwise identical to k
    single-column solves.
    """
    b = np.asarray(b, dtype=float)
    if b.shape[0] != f.n:
        raise ValueError(f"rhs has {b.shape[0]} rows, expected {f.n}")
    if b.ndim == 1:
        return f.solve(b)
    return np.column_stack([f.solve(b[:, j]) for j in range(b.shape[1])])


def gauss_seidel(a_ii, a_ib, boundary_coords, initial, tol=1e-10, max_sweeps=None):
    """Gauss-Seidel sweeps for A_I X = -A_B X_B.

    Sweep order is the ascending interior index.  With UNIFORM weights each
    sweep is one pass of classical Laplacian smoothing.  Raises DIVERGED if
    the residual grows over 10 consecutive sweeps.
    """
    a_ii = sparse.csr_matrix(a_ii)
    m = a_ii.shape[0]
    if max_sweeps is None:
        max_sweeps = 10 * m
    b = -sparse.csr_matrix(a_ib) @ np.asarray(boundary_coords, dtype=float)
    x = np.array(initial, dtype=float)
    lower = sparse.tril(a_ii, 0, format="csr")
    upper = sparse.triu(a_ii, 1, format="csr")
    bnorm = max(np.abs(b).max(), 1e-300)

    def residual(xx):
        return np.abs(a_ii @ xx - b).max() / bnorm

    res = residual(x)
    growth = 0
    sweeps = 0
    while res > tol and sweeps < max_sweeps:
        x = spla.spsolve_triangular(lower, b - upper @ x, lower=True)
        sweeps += 1
        new_res = residual(x)
        growth = growth + 1 if new_res > res else 0
        if growth >= 10:
            raise DivergedError(
                f"residual grew over 10 consecutive sweeps ({new_res:g})"
            )
        res = new_res
    return x, sweeps


def conjugate_gradient(a_ii, b, tol=1e-10, maxiter=None):
    """CG solve for the symmetric scheme; large-mesh fallback."""
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        cols = [b]
    else:
        cols = [b[:, j] for j in range(b.shape[1])]
    out = []
    for col in cols:
        x, info = spla.cg(a_ii, col, rtol=tol, maxiter=maxiter)
        if info != 0:
            raise DivergedError(f"conjugate gradient did not converge (info={info})")
        out.append(x)
    return out[0] if b.ndim == 1 else np.column_stack(out)
