"""Small dense linear algebra and information measures.

Everything here works on plain numpy arrays: complex matrices for operators,
1-D float arrays for probability vectors.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BoundaryError, ConvergenceError, ValidationError

PROB_TOL = 1e-12
HERMITIAN_TOL = 1e-10
ISOMETRY_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50
RESIDUAL_SKIP = 1e-8


@dataclass(frozen=True)
class HermitianEigenResult:
    """Eigenvalues in ascending order and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.conj().T


def as_matrix(A, name="matrix"):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    return A


def check_probability_vector(P, tol=PROB_TOL):
    """Return ``P`` as a float array, raising if it is not a distribution."""
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 1 or P.size == 0:
        raise ValidationError(f"probability vector must be 1-D and non-empty, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ValidationError("probability vector has non-finite entries")
    if np.any(P < -tol) or np.any(P > 1 + tol):
        raise ValidationError(f"probabilities outside [0, 1]: {P}")
    if abs(P.sum() - 1.0) > tol:
        raise ValidationError(f"probabilities sum to {P.sum()!r}, not 1")
    return P


def _eig2(A):
    a = A[0, 0].real
    d = A[1, 1].real
    b = A[0, 1]
    half = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), abs(b))
    w = np.array([half - rad, half + rad])
    if abs(b) <= 1e-300:
        if a <= d:
            return w, np.eye(2, dtype=np.complex128)
        return w, np.array([[0, 1], [1, 0]], dtype=np.complex128)
    Q = np.empty((2, 2), dtype=np.complex128)
    for k, lam in enumerate(w):
        # two equivalent kernel vectors of A - lam; keep the better conditioned
        u = np.array([b, lam - a])
        v = np.array([lam - d, np.conj(b)])
        x = u if np.linalg.norm(u) >= np.linalg.norm(v) else v
        Q[:, k] = x / np.linalg.norm(x)
    return w, Q


def hermitian_eig(A):
    """Eigendecomposition of a small Hermitian matrix (2 <= n <= 8).

    The 2x2 case is solved in closed form; larger matrices use cyclic
    Jacobi sweeps until the off-diagonal Frobenius norm drops below
    ``1e-13`` (scaled by the matrix norm when that exceeds 1).

    Raises
    ------
    ValidationError
        If ``A`` is not square Hermitian of a supported size.
    ConvergenceError
        If the sweep budget runs out.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    if A.shape != (n, n) or not 2 <= n <= 8:
        raise ValidationError(f"hermitian_eig needs a square matrix with 2 <= n <= 8, got {A.shape}")
    if np.max(np.abs(A - A.conj().T)) > HERMITIAN_TOL:
        raise ValidationError("matrix is not Hermitian")
    A = 0.5 * (A + A.conj().T)
    if n == 2:
        w, Q = _eig2(A)
    else:
        tol = JACOBI_TOL * max(1.0, np.linalg.norm(A))
        w, Q, ok = kernels.jacobi_hermitian(A, tol, JACOBI_MAX_SWEEPS)
        if not ok:
            raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
        order = np.argsort(w, kind="stable")
        w, Q = w[order], Q[:, order]
    return HermitianEigenResult(w, Q)


def shannon_entropy(P):
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    P = np.clip(check_probability_vector(P), 0.0, None)
    nz = P[P > 0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0


def clip_spectrum(w, tol=PROB_TOL):
    """Zero out round-off negatives in ``[-tol, 0)``; larger negatives are an error."""
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < -tol):
        raise ValidationError(f"spectrum has negative eigenvalue {w.min()!r}")
    return np.where(w < 0, 0.0, w)


def von_neumann_entropy(rho):
    """``-Tr(rho log2 rho)`` via :func:`hermitian_eig`."""
    w = clip_spectrum(hermitian_eig(rho).eigenvalues)
    w = w / w.sum()
    return shannon_entropy(w)


def complete_to_unitary(V):
    """Extend an ``n x k`` isometry to an ``n x n`` unitary.

    The first ``k`` columns are ``V`` itself. New columns come from
    Gram-Schmidt over the standard basis in index order; a candidate whose
    residual norm falls below ``1e-8`` is skipped. Projection is done twice
    for numerical orthogonality.
    """
    V = as_matrix(V, "V")
    n, k = V.shape
    if k >= n:
        raise ValidationError(f"need k < n, got shape {V.shape}")
    if np.max(np.abs(V.conj().T @ V - np.eye(k))) > ISOMETRY_TOL:
        raise ValidationError("columns of V are not orthonormal")
    cols = [V[:, i] for i in range(k)]
    for e in np.eye(n, dtype=np.complex128):
        if len(cols) == n:
            break
        B = np.column_stack(cols)
        r = e - B @ (B.conj().T @ e)
        if np.linalg.norm(r) < RESIDUAL_SKIP:
            continue
        r = r - B @ (B.conj().T @ r)
        cols.append(r / np.linalg.norm(r))
    U = np.column_stack(cols)
    U[:, :k] = V
    return U


def check_row_stochastic(T, tol=PROB_TOL):
    T = np.asarray(T, dtype=np.float64)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValidationError(f"transition matrix must be square, got {T.shape}")
    if np.any(T < -tol) or np.any(T > 1 + tol):
        raise ValidationError("transition matrix entries outside [0, 1]")
    if np.max(np.abs(T.sum(axis=1) - 1.0)) > tol:
        raise ValidationError("transition matrix rows do not sum to 1")
    return T


def _solve_pivoted(A, b, pivot_floor=1e-14):
    # row-order partial pivoting so results do not depend on LAPACK internals
    M = np.array(A, dtype=np.float64)
    x = np.array(b, dtype=np.float64)
    n = M.shape[0]
    for col in range(n):
        piv = col + int(np.argmax(np.abs(M[col:, col])))
        if abs(M[piv, col]) < pivot_floor:
            raise BoundaryError("fixed point is not unique (reducible chain)")
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        f = M[col + 1:, col] / M[col, col]
        M[col + 1:, col:] -= np.outer(f, M[col, col:])
        x[col + 1:] -= f * x[col]
    for r in range(n - 1, -1, -1):
        x[r] = (x[r] - M[r, r + 1:] @ x[r + 1:]) / M[r, r]
    return x


def stationary_fixed_point(T):
    """Stationary distribution ``pi = pi T`` of a row-stochastic matrix.

    Solves ``(T^T - I) pi = 0`` with the last equation replaced by
    normalisation. Raises :class:`BoundaryError` when the fixed point is
    not unique.
    """
    T = check_row_stochastic(T)
    n = T.shape[0]
    A = T.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = _solve_pivoted(A, b)
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    if np.any(pi < -1e-10):
        raise BoundaryError(f"fixed point has negative weights {pi}")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def power_iteration(T, steps=10_000, start=None):
    """Stationary distribution by repeated left multiplication; an oracle for tests."""
    T = check_row_stochastic(T)
    n = T.shape[0]
    pi = np.full(n, 1.0 / n) if start is None else np.asarray(start, dtype=np.float64)
    for _ in range(steps):
        pi = pi @ T
    return pi / pi.sum()
