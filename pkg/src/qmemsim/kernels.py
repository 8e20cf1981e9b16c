"""Hot numeric kernels, each in a numba flavour and a pure-numpy flavour.

The public names at the bottom of the module dispatch on
:data:`qmemsim._accel.USE_NUMBA`. Both flavours consume the same uniform
variates in the same order, so sampled trajectories agree between them.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit


def cumulative_table(probs):
    """Row-wise cumulative sums with trailing zero-probability tails pinned to 1.

    Pinning guards the inverse-CDF lookup against round-off selecting an
    impossible last outcome.
    """
    probs = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    cum = np.cumsum(probs, axis=1)
    for row, p in zip(cum, probs):
        nz = np.flatnonzero(p > 0)
        last = nz[-1] if nz.size else p.size - 1
        row[last:] = 1.0
    return cum


# ---------------------------------------------------------------------------
# Markov chain sampling
# ---------------------------------------------------------------------------

def _sample_chain_py(cum, start, u):
    n = u.shape[0]
    k = cum.shape[1]
    out = np.empty(n, dtype=np.int64)
    cur = start
    for t in range(n):
        j = 0
        while j < k - 1 and u[t] >= cum[cur, j]:
            j += 1
        out[t] = j
        cur = j
    return out


def sample_chain_numpy(cum, start, u):
    """Walk a finite Markov chain from ``start`` driven by uniforms ``u``.

    The lookup for every (state, uniform) pair is vectorised; only the
    state chaining itself is sequential.
    """
    k = cum.shape[1]
    nxt = np.empty((k, u.shape[0]), dtype=np.int64)
    for s in range(k):
        nxt[s] = np.minimum(np.searchsorted(cum[s], u, side="right"), k - 1)
    out = np.empty(u.shape[0], dtype=np.int64)
    cur = int(start)
    rows = nxt.tolist()
    for t in range(u.shape[0]):
        cur = rows[cur][t]
        out[t] = cur
    return out


sample_chain_numba = njit(cache=True)(_sample_chain_py)


# ---------------------------------------------------------------------------
# Quantum memory walk: isometry, measure the output qutrit, collapse memory
# ---------------------------------------------------------------------------

def _quantum_walk_py(V, psi0, u):
    n = u.shape[0]
    out = np.empty(n, dtype=np.int64)
    a0 = psi0[0]
    a1 = psi0[1]
    probs = np.empty(3)
    phi = np.empty(6, dtype=np.complex128)
    for t in range(n):
        for r in range(6):
            phi[r] = V[r, 0] * a0 + V[r, 1] * a1
        total = 0.0
        for j in range(3):
            pj = abs(phi[2 * j]) ** 2 + abs(phi[2 * j + 1]) ** 2
            probs[j] = pj
            total += pj
        last = 2
        while last > 0 and probs[last] <= 0.0:
            last -= 1
        x = u[t]
        acc = 0.0
        j = 0
        while j < last:
            acc += probs[j] / total
            if x < acc:
                break
            j += 1
        while probs[j] <= 0.0:
            j -= 1
        norm = math.sqrt(probs[j])
        a0 = phi[2 * j] / norm
        a1 = phi[2 * j + 1] / norm
        out[t] = j
    return out


def quantum_walk_numpy(V, psi0, u):
    """Iterate measure-and-collapse on a memory qubit; returns output symbols."""
    out = np.empty(u.shape[0], dtype=np.int64)
    psi = np.asarray(psi0, dtype=np.complex128)
    for t, x in enumerate(u.tolist()):
        branches = (V @ psi).reshape(3, 2)
        probs = np.einsum("ij,ij->i", branches.real, branches.real) + np.einsum(
            "ij,ij->i", branches.imag, branches.imag
        )
        cum = cumulative_table(probs / probs.sum())[0]
        j = min(int(np.searchsorted(cum, x, side="right")), 2)
        while probs[j] <= 0.0:
            j -= 1
        psi = branches[j] / math.sqrt(probs[j])
        out[t] = j
    return out


quantum_walk_numba = njit(cache=True)(_quantum_walk_py)


# ---------------------------------------------------------------------------
# Cyclic Jacobi for small complex Hermitian matrices
# ---------------------------------------------------------------------------

def _rotation(app, aqq, apq):
    # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] zeroes the (p, q) entry
    mag = abs(apq)
    phase = apq / mag
    tau = (aqq - app) / (2.0 * mag)
    if tau >= 0.0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    ph = phase.conjugate()
    return c + 0j, s + 0j, -s * ph, c * ph


_rotation_numba = njit(cache=True)(_rotation)


def _offdiag_norm(a):
    n = a.shape[0]
    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off += abs(a[i, j]) ** 2
    return math.sqrt(2.0 * off)


_offdiag_norm_numba = njit(cache=True)(_offdiag_norm)


@njit(cache=True)
def jacobi_hermitian_numba(A, tol, max_sweeps):
    n = A.shape[0]
    a = A.copy()
    v = np.eye(n, dtype=np.complex128)
    converged = False
    for _ in range(max_sweeps):
        if _offdiag_norm_numba(a) <= tol:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) == 0.0:
                    continue
                jpp, jpq, jqp, jqq = _rotation_numba(a[p, p].real, a[q, q].real, a[p, q])
                for k in range(n):
                    x, y = a[k, p], a[k, q]
                    a[k, p] = x * jpp + y * jqp
                    a[k, q] = x * jpq + y * jqq
                for k in range(n):
                    x, y = a[p, k], a[q, k]
                    a[p, k] = jpp.conjugate() * x + jqp.conjugate() * y
                    a[q, k] = jpq.conjugate() * x + jqq.conjugate() * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x, y = v[k, p], v[k, q]
                    v[k, p] = x * jpp + y * jqp
                    v[k, q] = x * jpq + y * jqq
    if not converged and _offdiag_norm_numba(a) <= tol:
        converged = True
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, converged


def jacobi_hermitian_numpy(A, tol, max_sweeps):
    """Cyclic complex Jacobi; returns unsorted (eigenvalues, vectors, converged)."""
    a = np.array(A, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    iu = np.triu_indices(n, 1)
    converged = False
    for _ in range(max_sweeps):
        if math.sqrt(2.0) * np.linalg.norm(a[iu]) <= tol:
            converged = True
            break
        for p, q in zip(*iu):
            if a[p, q] == 0:
                continue
            jpp, jpq, jqp, jqq = _rotation(a[p, p].real, a[q, q].real, a[p, q])
            J = np.array([[jpp, jpq], [jqp, jqq]])
            idx = [p, q]
            a[:, idx] = a[:, idx] @ J
            a[idx, :] = J.conj().T @ a[idx, :]
            a[p, q] = a[q, p] = 0.0
            v[:, idx] = v[:, idx] @ J
    if not converged:
        converged = math.sqrt(2.0) * np.linalg.norm(a[iu]) <= tol
    return np.diagonal(a).real.copy(), v, converged


# ---------------------------------------------------------------------------
# Batched complexities over (p, q) points
# ---------------------------------------------------------------------------

@njit(cache=True)
def _solve3(A, b):
    # Gaussian elimination, partial pivoting in row order; NaN when singular
    M = A.copy()
    x = b.copy()
    for col in range(3):
        piv = col
        best = abs(M[col, col])
        for r in range(col + 1, 3):
            if abs(M[r, col]) > best:
                best = abs(M[r, col])
                piv = r
        if best < 1e-14:
            x[:] = np.nan
            return x
        if piv != col:
            for k in range(3):
                M[col, k], M[piv, k] = M[piv, k], M[col, k]
            x[col], x[piv] = x[piv], x[col]
        for r in range(col + 1, 3):
            f = M[r, col] / M[col, col]
            for k in range(col, 3):
                M[r, k] -= f * M[col, k]
            x[r] -= f * x[col]
    for r in range(2, -1, -1):
        s = x[r]
        for k in range(r + 1, 3):
            s -= M[r, k] * x[k]
        x[r] = s / M[r, r]
    return x


@njit(cache=True)
def _h2(x):
    if x <= 0.0:
        return 0.0
    return -x * math.log2(x)


@njit(cache=True)
def complexity_batch_numba(p, q):
    n = p.shape[0]
    c_mu = np.empty(n)
    c_q = np.empty(n)
    A = np.empty((3, 3))
    b = np.array([0.0, 0.0, 1.0])
    for k in range(n):
        pk, qk = p[k], q[k]
        # rows of A are columns of T minus identity; last row is normalisation
        A[0, 0] = -pk
        A[0, 1] = qk * (1.0 - pk)
        A[0, 2] = 0.0
        A[1, 0] = 0.0
        A[1, 1] = -qk
        A[1, 2] = 1.0
        A[2, 0] = 1.0
        A[2, 1] = 1.0
        A[2, 2] = 1.0
        pi = _solve3(A, b)
        c_mu[k] = _h2(pi[0]) + _h2(pi[1]) + _h2(pi[2])
        r00 = pi[0] + pi[1] * qk
        r11 = pi[2] + pi[1] * (1.0 - qk)
        r01 = pi[1] * math.sqrt(qk * (1.0 - qk))
        half = 0.5 * (r00 + r11)
        rad = math.sqrt(0.25 * (r00 - r11) ** 2 + r01 * r01)
        lo = half - rad
        if lo < 0.0:
            lo = 0.0
        c_q[k] = _h2(lo) + _h2(half + rad)
    return c_mu, c_q


def _xlog2x(x):
    x = np.clip(x, 0.0, None)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, -x * np.log2(safe), 0.0)


def complexity_batch_numpy(p, q):
    """(C_mu, C_Q) for arrays of interior parameters, fully vectorised."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    n = p.shape[0]
    A = np.zeros((n, 3, 3))
    A[:, 0, 0] = -p
    A[:, 0, 1] = q * (1.0 - p)
    A[:, 1, 1] = -q
    A[:, 1, 2] = 1.0
    A[:, 2, :] = 1.0
    b = np.broadcast_to(np.array([0.0, 0.0, 1.0]), (n, 3))[..., None]
    pi = np.linalg.solve(A, b)[..., 0]
    c_mu = _xlog2x(pi).sum(axis=1)
    r00 = pi[:, 0] + pi[:, 1] * q
    r11 = pi[:, 2] + pi[:, 1] * (1.0 - q)
    r01 = pi[:, 1] * np.sqrt(q * (1.0 - q))
    half = 0.5 * (r00 + r11)
    rad = np.sqrt(0.25 * (r00 - r11) ** 2 + r01 ** 2)
    c_q = _xlog2x(half - rad) + _xlog2x(half + rad)
    return c_mu, c_q


if USE_NUMBA:
    sample_chain = sample_chain_numba
    quantum_walk = quantum_walk_numba
    jacobi_hermitian = jacobi_hermitian_numba
    complexity_batch = complexity_batch_numba
else:
    sample_chain = sample_chain_numpy
    quantum_walk = quantum_walk_numpy
    jacobi_hermitian = jacobi_hermitian_numpy
    complexity_batch = complexity_batch_numpy
