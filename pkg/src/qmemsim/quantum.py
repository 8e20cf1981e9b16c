"""Quantum simulator with a single-qubit memory.

Joint output/memory vectors use the ordering ``|j> (x) |m>`` with the
output qutrit index ``j`` major, i.e. flat index ``2 * j + m``.
"""
import math

import numpy as np

from . import kernels
from .errors import ValidationError
from .numerics import (
    HERMITIAN_TOL,
    clip_spectrum,
    complete_to_unitary,
    hermitian_eig,
    von_neumann_entropy,
)
from .process import (
    ALPHABET,
    _check_word_length,
    _draw_initial,
    _initial_weights,
    _params,
    build_transition_matrix,
    stationary_distribution,
)

STATE_TOL = 1e-12


def encode_causal_qubit(params, i):
    """Qubit memory state for causal state ``i`` (real, non-negative amplitudes)."""
    q = _params(params).q
    if i == 0:
        v = [1.0, 0.0]
    elif i == 1:
        v = [math.sqrt(q), math.sqrt(1.0 - q)]
    elif i == 2:
        v = [0.0, 1.0]
    else:
        raise ValidationError(f"causal index must be 0, 1 or 2, got {i!r}")
    return np.array(v, dtype=np.complex128)


def encode_causal_qutrit(params, i):
    """Three-level encoding whose squared amplitudes are row ``i`` of ``T``."""
    if i not in ALPHABET:
        raise ValidationError(f"causal index must be 0, 1 or 2, got {i!r}")
    return np.sqrt(build_transition_matrix(params)[i]).astype(np.complex128)


def causal_qubits(params):
    """Columns are the three qubit causal states."""
    return np.column_stack([encode_causal_qubit(params, i) for i in ALPHABET])


def fanout_isometry(params):
    """3x2 isometry taking each qubit causal state to its qutrit encoding.

    Only ``p`` enters; ``q`` is carried by the qubit states themselves.
    """
    p = _params(params).p
    F = np.zeros((3, 2), dtype=np.complex128)
    F[0, 0] = math.sqrt(1.0 - p)
    F[2, 0] = math.sqrt(p)
    F[1, 1] = 1.0
    return F


def step_isometry(params):
    """6x2 isometry: memory qubit -> output qutrit (x) next memory qubit.

    Fixed by its action on the computational basis::

        V|0> = sqrt(1-p) |0>|S0> + sqrt(p) |2>|S2>
        V|1> = |1>|S1>

    so that ``V|Si> = sum_j sqrt(T_ij) |j>|Sj>`` for every causal state.
    """
    params = _params(params)
    p = params.p
    s0, s1, s2 = (encode_causal_qubit(params, i) for i in ALPHABET)
    V = np.zeros((6, 2), dtype=np.complex128)
    V[0:2, 0] = math.sqrt(1.0 - p) * s0
    V[4:6, 0] = math.sqrt(p) * s2
    V[2:4, 1] = s1
    return V


def branch_operators(V):
    """Kraus operators ``K_j = (<j| (x) I) V``, stacked as shape (3, 2, 2)."""
    return np.asarray(V).reshape(3, 2, 2)


def full_unitary(params):
    """6x6 unitary on qutrit (x) ancilla qubit, ancilla prepared in ``|0>``.

    On inputs ``|x> (x) |0>`` it acts as ``V F^dagger`` on the fan-out range,
    plus a fixed unit vector orthogonal to ``range(V)`` on the fan-out
    complement. Columns for ancilla ``|1>`` come from
    :func:`numerics.complete_to_unitary`; nothing observable depends on them.
    """
    params = _params(params)
    p = params.p
    F = fanout_isometry(params)
    V = step_isometry(params)
    f_perp = np.array([math.sqrt(p), 0.0, -math.sqrt(1.0 - p)], dtype=np.complex128)
    v_perp = complete_to_unitary(V)[:, 2]
    M = V @ F.conj().T + np.outer(v_perp, f_perp.conj())
    W = complete_to_unitary(M)
    U = np.empty((6, 6), dtype=np.complex128)
    U[:, 0::2] = W[:, :3]
    U[:, 1::2] = W[:, 3:]
    return U


def ancilla_input(qutrit):
    """Embed a qutrit state with the ancilla in ``|0>``."""
    x = np.zeros(6, dtype=np.complex128)
    x[0::2] = qutrit
    return x


def branch_probabilities(memory, V):
    branches = branch_operators(V) @ np.asarray(memory, dtype=np.complex128)
    return np.sum(np.abs(branches) ** 2, axis=1), branches


def apply_and_measure(memory, V, rng):
    """Apply ``V``, measure the output qutrit, collapse the memory.

    Returns ``(j, collapsed_memory)``.
    """
    memory = np.asarray(memory, dtype=np.complex128)
    if abs(np.linalg.norm(memory) - 1.0) > STATE_TOL:
        raise ValidationError("memory state is not normalised")
    rng = np.random.default_rng(rng)
    probs, branches = branch_probabilities(memory, V)
    cum = kernels.cumulative_table(probs / probs.sum())[0]
    j = min(int(np.searchsorted(cum, rng.random(), side="right")), 2)
    while probs[j] <= 0.0:
        j -= 1
    return j, branches[j] / math.sqrt(probs[j])


def run_quantum_trajectory(params, steps, initial=None, seed=None):
    """Iterate measure-and-collapse for ``steps`` steps.

    Uses the same draw order as :func:`process.run_classical_trajectory`:
    an initial causal state when ``initial`` is None, then ``steps``
    uniforms. Returns ``(symbols, states)``; the collapsed memory after a
    step is always the causal state labelled by the emitted symbol.
    """
    params = _params(params)
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    rng = np.random.default_rng(seed)
    if initial is None:
        initial = _draw_initial(rng, _initial_weights(params, None))
    elif initial not in ALPHABET:
        raise ValidationError(f"initial causal state must be 0, 1 or 2, got {initial!r}")
    u = rng.random(steps)
    symbols = kernels.quantum_walk(step_isometry(params), encode_causal_qubit(params, initial), u)
    return symbols, symbols.copy()


def quantum_word_distribution(params, initial, L):
    """Word probabilities from enumerating measurement branches.

    Ordering matches :func:`process.classical_word_distribution`. For
    ``initial="stationary"`` the memory starts in the stationary density
    matrix and probabilities are ``Tr(K_w rho K_w^dagger)``.
    """
    _check_word_length(L)
    K = branch_operators(step_isometry(params))
    if initial is None or initial == "stationary":
        rho = quantum_stationary_state(params)
        # factor rho = B B^dagger so branch vectors stay columns
        eig = hermitian_eig(rho)
        B = eig.eigenvectors * np.sqrt(clip_spectrum(eig.eigenvalues))
    else:
        B = encode_causal_qubit(params, initial)[:, None]
    amps = B[None, :, :]
    for _ in range(L):
        amps = np.einsum("jab,wbc->wjac", K, amps).reshape(-1, 2, B.shape[1])
    return np.sum(np.abs(amps) ** 2, axis=(1, 2))


def density(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def check_density_matrix(rho, tol=HERMITIAN_TOL):
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise ValidationError(f"density matrix must be 2x2, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValidationError(f"density matrix trace {np.trace(rho).real!r} != 1")
    if hermitian_eig(rho).eigenvalues[0] < -tol:
        raise ValidationError("density matrix is not positive semidefinite")
    return rho


def quantum_stationary_state(params):
    """``rho = sum_i pi_i |Si><Si|`` with ``pi`` the classical stationary law."""
    params = _params(params).require_interior()
    pi = stationary_distribution(build_transition_matrix(params))
    S = causal_qubits(params)
    return (S * pi) @ S.conj().T


def quantum_complexity(params):
    """Von Neumann entropy (bits) of the stationary memory state."""
    return von_neumann_entropy(quantum_stationary_state(params))


def quantum_max_entropy():
    """``log2`` of the quantum memory dimension (one qubit)."""
    return 1.0


def _psd_sqrt(rho):
    eig = hermitian_eig(rho)
    w = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    Q = eig.eigenvectors
    return (Q * w) @ Q.conj().T


def quantum_fidelity(rho, sigma):
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` (not squared)."""
    rho = check_density_matrix(rho)
    sigma = check_density_matrix(sigma)
    r = _psd_sqrt(rho)
    inner = r @ sigma @ r
    inner = 0.5 * (inner + inner.conj().T)
    f = float(np.sum(np.sqrt(np.clip(hermitian_eig(inner).eigenvalues, 0.0, None))))
    return min(max(f, 0.0), 1.0)


def classical_fidelity(P, Q):
    """Bhattacharyya coefficient ``sum_i sqrt(P_i Q_i)``."""
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape != Q.shape:
        raise ValidationError(f"length mismatch: {P.shape} vs {Q.shape}")
    if np.any(P < 0) or np.any(Q < 0):
        raise ValidationError("negative probabilities")
    return min(float(np.sum(np.sqrt(P * Q))), 1.0)
