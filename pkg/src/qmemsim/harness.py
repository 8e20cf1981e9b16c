"""Finite-shot emulation of the verification experiment.

The pipeline mirrors what a lab would do with one simulation step:

1. prepare each causal state, record output counts -> estimated ``T``;
2. run Pauli tomography on the output memory -> conditional states;
3. weight the conditional states by the stationary law of the estimated
   ``T`` -> stationary memory state and its entropy;
4. bootstrap the counts (Poisson resampling) for an uncertainty on that
   entropy.

Tomography can be conditioned on the input causal state only
(``conditioning="input"``) or on the (input, output) pair
(``conditioning="output"``).
"""
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import ValidationError
from .numerics import hermitian_eig, stationary_fixed_point, von_neumann_entropy
from .process import _params, build_transition_matrix, classical_complexity
from .quantum import (
    causal_qubits,
    check_density_matrix,
    classical_fidelity,
    density,
    quantum_complexity,
    quantum_fidelity,
    quantum_stationary_state,
)

PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
BASES = ("X", "Y", "Z")
BOOTSTRAP_SAMPLES = 200
CONDITIONINGS = ("input", "output")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarising strength on the output memory and per-output detection efficiencies."""

    depolarizing: float = 0.0
    efficiencies: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if not 0.0 <= self.depolarizing <= 1.0:
            raise ValidationError(f"depolarizing strength must be in [0, 1], got {self.depolarizing}")
        eff = tuple(float(e) for e in self.efficiencies)
        if len(eff) != 3 or not all(0.0 < e <= 1.0 for e in eff):
            raise ValidationError(f"need three efficiencies in (0, 1], got {self.efficiencies}")
        object.__setattr__(self, "efficiencies", eff)

    def depolarize(self, rho):
        return (1.0 - self.depolarizing) * rho + self.depolarizing * np.eye(2) / 2


@dataclass(frozen=True)
class TomographyCounts:
    """Pauli measurement counts for one qubit state.

    ``counts[b]`` holds ``(n_plus, n_minus)`` for basis ``BASES[b]``.
    """

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != (3, 2):
            raise ValidationError(f"tomography counts must have shape (3, 2), got {c.shape}")
        if np.any(c < 0):
            raise ValidationError("negative tomography counts")
        object.__setattr__(self, "counts", c)

    @property
    def expectations(self):
        totals = self.counts.sum(axis=1)
        if np.any(totals <= 0):
            missing = [BASES[b] for b in np.flatnonzero(totals <= 0)]
            raise ValidationError(f"no shots recorded in basis {', '.join(missing)}")
        return (self.counts[:, 0] - self.counts[:, 1]) / totals


def bloch_vector(rho):
    rho = np.asarray(rho, dtype=np.complex128)
    return np.array([np.trace(rho @ PAULI[b]).real for b in BASES])


def from_bloch(r):
    return 0.5 * (np.eye(2) + sum(rb * PAULI[b] for rb, b in zip(r, BASES)))


def detection_weights(T, noise):
    """Output probabilities reweighted by detection efficiency, renormalised per row."""
    W = np.atleast_2d(T) * np.asarray(noise.efficiencies)
    return W / W.sum(axis=1, keepdims=True)


def simulate_counts(params, i, shots, noise=NoiseModel(), seed=None):
    """Output-symbol counts for ``shots`` runs prepared in causal state ``i``."""
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    probs = detection_weights(build_transition_matrix(params)[i], noise)[0]
    return rng.multinomial(shots, probs)


def estimate_transition_matrix(counts):
    """Row-normalised relative frequencies of a counts table."""
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=1, keepdims=True)
    if np.any(totals <= 0):
        raise ValidationError("counts table has an empty row")
    return counts / totals


def simulate_tomography(state, shots, seed=None):
    """Sample ``shots`` Pauli measurements per basis; ``+`` has probability ``(1 + r_b) / 2``."""
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    rho = check_density_matrix(state)
    rng = np.random.default_rng(seed)
    p_plus = np.clip((1.0 + bloch_vector(rho)) / 2.0, 0.0, 1.0)
    plus = rng.binomial(shots, p_plus)
    return TomographyCounts(np.column_stack([plus, shots - plus]))


def exact_tomography(state, shots=1.0):
    """Expected (non-integer) tomography counts; the infinite-shot limit."""
    p_plus = (1.0 + bloch_vector(state)) / 2.0
    return TomographyCounts(np.column_stack([p_plus, 1.0 - p_plus]) * shots)


def linear_inversion(counts):
    """``(I + r . sigma) / 2`` from empirical Pauli expectations. May be unphysical."""
    if not isinstance(counts, TomographyCounts):
        counts = TomographyCounts(counts)
    return from_bloch(counts.expectations)


def project_to_physical(rho):
    """Clip negative eigenvalues to zero and renormalise the trace."""
    eig = hermitian_eig(rho)
    w = np.clip(eig.eigenvalues, 0.0, None)
    w = w / w.sum()
    Q = eig.eigenvectors
    out = (Q * w) @ Q.conj().T
    return 0.5 * (out + out.conj().T)


def reconstruct_stationary(T_hat, states):
    """Assemble the stationary memory state from measured ingredients.

    ``states`` is either shape (3, 2, 2), one output-memory state per input
    causal state, or shape (3, 3, 2, 2), one per (input, output) pair. The
    weights are the stationary law ``d`` of ``T_hat``; the result is
    ``sum_i d_i sum_j T_hat[i, j] rho[i, j]`` (outcome-resolved) or
    ``sum_i d_i rho[i]``.
    """
    T_hat = np.asarray(T_hat, dtype=np.float64)
    states = np.asarray(states, dtype=np.complex128)
    d = stationary_fixed_point(T_hat)
    if states.shape == (3, 2, 2):
        rho = np.einsum("i,iab->ab", d, states)
    elif states.shape == (3, 3, 2, 2):
        rho = np.einsum("i,ij,ijab->ab", d, T_hat, states)
    else:
        raise ValidationError(f"conditional states must have shape (3,2,2) or (3,3,2,2), got {states.shape}")
    return 0.5 * (rho + rho.conj().T)


def ideal_conditional_states(params, noise=NoiseModel(), conditioning="input"):
    """Output memory states the ideal machine produces, after memory noise.

    With ``conditioning="input"`` the state for input ``i`` is the
    detection-weighted mixture over outputs of ``|Sj><Sj|``.
    """
    S = causal_qubits(params)
    collapsed = np.array([noise.depolarize(density(S[:, j])) for j in range(3)])
    if conditioning == "output":
        return np.broadcast_to(collapsed, (3, 3, 2, 2)).copy()
    if conditioning == "input":
        W = detection_weights(build_transition_matrix(params), noise)
        return np.einsum("ij,jab->iab", W, collapsed)
    raise ValidationError(f"conditioning must be one of {CONDITIONINGS}, got {conditioning!r}")


@dataclass
class ReconstructionReport:
    params: tuple
    shots: object
    seed: object
    noise: NoiseModel
    conditioning: str
    T_hat: np.ndarray
    states: dict
    stationary_state: np.ndarray
    classical_fidelities: list
    quantum_fidelities: dict
    stationary_fidelity: float
    c_mu: float
    c_q: float
    c_q_hat: float
    c_q_std: float
    bootstrap_samples: int
    bootstrap_values: np.ndarray = field(repr=False, default=None)

    def to_dict(self):
        """JSON-ready dict; matrices row-major, states as Bloch vectors."""
        return {
            "tool": "qmemsim",
            "version": __version__,
            "params": {"p": self.params[0], "q": self.params[1]},
            "shots": self.shots,
            "seed": self.seed,
            "noise": asdict(self.noise) | {"efficiencies": list(self.noise.efficiencies)},
            "conditioning": self.conditioning,
            "T_hat": self.T_hat.tolist(),
            "bloch_vectors": {k: bloch_vector(v).tolist() for k, v in self.states.items()},
            "stationary_bloch_vector": bloch_vector(self.stationary_state).tolist(),
            "classical_fidelities": list(self.classical_fidelities),
            "quantum_fidelities": dict(self.quantum_fidelities),
            "stationary_fidelity": self.stationary_fidelity,
            "c_mu": self.c_mu,
            "c_q": self.c_q,
            "c_q_hat": self.c_q_hat,
            "c_q_std": self.c_q_std,
            "bootstrap_samples": self.bootstrap_samples,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _state_keys(conditioning, present):
    if conditioning == "input":
        return [f"S{i}" for i in range(3)]
    return [f"S{i}->{j}" for i in range(3) for j in range(3) if present[i, j]]


def _reconstruct(counts, tomo, conditioning):
    """counts (3, 3), tomo (..., 3, 2) -> (T_hat, states, stationary)."""
    T_hat = estimate_transition_matrix(counts)
    lead = tomo.shape[:-2]
    states = np.empty(lead + (2, 2), dtype=np.complex128)
    for idx in np.ndindex(*lead):
        if tomo[idx].sum() > 0:
            states[idx] = project_to_physical(linear_inversion(tomo[idx]))
        else:
            # branch never observed; its weight in T_hat is zero
            states[idx] = np.eye(2) / 2
    return T_hat, states, reconstruct_stationary(T_hat, states)


def verification_report(params, shots, noise=NoiseModel(), seed=None, conditioning="input",
                        bootstrap=BOOTSTRAP_SAMPLES):
    """Run the whole verification pipeline and return a :class:`ReconstructionReport`.

    ``shots`` is the number of preparations per input causal state; the
    same number of shots is spent per Pauli basis on each tomographed
    state (per-branch tomography spends the branch's observed counts).
    ``shots=None`` plugs in exact probabilities instead of samples and
    skips the bootstrap.

    Seeds: one ``SeedSequence(seed)`` is spawned into three child streams,
    used in order for output counts, tomography and bootstrap.
    """
    params = _params(params).require_interior()
    if conditioning not in CONDITIONINGS:
        raise ValidationError(f"conditioning must be one of {CONDITIONINGS}, got {conditioning!r}")
    if shots is not None and shots < 1:
        raise ValidationError("shots must be >= 1")
    T = build_transition_matrix(params)
    prepared = ideal_conditional_states(params, noise, conditioning)
    ideal = ideal_conditional_states(params, NoiseModel(), conditioning)
    ss_counts, ss_tomo, ss_boot = np.random.SeedSequence(seed).spawn(3)

    if shots is None:
        counts = detection_weights(T, noise)
    else:
        rng = np.random.default_rng(ss_counts)
        counts = np.array([simulate_counts(params, i, shots, noise, rng) for i in range(3)])

    present = counts > 0
    lead = (3,) if conditioning == "input" else (3, 3)
    tomo = np.zeros(lead + (3, 2))
    rng = np.random.default_rng(ss_tomo)
    for idx in np.ndindex(*lead):
        if conditioning == "output" and not present[idx]:
            continue
        n = shots if conditioning == "input" else (None if shots is None else int(counts[idx]))
        if n is None:
            tomo[idx] = exact_tomography(prepared[idx]).counts
        else:
            tomo[idx] = simulate_tomography(prepared[idx], n, rng).counts

    T_hat, states, rho_hat = _reconstruct(counts, tomo, conditioning)
    c_q_hat = von_neumann_entropy(rho_hat)

    keys = _state_keys(conditioning, present)
    flat_states = states.reshape(-1, 2, 2)
    if conditioning == "input":
        state_map = dict(zip(keys, flat_states))
        ideal_map = dict(zip(keys, ideal))
    else:
        sel = np.flatnonzero(present.reshape(-1))
        state_map = dict(zip(keys, flat_states[sel]))
        ideal_map = dict(zip(keys, ideal.reshape(-1, 2, 2)[sel]))

    values = np.empty(0)
    std = 0.0
    if shots is not None and bootstrap > 0:
        rng = np.random.default_rng(ss_boot)
        values = np.empty(bootstrap)
        for b in range(bootstrap):
            c_b = rng.poisson(counts)
            t_b = rng.poisson(tomo)
            if np.any(c_b.sum(axis=1) == 0):
                c_b = np.where(c_b.sum(axis=1, keepdims=True) == 0, counts, c_b)
            values[b] = von_neumann_entropy(_reconstruct(c_b, t_b, conditioning)[2])
        std = float(np.std(values, ddof=1))

    return ReconstructionReport(
        params=(params.p, params.q),
        shots=shots,
        seed=seed,
        noise=noise,
        conditioning=conditioning,
        T_hat=T_hat,
        states=state_map,
        stationary_state=rho_hat,
        classical_fidelities=[classical_fidelity(T_hat[i], T[i]) for i in range(3)],
        quantum_fidelities={k: quantum_fidelity(state_map[k], ideal_map[k]) for k in keys},
        stationary_fidelity=quantum_fidelity(rho_hat, quantum_stationary_state(params)),
        c_mu=classical_complexity(params),
        c_q=quantum_complexity(params),
        c_q_hat=c_q_hat,
        c_q_std=std,
        bootstrap_samples=int(values.size),
        bootstrap_values=values,
    )
