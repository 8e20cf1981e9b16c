"""The post-processed perturbed coin and its optimal classical simulator.

A two-state coin flips 0 -> 1 with probability ``p`` and 1 -> 0 with
probability ``q``. Post-processing relabels every 0 that is immediately
followed by a 1 as a 2, giving a process over ``{0, 1, 2}`` whose causal
state is simply the last emitted symbol.

Random streams
--------------
All samplers take ``seed`` (anything accepted by
:func:`numpy.random.default_rng`, including a ``Generator``). Draw order is
fixed: first the initial state, if it is not given, then one block of
``n`` uniforms for the ``n`` transitions.
"""
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels
from .errors import BoundaryError, ValidationError
from .numerics import shannon_entropy, stationary_fixed_point

ALPHABET = (0, 1, 2)
CAUSAL_LABELS = ("S0", "S1", "S2")
MAX_WORD_LENGTH = 8


@dataclass(frozen=True)
class ProcessParams:
    """Coin flip probabilities: ``p`` for 0 -> 1, ``q`` for 1 -> 0."""

    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
                raise ValidationError(f"{name} must be a finite number, got {v!r}")
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def interior(self):
        return 0.0 < self.p < 1.0 and 0.0 < self.q < 1.0

    def require_interior(self):
        if not self.interior:
            raise BoundaryError(
                f"(p, q) = ({self.p}, {self.q}) is on the boundary; "
                "complexity measures need 0 < p, q < 1"
            )
        return self


def _params(params):
    if isinstance(params, ProcessParams):
        return params
    return ProcessParams(*params)


def build_transition_matrix(params):
    """3x3 row-stochastic ``T[i, j] = P(emit j | causal state i)``."""
    params = _params(params)
    p, q = params.p, params.q
    return np.array(
        [
            [1.0 - p, 0.0, p],
            [q * (1.0 - p), 1.0 - q, p * q],
            [0.0, 1.0, 0.0],
        ]
    )


def coin_matrix(params):
    params = _params(params)
    return np.array([[1.0 - params.p, params.p], [params.q, 1.0 - params.q]])


def coin_stationary(params):
    params = _params(params)
    s = params.p + params.q
    if s == 0.0:
        raise BoundaryError("frozen coin (p = q = 0) has no unique stationary state")
    return np.array([params.q / s, params.p / s])


def _draw_initial(rng, weights):
    return int(np.searchsorted(np.cumsum(weights), rng.random(), side="right").clip(0, len(weights) - 1))


def sample_raw_coin(params, length, initial=None, seed=None):
    """Sample ``length`` coin states (the first is the initial state).

    ``initial=None`` draws the first state from the coin's stationary law.
    """
    params = _params(params)
    if length < 1:
        raise ValidationError("length must be >= 1")
    rng = np.random.default_rng(seed)
    if initial is None:
        initial = _draw_initial(rng, coin_stationary(params))
    if initial not in (0, 1):
        raise ValidationError(f"coin state must be 0 or 1, got {initial!r}")
    u = rng.random(length - 1)
    cum = kernels.cumulative_table(coin_matrix(params))
    rest = kernels.sample_chain(cum, int(initial), u)
    return np.concatenate(([initial], rest)).astype(np.int64)


def post_process(raw):
    """Relabel each raw 0 that precedes a 1 as 2.

    A trailing raw 0 has no lookahead, so it is dropped: the output is one
    symbol shorter than ``raw`` exactly when ``raw`` ends in 0.
    """
    raw = np.asarray(raw, dtype=np.int64)
    if raw.ndim != 1 or raw.size < 2:
        raise ValidationError("raw trajectory must have length >= 2")
    if np.any((raw != 0) & (raw != 1)):
        raise ValidationError("raw trajectory must be over {0, 1}")
    out = raw.copy()
    out[:-1][(raw[:-1] == 0) & (raw[1:] == 1)] = 2
    if raw[-1] == 0:
        out = out[:-1]
    return out


def causal_state_of(history):
    """Causal state index of a non-empty output history (its last symbol)."""
    history = np.asarray(history, dtype=np.int64)
    if history.size == 0:
        raise ValidationError("empty history has no causal state; supply an initial state")
    last = int(history.reshape(-1)[-1])
    if last not in ALPHABET:
        raise ValidationError(f"symbol {last} not in {{0, 1, 2}}")
    return last


def classical_step(state, T, rng):
    """One step of the classical machine: returns ``(symbol, next_state)``."""
    rng = np.random.default_rng(rng)
    cum = kernels.cumulative_table(T[state])[0]
    j = min(int(np.searchsorted(cum, rng.random(), side="right")), len(cum) - 1)
    return j, j


def stationary_distribution(T):
    """Stationary causal-state distribution of the transition matrix ``T``."""
    return stationary_fixed_point(T)


def stationary_closed_form(params):
    params = _params(params)
    p, q = params.p, params.q
    return np.array([q * (1.0 - p), p, p * q]) / (p + q)


def classical_complexity(params):
    """Shannon entropy (bits) of the stationary causal-state distribution."""
    params = _params(params).require_interior()
    return shannon_entropy(stationary_distribution(build_transition_matrix(params)))


def classical_max_entropy():
    """``log2`` of the classical memory dimension (three causal states)."""
    return math.log2(3)


def _initial_weights(params, initial):
    if initial is None or initial == "stationary":
        return stationary_distribution(build_transition_matrix(_params(params).require_interior()))
    if initial not in ALPHABET:
        raise ValidationError(f"initial causal state must be 0, 1, 2 or 'stationary', got {initial!r}")
    w = np.zeros(3)
    w[initial] = 1.0
    return w


def _check_word_length(L):
    if not 1 <= L <= MAX_WORD_LENGTH:
        raise ValidationError(f"word length must be in [1, {MAX_WORD_LENGTH}], got {L}")


def word_labels(L):
    """Words of length ``L`` in the order used by the word distributions."""
    return ["".join(map(str, w)) for w in product(ALPHABET, repeat=L)]


def classical_word_distribution(params, initial, L):
    """Exact probabilities of all ``3**L`` output words.

    Entry ``k`` belongs to the word whose base-3 digits (most significant
    first) spell ``k``; see :func:`word_labels`. ``initial`` is a causal
    state index or ``"stationary"``.
    """
    _check_word_length(L)
    T = build_transition_matrix(params)
    probs = _initial_weights(params, initial) @ T
    for _ in range(L - 1):
        # the current causal state is the last symbol of each word
        last = np.arange(probs.size) % 3
        probs = (probs[:, None] * T[last]).reshape(-1)
    return probs


def run_classical_trajectory(params, steps, initial=None, seed=None):
    """Emit ``steps`` symbols from the classical machine.

    Returns ``(symbols, states)`` where ``states[t]`` is the causal state
    after emitting ``symbols[t]``.
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
    cum = kernels.cumulative_table(build_transition_matrix(params))
    symbols = kernels.sample_chain(cum, int(initial), u)
    return symbols, symbols.copy()
