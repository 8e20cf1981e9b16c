import math
from itertools import product

import numpy as np
import pytest

from qmemsim import process as pr
from qmemsim.errors import BoundaryError, ValidationError
from qmemsim.numerics import power_iteration


def raw_coin_word_distribution(params, initial, L):
    """Oracle: enumerate raw coin strings and push them through post-processing.

    The coin value one step after the last emitted symbol is 0 for S0, 1
    for S2, and distributed as a flip from 1 for S1; "stationary" starts
    the coin in its stationary law. L + 1 raw values fix L outputs.
    """
    p, q = params
    flip = {0: (1 - p, p), 1: (q, 1 - q)}
    if initial == 0:
        first = {0: 1.0}
    elif initial == 2:
        first = {1: 1.0}
    elif initial == 1:
        first = {0: q, 1: 1 - q}
    else:
        first = {0: q / (p + q), 1: p / (p + q)}
    dist = np.zeros(3 ** L)
    for raw in product((0, 1), repeat=L + 1):
        prob = first.get(raw[0], 0.0)
        for a, b in zip(raw, raw[1:]):
            prob *= flip[a][b]
        if prob == 0.0:
            continue
        out = pr.post_process(raw)[:L]
        dist[int("".join(map(str, out)), 3)] += prob
    return dist


# -- params and T -----------------------------------------------------------

@pytest.mark.parametrize("bad", [(-0.1, 0.5), (0.5, 1.1), (float("nan"), 0.5), ("a", 0.2)])
def test_params_validation(bad):
    with pytest.raises(ValidationError):
        pr.ProcessParams(*bad)


def test_interior_flag():
    assert pr.ProcessParams(0.3, 0.2).interior
    assert not pr.ProcessParams(0.0, 0.2).interior
    assert not pr.ProcessParams(0.3, 1.0).interior


def test_transition_matrix_half_half():
    np.testing.assert_allclose(
        pr.build_transition_matrix((0.5, 0.5)),
        [[0.5, 0, 0.5], [0.25, 0.5, 0.25], [0, 1, 0]],
    )


def test_transition_matrix_p_zero():
    assert pr.build_transition_matrix((0.0, 0.7))[0].tolist() == [1.0, 0.0, 0.0]


def test_transition_matrix_row1():
    np.testing.assert_allclose(pr.build_transition_matrix((0.3, 0.6))[1], [0.42, 0.4, 0.18], atol=1e-15)


def test_transition_matrix_rows_and_zeros():
    rng = np.random.default_rng(0)
    for p, q in np.vstack([rng.uniform(size=(1000, 2)), [[0, 0], [1, 1], [0, 1], [1, 0]]]):
        T = pr.build_transition_matrix((p, q))
        assert np.max(np.abs(T.sum(axis=1) - 1)) <= 1e-12
        assert T[0, 1] == 0 and T[2, 0] == 0 and T[2, 2] == 0
        assert np.all((T >= 0) & (T <= 1))


# -- raw coin and post-processing -------------------------------------------

def test_frozen_coin():
    assert pr.sample_raw_coin((0, 0), 5, initial=0, seed=1).tolist() == [0, 0, 0, 0, 0]


def test_alternating_coin():
    assert pr.sample_raw_coin((1, 1), 4, initial=0, seed=1).tolist() == [0, 1, 0, 1]


def test_flip_frequency_from_zero():
    raw = pr.sample_raw_coin((0.5, 0.5), 100_000, initial=0, seed=2024)
    from_zero = raw[:-1] == 0
    assert abs(np.mean(raw[1:][from_zero] == 1) - 0.5) <= 0.01


def test_raw_coin_seed_determinism():
    a = pr.sample_raw_coin((0.3, 0.6), 1000, seed=9)
    b = pr.sample_raw_coin((0.3, 0.6), 1000, seed=9)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("raw, out", [
    ([1, 1, 1], [1, 1, 1]),
    ([0, 0, 1, 1], [0, 2, 1, 1]),
    ([0, 1, 0, 1], [2, 1, 2, 1]),
    ([1, 0, 0], [1, 0]),
])
def test_post_process_examples(raw, out):
    assert pr.post_process(raw).tolist() == out


def test_post_process_rejects_short_or_bad():
    with pytest.raises(ValidationError):
        pr.post_process([1])
    with pytest.raises(ValidationError):
        pr.post_process([0, 2])


def test_post_process_never_zero_then_one():
    rng = np.random.default_rng(77)
    raws = rng.integers(0, 2, size=(100_000, 12))
    for raw in raws:
        out = pr.post_process(raw)
        assert not np.any((out[:-1] == 0) & (out[1:] == 1))
        assert len(out) == (12 if raw[-1] == 1 else 11)


# -- causal states and classical machine ------------------------------------

@pytest.mark.parametrize("history, state", [([0, 2, 1], 1), ([2], 2), ([1, 1, 0], 0)])
def test_causal_state_of(history, state):
    assert pr.causal_state_of(history) == state
    assert pr.CAUSAL_LABELS[state] == f"S{state}"


def test_causal_state_of_empty():
    with pytest.raises(ValidationError):
        pr.causal_state_of([])


def test_classical_step_forced_from_s2():
    rng = np.random.default_rng(0)
    T = pr.build_transition_matrix((0.3, 0.6))
    for _ in range(100):
        assert pr.classical_step(2, T, rng) == (1, 1)


def test_classical_step_p_zero():
    T = pr.build_transition_matrix((0.0, 0.6))
    rng = np.random.default_rng(0)
    assert all(pr.classical_step(0, T, rng) == (0, 0) for _ in range(100))


def test_classical_step_frequencies():
    rng = np.random.default_rng(31)
    T = pr.build_transition_matrix((0.5, 0.5))
    counts = np.zeros(3)
    for _ in range(100_000):
        counts[pr.classical_step(1, T, rng)[0]] += 1
    np.testing.assert_allclose(counts / counts.sum(), [0.25, 0.5, 0.25], atol=0.01)


def test_classical_step_rows_l1():
    rng = np.random.default_rng(32)
    T = pr.build_transition_matrix((0.3, 0.6))
    for i in range(3):
        counts = np.bincount([pr.classical_step(i, T, rng)[0] for _ in range(100_000 // 3)], minlength=3)
        assert np.abs(counts / counts.sum() - T[i]).sum() <= 0.02


# -- stationary law and complexity ------------------------------------------

def test_stationary_examples():
    np.testing.assert_allclose(pr.stationary_distribution(pr.build_transition_matrix((0.5, 0.5))),
                               [0.25, 0.5, 0.25], atol=1e-12)
    np.testing.assert_allclose(pr.stationary_distribution(pr.build_transition_matrix((1e-14, 0.5))),
                               [1, 0, 0], atol=1e-12)
    T = pr.build_transition_matrix((0.3, 0.6))
    np.testing.assert_allclose(pr.stationary_distribution(T), power_iteration(T), atol=1e-12)
    np.testing.assert_allclose(pr.stationary_distribution(T), [0.466667, 0.333333, 0.2], atol=1e-6)


def test_stationary_grid_closed_form():
    ax = np.arange(1, 100) / 100
    for p in ax:
        for q in ax:
            T = pr.build_transition_matrix((p, q))
            pi = pr.stationary_distribution(T)
            assert np.max(np.abs(pi @ T - pi)) <= 1e-12
            assert np.max(np.abs(pi - pr.stationary_closed_form((p, q)))) <= 1e-12


def test_classical_complexity_examples():
    assert pr.classical_complexity((0.5, 0.5)) == pytest.approx(1.5, abs=1e-12)
    assert pr.classical_complexity((1e-12, 0.5)) == pytest.approx(0.0, abs=1e-9)


def test_classical_complexity_bounded_by_log3():
    rng = np.random.default_rng(1)
    for p, q in rng.uniform(0.001, 0.999, size=(500, 2)):
        assert 0.0 <= pr.classical_complexity((p, q)) <= math.log2(3) + 1e-12


def test_uniform_stationary_attains_log3():
    # (q(1-p), p, pq) proportional to (1, 1, 1) needs q = 1, p = 1/2: only a limit
    c = pr.classical_complexity((0.5, 1 - 1e-9))
    assert c == pytest.approx(math.log2(3), abs=1e-6)
    assert c <= math.log2(3) + 1e-12


def test_complexity_rejects_boundary():
    for pq in [(0.0, 0.5), (0.5, 1.0), (1.0, 1.0)]:
        with pytest.raises(BoundaryError):
            pr.classical_complexity(pq)


def test_classical_max_entropy():
    assert pr.classical_max_entropy() == math.log2(3)
    assert pr.classical_max_entropy() > 1.0


# -- word distributions -----------------------------------------------------

def test_words_length1_from_s2():
    d = pr.classical_word_distribution((0.3, 0.6), 2, 1)
    np.testing.assert_allclose(d, [0, 1, 0])


def test_words_length2_from_s0():
    d = dict(zip(pr.word_labels(2), pr.classical_word_distribution((0.5, 0.5), 0, 2)))
    assert d["00"] == pytest.approx(0.25)
    assert d["02"] == pytest.approx(0.25)
    assert d["21"] == pytest.approx(0.5)
    assert sum(v for k, v in d.items() if k not in {"00", "02", "21"}) == 0.0


@pytest.mark.parametrize("initial", [0, 1, 2, "stationary"])
@pytest.mark.parametrize("pq", [(0.2, 0.5), (0.5, 0.5), (0.8, 0.2), (0.37, 0.91)])
def test_words_match_raw_coin_oracle(pq, initial):
    for L in range(1, 7):
        d = pr.classical_word_distribution(pq, initial, L)
        assert d.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(d - raw_coin_word_distribution(pq, initial, L))) <= 1e-10


def test_word_length_guard():
    with pytest.raises(ValidationError):
        pr.classical_word_distribution((0.5, 0.5), 0, 9)
    with pytest.raises(ValidationError):
        pr.classical_word_distribution((0.5, 0.5), 0, 0)


# -- trajectories -----------------------------------------------------------

def test_classical_trajectory_frequencies():
    symbols, states = pr.run_classical_trajectory((0.5, 0.5), 100_000, seed=5)
    np.testing.assert_array_equal(symbols, states)
    freq = np.bincount(symbols, minlength=3) / symbols.size
    assert np.abs(freq - [0.25, 0.5, 0.25]).sum() <= 0.02
    assert not np.any((symbols[:-1] == 0) & (symbols[1:] == 1))


def test_classical_trajectory_deterministic():
    a = pr.run_classical_trajectory((0.3, 0.6), 500, seed=3)[0]
    b = pr.run_classical_trajectory((0.3, 0.6), 500, seed=3)[0]
    np.testing.assert_array_equal(a, b)


def test_classical_trajectory_boundary_needs_initial():
    assert pr.run_classical_trajectory((1.0, 1.0), 4, initial=0, seed=0)[0].tolist() == [2, 1, 2, 1]
    with pytest.raises(BoundaryError):
        pr.run_classical_trajectory((1.0, 1.0), 4, seed=0)
