import math
from collections import Counter

import numpy as np
import pytest

from abqc.graph import Graph, all_connected_graphs, cycle, path
from abqc.honesty import (
    HonestyTest,
    mns16_test,
    povm_average,
    povm_pass_element,
    run_k_tests,
    sample_stabilizer_element,
    stabilizer_element,
)
from abqc.pauli import PauliString
from abqc.states import (
    depolarized_graph_state,
    fidelity_with_graph,
    make_graph_state,
    maximally_mixed,
    orthogonal_graph_state,
    random_density,
)
from abqc.tableau import flipped_graph_tableau, tableau_from_graph


def within_3sigma(count, trials, p):
    return abs(count - trials * p) <= 3 * math.sqrt(trials * p * (1 - p)) + 1e-9


def test_empty_subset_is_identity(edge):
    assert stabilizer_element(edge, ()).is_identity()


def test_full_subset_on_edge_is_yy(edge):
    assert stabilizer_element(edge, (0, 1)) == PauliString.from_label("+YY")


def test_subset_frequencies_uniform():
    g = path(3)
    rng = np.random.default_rng(7)
    trials = 1 << 16
    counts = Counter(sample_stabilizer_element(g, rng)[0] for _ in range(trials))
    assert len(counts) == 8
    for c in counts.values():
        assert within_3sigma(c, trials, 1 / 8)


def test_record_invariants(rng):
    g = cycle(4)
    for _ in range(50):
        r = mns16_test(random_density(4, rng), g, rng)
        assert r.passed == (r.outcome == 1)
        assert r.observable == stabilizer_element(g, r.subset)
        assert set(r.to_dict()) == {"subset", "observable", "outcome", "passed"}


@pytest.mark.parametrize(
    "state, want",
    [
        (lambda g: make_graph_state(g), 1.0),
        (lambda g: orthogonal_graph_state(g), 0.5),
        (lambda g: maximally_mixed(2), 0.625),
    ],
)
def test_exact_pass_probability(edge, state, want):
    assert povm_average(state(edge), edge) == pytest.approx(want, abs=1e-12)


def test_honest_copy_always_passes(rng):
    g = cycle(5)
    for _ in range(200):
        assert mns16_test(make_graph_state(g), g, rng).passed
        assert mns16_test(tableau_from_graph(g), g, rng).passed


def test_empirical_rate_maximally_mixed():
    g = path(2)
    rng = np.random.default_rng(2024)
    trials = 10_000
    passes = sum(mns16_test(maximally_mixed(2), g, rng).passed for _ in range(trials))
    assert within_3sigma(passes, trials, 0.625)


@pytest.mark.parametrize("F", [0.3, 0.8])
def test_empirical_rate_depolarized(F):
    g = path(3)
    rng = np.random.default_rng(int(F * 100))
    state = depolarized_graph_state(g, F)
    trials = 10_000
    passes = sum(mns16_test(state.copy(), g, rng).passed for _ in range(trials))
    assert within_3sigma(passes, trials, (1 + F) / 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_povm_identity(n, rng):
    graphs = all_connected_graphs(n)
    for i in range(20):
        g = graphs[i % len(graphs)]
        sigma = random_density(n, rng)
        F = fidelity_with_graph(sigma, g)
        assert povm_average(sigma, g) == pytest.approx(0.5 + 0.5 * F, abs=1e-10)


@pytest.mark.parametrize("g", [Graph(1), path(2), path(3), cycle(3)])
def test_pass_element_is_half_identity_plus_projector(g):
    v = make_graph_state(g).amplitudes
    want = 0.5 * (np.eye(1 << g.n) + np.outer(v, v.conj()))
    np.testing.assert_allclose(povm_pass_element(g), want, atol=1e-12)


def test_decomposed_mode_same_distribution():
    g = path(3)
    rng = np.random.default_rng(99)
    sigma = random_density(3, rng)
    want = (1 + fidelity_with_graph(sigma, g)) / 2
    trials = 6000
    for decompose in (False, True):
        t = HonestyTest(g, decompose=decompose)
        passes = sum(t(sigma.copy(), rng).passed for _ in range(trials))
        assert within_3sigma(passes, trials, want)


def test_decomposed_mode_fixed_element(rng):
    # per-element check: the parity of local outcomes has the joint Born law
    g = path(3)
    sigma = random_density(3, rng)
    t = HonestyTest(g, decompose=True)
    subset = (0, 1, 2)
    obs = stabilizer_element(g, subset)
    p = sigma.probability(obs)
    trials = 6000
    passes = sum(t.apply(sigma.copy(), subset, obs, rng).passed for _ in range(trials))
    assert within_3sigma(passes, trials, p)


def test_decomposed_honest_tableau_passes(rng):
    g = cycle(5)
    t = HonestyTest(g, decompose=True)
    assert all(t(tableau_from_graph(g), rng).passed for _ in range(100))


def test_dimension_mismatch(edge, rng):
    with pytest.raises(ValueError):
        mns16_test(maximally_mixed(3), edge, rng)


def test_run_k_tests_honest(rng):
    g = path(3)
    ok, records = run_k_tests([make_graph_state(g) for _ in range(5)], g, rng)
    assert ok and len(records) == 5


def test_run_k_tests_orthogonal_rate():
    g = path(2)
    rng = np.random.default_rng(31)
    trials = 8000
    hits = sum(run_k_tests([flipped_graph_tableau(g) for _ in range(3)], g, rng)[0]
               for _ in range(trials))
    assert within_3sigma(hits, trials, 1 / 8)


def test_run_k_tests_empty(edge, rng):
    with pytest.raises(ValueError):
        run_k_tests([], edge, rng)
