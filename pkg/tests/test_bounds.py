import math
from fractions import Fraction

import numpy as np
import pytest

from abqc import bounds
from abqc.bounds import (
    BoundError,
    budget,
    definetti_term,
    deviation_bound,
    deviation_maximum,
    deviation_value,
    min_k,
    min_m,
    pass_probability,
    soundness_implication,
    verify_eq1_bound,
    verify_product_identity,
)
from abqc.graph import Graph, cycle, path
from abqc.states import (
    depolarized_graph_state,
    make_graph_state,
    maximally_mixed,
    random_density,
)


@pytest.mark.parametrize("F, want", [(1, 1), (0, 0.5), (0.25, 0.625)])
def test_pass_probability(F, want):
    assert pass_probability(F) == want


def test_pass_probability_range():
    with pytest.raises(BoundError):
        pass_probability(1.5)


def test_deviation_value_examples():
    assert deviation_value(1.0, 5) == 0
    assert deviation_value(0.0, 2) == 0
    assert deviation_value(0.75, 3) == pytest.approx(27 / 128, abs=1e-15)
    with pytest.raises(BoundError):
        deviation_value(0.5, 0)


def test_deviation_maximum_examples():
    assert deviation_maximum(1) == pytest.approx((0.5, 0.5))
    x, v = deviation_maximum(3)
    assert x == 0.75 and v == pytest.approx(27 / 128)
    assert v <= deviation_bound(3) == 0.5


@pytest.mark.parametrize("k", [1, 2, 3, 7, 15, 35, 50])
def test_grid_search_agrees_with_argmax(k):
    xs = np.linspace(0.0, 1.0, 1_000_001)
    vals = deviation_value(xs, k)
    x_star, v_star = deviation_maximum(k)
    assert abs(xs[np.argmax(vals)] - x_star) < 1e-5
    assert vals.max() <= v_star + 1e-9
    assert v_star <= deviation_bound(k)


@pytest.mark.parametrize("n, want", [(1, 3), (2, 15), (3, 35)])
def test_min_k_values(n, want):
    assert min_k(n) == want


def test_min_k_is_least():
    for n in range(1, 51):
        k = min_k(n)
        assert Fraction(2, k + 1) == Fraction(1, 2 * n * n)
        assert Fraction(2, k) > Fraction(1, 2 * n * n)


def test_definetti_examples():
    assert definetti_term(1, 1, 2 * math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert definetti_term(3, 2, 100) / definetti_term(3, 2, 200) == pytest.approx(math.sqrt(2), abs=1e-12)
    with pytest.raises(BoundError):
        definetti_term(1, 1, 0)


def test_definetti_at_9981_just_misses():
    # 2 ln2 * 7200 lies strictly between 9981 and 9982
    assert math.floor(2 * math.log(2) * 225 * 32) == 9981
    assert definetti_term(15, 2, 9981) > 0.125
    assert definetti_term(15, 2, 9982) <= 0.125


def test_min_m_examples():
    assert min_m(1, 3) == 13
    assert min_m(2, 15) == 9982


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("k", [1, 2, 3, 10, 35])
def test_min_m_is_least(n, k):
    m = min_m(n, k)
    target = 1 / (2 * n * n)
    assert definetti_term(k, n, m) <= target
    assert definetti_term(k, n, m - 1) > target


def test_min_m_text_form():
    # k^n n^5 with n=2, k=15 is the same as k^2 n^5
    assert min_m(2, 15, text_form=True) == min_m(2, 15)
    assert min_m(3, 35, text_form=True) == math.ceil(2 * math.log(2) * 35**3 * 3**5)


@pytest.mark.parametrize("n", range(1, 11))
def test_budget_satisfied_at_minimum(n):
    k = min_k(n)
    b = budget(n, k, min_m(n, k))
    assert b.satisfied
    assert b.total == b.max_deviation_term + b.definetti_term


def test_budget_unsatisfied():
    b = budget(2, 1, 1)
    assert not b.satisfied
    assert b.max_deviation_term == 1.0


def test_product_identity_examples():
    g = path(2)
    lhs, rhs, diff = verify_product_identity(make_graph_state(g), g, 2)
    assert abs(lhs) < 1e-12 and abs(rhs) < 1e-12
    lhs, rhs, diff = verify_product_identity(maximally_mixed(1), Graph(1), 2)
    assert lhs == pytest.approx(0.28125, abs=1e-12)
    assert rhs == pytest.approx(0.28125, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_product_identity_random(n, k, rng):
    g = Graph(1) if n == 1 else path(2)
    for _ in range(20):
        assert verify_product_identity(random_density(n, rng), g, k)[2] < 1e-10


def test_eq1_bound_n1_k3(rng):
    best = verify_eq1_bound(Graph(1), 3, 1000, rng)
    assert best <= 0.5
    assert best == pytest.approx(deviation_maximum(3)[1], abs=1e-9)


def test_eq1_argmax_state_attains_maximum():
    k = 3
    x_star, v_star = deviation_maximum(k)
    g = path(2)
    sigma = depolarized_graph_state(g, 2 * x_star - 1)
    t = bounds.pass_operator(g)
    dev = bounds.deviation_projector(g)
    value = np.trace(t @ sigma.matrix).real ** k * np.trace(dev @ sigma.matrix).real
    assert value == pytest.approx(v_star, abs=1e-9)


def test_eq1_bound_at_min_k(rng):
    g = path(2)
    assert verify_eq1_bound(g, min_k(2), 200, rng) <= 1 / 8


def test_implication_examples():
    c = soundness_implication(4, Fraction(1, 4))
    assert c.implied_acceptance_bound == Fraction(1, 4)
    assert c.premise and c.holds
    c = soundness_implication(3, 0)
    assert c.implied_acceptance_bound == 1 and not c.premise and c.holds


def test_implication_inconsistent_inputs():
    with pytest.raises(BoundError):
        soundness_implication(2, Fraction(1, 2), acceptance=Fraction(3, 4))
    ok = soundness_implication(2, Fraction(1, 2), acceptance=Fraction(1, 2))
    assert ok.conclusion is True
