"""Graph-state honesty test: measure a uniformly random stabilizer-group element.

Sampling the subset S uniformly from all 2**n subsets (the empty one
included) and measuring ``prod_{i in S} g_i`` gives the two-outcome POVM
whose pass element is ``(I + |G><G|) / 2``, so a copy in state sigma passes
with probability ``(1 + <G|sigma|G>) / 2``.
"""

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .pauli import PauliString, pauli_multiply
from .states import graph_stabilizer_generators


@dataclass
class TestRecord:
    __test__ = False  # not a pytest class

    subset: tuple
    observable: PauliString
    outcome: int
    passed: bool
    # Born probability of passing, recorded by the simulator only.
    p_pass: float = field(default=None, compare=False)

    def to_dict(self):
        return {
            "subset": list(self.subset),
            "observable": self.observable.label,
            "outcome": self.outcome,
            "passed": self.passed,
        }


def stabilizer_element(g: Graph, subset) -> PauliString:
    gens = graph_stabilizer_generators(g)
    out = PauliString.identity(g.n)
    for i in sorted(subset):
        out = pauli_multiply(out, gens[i])
    return out


def sample_stabilizer_element(g: Graph, rng):
    bits = rng.integers(0, 2, size=g.n)
    subset = tuple(int(i) for i in np.nonzero(bits)[0])
    return subset, stabilizer_element(g, subset)


class HonestyTest:
    """One execution per call; the copy handed in is consumed.

    With ``decompose=True`` the observable is not measured jointly: each
    qubit in its support is measured in its own Pauli basis and the outcome
    is the product of the single-qubit results times the string's sign.
    """

    name = "stabilizer_sampling"

    def __init__(self, graph: Graph, decompose=False):
        self.graph = graph
        self.decompose = decompose

    def sample(self, rng):
        return sample_stabilizer_element(self.graph, rng)

    def __call__(self, state, rng) -> TestRecord:
        subset, obs = self.sample(rng)
        return self.apply(state, subset, obs, rng)

    def apply(self, state, subset, obs, rng) -> TestRecord:
        """Measure an already-sampled element on ``state``."""
        if state.n != self.graph.n:
            raise ValueError(f"{state.n}-qubit copy tested against a {self.graph.n}-vertex graph")
        p_pass = state.probability(obs)
        if self.decompose:
            outcome = obs.sign
            for q in obs.support():
                letter = obs.letters[q]
                o, _ = state.measure(PauliString.single(obs.n, q, letter), rng)
                outcome *= o
        else:
            outcome, _ = state.measure(obs, rng)
        return TestRecord(subset, obs, outcome, outcome == 1, p_pass)


def mns16_test(state, g: Graph, rng, decompose=False) -> TestRecord:
    return HonestyTest(g, decompose)(state, rng)


def run_k_tests(states, g: Graph, rng, test=None):
    """One test per copy; returns ``(all_passed, records)``."""
    if not states:
        raise ValueError("no copies to test")
    test = test or HonestyTest(g)
    records = [test(s, rng) for s in states]
    return all(r.passed for r in records), records


def povm_average(state, g: Graph) -> float:
    """Pass probability averaged exactly over all 2**n stabilizer-group elements."""
    total = 0.0
    for mask in range(1 << g.n):
        subset = [i for i in range(g.n) if mask >> i & 1]
        total += state.probability(stabilizer_element(g, subset))
    return total / (1 << g.n)


def povm_pass_element(g: Graph) -> np.ndarray:
    """Dense pass element built from the group average of ``(I + g_S) / 2``."""
    d = 1 << g.n
    acc = np.zeros((d, d), dtype=complex)
    for mask in range(d):
        subset = [i for i in range(g.n) if mask >> i & 1]
        acc += 0.5 * (np.eye(d) + stabilizer_element(g, subset).to_matrix())
    return acc / d
