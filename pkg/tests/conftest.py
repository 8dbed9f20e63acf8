from functools import reduce

import numpy as np
import pytest

from abqc.graph import Graph

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
LETTERS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(mats):
    return reduce(np.kron, mats)


def pauli_matrix(label):
    """Dense matrix from a label such as '-iXZ', built letter by letter."""
    phase = {"": 1, "+": 1, "-": -1, "+i": 1j, "i": 1j, "-i": -1j}
    letters = label.lstrip("+-i")
    prefix = label[: len(label) - len(letters)]
    return phase[prefix] * kron_all([LETTERS[c] for c in letters])


def cz_oracle_state(g):
    """|G> by multiplying explicit CZ matrices onto |+>^n."""
    n = g.n
    d = 1 << n
    v = np.full(d, 1 / np.sqrt(d), dtype=complex)
    for u, w in g.sorted_edges():
        diag = np.ones(d)
        for b in range(d):
            bits = format(b, f"0{n}b")
            if bits[u] == "1" and bits[w] == "1":
                diag[b] = -1
        v = diag * v
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def edge():
    return Graph(2, frozenset({(0, 1)}))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
