"""Dense n-qubit states, graph-state construction, Born-rule Pauli measurement.

Qubit 0 is the most significant bit of a basis-state index.  Both state
classes expose the same small interface used by the honesty test and the
protocol (``probability``, ``project``, ``measure``, ``measure_xy``,
``fidelity``), so a copy can be a pure vector, a density matrix or a
stabilizer tableau without the caller caring which.
"""

import math
from functools import reduce

import numpy as np

from . import kernels
from .graph import Graph, GraphError
from .pauli import PauliError, PauliString

MAX_DENSE_QUBITS = 12
NORM_TOL = 1e-10
POSITIVITY_TOL = 1e-9
# Born probabilities this close to 0 or 1 are treated as certain; no random
# number is drawn for them.
DETERMINISTIC_TOL = 1e-12


class StateError(ValueError):
    pass


def _check_cap(n_qubits):
    if n_qubits > MAX_DENSE_QUBITS:
        raise StateError(
            f"{n_qubits} qubits exceeds the dense cap of {MAX_DENSE_QUBITS} qubits"
        )


def _num_qubits(dim):
    n = int(dim).bit_length() - 1
    if n < 0 or 1 << n != dim:
        raise StateError(f"dimension {dim} is not a power of two")
    return n


def _snap(p):
    if p >= 1.0 - DETERMINISTIC_TOL:
        return 1.0
    if p <= DETERMINISTIC_TOL:
        return 0.0
    return float(p)


def _pauli_terms(p):
    if not p.is_hermitian():
        raise PauliError(f"cannot measure non-Hermitian {p.label}")
    xmask, zmask, coeff = p.masks()
    return [(xmask, zmask, coeff)]


def _xy_terms(n, qubit, theta):
    xm, zm, cx = PauliString.single(n, qubit, "X").masks()
    ym, yz, cy = PauliString.single(n, qubit, "Y").masks()
    return [(xm, zm, math.cos(theta) * cx), (ym, yz, math.sin(theta) * cy)]


def _apply_terms(a, terms):
    out = None
    for xmask, zmask, coeff in terms:
        if coeff == 0:
            continue
        part = kernels.apply_pauli(a, xmask, zmask, coeff)
        out = part if out is None else out + part
    return np.zeros_like(a) if out is None else out


class _DenseState:
    n: int

    def _expectation(self, terms):
        raise NotImplementedError

    def _project_terms(self, terms, outcome):
        raise NotImplementedError

    def probability(self, p):
        """Born probability of outcome +1 when measuring Hermitian ``p``."""
        if p.n != self.n:
            raise StateError(f"Pauli on {p.n} qubits applied to a {self.n}-qubit state")
        return _snap(0.5 * (1.0 + self._expectation(_pauli_terms(p))))

    def project(self, p, outcome):
        if p.n != self.n:
            raise StateError(f"Pauli on {p.n} qubits applied to a {self.n}-qubit state")
        self._project_terms(_pauli_terms(p), outcome)

    def measure(self, p, rng):
        """Measure ``p`` in place; returns ``(outcome, probability_of_plus_one)``."""
        p_plus = self.probability(p)
        outcome = _draw(p_plus, rng)
        self._project_terms(_pauli_terms(p), outcome)
        return outcome, p_plus

    def measure_xy(self, qubit, theta, rng):
        """Measure ``cos(theta) X + sin(theta) Y`` on one qubit; returns the bit (0 for +1)."""
        terms = _xy_terms(self.n, qubit, theta)
        p_plus = _snap(0.5 * (1.0 + self._expectation(terms)))
        outcome = _draw(p_plus, rng)
        self._project_terms(terms, outcome)
        return 0 if outcome == 1 else 1


def _draw(p_plus, rng):
    if p_plus == 1.0:
        return 1
    if p_plus == 0.0:
        return -1
    return 1 if rng.random() < p_plus else -1


class PureState(_DenseState):
    def __init__(self, amplitudes, check=True):
        v = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        self.n = _num_qubits(v.shape[0])
        _check_cap(self.n)
        if check:
            norm = float(np.vdot(v, v).real)
            if abs(norm - 1.0) > NORM_TOL:
                raise StateError(f"squared norm {norm} differs from 1")
        self.amplitudes = v

    def _expectation(self, terms):
        return sum(kernels.expectation_vec(self.amplitudes, x, z, c) for x, z, c in terms)

    def _project_terms(self, terms, outcome):
        v = self.amplitudes
        w = 0.5 * (v + outcome * _apply_terms(v, terms))
        norm = float(np.vdot(w, w).real)
        if norm < DETERMINISTIC_TOL:
            raise StateError("projection onto a zero-probability outcome")
        self.amplitudes = w / math.sqrt(norm)

    def fidelity(self, g):
        target = make_graph_state(g).amplitudes
        if target.shape != self.amplitudes.shape:
            raise StateError("graph and state dimensions differ")
        return float(abs(np.vdot(target, self.amplitudes)) ** 2)

    def to_density(self):
        v = self.amplitudes
        return DensityState(np.outer(v, v.conj()), check=False)

    def copy(self):
        return PureState(self.amplitudes.copy(), check=False)

    def __repr__(self):
        return f"PureState(n={self.n})"


class DensityState(_DenseState):
    def __init__(self, matrix, check=True):
        m = np.asarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError("density matrix must be square")
        self.n = _num_qubits(m.shape[0])
        _check_cap(self.n)
        if check:
            if not np.allclose(m, m.conj().T, atol=NORM_TOL, rtol=0):
                raise StateError("density matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1.0) > NORM_TOL:
                raise StateError(f"trace {tr} differs from 1")
            lo = float(np.linalg.eigvalsh(m).min())
            if lo < -POSITIVITY_TOL:
                raise StateError(f"negative eigenvalue {lo}")
        self.matrix = m

    def _expectation(self, terms):
        return sum(kernels.expectation_rho(self.matrix, x, z, c) for x, z, c in terms)

    def _project_terms(self, terms, outcome):
        rho = self.matrix
        half = 0.5 * (rho + outcome * _apply_terms(rho, terms))
        half_dag = np.ascontiguousarray(half.conj().T)
        out = 0.5 * (half_dag + outcome * _apply_terms(half_dag, terms))
        tr = float(np.trace(out).real)
        if tr < DETERMINISTIC_TOL:
            raise StateError("projection onto a zero-probability outcome")
        out /= tr
        self.matrix = 0.5 * (out + out.conj().T)

    def fidelity(self, g):
        target = make_graph_state(g).amplitudes
        if target.shape[0] != self.matrix.shape[0]:
            raise StateError("graph and state dimensions differ")
        return float(np.vdot(target, self.matrix @ target).real)

    def partial_trace(self, keep):
        """Reduced state on the qubits listed in ``keep`` (kept in the given order)."""
        keep = list(keep)
        drop = [q for q in range(self.n) if q not in keep]
        t = self.matrix.reshape([2] * (2 * self.n))
        n = self.n
        row_axes = keep + drop
        t = t.transpose(row_axes + [n + q for q in row_axes])
        dk, dd = 1 << len(keep), 1 << len(drop)
        t = t.reshape(dk, dd, dk, dd)
        return DensityState(np.einsum("ajbj->ab", t), check=False)

    def to_density(self):
        return self

    def trace(self):
        return float(np.trace(self.matrix).real)

    def copy(self):
        return DensityState(self.matrix.copy(), check=False)

    def __repr__(self):
        return f"DensityState(n={self.n})"


# ---------------------------------------------------------------------------
# graph states


def graph_stabilizer_generator(g: Graph, i: int) -> PauliString:
    """``X`` on vertex ``i`` and ``Z`` on each of its neighbours."""
    if not 0 <= i < g.n:
        raise GraphError(f"vertex {i} outside 0..{g.n - 1}")
    p = PauliString.identity(g.n)
    p.x[i] = 1
    for j in g.neighbors(i):
        p.z[j] = 1
    return p


def graph_stabilizer_generators(g):
    return [graph_stabilizer_generator(g, i) for i in range(g.n)]


def make_graph_state(g: Graph) -> PureState:
    _check_cap(g.n)
    edges = g.sorted_edges()
    us = [u for u, _ in edges]
    vs = [v for _, v in edges]
    signs = kernels.graph_signs(g.n, us, vs)
    return PureState(signs.astype(np.complex128) / math.sqrt(1 << g.n), check=False)


def graph_projector(g):
    v = make_graph_state(g).amplitudes
    return np.outer(v, v.conj())


def orthogonal_graph_state(g, flips=(0,)):
    """``Z`` applied to the listed vertices of ``|G>``; orthogonal to ``|G>`` when non-empty."""
    if not flips:
        raise StateError("at least one flipped vertex is needed for orthogonality")
    p = PauliString.identity(g.n)
    for q in flips:
        p.z[q] ^= 1
    xm, zm, c = p.masks()
    v = kernels.apply_pauli(make_graph_state(g).amplitudes, xm, zm, c)
    return PureState(v, check=False)


def fidelity_with_graph(state, g: Graph) -> float:
    if state.n != g.n:
        raise StateError(f"{state.n}-qubit state against a {g.n}-vertex graph")
    return state.fidelity(g)


def measure_pauli(state, p: PauliString, rng):
    """Born-rule measurement of ``p``; the state is replaced by the post-measurement state."""
    outcome, _ = state.measure(p, rng)
    return outcome, state


def tensor_power(state: DensityState, t: int) -> DensityState:
    if t < 1:
        raise StateError("tensor power needs t >= 1")
    _check_cap(state.n * t)
    m = state.to_density().matrix
    return DensityState(reduce(np.kron, [m] * t), check=False)


def tensor_product(states):
    mats = [s.to_density().matrix for s in states]
    _check_cap(sum(s.n for s in states))
    return DensityState(reduce(np.kron, mats), check=False)


def maximally_mixed(n):
    _check_cap(n)
    d = 1 << n
    return DensityState(np.eye(d, dtype=complex) / d, check=False)


def depolarized_graph_state(g: Graph, target_fidelity: float) -> DensityState:
    """``lam |G><G| + (1 - lam) I / 2**n`` with fidelity ``target_fidelity``."""
    floor = 2.0**-g.n
    if not floor - NORM_TOL <= target_fidelity <= 1.0 + NORM_TOL:
        raise StateError(f"target fidelity {target_fidelity} outside [{floor}, 1]")
    lam = (target_fidelity - floor) / (1.0 - floor)
    d = 1 << g.n
    m = lam * graph_projector(g) + (1.0 - lam) * np.eye(d) / d
    return DensityState(m, check=False)


def graph_mixture(g, fidelity, flips=(0,)):
    """``F |G><G| + (1 - F) |G'><G'|`` with ``|G'>`` orthogonal; any ``F`` in [0, 1]."""
    if not 0.0 <= fidelity <= 1.0:
        raise StateError(f"fidelity {fidelity} outside [0, 1]")
    good = make_graph_state(g).amplitudes
    bad = orthogonal_graph_state(g, flips).amplitudes
    m = fidelity * np.outer(good, good.conj()) + (1 - fidelity) * np.outer(bad, bad.conj())
    return DensityState(m, check=False)


def haar_vector(n, rng):
    d = 1 << n
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density(n, rng):
    """``lam |psi><psi| + (1 - lam) I / 2**n``: Haar ``psi``, uniform ``lam``."""
    _check_cap(n)
    v = haar_vector(n, rng)
    lam = rng.random()
    d = 1 << n
    return DensityState(lam * np.outer(v, v.conj()) + (1 - lam) * np.eye(d) / d, check=False)


def plus_state(n):
    _check_cap(n)
    d = 1 << n
    return PureState(np.full(d, 1 / math.sqrt(d), dtype=complex), check=False)


def basis_state(bits):
    n = len(bits)
    _check_cap(n)
    v = np.zeros(1 << n, dtype=complex)
    v[int("".join(str(b) for b in bits), 2) if n else 0] = 1
    return PureState(v, check=False)
