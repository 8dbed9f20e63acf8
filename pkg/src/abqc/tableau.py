"""Stabilizer-tableau backend for graph states under Pauli measurements.

Only the n stabilizer generators are tracked (no destabilizers): the
operations needed here are deciding group membership, which is a GF(2)
linear solve, and the row-replacement update for random outcomes.
"""

import math

import numpy as np

from . import kernels
from .graph import Graph
from .pauli import PauliError, PauliString, pauli_multiply
from .states import MAX_DENSE_QUBITS, PureState, StateError, _draw, graph_stabilizer_generators


class StabilizerTableau:
    def __init__(self, x, z, phase):
        self.x = np.array(x, dtype=np.uint8)
        self.z = np.array(z, dtype=np.uint8)
        self.phase = np.array(phase, dtype=np.int64) % 4
        self.n = self.x.shape[1]

    @classmethod
    def from_rows(cls, rows):
        return cls([r.x for r in rows], [r.z for r in rows], [r.phase for r in rows])

    def row(self, i):
        return PauliString(self.x[i].copy(), self.z[i].copy(), int(self.phase[i]))

    @property
    def rows(self):
        return [self.row(i) for i in range(self.n)]

    def copy(self):
        return StabilizerTableau(self.x, self.z, self.phase)

    def _set_row(self, i, p):
        self.x[i] = p.x
        self.z[i] = p.z
        self.phase[i] = p.phase

    def _symplectic(self):
        return np.hstack([self.x, self.z])

    def _anticommuting(self, p):
        s = np.bitwise_xor.reduce((self.x & p.z) ^ (self.z & p.x), axis=1)
        return np.nonzero(s)[0]

    def _check(self, p):
        if p.n != self.n:
            raise PauliError(f"length mismatch: {p.n} vs {self.n}")

    def combination(self, coeffs):
        """Product of the rows selected by the 0/1 vector ``coeffs``."""
        x = np.zeros(self.n, np.uint8)
        z = np.zeros(self.n, np.uint8)
        phase = 0
        for i in np.nonzero(coeffs)[0]:
            phase += int(self.phase[i]) + kernels.phase_exponent(x, z, self.x[i], self.z[i])
            x ^= self.x[i]
            z ^= self.z[i]
        return PauliString(x, z, phase)

    # group membership ---------------------------------------------------------

    def group_sign(self, p):
        """+1 / -1 when +p / -p is in the stabilizer group, ``None`` otherwise."""
        self._check(p)
        if not p.is_hermitian() or len(self._anticommuting(p)):
            return None
        target = np.concatenate([p.x, p.z])
        coeffs = kernels.gf2_solve(self._symplectic().T, target)
        if coeffs is None:
            return None
        prod = self.combination(coeffs)
        return 1 if prod.phase == p.phase else -1

    # measurement --------------------------------------------------------------

    def probability(self, p):
        self._check(p)
        if not p.is_hermitian():
            raise PauliError(f"cannot measure non-Hermitian {p.label}")
        if len(self._anticommuting(p)):
            return 0.5
        return 1.0 if self.group_sign(p) == 1 else 0.0

    def project(self, p, outcome):
        self._check(p)
        if not p.is_hermitian():
            raise PauliError(f"cannot measure non-Hermitian {p.label}")
        anti = self._anticommuting(p)
        if len(anti) == 0:
            if self.group_sign(p) != outcome:
                raise StateError("projection onto a zero-probability outcome")
            return
        r = anti[0]
        pivot = self.row(r)
        for j in anti[1:]:
            self._set_row(j, pauli_multiply(self.row(j), pivot))
        signed = p.copy() if outcome == 1 else p.negate()
        self._set_row(r, signed)

    def measure(self, p, rng):
        self._check(p)
        if not p.is_hermitian():
            raise PauliError(f"cannot measure non-Hermitian {p.label}")
        if len(self._anticommuting(p)) == 0:
            outcome = self.group_sign(p)
            return outcome, 1.0 if outcome == 1 else 0.0
        outcome = _draw(0.5, rng)
        self.project(p, outcome)
        return outcome, 0.5

    def measure_xy(self, qubit, theta, rng):
        quarter = theta / (math.pi / 2)
        k = round(quarter)
        if abs(quarter - k) > 1e-12:
            raise StateError("tableau backend measures only angles that are multiples of pi/2")
        letter = "X" if k % 2 == 0 else "Y"
        sign_phase = 0 if k % 4 in (0, 1) else 2
        p = PauliString.single(self.n, qubit, letter, sign_phase)
        outcome, _ = self.measure(p, rng)
        return 0 if outcome == 1 else 1

    # comparisons --------------------------------------------------------------

    def overlap(self, other):
        """``|<a|b>|**2`` between the stabilizer states of two tableaus."""
        if other.n != self.n:
            raise StateError("tableaus on different qubit counts")
        stacked = np.vstack([self._symplectic(), other._symplectic()])
        null = kernels.gf2_nullspace(stacked.T)
        for vec in null:
            a = self.combination(vec[: self.n])
            b = other.combination(vec[self.n :])
            if a.phase != b.phase:
                return 0.0
        return 2.0 ** (len(null) - self.n)

    def fidelity(self, g):
        if g.n != self.n:
            raise StateError(f"{self.n}-qubit tableau against a {g.n}-vertex graph")
        return self.overlap(tableau_from_graph(g))

    def to_pure(self):
        if self.n > MAX_DENSE_QUBITS:
            raise StateError("tableau too large to densify")
        d = 1 << self.n
        v = np.random.default_rng(0).normal(size=d) + 0j
        for p in self.rows:
            xm, zm, c = p.masks()
            v = 0.5 * (v + kernels.apply_pauli(v, xm, zm, c))
        return PureState(v / np.linalg.norm(v))

    def check_invariants(self):
        rows = self.rows
        for i, a in enumerate(rows):
            if not a.is_hermitian():
                raise StateError(f"row {i} has imaginary phase")
            for b in rows[i + 1 :]:
                if not a.commutes(b):
                    raise StateError("rows do not commute")
        _, piv = kernels.gf2_rref(self._symplectic())
        if len(piv) != self.n:
            raise StateError("rows are not independent")

    def __str__(self):
        return "\n".join(r.label for r in self.rows)

    def __repr__(self):
        return f"StabilizerTableau({[r.label for r in self.rows]})"


def tableau_from_graph(g: Graph) -> StabilizerTableau:
    return StabilizerTableau.from_rows(graph_stabilizer_generators(g))


def flipped_graph_tableau(g, flips=(0,)):
    """Tableau of ``Z_flips |G>``: generator i picks up a minus sign for each flip at i."""
    t = tableau_from_graph(g)
    for q in flips:
        t.phase[q] = (t.phase[q] + 2) % 4
    return t


def in_stabilizer_group(t: StabilizerTableau, p: PauliString):
    return t.group_sign(p)


def measure_pauli_tableau(t: StabilizerTableau, p: PauliString, rng):
    outcome, _ = t.measure(p, rng)
    return outcome, t
