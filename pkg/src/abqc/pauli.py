"""Signed Pauli strings in binary symplectic form."""

from functools import reduce

import numpy as np

from . import kernels

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class PauliError(ValueError):
    pass


class PauliString:
    """``i**phase`` times a tensor product of I/X/Y/Z letters.

    ``phase`` is an exponent mod 4, so 0 -> +1, 1 -> +i, 2 -> -1, 3 -> -i.
    Qubit 0 is the leftmost letter and the most significant basis bit.
    """

    __slots__ = ("phase", "x", "z")

    def __init__(self, x, z, phase=0):
        self.x = np.asarray(x, dtype=np.uint8) & 1
        self.z = np.asarray(z, dtype=np.uint8) & 1
        if self.x.shape != self.z.shape or self.x.ndim != 1:
            raise PauliError("x and z must be equal-length bit vectors")
        self.phase = int(phase) % 4

    # construction -----------------------------------------------------------

    @classmethod
    def identity(cls, n):
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_label(cls, label):
        """Parse labels such as ``"+XZ"``, ``"-iY"``, ``"YY"``."""
        label = label.strip()
        i = 0
        while i < len(label) and label[i] not in "IXYZ":
            i += 1
        prefix, letters = label[:i], label[i:]
        if prefix not in _PREFIX_PHASE or not letters:
            raise PauliError(f"cannot parse Pauli label {label!r}")
        try:
            bits = [_LETTER_BITS[c] for c in letters]
        except KeyError:
            raise PauliError(f"cannot parse Pauli label {label!r}") from None
        x, z = zip(*bits)
        return cls(x, z, _PREFIX_PHASE[prefix])

    @classmethod
    def single(cls, n, qubit, letter, phase=0):
        p = cls.identity(n)
        p.x[qubit], p.z[qubit] = _LETTER_BITS[letter]
        p.phase = phase % 4
        return p

    # views ------------------------------------------------------------------

    @property
    def n(self):
        return len(self.x)

    @property
    def letters(self):
        return "".join(_BITS_LETTER[(int(a), int(b))] for a, b in zip(self.x, self.z))

    @property
    def label(self):
        return _PHASE_PREFIX[self.phase] + self.letters

    def is_hermitian(self):
        return self.phase % 2 == 0

    @property
    def sign(self):
        if not self.is_hermitian():
            raise PauliError(f"{self.label} has an imaginary phase")
        return 1 if self.phase == 0 else -1

    def is_identity(self):
        return not (self.x.any() or self.z.any())

    def weight(self):
        return int(np.count_nonzero(self.x | self.z))

    def support(self):
        return [int(j) for j in np.nonzero(self.x | self.z)[0]]

    def masks(self):
        """``(xmask, zmask, coeff)`` consumed by :mod:`abqc.kernels`."""
        n = self.n
        xmask = zmask = 0
        for j in range(n):
            if self.x[j]:
                xmask |= 1 << (n - 1 - j)
            if self.z[j]:
                zmask |= 1 << (n - 1 - j)
        n_y = int(np.count_nonzero(self.x & self.z))
        return xmask, zmask, 1j ** ((self.phase + n_y) % 4)

    def to_matrix(self):
        mats = [_MATRICES[c] for c in self.letters]
        return (1j**self.phase) * reduce(np.kron, mats)

    # algebra ----------------------------------------------------------------

    def commutes(self, other):
        _check_lengths(self, other)
        s = int(np.sum(self.x & other.z) + np.sum(self.z & other.x))
        return s % 2 == 0

    def embed(self, total, offset):
        """The same operator acting on qubits ``offset..offset+n-1`` of ``total``."""
        x = np.zeros(total, np.uint8)
        z = np.zeros(total, np.uint8)
        x[offset : offset + self.n] = self.x
        z[offset : offset + self.n] = self.z
        return PauliString(x, z, self.phase)

    def negate(self):
        return PauliString(self.x.copy(), self.z.copy(), self.phase + 2)

    def copy(self):
        return PauliString(self.x.copy(), self.z.copy(), self.phase)

    def __mul__(self, other):
        return pauli_multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.phase, self.x.tobytes(), self.z.tobytes()))

    def __repr__(self):
        return f"PauliString({self.label!r})"

    def __str__(self):
        return self.label


def _check_lengths(a, b):
    if a.n != b.n:
        raise PauliError(f"length mismatch: {a.n} vs {b.n}")


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    _check_lengths(a, b)
    phase = a.phase + b.phase + kernels.phase_exponent(a.x, a.z, b.x, b.z)
    return PauliString(a.x ^ b.x, a.z ^ b.z, phase)


def product(paulis, n):
    """Ordered product of ``paulis``; the identity on ``n`` qubits when empty."""
    out = PauliString.identity(n)
    for p in paulis:
        out = pauli_multiply(out, p)
    return out
