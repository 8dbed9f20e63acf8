"""Inner loops for dense Pauli action, Pauli phase tracking and GF(2) elimination.

Every kernel exists in two forms: an explicit loop compiled with numba, and a
vectorised numpy form.  The module-level names point at the numba form unless
numba is missing or ``ABQC_DISABLE_NUMBA`` is set to a truthy value, in which
case the numpy form is used.  Both forms stay importable through
:data:`IMPLEMENTATIONS` so they can be compared directly.

Bit conventions: a Pauli string on ``N`` qubits is encoded by an X mask and a
Z mask over basis-state indices, qubit 0 being the most significant bit.
Letter Y has both bits set and carries no hidden phase (``Y = iXZ``).
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
NUMBA_DISABLED = os.environ.get("ABQC_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)
USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED


# ---------------------------------------------------------------------------
# numpy forms


def _np_z_signs(dim, zmask):
    idx = np.arange(dim, dtype=np.int64)
    return 1.0 - 2.0 * (np.bitwise_count(idx & zmask) & 1)


def _np_apply_pauli(a, xmask, zmask, coeff):
    dim = a.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & zmask) & 1)
    out = np.empty_like(a)
    out[idx ^ xmask] = (coeff * signs)[:, None] * a
    return out


def _np_expectation_vec(v, xmask, zmask, coeff):
    dim = v.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & zmask) & 1)
    return (coeff * np.sum(np.conj(v[idx ^ xmask]) * signs * v)).real


def _np_expectation_rho(rho, xmask, zmask, coeff):
    dim = rho.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & zmask) & 1)
    return (coeff * np.sum(signs * rho[idx, idx ^ xmask])).real


def _np_phase_exponent(x1, z1, x2, z2):
    x1 = x1.astype(np.int64)
    z1 = z1.astype(np.int64)
    x2 = x2.astype(np.int64)
    z2 = z2.astype(np.int64)
    g = np.where(
        (x1 == 1) & (z1 == 1),
        z2 - x2,
        np.where(x1 == 1, z2 * (2 * x2 - 1), z1 * x2 * (1 - 2 * z2)),
    )
    return int(np.sum(g)) % 4


def _np_gf2_rref(m):
    r = (m.copy() & 1).astype(np.uint8)
    rows, cols = r.shape
    pivots = np.full(min(rows, cols), -1, dtype=np.int64)
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        hits = np.nonzero(r[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            r[[row, p]] = r[[p, row]]
        mask = r[:, col].astype(bool)
        mask[row] = False
        r[mask] ^= r[row]
        pivots[row] = col
        row += 1
    return r, pivots[:row]


def _np_graph_signs(n, us, vs):
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    parity = np.zeros(dim, dtype=np.int64)
    for u, v in zip(us, vs):
        bu = (idx >> (n - 1 - u)) & 1
        bv = (idx >> (n - 1 - v)) & 1
        parity ^= bu & bv
    return 1.0 - 2.0 * parity


# ---------------------------------------------------------------------------
# loop forms (compiled when numba is active)


def _lp_z_signs(dim, zmask):
    out = np.empty(dim, dtype=np.float64)
    for b in range(dim):
        x = b & zmask
        p = 0
        while x:
            p ^= x & 1
            x >>= 1
        out[b] = -1.0 if p else 1.0
    return out


def _lp_apply_pauli(a, xmask, zmask, coeff):
    dim, cols = a.shape
    out = np.empty_like(a)
    for b in range(dim):
        x = b & zmask
        p = 0
        while x:
            p ^= x & 1
            x >>= 1
        c = -coeff if p else coeff
        t = b ^ xmask
        for j in range(cols):
            out[t, j] = c * a[b, j]
    return out


def _lp_expectation_vec(v, xmask, zmask, coeff):
    acc = 0.0 + 0.0j
    for b in range(v.shape[0]):
        x = b & zmask
        p = 0
        while x:
            p ^= x & 1
            x >>= 1
        term = np.conj(v[b ^ xmask]) * v[b]
        acc += -term if p else term
    return (coeff * acc).real


def _lp_expectation_rho(rho, xmask, zmask, coeff):
    acc = 0.0 + 0.0j
    for b in range(rho.shape[0]):
        x = b & zmask
        p = 0
        while x:
            p ^= x & 1
            x >>= 1
        term = rho[b, b ^ xmask]
        acc += -term if p else term
    return (coeff * acc).real


def _lp_phase_exponent(x1, z1, x2, z2):
    s = 0
    for j in range(x1.shape[0]):
        a, b, c, d = x1[j], z1[j], x2[j], z2[j]
        if a == 1 and b == 1:
            s += int(d) - int(c)
        elif a == 1:
            s += int(d) * (2 * int(c) - 1)
        elif b == 1:
            s += int(c) * (1 - 2 * int(d))
    return s % 4


def _lp_gf2_rref(m):
    rows, cols = m.shape
    r = np.empty((rows, cols), dtype=np.uint8)
    for i in range(rows):
        for j in range(cols):
            r[i, j] = m[i, j] & 1
    pivots = np.full(min(rows, cols), -1, dtype=np.int64)
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        p = -1
        for i in range(row, rows):
            if r[i, col]:
                p = i
                break
        if p < 0:
            continue
        if p != row:
            for j in range(cols):
                tmp = r[row, j]
                r[row, j] = r[p, j]
                r[p, j] = tmp
        for i in range(rows):
            if i != row and r[i, col]:
                for j in range(cols):
                    r[i, j] ^= r[row, j]
        pivots[row] = col
        row += 1
    return r, pivots[:row]


def _lp_graph_signs(n, us, vs):
    dim = 1 << n
    out = np.empty(dim, dtype=np.float64)
    for b in range(dim):
        p = 0
        for e in range(us.shape[0]):
            p ^= ((b >> (n - 1 - us[e])) & 1) & ((b >> (n - 1 - vs[e])) & 1)
        out[b] = -1.0 if p else 1.0
    return out


_NUMPY = {
    "z_signs": _np_z_signs,
    "apply_pauli": _np_apply_pauli,
    "expectation_vec": _np_expectation_vec,
    "expectation_rho": _np_expectation_rho,
    "phase_exponent": _np_phase_exponent,
    "gf2_rref": _np_gf2_rref,
    "graph_signs": _np_graph_signs,
}

_LOOPS = {
    "z_signs": _lp_z_signs,
    "apply_pauli": _lp_apply_pauli,
    "expectation_vec": _lp_expectation_vec,
    "expectation_rho": _lp_expectation_rho,
    "phase_exponent": _lp_phase_exponent,
    "gf2_rref": _lp_gf2_rref,
    "graph_signs": _lp_graph_signs,
}

IMPLEMENTATIONS = {"numpy": _NUMPY}
if NUMBA_AVAILABLE:
    IMPLEMENTATIONS["numba"] = {
        name: numba.njit(cache=True, nogil=True)(fn) for name, fn in _LOOPS.items()
    }

ACTIVE = "numba" if USE_NUMBA else "numpy"
_active = IMPLEMENTATIONS[ACTIVE]


def z_signs(dim: int, zmask: int) -> np.ndarray:
    """``(-1)**popcount(b & zmask)`` for every basis index ``b < dim``."""
    return _active["z_signs"](dim, zmask)


def apply_pauli(a: np.ndarray, xmask: int, zmask: int, coeff: complex) -> np.ndarray:
    """Left-multiply ``a`` (vector or matrix, basis along axis 0) by a Pauli string.

    ``coeff`` is the scalar in front of the X/Z part, i.e. the string phase
    times ``i**(number of Y letters)``.
    """
    arr = np.ascontiguousarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        return _active["apply_pauli"](arr[:, None], xmask, zmask, complex(coeff))[:, 0]
    return _active["apply_pauli"](arr, xmask, zmask, complex(coeff))


def expectation_vec(v: np.ndarray, xmask: int, zmask: int, coeff: complex) -> float:
    return float(_active["expectation_vec"](np.ascontiguousarray(v), xmask, zmask, complex(coeff)))


def expectation_rho(rho: np.ndarray, xmask: int, zmask: int, coeff: complex) -> float:
    return float(
        _active["expectation_rho"](np.ascontiguousarray(rho), xmask, zmask, complex(coeff))
    )


def phase_exponent(x1, z1, x2, z2) -> int:
    """Power of ``i`` picked up when multiplying two unsigned Pauli strings letterwise."""
    return int(_active["phase_exponent"](x1, z1, x2, z2))


def gf2_rref(m: np.ndarray):
    """Reduced row echelon form over GF(2); returns ``(matrix, pivot_columns)``."""
    r, piv = _active["gf2_rref"](np.ascontiguousarray(m, dtype=np.uint8))
    return r, piv


def graph_signs(n: int, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    return _active["graph_signs"](
        n, np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)
    )


def gf2_solve(a: np.ndarray, b: np.ndarray):
    """Solve ``a @ x = b`` over GF(2). Returns one solution or ``None``."""
    a = np.asarray(a, dtype=np.uint8)
    rows, cols = a.shape
    aug = np.zeros((rows, cols + 1), dtype=np.uint8)
    aug[:, :cols] = a
    aug[:, cols] = np.asarray(b, dtype=np.uint8)
    r, piv = gf2_rref(aug)
    if len(piv) and piv[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for i, c in enumerate(piv):
        x[c] = r[i, cols]
    return x


def gf2_nullspace(a: np.ndarray) -> np.ndarray:
    """Basis of ``{x : a @ x = 0}`` over GF(2), one vector per row."""
    a = np.asarray(a, dtype=np.uint8)
    cols = a.shape[1]
    r, piv = gf2_rref(a)
    pivset = set(int(c) for c in piv)
    free = [c for c in range(cols) if c not in pivset]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(piv):
            basis[k, c] = r[i, f]
    return basis
