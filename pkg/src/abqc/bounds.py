"""Soundness arithmetic: pass probability, deviation maximum, de Finetti term,
parameter minima, and brute-force checks of the joint-trace identities.

Two forms of the discard-count requirement exist.  ``min_m`` follows the
derivation ``1/2 sqrt(2 k^2 n ln2 / m) <= 1/(2 n^2)``, giving
``m >= 2 ln2 k^2 n^5``.  The statement of the parameter constraints in the
protocol text reads ``m >= 2 ln2 k^n n^5``; it is available with
``text_form=True`` and the two are reported side by side by
:func:`parameter_row`.
"""

import math
from dataclasses import asdict, dataclass
from decimal import Context, Decimal
from fractions import Fraction
from functools import reduce

import numpy as np

from .graph import Graph
from .states import MAX_DENSE_QUBITS, StateError, depolarized_graph_state, graph_projector
from .states import random_density, tensor_power

LN2 = math.log(2.0)


class BoundError(ValueError):
    pass


def pass_probability(F):
    """Honesty-test pass probability ``(1 + F) / 2`` for fidelity ``F``."""
    if not 0.0 <= F <= 1.0:
        raise BoundError(f"fidelity {F} outside [0, 1]")
    return 0.5 * (1.0 + F)


def deviation_value(x, k):
    """``2 x**k (1 - x)``: joint pass-and-deviate probability for iid copies."""
    if k < 1:
        raise BoundError("k must be >= 1")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise BoundError("x outside [0, 1]")
    out = 2.0 * xa**k * (1.0 - xa)
    return float(out) if out.ndim == 0 else out


def deviation_maximum(k):
    """``(argmax, value)`` of :func:`deviation_value` over ``x`` in [0, 1]."""
    if k < 1:
        raise BoundError("k must be >= 1")
    x = k / (k + 1)
    return x, 2.0 * x**k / (k + 1)


def deviation_bound(k):
    return 2.0 / (k + 1)


def min_k(n):
    if n < 1:
        raise BoundError("n must be >= 1")
    return 4 * n * n - 1


def definetti_term(k, n, m):
    """``1/2 sqrt(2 k^2 n ln2 / m)``."""
    if m <= 0:
        raise BoundError("m must be >= 1 for the de Finetti term")
    if m < 2**1000:
        return 0.5 * math.sqrt(2.0 * k * k * n * LN2 / m)
    # m too large for a float: go through logarithms
    return 0.5 * math.exp(0.5 * (math.log(2.0 * k * k * n * LN2) - math.log(m)))


def _ceil_2ln2_times(integer):
    digits = len(str(integer)) + 40
    ctx = Context(prec=digits)
    val = ctx.multiply(ctx.multiply(Decimal(2), Decimal(2).ln(ctx)), Decimal(integer))
    return int(val.to_integral_value(rounding="ROUND_CEILING"))


def min_m(n, k, text_form=False):
    """Least ``m`` meeting the de Finetti budget ``1/(2 n^2)``.

    ``text_form=True`` returns ``ceil(2 ln2 k^n n^5)`` instead.
    """
    if n < 1 or k < 1:
        raise BoundError("n and k must be >= 1")
    if text_form:
        return _ceil_2ln2_times(k**n * n**5)
    return _ceil_2ln2_times(k * k * n**5)


@dataclass
class SoundnessBudget:
    n: int
    k: int
    m: int
    max_deviation_term: float
    definetti_term: float
    total: float
    satisfied: bool

    def to_dict(self):
        return asdict(self)


def budget(n, k, m):
    dev = deviation_bound(k)
    fin = definetti_term(k, n, m)
    total = dev + fin
    return SoundnessBudget(n, k, m, dev, fin, total, total <= 1.0 / (n * n))


def parameter_row(n, text_form_m=False):
    """One table row: minima for ``n`` and the budget at those minima."""
    k = min_k(n)
    m_derived = min_m(n, k)
    m_text = min_m(n, k, text_form=True)
    m_used = m_text if text_form_m else m_derived
    b = budget(n, k, m_used)
    return {
        "n": n,
        "min_k": k,
        "min_m_derived": m_derived,
        "min_m_text": m_text,
        "m_forms_agree": m_derived == m_text,
        "m_used": "text" if text_form_m else "derived",
        "max_deviation_term": b.max_deviation_term,
        "definetti_term": b.definetti_term,
        "total": b.total,
        "target": 1.0 / (n * n),
        "satisfied": b.satisfied,
    }


# ---------------------------------------------------------------------------
# brute-force verification


def pass_operator(g: Graph) -> np.ndarray:
    d = 1 << g.n
    return 0.5 * (np.eye(d) + graph_projector(g))


def deviation_projector(g: Graph) -> np.ndarray:
    return np.eye(1 << g.n) - graph_projector(g)


def verify_product_identity(sigma, g: Graph, k: int):
    """Joint trace on ``sigma^(k+1)`` against the factorised form.

    Returns ``(lhs, rhs, |lhs - rhs|)``.
    """
    if g.n * (k + 1) > MAX_DENSE_QUBITS:
        raise StateError("joint system exceeds the dense cap")
    rho = sigma.to_density().matrix
    t_op = pass_operator(g)
    dev = deviation_projector(g)
    joint_op = reduce(np.kron, [t_op] * k + [dev])
    joint_state = tensor_power(sigma.to_density(), k + 1).matrix
    lhs = float(np.sum(joint_op * joint_state.T).real)
    rhs = float(np.trace(t_op @ rho).real ** k * np.trace(dev @ rho).real)
    return lhs, rhs, abs(lhs - rhs)


def verify_eq1_bound(g: Graph, k: int, trials: int, rng):
    """Largest factorised deviation value over random states (plus the maximiser).

    Raises :class:`BoundError` if any value exceeds ``2/(k+1)``, or
    ``1/(2 n^2)`` once ``k >= 4 n^2 - 1``.
    """
    t_op = pass_operator(g)
    dev = deviation_projector(g)
    samples = [random_density(g.n, rng) for _ in range(trials)]
    x_star, _ = deviation_maximum(k)
    f_star = 2.0 * x_star - 1.0
    if f_star >= 2.0**-g.n:
        samples.append(depolarized_graph_state(g, f_star))
    best = 0.0
    for s in samples:
        rho = s.matrix
        x = float(np.trace(t_op @ rho).real)
        value = x**k * float(np.trace(dev @ rho).real)
        best = max(best, value)
    tol = 1e-12
    if best > deviation_bound(k) + tol:
        raise BoundError(f"value {best} exceeds 2/(k+1) = {deviation_bound(k)}")
    if k >= min_k(g.n) and best > 1.0 / (2 * g.n * g.n) + tol:
        raise BoundError(f"value {best} exceeds 1/(2n^2) with k >= 4n^2 - 1")
    return best


@dataclass
class ImplicationCheck:
    n: int
    product_bound: Fraction
    infidelity: Fraction
    implied_acceptance_bound: Fraction
    premise: bool
    conclusion: bool | None
    holds: bool


def soundness_implication(n, infidelity, acceptance=None, product_bound=None):
    """Exact check of the final step of the soundness argument.

    With ``Tr(Pi ρ_comp) * Tr(T^k ρ) <= product_bound`` (default ``1/n^2``),
    an infidelity of at least ``1/n`` forces the acceptance factor down to
    at most ``1/n``.  Inputs are converted to exact fractions.  When
    ``acceptance`` is given the product must respect the bound.
    """
    bound = Fraction(1, n * n) if product_bound is None else Fraction(product_bound)
    inf = Fraction(infidelity)
    if not 0 <= inf <= 1:
        raise BoundError("infidelity outside [0, 1]")
    implied = Fraction(1) if inf == 0 else min(Fraction(1), bound / inf)
    premise = inf >= Fraction(1, n)
    conclusion = None
    if acceptance is not None:
        acc = Fraction(acceptance)
        if inf * acc > bound:
            raise BoundError("infidelity times acceptance exceeds the stated bound")
        conclusion = acc <= Fraction(1, n) if premise else None
    holds = (not premise) or implied <= Fraction(1, n)
    return ImplicationCheck(n, bound, inf, implied, premise, conclusion, holds)
