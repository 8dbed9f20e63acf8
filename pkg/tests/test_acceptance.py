"""Acceptance criteria, one test each, with the stated tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py -v`` (a summary block lists one
PASS/FAIL line per criterion) or directly with ``python tests/test_acceptance.py``.
"""

import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES, kron_all, pauli_matrix  # noqa: E402

from abqc import bounds  # noqa: E402
from abqc.graph import Graph, path  # noqa: E402
from abqc.harness import (  # noqa: E402
    ExperimentConfig,
    run_montecarlo,
    suite_backend_equivalence,
    suite_deviation_max,
    suite_eq1_bound,
    suite_parameters,
    trial_seed,
    within_sigma,
)
from abqc.honesty import mns16_test, povm_average  # noqa: E402
from abqc.protocol import (  # noqa: E402
    AliceStrategy,
    BobStrategy,
    ProtocolParams,
    StateSpec,
    Verdict,
    check_transcript,
    run_protocol,
)
from abqc.states import fidelity_with_graph, maximally_mixed, random_density  # noqa: E402

CRITERIA = {}


def criterion(number, title, budget):
    def wrap(fn):
        CRITERIA[number] = (title, budget, fn)
        return fn
    return wrap


def toy_config(**d):
    return ExperimentConfig.from_mapping({"toy": True, "m": 0, **d})


@criterion(1, "completeness, honest/honest accepted always", 10)
def c1():
    s = run_montecarlo(toy_config(n=2, k=5, m=4, graph="path", master_seed=101), trials=500)
    return s.counts["Accepted"] == 500, f"Accepted {s.counts['Accepted']}/500"


@criterion(2, "honesty-test marginal on I/4 is 0.625", 10)
def c2():
    g = path(2)
    rng = np.random.default_rng(202)
    trials = 10_000
    passes = sum(mns16_test(maximally_mixed(2), g, rng).passed for _ in range(trials))
    return within_sigma(passes, trials, 0.625), f"rate {passes / trials:.4f} vs 0.625 (3 sigma)"


@criterion(3, "group average of (1+<g_S>)/2 equals 1/2 + F/2", 5)
def c3():
    rng = np.random.default_rng(303)
    worst = 0.0
    for n in (1, 2, 3):
        g = path(n)
        for _ in range(20):
            sigma = random_density(n, rng)
            worst = max(worst, abs(povm_average(sigma, g) - 0.5 - 0.5 * fidelity_with_graph(sigma, g)))
    return worst < 1e-10, f"max |diff| {worst:.2e} (tol 1e-10)"


@criterion(4, "joint trace on sigma^(k+1) factorises", 30)
def c4():
    rng = np.random.default_rng(404)
    worst = 0.0
    for n in (1, 2):
        for k in (1, 2, 3):
            for _ in range(20):
                worst = max(worst, bounds.verify_product_identity(random_density(n, rng), path(n), k)[2])
    return worst < 1e-10, f"max |diff| {worst:.2e} (tol 1e-10)"


@criterion(5, "deviation maximum at k/(k+1), below 2/(k+1)", 10)
def c5():
    r = suite_deviation_max(50)
    return r.passed, f"grid excess {r.max_deviation:.2e} (tol 1e-9), argmax within 1e-5"


@criterion(6, "min_k and min_m minimal, budget satisfied", 5)
def c6():
    r = suite_parameters()
    return r.passed, f"{r.cases} cases, failures {int(r.max_deviation)}"


@criterion(7, "iid acceptance ((1+F)/2)^4 and fidelity of the computation copy", 120)
def c7():
    details, ok = [], True
    specs = {0.0: {"kind": "orthogonal"}, 0.5: {"kind": "depolarized", "fidelity": 0.5},
             0.9: {"kind": "depolarized", "fidelity": 0.9}}
    for F, state in specs.items():
        c = toy_config(n=2, k=4, master_seed=700 + int(10 * F),
                       bob={"kind": "iid", "state": state})
        s = run_montecarlo(c, trials=10_000)
        want = ((1 + F) / 2) ** 4
        rate_ok = within_sigma(s.counts["Accepted"], 10_000, want)
        fid_ok = abs(s.mean_fidelity_given_accepted - F) <= 0.02
        ok = ok and rate_ok and fid_ok
        details.append(f"F={F}: {s.rates['Accepted']:.4f}/{want:.4f} fid {s.mean_fidelity_given_accepted:.4f}")
    return ok, "; ".join(details)


@criterion(8, "arbitration: false reject exposed, orthogonal Bob caught", 60)
def c8():
    params = ProtocolParams(2, 3, 1, toy=True)
    false_rej = sum(
        run_protocol(params, BobStrategy.honest(), AliceStrategy.FALSE_REJECT, trial_seed(801, i)).verdict
        is Verdict.ALICE_CHEATING
        for i in range(1000)
    )
    params = ProtocolParams(2, 5, 0, toy=True)
    bob = BobStrategy.iid(StateSpec("orthogonal"))
    reached = bob_cheat = i = 0
    while reached < 10_000:
        tr = run_protocol(params, bob, AliceStrategy.HONEST, trial_seed(802, i))
        i += 1
        if any(e["event"] == "arbitration" for e in tr.events):
            reached += 1
            bob_cheat += tr.verdict is Verdict.BOB_CHEATING
    want = 1 - 2**-5
    ok = false_rej == 1000 and within_sigma(bob_cheat, reached, want)
    return ok, (f"AliceCheating {false_rej}/1000; BobCheating {bob_cheat}/{reached} "
                f"= {bob_cheat / reached:.4f} vs {want}")


@criterion(9, "tableau and dense probabilities agree", 30)
def c9():
    r = suite_backend_equivalence()
    return r.passed, f"{r.cases} measurements, max |diff| {r.max_deviation:.2e} (tol 1e-9)"


def _ghz_oracle(d):
    """Acceptance probability of Alice's recorded tests on the full 7-qubit GHZ state."""
    n = d["params"]["n"]
    total = d["events"][0]["copies"]
    qubits = n * total
    v = np.zeros(1 << qubits)
    v[0] = v[-1] = 1 / math.sqrt(2)
    rho = np.outer(v, v)
    proj = np.eye(1 << qubits)
    for e in d["events"]:
        if e["event"] == "test" and e["party"] == "alice":
            c = e["copy"]
            label = e["record"]["observable"]
            letters = label.lstrip("+-")
            sign = -1 if label.startswith("-") else 1
            full = "I" * (c * n) + letters + "I" * ((total - c - 1) * n)
            proj = proj @ (0.5 * (np.eye(1 << qubits) + sign * pauli_matrix(full)))
    return float(np.trace(proj @ rho).real)


@criterion(10, "GHZ-correlated Bob matches a direct density-matrix computation", 60)
def c10():
    params = ProtocolParams(1, 2, 2, toy=True)
    worst, valid = 0.0, True
    for seed in range(10):
        tr = run_protocol(params, BobStrategy.entangled("ghz"), seed=seed, graph=Graph(1))
        d = json.loads(tr.to_json())
        valid = valid and check_transcript(d)
        worst = max(worst, abs(d["accept_probability"] - _ghz_oracle(d)))
    return valid and worst < 1e-9, f"10 seeds, max |diff| {worst:.2e} (tol 1e-9)"


def evaluate(number):
    title, budget, fn = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    passed = bool(ok) and elapsed < budget
    line = (f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail} "
            f"[{elapsed:.1f}s / {budget}s]")
    return passed, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    passed, line = evaluate(number)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(p for p, _ in results) else 1)
