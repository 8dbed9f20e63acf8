"""The arbitrable delegation protocol as a sequential state machine.

Bob prepares copies, Charlie permutes, discards and splits them, Alice tests
k copies and computes on the remaining one, and on a rejection Charlie tests
his stored k copies to decide who is cheating.  A private variant leaves
Charlie out entirely.

Every copy carries a status.  "Sending" a copy only changes its status;
measured or discarded copies can never be touched again.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce

import numpy as np

from .bounds import min_k, min_m
from .graph import Graph, path
from .honesty import HonestyTest
from .pauli import PauliString
from .states import (
    MAX_DENSE_QUBITS,
    DensityState,
    StateError,
    depolarized_graph_state,
    graph_mixture,
    make_graph_state,
    maximally_mixed,
    orthogonal_graph_state,
    plus_state,
    tensor_product,
)
from .tableau import StabilizerTableau, flipped_graph_tableau, tableau_from_graph


class ProtocolError(ValueError):
    pass


class Mode(str, Enum):
    ARBITRABLE = "arbitrable"
    CHARLIE_EARLY_TEST = "arbitrable_charlie_early_test"
    PRIVATE_ONLY = "private_only"


class Verdict(str, Enum):
    ACCEPTED = "Accepted"
    BOB_CHEATING = "BobCheating"
    ALICE_CHEATING = "AliceCheating"
    # private mode: Alice rejects and nobody can arbitrate
    REJECTED = "Rejected"


PARTY_TAGS = {"bob": 1, "charlie": 2, "alice": 3}


def party_rng(seed, party):
    """Independent generator for one party within one run."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), PARTY_TAGS[party]]))


# ---------------------------------------------------------------------------
# parameters and strategies


@dataclass
class ProtocolParams:
    n: int
    k: int
    m: int
    mode: Mode = Mode.ARBITRABLE
    toy: bool = False

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if self.n < 1 or self.k < 1 or self.m < 0:
            raise ProtocolError(f"need n >= 1, k >= 1, m >= 0 (got {self.n}, {self.k}, {self.m})")
        if not self.toy:
            if self.k < min_k(self.n):
                raise ProtocolError(
                    f"k={self.k} is below 4n^2-1={min_k(self.n)}; set toy=True for desk-scale runs"
                )
            if self.m < min_m(self.n, self.k):
                raise ProtocolError(
                    f"m={self.m} is below {min_m(self.n, self.k)}; set toy=True for desk-scale runs"
                )

    @property
    def total_copies(self):
        if self.mode is Mode.PRIVATE_ONLY:
            return self.k + self.m + 1
        return 2 * self.k + self.m + 1

    def to_dict(self):
        return {"n": self.n, "k": self.k, "m": self.m, "mode": self.mode.value, "toy": self.toy}


STATE_KINDS = ("graph", "orthogonal", "depolarized", "mixture", "maximally_mixed", "plus")


@dataclass
class StateSpec:
    """Recipe for one n-qubit copy handed over by Bob.

    ``orthogonal`` is ``Z`` on the ``flips`` vertices of ``|G>``;
    ``depolarized`` mixes ``|G>`` with white noise; ``mixture`` mixes ``|G>``
    with the orthogonal state, so any fidelity in [0, 1] is reachable.
    """

    kind: str = "graph"
    fidelity: float = None
    flips: tuple = (0,)

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ProtocolError(f"unknown state kind {self.kind!r}")
        if self.kind in ("depolarized", "mixture") and self.fidelity is None:
            raise ProtocolError(f"state kind {self.kind!r} needs a fidelity")
        self.flips = tuple(int(q) for q in self.flips)

    @property
    def is_stabilizer(self):
        return self.kind in ("graph", "orthogonal", "plus")

    def dense(self, g):
        if self.kind == "graph":
            return make_graph_state(g)
        if self.kind == "orthogonal":
            return orthogonal_graph_state(g, self.flips)
        if self.kind == "depolarized":
            return depolarized_graph_state(g, self.fidelity)
        if self.kind == "mixture":
            return graph_mixture(g, self.fidelity, self.flips)
        if self.kind == "maximally_mixed":
            return maximally_mixed(g.n)
        return plus_state(g.n)

    def tableau(self, g):
        if self.kind == "graph":
            return tableau_from_graph(g)
        if self.kind == "orthogonal":
            return flipped_graph_tableau(g, self.flips)
        if self.kind == "plus":
            return StabilizerTableau.from_rows(
                [PauliString.single(g.n, i, "X") for i in range(g.n)]
            )
        raise ProtocolError(f"state kind {self.kind!r} is not a stabilizer state")

    def graph_fidelity(self, g):
        return self.dense(g).fidelity(g)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.fidelity is not None:
            d["fidelity"] = self.fidelity
        if self.kind in ("orthogonal", "mixture"):
            d["flips"] = list(self.flips)
        return d

    @classmethod
    def from_dict(cls, d):
        if isinstance(d, str):
            return cls(d)
        return cls(d.get("kind", "graph"), d.get("fidelity"), tuple(d.get("flips", (0,))))


JOINT_KINDS = ("ghz", "ghz_x", "graph_cat", "graph_product")


@dataclass
class BobStrategy:
    """``honest`` | ``iid`` | ``plant_bad`` | ``entangled``."""

    kind: str = "honest"
    state: StateSpec = None
    bad_count: int = 0
    joint: str = None

    def __post_init__(self):
        if self.kind not in ("honest", "iid", "plant_bad", "entangled"):
            raise ProtocolError(f"unknown Bob strategy {self.kind!r}")
        if self.kind in ("iid", "plant_bad") and self.state is None:
            raise ProtocolError(f"Bob strategy {self.kind!r} needs a state")
        if self.kind == "plant_bad" and self.bad_count < 0:
            raise ProtocolError("bad_count must be non-negative")
        if self.kind == "entangled" and self.joint not in JOINT_KINDS:
            raise ProtocolError(f"entangled strategy needs joint in {JOINT_KINDS}")

    @classmethod
    def honest(cls):
        return cls("honest")

    @classmethod
    def iid(cls, state):
        return cls("iid", state=state)

    @classmethod
    def plant_bad(cls, count, state):
        return cls("plant_bad", state=state, bad_count=count)

    @classmethod
    def entangled(cls, joint):
        return cls("entangled", joint=joint)

    @property
    def stabilizer_compatible(self):
        if self.kind == "honest":
            return True
        if self.kind in ("iid", "plant_bad"):
            return self.state.is_stabilizer
        return False

    def to_dict(self):
        d = {"kind": self.kind}
        if self.state is not None:
            d["state"] = self.state.to_dict()
        if self.kind == "plant_bad":
            d["bad_count"] = self.bad_count
        if self.joint is not None:
            d["joint"] = self.joint
        return d

    @classmethod
    def from_dict(cls, d):
        state = d.get("state")
        return cls(
            d.get("kind", "honest"),
            StateSpec.from_dict(state) if state is not None else None,
            int(d.get("bad_count", 0)),
            d.get("joint"),
        )


class AliceStrategy(str, Enum):
    HONEST = "honest"
    FALSE_REJECT = "false_reject"


# ---------------------------------------------------------------------------
# copies


HELD_BOB = "held:bob"
HELD_CHARLIE = "held:charlie"
HELD_ALICE = "held:alice"
TESTED = "tested"
DISCARDED = "discarded"
COMPUTE = "compute"

_ALLOWED = {
    HELD_BOB: {HELD_CHARLIE, HELD_ALICE},
    HELD_CHARLIE: {DISCARDED, HELD_ALICE, TESTED},
    HELD_ALICE: {DISCARDED, TESTED, COMPUTE},
    TESTED: set(),
    DISCARDED: set(),
    COMPUTE: set(),
}


class RegistryError(RuntimeError):
    pass


class BlockView:
    """One copy inside a joint state, behaving like a standalone n-qubit state."""

    def __init__(self, registry, copy):
        self._reg = registry
        self._copy = copy
        self.n = registry.n

    @property
    def _joint(self):
        return self._reg.joint

    def _embed(self, p):
        if p.n != self.n:
            raise StateError(f"Pauli on {p.n} qubits applied to a {self.n}-qubit copy")
        return p.embed(self._joint.n, self._reg.offset(self._copy))

    def probability(self, p):
        return self._joint.probability(self._embed(p))

    def project(self, p, outcome):
        self._joint.project(self._embed(p), outcome)

    def measure(self, p, rng):
        return self._joint.measure(self._embed(p), rng)

    def measure_xy(self, qubit, theta, rng):
        return self._joint.measure_xy(self._reg.offset(self._copy) + qubit, theta, rng)

    def reduced(self):
        off = self._reg.offset(self._copy)
        return self._joint.partial_trace(range(off, off + self.n))

    def fidelity(self, g):
        return self.reduced().fidelity(g)


class CopyRegistry:
    """Copies plus their statuses.

    Independent mode holds one state object per copy.  Joint mode holds a
    single density matrix; copy ``c`` occupies a contiguous qubit block whose
    position shifts as discarded blocks are traced out.
    """

    def __init__(self, n, states=None, joint=None):
        if (states is None) == (joint is None):
            raise RegistryError("give either independent states or one joint state")
        self.n = n
        self.states = states
        self.joint = joint
        count = len(states) if states is not None else joint.n // n
        self.status = [HELD_BOB] * count
        self._blocks = list(range(count))  # copy ids in joint qubit order

    @property
    def entangled(self):
        return self.joint is not None

    def __len__(self):
        return len(self.status)

    def offset(self, copy):
        return self._blocks.index(copy) * self.n

    def transfer(self, copy, new):
        old = self.status[copy]
        if new not in _ALLOWED[old]:
            raise RegistryError(f"copy {copy}: illegal transition {old} -> {new}")
        self.status[copy] = new

    def state(self, copy, expect=None):
        if expect is not None and self.status[copy] != expect:
            raise RegistryError(f"copy {copy} is {self.status[copy]}, expected {expect}")
        if self.status[copy] in (TESTED, DISCARDED, COMPUTE):
            raise RegistryError(f"copy {copy} is already {self.status[copy]}")
        if self.entangled:
            return BlockView(self, copy)
        return self.states[copy]

    def discard(self, copies):
        for c in copies:
            self.transfer(c, DISCARDED)
        if self.entangled and copies:
            keep = [c for c in self._blocks if c not in set(copies)]
            qubits = [self.offset(c) + j for c in keep for j in range(self.n)]
            self.joint = self.joint.partial_trace(qubits)
            self._blocks = keep
        elif not self.entangled:
            for c in copies:
                self.states[c] = None

    def with_status(self, status):
        return [c for c, s in enumerate(self.status) if s == status]


def _joint_state(kind, g, count):
    total = g.n * count
    if total > MAX_DENSE_QUBITS:
        raise StateError(f"joint state of {total} qubits exceeds the dense cap")
    d = 1 << total
    if kind == "graph_product":
        return tensor_product([make_graph_state(g)] * count)
    if kind == "ghz":
        v = np.zeros(d, dtype=complex)
        v[0] = v[-1] = 1 / math.sqrt(2)
    elif kind == "ghz_x":
        plus = np.full(d, 1.0 / math.sqrt(d), dtype=complex)
        minus = plus * (1.0 - 2.0 * (np.bitwise_count(np.arange(d)) & 1))
        v = (plus + minus) / math.sqrt(2)
    else:  # graph_cat
        good = reduce(np.kron, [make_graph_state(g).amplitudes] * count)
        bad = reduce(np.kron, [orthogonal_graph_state(g).amplitudes] * count)
        v = (good + bad) / math.sqrt(2)
    return DensityState(np.outer(v, v.conj()), check=False)


def resolve_backend(backend, bob):
    if bob.kind == "entangled":
        return "joint"
    if backend == "auto":
        return "tableau" if bob.stabilizer_compatible else "dense"
    if backend == "tableau" and not bob.stabilizer_compatible:
        raise ProtocolError("tableau backend needs stabilizer states from Bob")
    if backend not in ("dense", "tableau"):
        raise ProtocolError(f"unknown backend {backend!r}")
    return backend


# ---------------------------------------------------------------------------
# steps


def _emit(events, **event):
    if events is not None:
        events.append(event)


def step1_prepare(strategy, params, g, rng, backend="auto", events=None):
    """Bob's copies, all initially held by Bob."""
    if g.n != params.n:
        raise ProtocolError(f"graph has {g.n} vertices but n={params.n}")
    total = params.total_copies
    backend = resolve_backend(backend, strategy)
    bad = []
    if strategy.kind == "entangled":
        reg = CopyRegistry(params.n, joint=_joint_state(strategy.joint, g, total))
    else:
        if strategy.kind == "plant_bad":
            if strategy.bad_count > total:
                raise ProtocolError("more bad copies than copies")
            bad = sorted(int(c) for c in rng.choice(total, size=strategy.bad_count, replace=False))
        good_spec = StateSpec("graph")
        states = []
        for c in range(total):
            if strategy.kind == "iid" or c in bad:
                spec = strategy.state
            else:
                spec = good_spec
            states.append(spec.tableau(g) if backend == "tableau" else spec.dense(g))
        reg = CopyRegistry(params.n, states=states)
    _emit(events, step=1, event="prepare", party="bob", copies=total, bad_copies=bad)
    return reg


def step2_permute_discard(reg, params, rng, holder=HELD_CHARLIE, events=None):
    """Uniform permutation of copy indices; the first ``m`` are discarded.

    Returns the surviving copy ids in permuted order.
    """
    party = "charlie" if holder == HELD_CHARLIE else "alice"
    for c in range(len(reg)):
        reg.transfer(c, holder)
    order = [int(c) for c in rng.permutation(len(reg))]
    dropped = order[: params.m]
    reg.discard(dropped)
    _emit(events, step=2, event="permute_discard", party=party, permutation=order,
          discarded=sorted(dropped))
    return order[params.m :]


@dataclass
class Split:
    charlie: list
    alice: list
    early_records: list = field(default_factory=list)
    early_passed: bool = None


def _run_tests(reg, copies, test, rng, party, step, events, expect):
    """Sample all observables first, then measure copy by copy."""
    plans = [(c, test.sample(rng)) for c in copies]
    all_pass_prob = _all_pass_probability(reg, plans, expect)
    records = []
    for c, (subset, obs) in plans:
        rec = test.apply(reg.state(c, expect), subset, obs, rng)
        reg.transfer(c, TESTED)
        records.append(rec)
        _emit(events, step=step, event="test", party=party, copy=c, record=rec.to_dict(),
              p_pass=rec.p_pass)
    passed = all(r.passed for r in records)
    _emit(events, step=step, event="tests_done", party=party, all_passed=passed,
          all_pass_probability=all_pass_prob)
    return passed, records, all_pass_prob


def _all_pass_probability(reg, plans, expect):
    """Probability that every planned test passes (simulator instrumentation)."""
    if not reg.entangled:
        prob = 1.0
        for c, (_, obs) in plans:
            prob *= reg.state(c, expect).probability(obs)
        return prob
    scratch = reg.joint.copy()
    prob = 1.0
    for c, (_, obs) in plans:
        p = obs.embed(scratch.n, reg.offset(c))
        q = scratch.probability(p)
        prob *= q
        if q == 0.0:
            return 0.0
        scratch.project(p, 1)
    return prob


def step3_split(reg, params, survivors, g=None, rng=None, test=None, events=None):
    """Charlie keeps ``k`` copies and hands ``k + 1`` to Alice.

    In the early-test mode Charlie tests his share straight away.
    """
    if len(survivors) != 2 * params.k + 1:
        raise ProtocolError(f"expected {2 * params.k + 1} live copies, got {len(survivors)}")
    charlie = survivors[: params.k]
    alice = survivors[params.k :]
    for c in alice:
        reg.transfer(c, HELD_ALICE)
    _emit(events, step=3, event="split", charlie=charlie, alice=alice)
    split = Split(charlie, alice)
    if params.mode is Mode.CHARLIE_EARLY_TEST:
        test = test or HonestyTest(g)
        split.early_passed, split.early_records, _ = _run_tests(
            reg, charlie, test, rng, "charlie", 3, events, HELD_CHARLIE
        )
    return split


def execute_pattern(state, angles, rng):
    """Measure qubit i in the eigenbasis of ``cos(a_i) X + sin(a_i) Y``, in order.

    Returns one bit per qubit, 0 for the +1 eigenvalue.
    """
    if len(angles) != state.n:
        raise ProtocolError(f"{len(angles)} angles for a {state.n}-qubit state")
    if isinstance(state, StabilizerTableau):
        quarter = [a / (math.pi / 2) for a in angles]
        if any(abs(q - round(q)) > 1e-12 for q in quarter):
            state = state.to_pure()
    return [state.measure_xy(i, float(a), rng) for i, a in enumerate(angles)]


@dataclass
class AliceResult:
    alice_pass: bool
    comp_output: list
    instrumented_fidelity: float
    comp_copy: int
    records: list
    all_pass_probability: float


def step4_alice(reg, batch, g, rng, pattern=None, test=None, events=None):
    """Pick the computation copy at random, test the rest, then compute."""
    if len(batch) < 2:
        raise ProtocolError("Alice needs at least two copies")
    test = test or HonestyTest(g)
    comp = batch[int(rng.integers(len(batch)))]
    tested = [c for c in batch if c != comp]
    _emit(events, step=4, event="select_compute", party="alice", copy=comp)
    passed, records, all_prob = _run_tests(reg, tested, test, rng, "alice", 4, events, HELD_ALICE)
    state = reg.state(comp, HELD_ALICE)
    fid = float(state.fidelity(g))
    _emit(events, step=4, event="fidelity", copy=comp, value=fid)
    angles = [0.0] * g.n if pattern is None else list(pattern)
    bits = execute_pattern(state, angles, rng)
    reg.transfer(comp, COMPUTE)
    _emit(events, step=4, event="compute", party="alice", copy=comp, angles=angles, bits=bits)
    return AliceResult(passed, bits, fid, comp, records, all_prob)


def step5_verdict(alice_pass, strategy=AliceStrategy.HONEST):
    strategy = AliceStrategy(strategy)
    if strategy is AliceStrategy.FALSE_REJECT:
        return "reject"
    return "accept" if alice_pass else "reject"


def step6_arbitrate(reg, store, g, rng, test=None, split=None, events=None):
    """Charlie tests his stored copies: all pass -> Alice cheats, else Bob cheats.

    When Charlie already tested his share at STEP 3 those results are used.
    """
    if split is not None and split.early_passed is not None:
        passed = split.early_passed
    else:
        test = test or HonestyTest(g)
        passed, _, _ = _run_tests(reg, store, test, rng, "charlie", 6, events, HELD_CHARLIE)
    verdict = Verdict.ALICE_CHEATING if passed else Verdict.BOB_CHEATING
    _emit(events, step=6, event="arbitration", party="charlie", verdict=verdict.value)
    return verdict


# ---------------------------------------------------------------------------
# whole runs


@dataclass
class Transcript:
    params: ProtocolParams
    graph: Graph
    bob: BobStrategy
    alice: AliceStrategy
    seed: int
    backend: str
    events: list = field(default_factory=list)
    verdict: Verdict = None
    verdict_author: str = None
    instrumented_fidelity: float = None
    accept_probability: float = None

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "mode": self.params.mode.value,
            "toy": self.params.toy,
            "graph": self.graph.to_dict(),
            "strategies": {"bob": self.bob.to_dict(), "alice": AliceStrategy(self.alice).value},
            "seed": self.seed,
            "backend": self.backend,
            "events": self.events,
            "verdict": self.verdict.value,
            "verdict_author": self.verdict_author,
            "instrumented_fidelity": self.instrumented_fidelity,
            "accept_probability": self.accept_probability,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _pattern_or_default(pattern, g):
    return [0.0] * g.n if pattern is None else list(pattern)


def run_protocol(params, bob, alice=AliceStrategy.HONEST, seed=0, graph=None,
                 backend="auto", pattern=None, test=None):
    """One complete arbitrable run, deterministic in ``seed``."""
    if params.mode is Mode.PRIVATE_ONLY:
        return run_private_mode(params, bob, seed, graph, backend, pattern, test)
    g = graph if graph is not None else path(params.n)
    test = test or HonestyTest(g)
    rng_bob, rng_charlie, rng_alice = (party_rng(seed, p) for p in ("bob", "charlie", "alice"))
    tr = Transcript(params, g, bob, AliceStrategy(alice), int(seed), resolve_backend(backend, bob))
    ev = tr.events

    reg = step1_prepare(bob, params, g, rng_bob, backend, ev)
    survivors = step2_permute_discard(reg, params, rng_charlie, HELD_CHARLIE, ev)
    split = step3_split(reg, params, survivors, g, rng_charlie, test, ev)
    if split.early_passed is False:
        tr.verdict, tr.verdict_author = Verdict.BOB_CHEATING, "charlie"
        return tr

    res = step4_alice(reg, split.alice, g, rng_alice, _pattern_or_default(pattern, g), test, ev)
    tr.instrumented_fidelity = res.instrumented_fidelity
    tr.accept_probability = res.all_pass_probability
    decision = step5_verdict(res.alice_pass, alice)
    _emit(ev, step=5, event="decision", party="alice", decision=decision)
    if decision == "accept":
        stored = reg.with_status(HELD_CHARLIE)
        reg.discard(stored)
        _emit(ev, step=5, event="release", party="charlie", copies=stored)
        tr.verdict, tr.verdict_author = Verdict.ACCEPTED, "alice"
        return tr
    tr.verdict = step6_arbitrate(reg, split.charlie, g, rng_charlie, test, split, ev)
    tr.verdict_author = "charlie"
    return tr


def run_private_mode(params, bob, seed=0, graph=None, backend="auto", pattern=None, test=None):
    """Bob sends ``k + m + 1`` copies straight to Alice; no arbitration."""
    if params.mode is not Mode.PRIVATE_ONLY:
        raise ProtocolError("run_private_mode needs mode=private_only")
    g = graph if graph is not None else path(params.n)
    test = test or HonestyTest(g)
    rng_bob, rng_alice = party_rng(seed, "bob"), party_rng(seed, "alice")
    tr = Transcript(params, g, bob, AliceStrategy.HONEST, int(seed), resolve_backend(backend, bob))
    ev = tr.events
    reg = step1_prepare(bob, params, g, rng_bob, backend, ev)
    survivors = step2_permute_discard(reg, params, rng_alice, HELD_ALICE, ev)
    res = step4_alice(reg, survivors, g, rng_alice, _pattern_or_default(pattern, g), test, ev)
    tr.instrumented_fidelity = res.instrumented_fidelity
    tr.accept_probability = res.all_pass_probability
    decision = step5_verdict(res.alice_pass)
    _emit(ev, step=5, event="decision", party="alice", decision=decision)
    tr.verdict = Verdict.ACCEPTED if decision == "accept" else Verdict.REJECTED
    tr.verdict_author = "alice"
    return tr


# ---------------------------------------------------------------------------
# transcript audit


def check_transcript(d):
    """Replay a serialised transcript and assert the copy and verdict invariants."""
    params = d["params"]
    mode = Mode(params["mode"])
    status = {}
    tests = {"alice": [], "charlie": []}
    comp = None
    for e in d["events"]:
        kind = e["event"]
        if kind == "prepare":
            status = {c: "live" for c in range(e["copies"])}
        elif kind == "permute_discard":
            if sorted(e["permutation"]) != list(range(len(status))):
                raise AssertionError("permutation is not a bijection")
            for c in e["discarded"]:
                _audit_consume(status, c, "discarded")
        elif kind == "test":
            _audit_consume(status, e["copy"], "tested")
            rec = e["record"]
            if rec["passed"] != (rec["outcome"] == 1):
                raise AssertionError("passed flag disagrees with the outcome")
            tests[e["party"]].append(rec["passed"])
        elif kind == "compute":
            _audit_consume(status, e["copy"], "compute")
            comp = e["copy"]
        elif kind == "release":
            for c in e["copies"]:
                _audit_consume(status, c, "discarded")
    verdict = d["verdict"]
    alice_ok = bool(tests["alice"]) and all(tests["alice"])
    alice_tests_ran = comp is not None
    if verdict == Verdict.ACCEPTED.value:
        if not alice_ok or d["strategies"]["alice"] != AliceStrategy.HONEST.value:
            raise AssertionError("Accepted without Alice passing all her tests")
    elif verdict in (Verdict.BOB_CHEATING.value, Verdict.ALICE_CHEATING.value):
        if d["verdict_author"] != "charlie":
            raise AssertionError("arbitration verdicts are authored by Charlie")
        early_abort = mode is Mode.CHARLIE_EARLY_TEST and not alice_tests_ran
        if not early_abort and not alice_tests_ran:
            raise AssertionError("arbitration without an Alice decision")
        if verdict == Verdict.ALICE_CHEATING.value and not all(tests["charlie"]):
            raise AssertionError("AliceCheating although Charlie's tests failed")
        if verdict == Verdict.BOB_CHEATING.value and all(tests["charlie"]):
            raise AssertionError("BobCheating although Charlie's tests passed")
    elif verdict == Verdict.REJECTED.value:
        if mode is not Mode.PRIVATE_ONLY or alice_ok:
            raise AssertionError("Rejected only arises from a failed private-mode test")
    k = params["k"]
    expected_alice = k if alice_tests_ran else 0
    if len(tests["alice"]) != expected_alice:
        raise AssertionError("Alice must test exactly k copies")
    return True


def _audit_consume(status, c, new):
    if status.get(c) != "live":
        raise AssertionError(f"copy {c} reused after being {status.get(c)}")
    status[c] = new
