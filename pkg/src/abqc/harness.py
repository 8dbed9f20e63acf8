"""Experiment configuration, Monte Carlo driver and deterministic verification suites."""

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import bounds
from .graph import Graph, GraphError, load_graph, named, path
from .honesty import HonestyTest, povm_average
from .protocol import (
    AliceStrategy,
    BobStrategy,
    Mode,
    ProtocolError,
    ProtocolParams,
    Verdict,
    resolve_backend,
    run_protocol,
)
from .states import StateError, random_density

WILSON_Z = 1.959963984540054  # two-sided 95%
VERDICTS = [v.value for v in Verdict]
FIDELITY_TOL = 0.02


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    params: ProtocolParams
    graph: Graph
    bob: BobStrategy = field(default_factory=BobStrategy.honest)
    alice: AliceStrategy = AliceStrategy.HONEST
    trials: int = 1
    master_seed: int = 0
    backend: str = "auto"
    pattern: list = None
    test_mode: str = "joint"
    output: str = None
    format: str = "jsonl"

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.graph.n != self.params.n:
            raise ConfigError(f"graph has {self.graph.n} vertices but n={self.params.n}")
        if self.test_mode not in ("joint", "decomposed"):
            raise ConfigError("test_mode must be 'joint' or 'decomposed'")
        if self.pattern is not None and len(self.pattern) != self.params.n:
            raise ConfigError("pattern needs one angle per qubit")
        try:
            self.resolved_backend = resolve_backend(self.backend, self.bob)
        except ProtocolError as exc:
            raise ConfigError(str(exc)) from None

    def make_test(self):
        return HonestyTest(self.graph, decompose=self.test_mode == "decomposed")

    @classmethod
    def from_mapping(cls, d, base_dir="."):
        try:
            params = ProtocolParams(
                int(d["n"]), int(d["k"]), int(d.get("m", 0)),
                d.get("mode", Mode.ARBITRABLE.value), bool(d.get("toy", False)),
            )
            graph = _graph_from_config(d.get("graph"), params.n, base_dir)
            return cls(
                params=params,
                graph=graph,
                bob=BobStrategy.from_dict(d.get("bob", {"kind": "honest"})),
                alice=AliceStrategy(d.get("alice", "honest")),
                trials=int(d.get("trials", 1)),
                master_seed=int(d.get("master_seed", d.get("seed", 0))),
                backend=d.get("backend", "auto"),
                pattern=d.get("pattern"),
                test_mode=d.get("test_mode", "joint"),
                output=d.get("output"),
                format=d.get("format", "jsonl"),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from None
        except (ProtocolError, GraphError, StateError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    def to_dict(self):
        return {
            **self.params.to_dict(),
            "graph": self.graph.to_dict(),
            "bob": self.bob.to_dict(),
            "alice": self.alice.value,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "backend": self.backend,
            "pattern": self.pattern,
            "test_mode": self.test_mode,
        }


def _graph_from_config(spec, n, base_dir):
    if spec is None:
        return path(n)
    if isinstance(spec, str):
        return named(spec, n)
    if "file" in spec:
        return load_graph(Path(base_dir) / spec["file"])
    if "edges" in spec:
        return Graph.from_edges(int(spec.get("n", n)), [tuple(e) for e in spec["edges"]])
    if "family" in spec:
        return named(spec["family"], int(spec.get("n", n)))
    raise ConfigError("graph must give 'family', 'edges' or 'file'")


def load_config(path):
    """Read a YAML (or JSON) experiment config."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return ExperimentConfig.from_mapping(data, base_dir=path.parent)


# ---------------------------------------------------------------------------
# seeds and statistics


def trial_seed(master_seed, index):
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def wilson_interval(successes, trials, z=WILSON_Z):
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # the bounds are exactly 0 and 1 at the extremes; rounding can miss by an ulp
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def within_sigma(count, trials, p, nsigma=3.0):
    """``|count/trials - p| <= nsigma * sqrt(p(1-p)/trials)``; exact match when p is 0 or 1."""
    sd = math.sqrt(p * (1.0 - p) / trials)
    return abs(count / trials - p) <= nsigma * sd + 1e-15


# ---------------------------------------------------------------------------
# Monte Carlo


def run_trial(config, index):
    seed = trial_seed(config.master_seed, index)
    tr = run_protocol(
        config.params, config.bob, config.alice, seed, config.graph,
        config.backend, config.pattern, config.make_test(),
    )
    return tr


def _trial_line(args):
    config, index = args
    return run_trial(config, index).to_json()


def _iid_fidelity(config):
    bob = config.bob
    if bob.kind == "honest":
        return 1.0
    if bob.kind == "iid":
        return bob.state.graph_fidelity(config.graph)
    return None


def predictions(config):
    """Analytic verdict probabilities for strategies with independent, identical copies."""
    out = {}
    params = config.params
    F = _iid_fidelity(config)
    if config.bob.kind == "plant_bad":
        out["bad_is_compute"] = config.bob.bad_count / params.total_copies
    if F is None:
        return out
    f = bounds.pass_probability(min(1.0, max(0.0, F))) ** params.k
    honest = config.alice is AliceStrategy.HONEST
    acc = rej = None
    if params.mode is Mode.PRIVATE_ONLY:
        out["Accepted"] = f
        out["Rejected"] = 1 - f
        acc = f
    elif params.mode is Mode.ARBITRABLE:
        acc = f if honest else 0.0
        rej = 1 - acc
        out["Accepted"] = acc
        out["AliceCheating"] = rej * f
        out["BobCheating"] = rej * (1 - f)
        out["AliceCheating_given_reject"] = f
    else:
        acc = f * f if honest else 0.0
        out["Accepted"] = acc
        out["AliceCheating"] = f * (1 - f) if honest else f
        out["BobCheating"] = 1 - f
    if acc:
        out["mean_fidelity_given_accepted"] = F
    return out


@dataclass
class ExperimentSummary:
    trials: int
    counts: dict
    rates: dict
    intervals: dict
    predicted: dict
    checks: dict
    mean_fidelity_given_accepted: float
    bad_is_compute: int
    backend: str
    elapsed_seconds: float
    interrupted: bool = False

    def to_dict(self):
        return dict(self.__dict__)


class _Aggregator:
    def __init__(self):
        self.counts = {v: 0 for v in VERDICTS}
        self.trials = 0
        self.fid_sum = 0.0
        self.bad_is_compute = 0
        self.reject_then_alice = 0
        self.rejects = 0

    def add(self, d):
        self.trials += 1
        v = d["verdict"]
        self.counts[v] += 1
        if v == Verdict.ACCEPTED.value:
            self.fid_sum += d["instrumented_fidelity"]
        bad = set(d["events"][0]["bad_copies"])
        comp = next((e["copy"] for e in d["events"] if e["event"] == "compute"), None)
        if comp is not None and comp in bad:
            self.bad_is_compute += 1
        if any(e["event"] == "arbitration" for e in d["events"]):
            self.rejects += 1
            self.reject_then_alice += v == Verdict.ALICE_CHEATING.value

    def summary(self, config, elapsed, interrupted=False):
        n = self.trials
        rates = {v: c / n for v, c in self.counts.items()} if n else {}
        intervals = {v: wilson_interval(c, n) for v, c in self.counts.items()} if n else {}
        pred = predictions(config)
        checks = {}
        for key, p in pred.items():
            if key in self.counts:
                checks[key] = within_sigma(self.counts[key], n, p) if n else None
            elif key == "bad_is_compute" and n:
                checks[key] = within_sigma(self.bad_is_compute, n, p)
            elif key == "AliceCheating_given_reject" and self.rejects:
                checks[key] = within_sigma(self.reject_then_alice, self.rejects, p)
        acc = self.counts[Verdict.ACCEPTED.value]
        mean_fid = self.fid_sum / acc if acc else None
        if "mean_fidelity_given_accepted" in pred and mean_fid is not None:
            checks["mean_fidelity_given_accepted"] = (
                abs(mean_fid - pred["mean_fidelity_given_accepted"]) <= FIDELITY_TOL
            )
        return ExperimentSummary(
            n, dict(self.counts), rates, intervals, pred, checks, mean_fid,
            self.bad_is_compute, config.resolved_backend, elapsed, interrupted,
        )


def run_montecarlo(config, trials=None, jobs=1, transcripts=None):
    """Run independent trials and aggregate them in trial-index order.

    ``transcripts`` is an open text stream receiving one JSON line per trial.
    """
    trials = config.trials if trials is None else trials
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    agg = _Aggregator()
    start = time.perf_counter()
    tasks = ((config, i) for i in range(trials))
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    lines = pool.map(_trial_line, tasks, chunksize=64) if pool else map(_trial_line, tasks)
    interrupted = False
    try:
        for line in lines:
            agg.add(json.loads(line))
            if transcripts is not None:
                transcripts.write(line + "\n")
    except KeyboardInterrupt:
        interrupted = True
    finally:
        if transcripts is not None:
            transcripts.flush()
        if pool is not None:
            pool.shutdown(wait=not interrupted, cancel_futures=True)
    return agg.summary(config, time.perf_counter() - start, interrupted)


# ---------------------------------------------------------------------------
# deterministic verification suites


@dataclass
class SuiteResult:
    name: str
    max_deviation: float
    tolerance: float
    cases: int

    @property
    def passed(self):
        return self.max_deviation <= self.tolerance

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<22} cases={self.cases:<5} "
                f"max_dev={self.max_deviation:.3e} tol={self.tolerance:.0e}")


def suite_product_identity(seed=2024):
    rng = np.random.default_rng(seed)
    worst, cases = 0.0, 0
    for n in (1, 2):
        g = path(n)
        for k in (1, 2, 3):
            for _ in range(20):
                _, _, diff = bounds.verify_product_identity(random_density(n, rng), g, k)
                worst = max(worst, diff)
                cases += 1
    return SuiteResult("product_identity", worst, 1e-10, cases)


def suite_povm_identity(seed=2025):
    rng = np.random.default_rng(seed)
    worst, cases = 0.0, 0
    for n in (1, 2, 3):
        g = path(n)
        for _ in range(20):
            sigma = random_density(n, rng)
            lhs = povm_average(sigma, g)
            rhs = 0.5 + 0.5 * sigma.fidelity(g)
            worst = max(worst, abs(lhs - rhs))
            cases += 1
    return SuiteResult("povm_identity", worst, 1e-10, cases)


def deviation_grid_check(k, step=1e-6):
    """Grid maximum of ``2 x^k (1 - x)`` versus the analytic maximum.

    Returns ``(grid_argmax, excess over analytic value, analytic value, 2/(k+1))``.
    """
    x = np.arange(0.0, 1.0 + step / 2, step)
    x[-1] = min(x[-1], 1.0)
    vals = bounds.deviation_value(x, k)
    i = int(np.argmax(vals))
    arg, value = bounds.deviation_maximum(k)
    return float(x[i]), float(vals[i] - value), value, bounds.deviation_bound(k)


def suite_deviation_max(kmax=50):
    worst, ok = 0.0, True
    for k in range(1, kmax + 1):
        grid_arg, excess, value, bound = deviation_grid_check(k)
        arg, _ = bounds.deviation_maximum(k)
        ok = ok and abs(grid_arg - arg) <= 1e-5 and value <= bound
        worst = max(worst, excess)
    return SuiteResult("deviation_max", worst if ok else math.inf, 1e-9, kmax)


def suite_parameters(n_max=50):
    worst, cases = 0.0, 0
    for n in range(1, n_max + 1):
        k = bounds.min_k(n)
        target = 1.0 / (2 * n * n)
        ok = bounds.deviation_bound(k) <= target and bounds.deviation_bound(k - 1) > target
        worst = max(worst, 0.0 if ok else 1.0)
        cases += 1
    for n in range(1, 6):
        for k in range(1, 51):
            m = bounds.min_m(n, k)
            target = 1.0 / (2 * n * n)
            ok = bounds.definetti_term(k, n, m) <= target
            if m > 1:
                ok = ok and bounds.definetti_term(k, n, m - 1) > target
            worst = max(worst, 0.0 if ok else 1.0)
            cases += 1
    for n in range(1, 11):
        b = bounds.budget(n, bounds.min_k(n), bounds.min_m(n, bounds.min_k(n)))
        worst = max(worst, 0.0 if b.satisfied else 1.0)
        cases += 1
    return SuiteResult("parameters", worst, 0.0, cases)


def suite_backend_equivalence(seed=7, samples=100):
    """Dense and tableau probabilities along one shared measurement branch.

    Each graph sees ``samples`` random stabilizer-group elements interleaved
    with as many random Paulis; the latter move the state off |G> so that the
    group elements are not trivially certain.
    """
    from .graph import all_connected_graphs, cycle
    from .honesty import sample_stabilizer_element
    from .pauli import PauliString
    from .states import make_graph_state
    from .tableau import tableau_from_graph

    rng = np.random.default_rng(seed)
    graphs = [g for n in range(1, 5) for g in all_connected_graphs(n)] + [cycle(5)]
    worst, cases = 0.0, 0
    for g in graphs:
        dense = make_graph_state(g)
        tab = tableau_from_graph(g)
        for i in range(2 * samples):
            if i % 2 == 0:
                p = sample_stabilizer_element(g, rng)[1]
            else:
                x = rng.integers(0, 2, g.n)
                z = rng.integers(0, 2, g.n)
                p = PauliString(x, z, 2 * int(rng.integers(0, 2)))
            diff = abs(dense.probability(p) - tab.probability(p))
            worst = max(worst, diff)
            cases += 1
            if rng.random() < 0.5:
                # follow one branch on both backends so later probabilities see updated states
                outcome = 1 if rng.random() < dense.probability(p) else -1
                dense.project(p, outcome)
                tab.project(p, outcome)
    return SuiteResult("backend_equivalence", worst, 1e-9, cases)


def suite_eq1_bound(seed=11):
    rng = np.random.default_rng(seed)
    worst, cases = 0.0, 0
    for n in (1, 2):
        g = path(n)
        for k in (1, 2, 3, 5, bounds.min_k(n)):
            best = bounds.verify_eq1_bound(g, k, 200, rng)
            _, value = bounds.deviation_maximum(k)
            worst = max(worst, best - value)
            cases += 1
    return SuiteResult("eq1_bound", worst, 1e-10, cases)


SUITES = {
    "product_identity": suite_product_identity,
    "povm_identity": suite_povm_identity,
    "deviation_max": suite_deviation_max,
    "parameters": suite_parameters,
    "backend_equivalence": suite_backend_equivalence,
    "eq1_bound": suite_eq1_bound,
}


def run_verify(names=None):
    names = list(SUITES) if not names else names
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    return [SUITES[n]() for n in names]
