"""Time the numpy and numba forms of each hot kernel side by side.

    python benchmarks/bench_kernels.py [--repeat 20] [--json out.json]

End-to-end protocol throughput follows for whichever implementation the
process selected (run once more with ABQC_DISABLE_NUMBA=1 to compare).
"""

import argparse
import json
import timeit

import numpy as np

from abqc import kernels
from abqc.graph import cycle
from abqc.protocol import BobStrategy, ProtocolParams, StateSpec, run_protocol


def _cases(rng):
    for n in (8, 10, 12):
        d = 1 << n
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        v /= np.linalg.norm(v)
        xm, zm = int(rng.integers(d)), int(rng.integers(d))
        yield f"apply_pauli vec n={n}", "apply_pauli", (v[:, None].copy(), xm, zm, 1j)
        yield f"expectation_vec n={n}", "expectation_vec", (v, xm, zm, 1 + 0j)
        if n <= 10:
            rho = np.outer(v, v.conj())
            yield f"apply_pauli rho n={n}", "apply_pauli", (rho, xm, zm, -1 + 0j)
            yield f"expectation_rho n={n}", "expectation_rho", (rho, xm, zm, 1 + 0j)
        us = np.array([i for i in range(n)], dtype=np.int64)
        vs = np.array([(i + 1) % n for i in range(n)], dtype=np.int64)
        yield f"graph_signs cycle n={n}", "graph_signs", (n, us, vs)
    for n in (5, 20, 60):
        m = rng.integers(0, 2, size=(2 * n, 2 * n), dtype=np.uint8)
        yield f"gf2_rref {2 * n}x{2 * n}", "gf2_rref", (m,)
        x1, z1, x2, z2 = (rng.integers(0, 2, n).astype(np.uint8) for _ in range(4))
        yield f"phase_exponent n={n}", "phase_exponent", (x1, z1, x2, z2)


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    rows = []
    impls = kernels.IMPLEMENTATIONS
    for label, name, args in _cases(rng):
        row = {"case": label}
        for impl, table in impls.items():
            fn = table[name]
            fn(*args)  # compile / warm up
            number = 50
            best = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number
            row[impl] = best
        rows.append(row)
    return rows


def bench_protocol(runs):
    out = {}
    params = ProtocolParams(5, 5, 2, toy=True)
    g = cycle(5)
    cases = {
        "tableau honest n=5 k=5": BobStrategy.honest(),
        "dense depolarized n=5 k=5": BobStrategy.iid(StateSpec("depolarized", 0.7)),
    }
    for label, bob in cases.items():
        run_protocol(params, bob, seed=0, graph=g)
        t = timeit.timeit(lambda: [run_protocol(params, bob, seed=s, graph=g) for s in range(runs)],
                          number=1)
        out[label] = t / runs
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--json")
    args = ap.parse_args()

    rows = bench_kernels(args.repeat)
    impls = list(kernels.IMPLEMENTATIONS)
    print(f"active implementation: {kernels.ACTIVE}")
    print(f"{'kernel':<28}" + "".join(f"{i + ' (us)':>14}" for i in impls)
          + ("   speedup" if "numba" in impls else ""))
    for r in rows:
        line = f"{r['case']:<28}" + "".join(f"{r[i] * 1e6:>14.2f}" for i in impls)
        if "numba" in r:
            line += f"{r['numpy'] / r['numba']:>9.1f}x"
        print(line)

    proto = bench_protocol(args.runs)
    print()
    for label, t in proto.items():
        print(f"{label:<28}{t * 1e3:>10.2f} ms/run  ({kernels.ACTIVE})")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"active": kernels.ACTIVE, "kernels": rows, "protocol": proto}, fh, indent=2)


if __name__ == "__main__":
    main()
