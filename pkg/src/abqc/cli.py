"""Command-line entry point: ``abqc {params,bounds,run,montecarlo,verify}``."""

import argparse
import csv
import json
import sys
from contextlib import nullcontext
from pathlib import Path

from . import bounds
from .harness import ConfigError, load_config, run_montecarlo, run_verify
from .protocol import Verdict, run_protocol

EXIT_CODES = {
    Verdict.ACCEPTED: 0,
    Verdict.BOB_CHEATING: 10,
    Verdict.ALICE_CHEATING: 11,
    Verdict.REJECTED: 12,
}
EXIT_CONFIG = 2


def parse_range(text):
    """``"A..B"`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return range(lo, hi + 1)


def _open_out(path):
    return open(path, "w") if path else nullcontext(sys.stdout)


def cmd_params(args):
    header = f"{'n':>3} {'min_k':>7} {'min_m(derived)':>16} {'min_m(text)':>16} " \
             f"{'2/(k+1)':>11} {'deFinetti':>11} {'total':>11} {'1/n^2':>9} ok"
    print(header)
    for n in args.n_range:
        r = bounds.parameter_row(n)
        text_m = r["min_m_text"]
        text_m = str(text_m) if len(str(text_m)) <= 16 else f"{float(text_m):.4e}"
        print(f"{n:>3} {r['min_k']:>7} {r['min_m_derived']:>16} {text_m:>16} "
              f"{r['max_deviation_term']:>11.4e} {r['definetti_term']:>11.4e} "
              f"{r['total']:>11.4e} {r['target']:>9.4f} {'yes' if r['satisfied'] else 'no'}")
    return 0


def cmd_bounds(args):
    rows = [bounds.parameter_row(n, text_form_m=args.text_form_m) for n in args.n_range]
    with _open_out(args.out) as fh:
        if args.format == "json":
            json.dump(rows, fh, indent=2, default=str)
            fh.write("\n")
        else:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return 0


def cmd_run(args):
    config = load_config(args.config)
    seed = config.master_seed if args.seed is None else args.seed
    tr = run_protocol(config.params, config.bob, config.alice, seed, config.graph,
                      config.backend, config.pattern, config.make_test())
    out = args.out or config.output
    with _open_out(out) as fh:
        fh.write(tr.to_json() + "\n")
    print(f"verdict: {tr.verdict.value} (by {tr.verdict_author})", file=sys.stderr)
    return EXIT_CODES[tr.verdict]


def cmd_montecarlo(args):
    config = load_config(args.config)
    trials = args.trials if args.trials is not None else config.trials
    out = args.out or config.output
    with (open(out, "w") if out else nullcontext(None)) as fh:
        summary = run_montecarlo(config, trials, args.jobs, fh)
    text = json.dumps(summary.to_dict(), indent=2)
    if args.summary:
        Path(args.summary).write_text(text + "\n")
    print(text)
    return 130 if summary.interrupted else 0


def cmd_verify(args):
    results = run_verify(args.suite)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="abqc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", help="minimal k and m per n, with the soundness budget")
    sp.add_argument("--n-range", type=parse_range, required=True, metavar="A..B")
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("bounds", help="machine-readable parameter/budget table")
    sp.add_argument("--n-range", type=parse_range, required=True, metavar="A..B")
    sp.add_argument("--text-form-m", action="store_true",
                    help="budget with m = ceil(2 ln2 k^n n^5) instead of the derived form")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("run", help="one protocol run; exit code encodes the verdict")
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="transcript file (default: config 'output' or stdout)")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("montecarlo", help="many seeded runs with an aggregate summary")
    sp.add_argument("--config", required=True)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", help="JSON-lines transcript file")
    sp.add_argument("--summary", help="also write the summary JSON here")
    sp.set_defaults(func=cmd_montecarlo)

    sp = sub.add_parser("verify", help="deterministic identity checks")
    sp.add_argument("--suite", action="append",
                    help="suite name (repeatable); default runs all")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
