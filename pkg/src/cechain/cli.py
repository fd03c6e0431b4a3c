"""Command-line interface.

Exit codes: 0 success, 1 the independent routes disagree, 2 bad input,
3 random constructions kept landing in special position.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

from . import records
from .chainbundle import (
    end_cohomology,
    is_balanced_criteria,
    is_balanced_direct,
    node_flags,
)
from .errors import CEChainError, DegeneratePosition, RecordError
from .exactmath import FieldSpec
from .fbundle import certify, genus_decompose
from .flags import is_balanced_type
from .projchain import (
    expected_ideal_quadrics,
    h0_ideal_quadrics,
    has_transverse_residues,
    larson_chain,
    n_quadrics,
    restriction_rank,
    sample_chain,
)
from .rng import GENERATOR_NAME, make_rng

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_INPUT = 2
EXIT_GENERICITY = 3

SWEEP_COLUMNS = [
    "key", "r", "n", "batch", "trials", "seed", "field",
    "h0_predicted", "h0_matches", "h0_min", "h0_max",
    "residues_checked", "residues_true", "seconds",
]


def parse_range(text, name="range"):
    """``"i..j"`` (inclusive) or ``"i"``; ``"i..j"`` with ``j < i`` is empty."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError as exc:
        raise RecordError(f"--{name}: expected i..j, got {text!r}") from exc


def _field(args):
    try:
        return FieldSpec.parse(args.field)
    except ValueError as exc:
        raise RecordError(f"--field: {exc}") from exc


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------

def cmd_check_bundle(args):
    bundle = records.bundle_from_record(records.load_file(args.input))
    coh = end_cohomology(bundle)
    direct = is_balanced_direct(bundle)
    criteria = is_balanced_criteria(bundle)
    report = {
        "components": [list(c.exponents) for c in bundle.components],
        "h0_end": coh.h0,
        "h1_end": coh.h1,
        "rank_difference_map": coh.rank_difference_map,
        "balanced_direct": direct,
        "balanced_criteria": criteria,
        "agree": direct == criteria,
    }
    if all(is_balanced_type(c) for c in bundle.components):
        report["flags"] = [{"left": list(lf.dims), "right": list(rf.dims)} for lf, rf in node_flags(bundle)]
    _emit(records.dumps(report), args.out)
    return EXIT_OK if direct == criteria else EXIT_DISAGREE


def cmd_gen_chain(args):
    if args.r < 3 or args.n < 1:
        raise RecordError("gen-chain needs --r >= 3 and --n >= 1")
    F = _field(args)
    if args.larson:
        if args.n < 2:
            raise RecordError("--larson needs --n >= 2")
        chain = larson_chain(args.r, args.n, make_rng(args.seed), F)
    else:
        chain = sample_chain(args.r, args.n, make_rng(args.seed), F)
    rec = records.chain_to_record(chain)
    rec["seed"] = args.seed
    rec["construction"] = "larson" if args.larson else "random"
    _emit(records.dumps(rec), args.out)
    return EXIT_OK


def cmd_quadrics(args):
    chain = records.chain_from_record(records.load_file(args.input))
    if args.range:
        lo, hi = parse_range(args.range)
        start, stop = lo, hi + 1
    else:
        start, stop = 0, chain.n
    if not 0 <= start < stop <= chain.n:
        raise RecordError(f"--range {args.range} outside links 0..{chain.n - 1}")
    length = stop - start
    h0 = h0_ideal_quadrics(chain, start, stop)
    report = {
        "r": chain.r,
        "links": [start, stop - 1],
        "length": length,
        "quadrics": n_quadrics(chain.r),
        "restriction_rank": restriction_rank(chain, start, stop),
        "h0_ideal_quadrics": h0,
        "predicted": expected_ideal_quadrics(chain.r, length),
    }
    _emit(records.dumps(report), args.out)
    return EXIT_OK


def cmd_fbundle(args):
    F = _field(args)
    direct = {"auto": None, "yes": True, "no": False}[args.direct]
    ok, cert = certify(args.d, args.a, make_rng(args.seed), F, direct=direct, b=args.b)
    rec = cert.to_record()
    rec["seed"] = args.seed
    rec["field"] = str(F)
    rec["genus_decomposition"] = _decomposition(rec["g"], args.d)
    _emit(records.dumps(rec), args.out)
    return EXIT_OK if cert.routes_agree else EXIT_DISAGREE


def _decomposition(g, d):
    try:
        a, b = genus_decompose(g, d)
        return {"a": a, "b": b, "identity": f"{g} = ({a}-1)({d}-1) + {b}*{d}"}
    except CEChainError:
        return None


def sweep_key(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _completed_keys(path):
    if not os.path.exists(path):
        return set()
    with open(path, newline="", encoding="utf-8") as fh:
        return {row["key"] for row in csv.DictReader(fh)}


def run_sweep_cell(r, n, batch, trials, seed, F):
    """One CSV row: ``trials`` random chains with ``n`` links in P^r."""
    start = time.perf_counter()
    predicted = expected_ideal_quadrics(r, n)
    seen = []
    res_checked = res_true = 0
    for t in range(trials):
        chain = sample_chain(r, n, make_rng(seed, r, n, batch, t), F)
        seen.append(h0_ideal_quadrics(chain))
        if r % 2 == 1 and n >= r + 2:
            res_checked += 1
            res_true += has_transverse_residues(chain)
    return {
        "r": r, "n": n, "batch": batch, "trials": trials, "seed": seed, "field": str(F),
        "h0_predicted": predicted,
        "h0_matches": sum(h == predicted for h in seen),
        "h0_min": min(seen) if seen else "",
        "h0_max": max(seen) if seen else "",
        "residues_checked": res_checked,
        "residues_true": res_true,
        "seconds": round(time.perf_counter() - start, 3),
    }


def cmd_sweep(args):
    F = _field(args)
    r_lo, r_hi = parse_range(args.r_range, "r-range")
    n_lo, n_hi = parse_range(args.n_range, "n-range")
    if args.trials < 0 or args.batch < 1:
        raise RecordError("--trials must be >= 0 and --batch >= 1")
    if r_lo <= r_hi and r_lo < 3:
        raise RecordError("--r-range must start at 3 or more")
    done = _completed_keys(args.out)
    new_file = not os.path.exists(args.out)
    written = skipped = 0
    with open(args.out, "a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        if new_file:
            writer.writeheader()
        for r in range(r_lo, r_hi + 1):
            for n in range(max(1, n_lo), n_hi + 1):
                remaining = args.trials
                batch = 0
                while remaining > 0:
                    size = min(args.batch, remaining)
                    config = {"r": r, "n": n, "batch": batch, "trials": size, "seed": args.seed, "field": str(F)}
                    key = sweep_key(config)
                    if key in done:
                        skipped += 1
                    else:
                        row = run_sweep_cell(r, n, batch, size, args.seed, F)
                        row["key"] = key
                        writer.writerow(row)
                        fh.flush()
                        written += 1
                    remaining -= size
                    batch += 1
    print(f"sweep: {written} rows written, {skipped} already present", file=sys.stderr)
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="cechain",
        description="Bundles on chains of rational curves and quadrics through chains of rational normal curves.",
        epilog=f"Random streams: {GENERATOR_NAME}.  Default field: GF(2^61 - 1), overridable by $CECHAIN_PRIME.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_field(sp):
        sp.add_argument("--field", default=None, help="a prime, or 'rational' (default: $CECHAIN_PRIME or 2^61-1)")

    sp = sub.add_parser("check-bundle", help="cohomology of End and both balancedness verdicts")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_check_bundle)

    sp = sub.add_parser("gen-chain", help="generate a maximally connected chain")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--larson", action="store_true", help="use the hyperplane construction")
    sp.add_argument("--out")
    add_field(sp)
    sp.set_defaults(func=cmd_gen_chain)

    sp = sub.add_parser("quadrics", help="quadrics containing a chain or a range of its links")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--range", help="inclusive link range i..j (0-based)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_quadrics)

    sp = sub.add_parser("fbundle", help="certify balancedness of the bundle of quadrics")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, default=0, help="number of elliptic components (closed form)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--direct", choices=["auto", "yes", "no"], default="auto",
                    help="also glue the bundle explicitly and compute h^1(End)")
    sp.add_argument("--out")
    add_field(sp)
    sp.set_defaults(func=cmd_fbundle)

    sp = sub.add_parser("sweep", help="quadric dimension law over ranges of (r, n)")
    sp.add_argument("--r-range", required=True)
    sp.add_argument("--n-range", required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--batch", type=int, default=100, help="trials per CSV row")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    add_field(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RecordError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegeneratePosition as exc:
        print(f"genericity exhausted: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except CEChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
