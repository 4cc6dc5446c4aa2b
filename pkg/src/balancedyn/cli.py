"""Command-line entry point: construct, run, experiment, analyze, verify.

Exit codes: 0 success, 1 usage or input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analysis, certificates, constructions
from .dynamics import BED, DynamicsKind, Status, run
from .experiment import ExperimentConfig, parse_config, rows_to_csv, run_experiment
from .state import SignedState

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

THEOREMS = ("bed-converges", "reaching", "escaping", "red-fast", "jammed-fast", "counting")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


# construct


def cmd_construct(args) -> int:
    rng = np.random.default_rng(args.seed)
    fam = args.family

    def need(name):
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"--family {fam} needs --{name.replace('_', '-')}")
        return value

    if fam == "circular":
        state = constructions.circular(need("k"), _int_list(need("sizes")))
    elif fam == "j":
        state = constructions.j_state(need("n"))
    elif fam == "jprime":
        state = constructions.j_prime(need("n"))
    elif fam == "s2d":
        d = need("d")
        if d != int(d):
            raise UsageError(f"S^2_d needs an integer --d, got {d}")
        state = constructions.s2d(int(d))
    elif fam == "er":
        state = constructions.erdos_renyi(need("n"), need("p"), rng)
    elif fam == "ba":
        state = constructions.barabasi_albert(need("n"), need("d"), rng)
    else:
        n = need("n")
        bound = args.bound if args.bound is not None else max(0, int(Fraction(n, 12) - 1))
        state = constructions.sparse_state(n, bound, rng)
    _emit(state.dumps(comment=f"family={fam} seed={args.seed}"), args.output)
    return EXIT_OK


# run


def cmd_run(args) -> int:
    state = SignedState.load(args.state)
    trace = run(state, DynamicsKind.parse(args.dynamics), seed=args.seed, max_steps=args.max_steps,
                record_energy=args.trace_energy)
    _emit(trace.dumps() + "\n", args.output)
    if args.final:
        trace.final.save(args.final)
    return EXIT_OK


# experiment


def cmd_experiment(args) -> int:
    base = parse_config(Path(args.config).read_text()) if args.config else None
    overrides = {}
    if args.family:
        overrides["family"] = args.family
    if args.params:
        overrides["params"] = tuple(x.strip() for x in args.params.split(",") if x.strip())
    if args.sizes:
        overrides["sizes"] = tuple(_int_list(args.sizes))
    if args.dynamics:
        overrides["dynamics"] = DynamicsKind.parse(args.dynamics)
    for key in ("runs", "max_steps"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.include_jammed:
        overrides["exclude_jammed"] = False
    if base is None:
        missing = [k for k in ("family", "params", "sizes") if k not in overrides]
        if missing:
            raise UsageError(f"without --config, --{' --'.join(missing)} are required")
        config = ExperimentConfig(**overrides)
    else:
        config = base.replace(**overrides)
    _emit(rows_to_csv(run_experiment(config)), args.output)
    return EXIT_OK


# analyze


def cmd_analyze(args) -> int:
    report: dict = {}
    if args.census is not None:
        c = analysis.exhaustive_scan(args.census)
        report["census"] = {**asdict(c), "other": c.other}
    if args.state is None:
        if args.descriptors or args.closest or args.redblack:
            raise UsageError("--descriptors, --closest and --redblack need a state file")
        if args.census is None:
            raise UsageError("nothing to analyze; give a state file or --census")
    else:
        state = SignedState.load(args.state)
        report["n"] = state.n
        report["imbalanced"] = state.imbalanced
        report["balanced"] = state.imbalanced == 0
        report["jammed"] = state.is_jammed()
        if args.descriptors:
            report["descriptors"] = asdict(analysis.descriptors(state))
        if args.closest:
            cb = analysis.closest_balanced(state, args.closest, np.random.default_rng(args.seed))
            side = np.flatnonzero(cb.assignment).tolist()
            report["closest"] = {"mode": args.closest, "distance": cb.distance, "certified": cb.certified,
                                 "class_1": side}
        if args.redblack:
            rb = analysis.red_black(state, SignedState.load(args.redblack))
            check = analysis.verify_redblack_lemma(rb)
            report["redblack"] = {"red_count": rb.red_count, "red_edges": rb.red_edges(),
                                  "lemma_ok": check.ok, "lemma_reason": check.reason}
    _emit(_json(report), args.output)
    return EXIT_OK


# verify


def _verify_bed(args, rng):
    n = args.n or 16
    failures = []
    longest = 0
    for i in range(args.runs):
        state = constructions.erdos_renyi(n, rng.random(), rng)
        trace = run(state, BED, seed=int(rng.integers(2**63)), max_steps=args.max_steps or 10**5, record=False)
        if trace.status is not Status.BALANCED:
            failures.append(f"instance {i}: BED ended {trace.status.value}")
        schedule = certificates.bed_balancing_schedule(state)
        check = certificates.validate_schedule(schedule)
        longest = max(longest, len(schedule))
        if not check.ok or check.final.imbalanced or len(schedule) > n**3:
            failures.append(f"instance {i}: schedule invalid ({check.reason or 'too long or unbalanced'})")
    return {"n": n, "instances": args.runs, "longest_schedule": longest, "failures": failures[:20]}, not failures


def _verify_reaching(args, rng):
    n = args.n or 48
    bound = int(Fraction(n, 12) - 1)
    if bound < 0:
        raise UsageError(f"n={n} is too small for a friendship-sparse start")
    failures = []
    for i in range(args.runs):
        check = certificates.validate_schedule(
            certificates.ctd_reaching_schedule(constructions.sparse_state(n, bound, rng)))
        if not check.ok:
            failures.append(f"instance {i}: step {check.index}: {check.reason}")
    return {"n": n, "bound": bound, "instances": args.runs, "failures": failures[:20]}, not failures


def _verify_escaping(args, rng):
    n = args.n or 48
    bound = int(Fraction(n, 12) - 1)
    reports = []
    for _ in range(args.runs):
        pert = constructions.sample_perturbation(n, bound, rng)
        reports.append(certificates.escape_certificate(n, pert, range(args.seeds)))
    ok = all(r.ok for r in reports)
    return {"n": n, "bound": bound, "instances": args.runs, "seeds": args.seeds,
            "failures": [f for r in reports if not r.ok for f in r.static_violations + r.failures][:20]}, ok


def _verify_red_fast(args, rng):
    n = args.n or 32
    out, ok = {"n": n}, True
    for label, plant in (("condition_1", certificates.plant_condition1), ("condition_2", certificates.plant_condition2)):
        reports = [certificates.red_fast_check(*plant(n, rng), range(args.seeds)) for _ in range(args.runs)]
        good = all(r.ok for r in reports)
        ok &= good
        out[label] = {"instances": args.runs, "seeds": args.seeds, "ok": good,
                      "failures": [f for r in reports for f in r.failures][:20]}
    return out, ok


def _verify_jammed_fast(args, rng):
    n = args.n or 72
    rep = certificates.jammed_fast_check(n, range(args.seed, args.seed + args.seeds))
    out = rep.to_json()
    out["flips"] = {"mean": rep.mean_flips, "mean_over_n2": rep.mean_flips / n**2}
    return out, rep.ok


def _verify_counting(args, rng):
    d = args.d or 1
    count = analysis.count_s2d_labelings(d)
    toy = analysis.count_distinct_labelings(constructions.circular(0, (2, 2, 2)))
    jammed = constructions.s2d(d).is_jammed()
    return {"d": d, "labelings": count, "sequential": analysis.labelings_sequential(d),
            "orbit": analysis.labelings_orbit(d), "toy_circular_0_222": toy, "s2d_jammed": jammed}, (
        jammed and toy == 15)


VERIFIERS = {
    "bed-converges": _verify_bed,
    "reaching": _verify_reaching,
    "escaping": _verify_escaping,
    "red-fast": _verify_red_fast,
    "jammed-fast": _verify_jammed_fast,
    "counting": _verify_counting,
}


def cmd_verify(args) -> int:
    if args.runs < 1 or args.seeds < 1:
        raise UsageError("--runs and --seeds must be positive")
    rng = np.random.default_rng(args.seed)
    try:
        body, ok = VERIFIERS[args.theorem](args, rng)
    except ArithmeticError as exc:
        body, ok = {"error": str(exc)}, False
    _emit(_json({"theorem": args.theorem, "ok": bool(ok), **body}), args.output)
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="balancedyn", description="Structural-balance dynamics on signed complete graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="write a named or random state file")
    c.add_argument("--family", required=True, choices=("circular", "j", "jprime", "s2d", "er", "ba", "sparse"))
    c.add_argument("--n", type=int)
    c.add_argument("--p", type=float, help="ER edge probability")
    c.add_argument("--d", type=float, help="BA density, or S^2_d degree (integer)")
    c.add_argument("--k", type=int, help="circular reach")
    c.add_argument("--sizes", help="circular cluster sizes, comma separated")
    c.add_argument("--bound", type=int, help="sparse per-vertex friendship bound (default n/12 - 1)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_construct)

    r = sub.add_parser("run", help="single trajectory, Trace JSON on stdout")
    r.add_argument("--state", required=True)
    r.add_argument("--dynamics", required=True, help="BED, CTD or LTD:<p>")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-steps", type=int)
    r.add_argument("--trace-energy", action="store_true", help="record imbalance_after per flip")
    r.add_argument("--final", help="also write the final state here")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("experiment", help="Monte Carlo sweep, CSV on stdout")
    e.add_argument("--config", help="flat key = value file; flags override it")
    e.add_argument("--family", choices=("er", "ba", "named"))
    e.add_argument("--params", help="comma separated p, d or state names")
    e.add_argument("--sizes", help="comma separated n")
    e.add_argument("--dynamics")
    e.add_argument("--runs", type=int)
    e.add_argument("--seed", type=int, help="master seed")
    e.add_argument("--max-steps", type=int)
    e.add_argument("--include-jammed", action="store_true", help="keep jammed runs in the statistics")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_experiment)

    a = sub.add_parser("analyze", help="descriptors, closest balanced state, red-black graph, census")
    a.add_argument("state", nargs="?")
    a.add_argument("--descriptors", action="store_true")
    a.add_argument("--closest", choices=("exact", "heuristic"))
    a.add_argument("--redblack", metavar="REF", help="balanced reference state file")
    a.add_argument("--census", type=int, metavar="N")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="check a theorem on sampled instances, JSON report")
    v.add_argument("--theorem", required=True, choices=THEOREMS)
    v.add_argument("--n", type=int)
    v.add_argument("--d", type=int, help="S^2_d degree for counting")
    v.add_argument("--runs", type=int, default=10, help="instances")
    v.add_argument("--seeds", type=int, default=10, help="dynamics seeds per instance")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-steps", type=int)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"balancedyn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
