"""Command-line entry point: ``ondomset <subcommand> [options]``.

Exit codes: 0 success, 1 a checked property was violated, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .adversary_det import AdversaryParams, run_adversary
from .adversary_rand import ExactRAOracle, MonteCarloOracle, build_rand_adversary, check_lemma17, evaluate_rand_adversary
from .algorithms import DETERMINISTIC, make_algorithm, ra_mixture, run_ra_sample, verify_membership_table
from .analysis import (
    PROPERTIES,
    AlreadySatisfied,
    PreconditionError,
    UnclassifiedBlock,
    audit_instance,
    block_routine,
    check_properties,
    normalize,
    normalize_step,
)
from .experiment import ALGORITHMS, BoundViolation, exhaustive_small_sweep, random_specs, run_experiment
from .generators import KINDS, POLICIES, GeneratorSpec, InfeasibleSpec, generate
from .online import run_online
from .opt import CapExceeded, enumerate_optimal_sets, min_dominating_set_tree
from .tree import InvalidInput, OnlineTree, validate

OK, VIOLATION, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _frac(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _read_parents(args) -> list:
    if not args.input:
        raise UsageError("--input is required")
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"input is not JSON: {exc}") from None
    if isinstance(data, dict):
        data = data.get("parents")
    if not isinstance(data, list):
        raise UsageError('expected {"parents": [...]} or a bare list')
    return data


def _read_tree(args) -> OnlineTree:
    try:
        return OnlineTree.from_parents(_read_parents(args))
    except (InvalidInput, TypeError, ValueError) as exc:
        raise UsageError(f"invalid input: {exc}") from None


def _optset(args, tree: OnlineTree) -> frozenset[int]:
    if getattr(args, "optset", None):
        return frozenset(args.optset)
    return min_dominating_set_tree(tree).witness


# -- subcommands -----------------------------------------------------------------


def cmd_validate(args):
    report = validate([0 if p is None else p for p in _read_parents(args)])
    return {"ok": report.ok, "violations": [str(v) for v in report.violations], "notes": list(report.notes)}, (OK if report.ok else VIOLATION)


def cmd_run(args):
    tree = _read_tree(args)
    out = {"alg": args.alg, "n": tree.n}
    if args.alg == "ra":
        mix = ra_mixture(tree)
        out.update(
            expected_cost=_frac(mix.expected_cost),
            cost_a=mix.trace_a.cost,
            cost_b=mix.trace_b.cost,
            probabilities={str(v): _frac(mix.probability(v)) for v in tree.vertices()},
        )
        return out, OK
    if args.alg == "ra-sample":
        arm, trace = run_ra_sample(tree, args.seed)
        out["arm"] = arm
    else:
        trace = run_online(make_algorithm(args.alg), tree)
    out.update(
        cost=trace.cost,
        selected=sorted(trace.selected),
        selected_at={str(v): t for v, t in sorted(trace.selected_at.items())},
        additions=[sorted(a) for a in trace.additions],
    )
    return out, OK


def cmd_opt(args):
    tree = _read_tree(args)
    res = min_dominating_set_tree(tree)
    out = {"n": tree.n, "size": res.size, "witness": sorted(res.witness)}
    if args.enumerate:
        try:
            out["all_optimal"] = [sorted(s) for s in enumerate_optimal_sets(tree)]
        except CapExceeded as exc:
            raise UsageError(str(exc)) from None
    return out, OK


def _block_report(tree: OnlineTree, optset: frozenset[int]) -> tuple[dict, int]:
    assignment = block_routine(tree)
    out = {
        "optset": sorted(optset),
        "blocks": [{"id": b.ident, "members": list(b.members), "kind": b.kind, "path": list(b.path)} for b in assignment.blocks],
    }
    try:
        audit = audit_instance(tree, optset)
    except UnclassifiedBlock as exc:
        out["classification_error"] = str(exc)
        return out, OK
    out["counts"] = audit.counts.to_dict()
    out["identities"] = vars(audit.identities)
    out["block_costs"] = [
        {"id": c.ident, "kind": c.kind, "has_v1": c.has_first, "cost": _frac(c.cost), "bound": _frac(c.bound), "ok": c.ok} for c in audit.costs
    ]
    out["measured_ratio"] = _frac(audit.measured)
    if audit.chain:
        out["bound_chain"] = [_frac(x) for x in audit.chain.steps]
        out["measured_within_estimate"] = audit.measured_within_estimate
    return out, (OK if audit.ok else VIOLATION)


def cmd_blocks(args):
    tree = _read_tree(args)
    return _block_report(tree, _optset(args, tree))


def cmd_check_lemmas(args):
    tree = _read_tree(args)
    out: dict = {"n": tree.n}
    bad = False
    if tree.n >= 2:
        findings = verify_membership_table(tree)
        wrong = [f.vertex for f in findings if not f.ok]
        out["membership_table"] = {"ok": not wrong, "mismatches": wrong}
        bad |= bool(wrong)
    arrival_bad = check_lemma17(tree, ExactRAOracle())
    out["arrival_edges"] = {"ok": arrival_bad.ok, "failures": [(c.parent, c.child) for c in arrival_bad.failures]}
    bad |= not arrival_bad.ok
    try:
        sets = enumerate_optimal_sets(tree) if args.all_opt else [min_dominating_set_tree(tree).witness]
    except CapExceeded as exc:
        raise UsageError(str(exc)) from None
    report = check_properties(tree, sets)
    out["properties"] = report.summary
    out["per_set"] = [{"optset": sorted(c.optset), "holds": c.holds, "witnesses": {p: list(c.witnesses[p]) for p in PROPERTIES}} for c in report.per_set]
    blocks, code = _block_report(tree, sets[0])
    out["blocks"] = blocks
    bad |= code == VIOLATION
    mix = ra_mixture(tree)
    ratio = mix.expected_cost / min_dominating_set_tree(tree).size
    out["ra_ratio"] = _frac(ratio)
    bad |= ratio > Fraction(5, 2)
    return out, (VIOLATION if bad else OK)


def cmd_normalize(args):
    tree = _read_tree(args)
    optset = _optset(args, tree)
    if args.target == "all":
        res = normalize(tree, optset, max_steps=args.max_steps)
        return {
            "stopped": res.stopped,
            "history": [{"target": t, "from": _frac(a), "to": _frac(b)} for t, a, b in res.history],
            "parents": list(res.tree.parents),
            "optset": sorted(res.optset),
            "ratio": _frac(res.ratio),
        }, OK
    try:
        step = normalize_step(tree, optset, args.target, strict=not args.relaxed)
    except (AlreadySatisfied, PreconditionError) as exc:
        return {"target": args.target.upper(), "applied": False, "reason": str(exc)}, OK
    return {
        "target": step.target,
        "applied": True,
        "note": step.note,
        "source_ratio": _frac(step.source_ratio),
        "derived": [
            {"parents": list(d.tree.parents), "ratio": _frac(r), "optset": sorted(o), "optset_is_image": clean}
            for d, r, o, clean in zip(step.derived, step.ratios, step.optsets, step.image_optimal)
        ],
        "monotone": step.monotone,
    }, (OK if step.monotone else VIOLATION)


def cmd_adversary_det(args):
    try:
        params = AdversaryParams(args.max_length, args.max_t0, args.max_t1)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    transcript, cert = run_adversary(args.alg, params)
    out = transcript.to_dict()
    out["certificate"] = {
        "case": cert.case,
        "label": cert.label,
        "on_cost": cert.on_cost,
        "off_cost": cert.off_cost,
        "opt_cost": cert.opt_cost,
        "ratio": _frac(cert.ratio),
        "closed_form_ratio": _frac(cert.closed_form_ratio),
        "repairs": cert.repairs,
    }
    return out, OK


def cmd_adversary_rand(args):
    if args.m < 1:
        raise UsageError("--m must be positive")
    oracle = ExactRAOracle() if args.alg == "ra" else MonteCarloOracle(trials=args.trials, seed=args.seed or 0)
    transcript = build_rand_adversary(args.m, oracle)
    ev = evaluate_rand_adversary(transcript, oracle)
    out = transcript.to_dict()
    out["evaluation"] = ev.to_dict()
    code = OK if Fraction(ev.ratio) >= Fraction(4, 3) or not ev.exact else VIOLATION
    return out, code


def cmd_generate(args):
    try:
        tree = generate(GeneratorSpec(args.kind, args.n, args.seed or 0, args.policy))
    except InfeasibleSpec as exc:
        raise UsageError(str(exc)) from None
    return {"parents": list(tree.parents)}, OK


def cmd_sweep(args):
    try:
        lines = exhaustive_small_sweep(args.max_n, check_brute=not args.no_brute)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [ln.to_dict() for ln in lines]
    return {"rows": rows, "ok": all(ln.ok for ln in lines)}, (OK if all(ln.ok for ln in lines) else VIOLATION)


def cmd_experiment(args):
    algs = args.algs.split(",")
    kinds = args.kinds.split(",")
    for k in kinds:
        if k not in KINDS:
            raise UsageError(f"unknown generator kind {k!r}")
    try:
        specs = random_specs(args.count, args.max_n, args.seed or 0, kinds)
        report = run_experiment(specs, algs, seed=args.seed or 0, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except BoundViolation as exc:
        return {"error": str(exc)}, VIOLATION
    return report, OK


COMMANDS = {
    "validate": cmd_validate,
    "run": cmd_run,
    "opt": cmd_opt,
    "blocks": cmd_blocks,
    "check-lemmas": cmd_check_lemmas,
    "normalize": cmd_normalize,
    "adversary-det": cmd_adversary_det,
    "adversary-rand": cmd_adversary_rand,
    "generate": cmd_generate,
    "sweep": cmd_sweep,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="instance file ({\"parents\": [...]}, '-' for stdin)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(prog="ondomset", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    add("validate", "check an instance file")
    p = add("run", "run one algorithm")
    p.add_argument("--alg", required=True, choices=["ra", "ra-sample", *DETERMINISTIC])
    p = add("opt", "offline optimum")
    p.add_argument("--enumerate", action="store_true", help="also list every optimal set (small inputs)")
    p = add("blocks", "block partition, classification and cost audit")
    p.add_argument("--optset", type=int, nargs="+", help="optimal set to classify against (default: DP witness)")
    p = add("check-lemmas", "structural checks on one instance")
    p.add_argument("--all-opt", action="store_true", help="quantify properties over every optimal set")
    p = add("normalize", "apply one worst-case transformation")
    p.add_argument("--target", required=True, type=str.lower, choices=["p1", "p2", "p3", "p4", "p5", "p6", "all"])
    p.add_argument("--optset", type=int, nargs="+")
    p.add_argument("--relaxed", action="store_true", help="skip the check of earlier properties")
    p.add_argument("--max-steps", type=int, default=200)
    p = add("adversary-det", "deterministic lower-bound adversary")
    p.add_argument("--alg", required=True, choices=sorted(DETERMINISTIC))
    p.add_argument("--max-length", type=int, default=98)
    p.add_argument("--max-t0", type=int, default=100)
    p.add_argument("--max-t1", type=int, default=100)
    p = add("adversary-rand", "randomized lower-bound adversary")
    p.add_argument("--alg", choices=["ra", "ra-sample"], default="ra")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p = add("generate", "emit a generated instance")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--policy", choices=POLICIES, default="bfs")
    p = add("sweep", "exhaustive check over every parent array")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--no-brute", action="store_true", help="skip the brute-force oracle cross-check")
    p = add("experiment", "random instances through several algorithms")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-n", type=int, default=50)
    p.add_argument("--algs", default="a,b,ra", help=f"comma list from {','.join(ALGORITHMS)}")
    p.add_argument("--kinds", default="uniform-attachment", help=f"comma list from {','.join(KINDS)}")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _flatten_csv(payload: dict) -> str:
    import csv
    import io

    rows = payload.get("rows") if isinstance(payload, dict) else None
    if not rows:
        rows = [{k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in payload.items()}]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return buf.getvalue()


def render(result, fmt: str) -> str:
    if hasattr(result, "to_json"):
        return result.to_csv() if fmt == "csv" else result.to_json() + "\n"
    if fmt == "csv":
        return _flatten_csv(result)
    return json.dumps(result, indent=2, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result, code = COMMANDS[args.command](args)
    except (UsageError, OSError) as exc:
        print(f"ondomset {args.command}: {exc}", file=sys.stderr)
        return USAGE
    text = render(result, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
