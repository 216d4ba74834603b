"""Command-line entry point: ``greedylab {validate,run,estimate,verify,report}``.

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import sys as _sys
import time
from pathlib import Path

import numpy as np

from .approximation import ErrorTable, chebyshev_approximant, check_null_approximant
from .constants import ALL_NAMES, estimate_all, evaluate_witness
from .corpus import CorpusSpec, generate_corpus, sparse_instances
from .counterexamples import FAMILIES, ExampleSpec, build_example, family_knowns, verify_example_claims
from .greedy import SELECTORS, branch_greedy_sum, branch_ordering, greedy_set, greedy_sum
from .inequalities import check_inequalities
from .io import (InputError, LoadedSystem, load_knowns, load_system, system_document,
                 system_hash)
from .report import Report
from .spaces import basis_constant_bounds, extend_with_apex, validate_system

INEQUALITY_TAGS = ("T2.2", "P2.3", "L4.1", "L4.6", "T5.5")
EXAMPLE_TAGS = {"EX-L1": "L1Alpha", "EX-SUP": "SupNorm", "EX-LP": "LpVariant"}
THEOREM_TAGS = INEQUALITY_TAGS + ("L4.9",) + tuple(EXAMPLE_TAGS)
# constants whose lower bounds feed each inequality family
LHS_NEEDS = {"T2.2": ("K_2q", "K_d", "K_a"), "P2.3": ("K_hd", "K_1q"), "L4.1": (),
             "T5.5": ("K_2q",), "L4.6": ()}
NULL_INSTANCES = 500


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from exc


def _names(text: str | None, allowed, what: str) -> list[str]:
    if not text:
        return list(allowed)
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [n for n in names if n not in allowed]
    if bad:
        raise InputError(f"unknown {what} {bad}; expected among {list(allowed)}")
    return names


def _load(args) -> LoadedSystem:
    if args.system:
        return load_system(args.system)
    if args.family:
        try:
            spec = ExampleSpec(args.family, args.n if args.n is not None else 8, args.alpha, args.p)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        return LoadedSystem(build_example(spec), spec, "flags")
    raise InputError("give --system PATH or --family NAME")


def _new_report(command: str, loaded: LoadedSystem, seed) -> Report:
    return Report(command, system_hash(loaded.system), system_document(loaded), seed)


def _tau(args, default: float = 1.0) -> float:
    tau = default if args.tau is None else args.tau
    if not 0 < tau <= 1:
        raise InputError(f"tau must be in (0, 1], got {tau}")
    return tau


def _corpus(args, N: int):
    text = args.corpus or (f"gaussian=20,rademacher=10,blocks={min(3, N)},"
                           f"signs={min(2, N)},spike=5")
    try:
        return generate_corpus(N, CorpusSpec.parse(text), args.seed)
    except (ValueError, TypeError) as exc:
        raise InputError(f"corpus {text!r}: {exc}") from exc


def cmd_validate(args) -> Report:
    loaded = _load(args)
    rep = _new_report("validate", loaded, None)
    v = validate_system(loaded.system)
    out = v.to_dict()
    if v.ok:
        lo, hi = basis_constant_bounds(loaded.system)
        out.update(K_b_lower=lo, K_b_upper=hi)
    rep.add("validate", "system", "PASS" if v.ok else "FAIL", outputs=out)
    return rep


def cmd_run(args) -> Report:
    loaded = _load(args)
    sys = loaded.system
    if args.x is None:
        raise InputError("--x is required")
    x = np.array(_floats(args.x, "--x"))
    if x.size != sys.size:
        raise InputError(f"--x has {x.size} entries, system has {sys.size}")
    support = _ints(args.support, "--support") if args.support is not None else None
    if args.algo != "branch" and (args.tau is not None or args.selector is not None):
        raise InputError("--tau and --selector only apply to --algo branch")
    if args.algo != "cga" and support is not None:
        raise InputError("--support only applies to --algo cga")
    if support is None and args.m is None:
        raise InputError("--m is required")
    if support is not None and args.m is not None and len(set(support)) != args.m:
        raise InputError(f"--support has {len(set(support))} indices but --m is {args.m}")
    m = args.m if args.m is not None else len(set(support))
    if not 0 <= m <= sys.size:
        raise InputError(f"--m must be in 0..{sys.size}")
    rep = _new_report("run", loaded, None)
    inputs = {"algo": args.algo, "x": x, "m": m}
    if args.algo == "tga":
        approx = greedy_sum(x, m)
        out = {"support": greedy_set(x, m), "coefficients": approx,
               "residual_norm": float(sys.vec_norm(x - approx))}
    elif args.algo == "cga":
        S = sorted(set(support)) if support is not None else greedy_set(x, m)
        if S and (S[0] < 0 or S[-1] >= sys.size):
            raise InputError(f"--support {S} out of range 0..{sys.size - 1}")
        sol = chebyshev_approximant(sys, x, S)
        inputs["support"] = S
        out = {"support": S, "coefficients": sol.full_coeffs(sys.size),
               "residual_norm": sol.error, "certificate_gap": sol.certificate,
               "backend": sol.backend}
    else:
        if args.tau is None:
            raise InputError("--algo branch needs --tau")
        tau = _tau(args)
        sel = args.selector or "greedy"
        if sel not in SELECTORS:
            raise InputError(f"unknown selector {sel!r}; known: {sorted(SELECTORS)}")
        inputs.update(tau=tau, selector=sel)
        if x.any():
            order = branch_ordering(x, tau, sel)[:m]
        else:
            order = ()
        approx = branch_greedy_sum(x, tau, m, sel)
        out = {"ordering": order, "coefficients": approx,
               "residual_norm": float(sys.vec_norm(x - approx))}
    rep.add("run", args.algo, None, inputs=inputs, outputs=out)
    return rep


def _family_knowns(loaded: LoadedSystem, tau: float) -> dict:
    if loaded.example is None:
        return {}
    return {e.key: e for e in family_knowns(loaded.example, tau).values()}


def cmd_estimate(args) -> Report:
    loaded = _load(args)
    sys = loaded.system
    names = _names(args.constants, ALL_NAMES, "constants")
    tau = _tau(args)
    sel = args.selector or "greedy"
    if sel not in SELECTORS:
        raise InputError(f"unknown selector {sel!r}; known: {sorted(SELECTORS)}")
    if args.max_card is not None and not 1 <= args.max_card <= sys.size:
        raise InputError(f"--max-card must be in 1..{sys.size}")
    corpus = _corpus(args, sys.size)
    rep = _new_report("estimate", loaded, args.seed)
    t0 = time.perf_counter()
    est = estimate_all(sys, corpus, tau, sel, names, args.refine, args.max_card, args.seed)
    rep.timings["estimate_s"] = time.perf_counter() - t0
    uppers = _family_knowns(loaded, tau)
    for name in names:
        e = est[name]
        out = {"value": e.value, "direction": e.direction, "skipped": e.skipped,
               "witness_value": evaluate_witness(sys, e)}
        rep.add("estimate", e.key, None, inputs={"corpus": e.corpus, "tau": e.tau,
                                                  "selector": e.selector},
                outputs=out, witness=e.witness)
        if e.key in uppers:
            up = uppers[e.key]
            ok = e.value <= up.value + 1e-6
            rep.add("constructive-bound", e.key, "PASS" if ok else "FAIL",
                    inputs=up.corpus, outputs={"lower": e.value, "upper": up.value},
                    witness=e.witness)
    return rep


def _verify_inequalities(rep, loaded, tags, args, tau, knowns):
    sys = loaded.system
    corpus = _corpus(args, sys.size)
    need = sorted({n for t in tags for n in LHS_NEEDS[t]})
    est = estimate_all(sys, corpus, tau, None, need, args.refine, None, args.seed) if need else {}
    for e in est.values():
        rep.add("estimate", e.key, None, inputs={"corpus": e.corpus}, outputs={"value": e.value},
                witness=e.witness)
    apex_est = None
    if "L4.6" in tags:
        try:
            apex = extend_with_apex(sys)
        except ValueError as exc:
            rep.add("inequality", "L4.6", "NOT-CHECKABLE", outputs={"reason": str(exc)})
            tags = [t for t in tags if t != "L4.6"]
        else:
            apex_corpus = _corpus(args, apex.size)
            apex_est = estimate_all(apex, apex_corpus, tau, None, ("K_1q", "K_sd"), args.refine,
                                    None, args.seed)
            for e in apex_est.values():
                rep.add("estimate-apex", e.key, None, inputs={"corpus": e.corpus},
                        outputs={"value": e.value}, witness=e.witness)
    results = check_inequalities(sys, est, knowns, tau, apex_estimates=apex_est, which=tags)
    for r in results:
        rep.add("inequality", r.id, r.status,
                inputs={"statement": r.statement, "tau": tau},
                outputs={"lhs": r.lhs, "rhs": r.rhs, **r.numbers})


def cmd_verify(args) -> Report:
    loaded = _load(args)
    sys = loaded.system
    tags = _names(args.theorems, THEOREM_TAGS, "theorems")
    if not args.theorems:
        tags = [t for t in tags if t not in EXAMPLE_TAGS]
        if loaded.example is not None:
            tags += [t for t, f in EXAMPLE_TAGS.items() if f == loaded.example.family]
    for t in tags:
        if t in EXAMPLE_TAGS and (loaded.example is None
                                  or loaded.example.family != EXAMPLE_TAGS[t]):
            raise InputError(f"{t} needs a {EXAMPLE_TAGS[t]} family system")
    tau = _tau(args)
    knowns = _family_knowns(loaded, tau)
    if args.knowns:
        knowns.update(load_knowns(args.knowns))
    rep = _new_report("verify", loaded, args.seed)
    t0 = time.perf_counter()
    ineq = [t for t in tags if t in INEQUALITY_TAGS]
    if ineq:
        _verify_inequalities(rep, loaded, ineq, args, tau, knowns)
    if "L4.9" in tags:
        items = sparse_instances(sys.size, args.instances, args.seed)
        chk = check_null_approximant(sys, items, ErrorTable(sys))
        rep.add("null-approximant", "L4.9", "PASS" if chk.ok else "FAIL",
                inputs={"instances": len(items), "seed": args.seed},
                outputs={"pairs": chk.instances, "zero_cases": chk.zero_cases,
                         "violations": len(chk.violations)},
                witness={"violations": chk.violations[:5]})
    for t in tags:
        if t in EXAMPLE_TAGS:
            for claim in verify_example_claims(loaded.example, tau, args.trials, args.seed):
                status = claim.pop("status")
                name = claim.pop("claim")
                rep.add("example-claim", f"{t}: {name}", status, outputs=claim)
    rep.timings["verify_s"] = time.perf_counter() - t0
    return rep


def cmd_report(args) -> Report:
    try:
        return Report.from_json(Path(args.input).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"cannot read report {args.input}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greedylab", description="Greedy approximation lab for finite biorthogonal systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=True):
        if system:
            p.add_argument("--system", help="system file (YAML or JSON); overrides --family")
            p.add_argument("--family", choices=FAMILIES, help="built-in example system")
            p.add_argument("--alpha", type=float, help="L1Alpha parameter")
            p.add_argument("--n", type=int, help="ambient dimension of the example (default 8)")
            p.add_argument("--p", type=float, help="LpVariant exponent")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("structured", "tabular"), default="structured")

    p = sub.add_parser("validate", help="check biorthogonality and rank")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run one greedy-type algorithm on one vector")
    common(p)
    p.add_argument("--algo", choices=("tga", "cga", "branch"), required=True)
    p.add_argument("--x", help="coefficient vector, comma separated")
    p.add_argument("--m", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--support", help="0-based indices for cga, comma separated")
    p.add_argument("--selector", help=f"branch selector ({', '.join(SELECTORS)})")
    p.set_defaults(func=cmd_run)

    for name, func, helptext in (("estimate", cmd_estimate, "estimate constants on a corpus"),
                                 ("verify", cmd_verify, "check proved inequalities and claims")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--tau", type=float)
        p.add_argument("--corpus", help="corpus spec, e.g. gaussian=50,blocks=3,signs=2")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--refine", type=int, default=200, help="hill-climbing rounds")
        p.set_defaults(func=func)
        if name == "estimate":
            p.add_argument("--constants", help=f"comma separated, among {', '.join(ALL_NAMES)}")
            p.add_argument("--selector", help="branch selector for K_bsg/K_bag")
            p.add_argument("--max-card", type=int, help="largest set size for democracy search")
        else:
            p.add_argument("--theorems", help=f"comma separated, among {', '.join(THEOREM_TAGS)}")
            p.add_argument("--knowns", help="file of known bounds")
            p.add_argument("--trials", type=int, default=1000,
                           help="randomized trials for example sweeps")
            p.add_argument("--instances", type=int, default=NULL_INSTANCES,
                           help="structured instances for the null-approximant sweep")

    p = sub.add_parser("report", help="re-render a saved report")
    p.add_argument("input", help="report JSON file")
    common(p, system=False)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rep = args.func(args)
        text = rep.render(args.format)
    except (InputError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        for e in rep.entries:
            if e["status"]:
                print(f"{e['status']:<14} {e['operation']}: {e['name']}")
    else:
        _sys.stdout.write(text)
    if args.command == "report":
        return 0
    return 1 if rep.failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
