"""Command-line entry point: ``permpat <command> ...``.

Exit codes: 0 success (or accept for ``test``), 1 reject for ``test``,
2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

from permpat import bench
from permpat.distance import SearchBudgetExceeded, distance_bounds
from permpat.forge import (
    FarInstanceSpec,
    forge_far_instance,
    forge_free_instance,
    forge_reduction_pair,
    forge_template_search,
    snap_far_params,
)
from permpat.oracle import QueryOracle, paired_oracles
from permpat.partitions import (
    ENTANGLING_CAP,
    UNIQUENESS_CAP,
    adjacent_extremes,
    entangling_number,
    max_adjacent_gap,
    uspn,
)
from permpat.pattern import Permutation
from permpat.seqio import SeqFormatError, format_seq, read_seq, write_seq
from permpat.testers import (
    ValidityWarning,
    interval_test,
    sampler_test,
    template_binary_search,
    template_r_round_solver,
)


class UsageError(Exception):
    pass


def _perm(text: str) -> Permutation:
    try:
        return Permutation.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------------------
# analyze


def analyze_records(pi: Permutation) -> list[dict]:
    k = pi.k
    recs = [{"quantity": "k", "value": k}, {"quantity": "m", "value": max_adjacent_gap(pi)}]
    if k <= ENTANGLING_CAP:
        d, E = entangling_number(pi)
        recs.append({"quantity": "d", "value": d,
                     "witness": None if E is None else [[b.lo, b.hi] for b in E]})
    else:
        recs.append({"quantity": "d", "value": None, "error": f"k={k} exceeds the cap {ENTANGLING_CAP}"})
    if k <= UNIQUENESS_CAP:
        res = uspn(pi)
        P = res.witness
        recs.append({"quantity": "u", "value": res.value,
                     "witness": {"blocks": [[b.lo, b.hi] for b in P.blocks], "signs": "".join(P.signs)},
                     "describe": P.describe()})
    else:
        recs.append({"quantity": "u", "value": None, "error": f"k={k} exceeds the cap {UNIQUENESS_CAP}"})
    recs.append({"quantity": "adjacent_extremes", "value": adjacent_extremes(pi)})
    return recs


def cmd_analyze(args) -> int:
    recs = analyze_records(args.perm)
    if args.format == "json-lines":
        for r in recs:
            print(json.dumps(r, sort_keys=True))
        return 0
    print(f"pattern: {args.perm}")
    for r in recs:
        q = r["quantity"]
        if "error" in r:
            print(f"{q}: not computed ({r['error']})")
        elif q == "d":
            wit = " ".join(f"[{a},{b}]" for a, b in r["witness"] or [])
            print(f"d: {r['value']}  entangling: {wit or '-'}")
        elif q == "u":
            print(f"u: {r['value']}  partition: {r['describe']}")
        else:
            print(f"{q}: {r['value']}")
    return 0


# ---------------------------------------------------------------------------
# dist


def cmd_dist(args) -> int:
    f = read_seq(args.seq_file)
    try:
        rep = distance_bounds(f, args.perm, exact=args.exact, budget=args.node_budget)
    except SearchBudgetExceeded as exc:
        raise UsageError(f"exact search gave up: {exc}") from None
    fields = {"n": len(f), "lower": rep.lower, "upper": rep.upper, "exact": rep.exact}
    if args.format == "json-lines":
        print(json.dumps(fields, sort_keys=True))
    else:
        for key, val in fields.items():
            print(f"{key}: {'-' if val is None else val}")
    return 0


# ---------------------------------------------------------------------------
# gen


def _stem(out: str) -> Path:
    p = Path(out)
    return p.with_suffix("") if p.suffix == ".seq" else p


def cmd_gen(args) -> int:
    fam = args.family
    if fam in ("far", "free"):
        if args.perm is None or args.n is None:
            raise UsageError(f"gen {fam} needs --perm and --n")
    if fam == "far":
        if args.eps is None:
            raise UsageError("gen far needs --eps")
        pi = args.perm
        if pi.k > UNIQUENESS_CAP:
            raise UsageError(f"k={pi.k} exceeds the cap {UNIQUENESS_CAP}")
        try:
            spec = FarInstanceSpec(pi, uspn(pi).witness, args.n, args.eps, args.seed)
        except ValueError as exc:
            hint = ""
            try:
                n2, _ = snap_far_params(pi.k, args.n, args.eps)
                hint = f" (nearest conforming n is {n2})"
            except ValueError:
                pass
            raise UsageError(f"{exc}{hint}") from None
        inst = forge_far_instance(spec, check_unique=False)
        comments = [f"family far perm {pi} n {spec.n} eps {spec.eps} seed {spec.seed}",
                    f"partition {spec.P.describe()}"]
        return _emit(args.out, inst.values, comments)
    if fam == "free":
        vals = forge_free_instance(args.perm, args.n, args.seed)
        return _emit(args.out, vals, [f"family free perm {args.perm} n {args.n} seed {args.seed}"])
    if args.m is None:
        raise UsageError(f"gen {fam} needs --m")
    if args.out is None:
        raise UsageError(f"gen {fam} writes several files and needs --out")
    stem = _stem(args.out)
    stem.parent.mkdir(parents=True, exist_ok=True)
    try:
        inst = forge_template_search(args.m, args.seed)
        if fam == "template":
            write_seq(f"{stem}.S.seq", inst.S, [f"template S m {args.m} seed {args.seed}"])
            write_seq(f"{stem}.T.seq", inst.T, [f"template T m {args.m} seed {args.seed}"])
            Path(f"{stem}.delta").write_text(f"{inst.delta}\n")
            print(f"wrote {stem}.S.seq {stem}.T.seq {stem}.delta")
            return 0
        pair = forge_reduction_pair(inst)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_seq(f"{stem}.yes.seq", pair.f_yes, [f"reduction f_yes m {args.m} seed {args.seed}"])
    write_seq(f"{stem}.no.seq", pair.f_no, [f"reduction f_no m {args.m} seed {args.seed}"])
    print(f"wrote {stem}.yes.seq {stem}.no.seq")
    return 0


def _emit(out, values, comments) -> int:
    if out is None:
        sys.stdout.write(format_seq(values, comments))
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        write_seq(out, values, comments)
    return 0


# ---------------------------------------------------------------------------
# test


def cmd_test(args) -> int:
    f = read_seq(args.seq_file)
    oracle = QueryOracle(f, mode="non-adaptive", budget=args.budget)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        if args.tester == "sampler":
            v = sampler_test(oracle, args.perm, args.eps, args.seed)
        else:
            if args.perm.k < 3:
                raise UsageError("the interval tester needs a pattern of length >= 3")
            v = interval_test(oracle, args.perm, args.eps, args.seed)
    if args.emit_transcript:
        with open(args.emit_transcript, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["round", "position", "value"])
            w.writerows([r, p, repr(val)] for r, p, val in oracle.transcript)
    print(json.dumps({
        "decision": v.decision,
        "witness": None if v.witness is None else list(v.witness),
        "queries_used": v.queries_used,
        "rounds_used": v.rounds_used,
        "flags": list(v.flags),
        "constants": v.constants,
    }, sort_keys=True))
    return 1 if v.rejected else 0


# ---------------------------------------------------------------------------
# template solve


def cmd_template(args) -> int:
    S, T = read_seq(args.S), read_seq(args.T)
    if len(S) != 3 * len(T) or len(T) < 1:
        raise UsageError("S must be three times as long as a non-empty T")
    if args.algo == "binary":
        oS, oT = paired_oracles(S, T, budget=args.budget)
        est = template_binary_search(oS, oT)
    else:
        if args.budget is None:
            raise UsageError("the grid solver needs --budget")
        oS, oT = paired_oracles(S, T, mode="rounds", rounds=args.rounds)
        est = template_r_round_solver(oS, oT, args.rounds, args.budget, args.seed)
    out = {"delta": est, "queries_used": oS.queries_used + oT.queries_used, "rounds_used": oS.rounds_used}
    if args.truth:
        truth = int(Path(args.truth).read_text().strip())
        out["correct"] = est == truth
    print(json.dumps(out, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args) -> int:
    cfg = bench.load_config(args.config)
    result = bench.run_sweep(cfg, gnuplot=args.gnuplot)
    for rec in bench.summary_records(result):
        print(json.dumps(rec, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permpat", description="Forbidden order patterns in sequences.")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="structure quantities of a pattern")
    a.add_argument("perm", type=_perm)
    a.add_argument("--format", choices=["text", "json-lines"], default="text")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("dist", help="distance of a sequence to pattern-freeness")
    d.add_argument("seq_file")
    d.add_argument("perm", type=_perm)
    d.add_argument("--exact", action="store_true")
    d.add_argument("--node-budget", type=int, default=None)
    d.add_argument("--format", choices=["text", "json-lines"], default="text")
    d.set_defaults(func=cmd_dist)

    g = sub.add_parser("gen", help="generate instances")
    g.add_argument("family", choices=["far", "free", "template", "reduction"])
    g.add_argument("--perm", type=_perm)
    g.add_argument("--n", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("test", help="run a one-sided tester")
    t.add_argument("seq_file")
    t.add_argument("--perm", type=_perm, required=True)
    t.add_argument("--eps", type=float, required=True)
    t.add_argument("--tester", choices=["sampler", "interval"], default="sampler")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--budget", type=int, default=None)
    t.add_argument("--emit-transcript", default=None)
    t.set_defaults(func=cmd_test)

    tp = sub.add_parser("template", help="Template-Search solvers")
    tsub = tp.add_subparsers(dest="action", required=True)
    ts = tsub.add_parser("solve")
    ts.add_argument("S")
    ts.add_argument("T")
    ts.add_argument("--algo", choices=["binary", "grid"], default="binary")
    ts.add_argument("--rounds", type=int, default=1)
    ts.add_argument("--budget", type=int, default=None)
    ts.add_argument("--seed", type=int, default=0)
    ts.add_argument("--truth", default=None, help="sidecar file with the true offset")
    ts.set_defaults(func=cmd_template)

    b = sub.add_parser("bench", help="run a Monte Carlo sweep")
    b.add_argument("--config", required=True)
    b.add_argument("--gnuplot", action="store_true")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SeqFormatError, OSError, ValueError) as exc:
        print(f"permpat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
