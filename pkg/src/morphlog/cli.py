"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 semantic error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Sequence

from .abduction import RELATIONS, TheoryContext, central, explains, preferred_explanation
from .errors import MorphlogError, SemanticError, UsageError
from .formula import Alphabet, atoms_of, minimize, models, parse, render
from .merging import AGGREGATIONS, Profile, merge
from .morphology import (
    closing,
    connected_components,
    hausdorff,
    iterate,
    last_erosion,
    min_distance,
    opening,
    reconstruct,
    skeleton,
    stratify,
    ultimate_erosion,
)
from .postulates import (
    ABDUCTION_POSTULATES,
    KNOWN_COUNTEREXAMPLES,
    MERGING_POSTULATES,
    REVISION_POSTULATES,
    SuiteSettings,
    check_abduction,
    check_merging,
    check_revision,
    default_abduction_configs,
    merging_operator,
    replay,
    revision_operator,
    run_suite,
    unified_revision_operator,
)
from .revision import revise
from .worlds import WorldSet, parse_se


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


def _read_text(value: str) -> str:
    """A formula given inline, or a file of formulas (one per line, ``#`` comments) read as a conjunction."""
    if not os.path.isfile(value):
        return value
    with open(value, encoding="utf-8") as handle:
        lines = [line.split("#", 1)[0].strip() for line in handle]
    lines = [line for line in lines if line]
    if not lines:
        raise UsageError(f"{value}: no formula found")
    return " & ".join(f"({line})" for line in lines)


def _read_profile(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as handle:
            lines = [line.split("#", 1)[0].strip() for line in handle]
    except OSError as exc:
        raise UsageError(f"cannot read profile {path!r}: {exc.strerror}") from None
    return [line for line in lines if line]


class Session:
    """Shared alphabet and structuring element for one invocation."""

    def __init__(self, args: argparse.Namespace, texts: Sequence[str]):
        self.args = args
        if args.atoms:
            self.alphabet = Alphabet.of(args.atoms)
        else:
            names: list[str] = []
            for text in texts:
                for name in atoms_of(parse(text)):
                    if name not in names:
                        names.append(name)
            if not names:
                raise UsageError("cannot infer the atoms from the formulas; pass --atoms")
            self.alphabet = Alphabet(tuple(names))
        self.se = parse_se(getattr(args, "se", "hamming:1"), self.alphabet)

    def models(self, text: str) -> WorldSet:
        return models(parse(text, self.alphabet), self.alphabet)

    def show(self, ws: WorldSet) -> str:
        if self.args.minterms:
            return repr(ws)
        return str(minimize(ws))


def _set_payload(ws: WorldSet) -> dict:
    return {"formula": str(minimize(ws)), "models": ws.bit_strings()}


def _emit(args: argparse.Namespace, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _number(x: float) -> Any:
    return None if x == math.inf else int(x)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_parse(args: argparse.Namespace) -> None:
    s = Session(args, [args.formula])
    f = parse(args.formula, s.alphabet)
    _emit(args, {"formula": render(f), "atoms": list(s.alphabet.atoms)}, [render(f)])


def cmd_models(args: argparse.Namespace) -> None:
    s = Session(args, [args.formula])
    ws = s.models(args.formula)
    _emit(args, _set_payload(ws), ws.bit_strings())


def _unary(op):
    def run(args: argparse.Namespace) -> None:
        s = Session(args, [args.formula])
        result = op(s, s.models(args.formula), args)
        _emit(args, _set_payload(result), [s.show(result)])
    return run


cmd_dilate = _unary(lambda s, ws, a: iterate(ws, s.se, a.n, "dilate"))
cmd_erode = _unary(lambda s, ws, a: iterate(ws, s.se, a.n, "erode"))
cmd_open = _unary(lambda s, ws, a: opening(ws, s.se))
cmd_close = _unary(lambda s, ws, a: closing(ws, s.se))
cmd_skeleton = _unary(lambda s, ws, a: skeleton(ws, s.se))
cmd_ue = _unary(lambda s, ws, a: ultimate_erosion(ws, s.se))


def cmd_last_erosion(args: argparse.Namespace) -> None:
    s = Session(args, [args.formula])
    core, depth = last_erosion(s.models(args.formula), s.se)
    _emit(args, dict(_set_payload(core), depth=depth), [s.show(core), f"depth: {depth}"])


def cmd_components(args: argparse.Namespace) -> None:
    s = Session(args, [args.formula])
    parts = connected_components(s.models(args.formula), s.se)
    _emit(args, {"components": [_set_payload(p) for p in parts]}, [s.show(p) for p in parts])


def cmd_reconstruct(args: argparse.Namespace) -> None:
    s = Session(args, [args.marker, args.mask])
    result = reconstruct(s.models(args.marker), s.models(args.mask), s.se)
    _emit(args, _set_payload(result), [s.show(result)])


def cmd_stratify(args: argparse.Namespace) -> None:
    sigma_text = _read_text(args.sigma)
    s = Session(args, [sigma_text])
    strat = stratify(s.models(sigma_text), s.se)
    table = strat.table()
    lines = [f"{'inf' if rank == math.inf else int(rank)}: {' '.join(worlds)}" for rank, worlds in table.items()]
    payload = {"m": strat.m, "n": strat.n,
               "ranks": {w: _number(r) for w, r in zip(
                   (s.alphabet.world_bits(i) for i in range(s.alphabet.world_count)), strat.ranks)}}
    _emit(args, payload, lines)


def cmd_revise(args: argparse.Namespace) -> None:
    s = Session(args, [args.phi, args.psi])
    outcome = revise(s.models(args.phi), s.models(args.psi), s.se)
    payload = dict(_set_payload(outcome.result), depth=outcome.dilation_depth, limited=outcome.limited)
    _emit(args, payload, [s.show(outcome.result)])


def cmd_merge(args: argparse.Namespace) -> None:
    members = list(args.members)
    if args.profile:
        members = _read_profile(args.profile) + members
    mu_text = args.mu or "T"
    s = Session(args, members + [mu_text])
    profile = Profile(tuple(s.models(m) for m in members))
    outcome = merge(profile, s.models(mu_text), args.agg, s.se)
    payload = dict(_set_payload(outcome.result), aggregation=args.agg, unreachable=outcome.unreachable)
    _emit(args, payload, [s.show(outcome.result)])


def _theory(args: argparse.Namespace, texts: Sequence[str]) -> tuple[Session, TheoryContext]:
    sigma_text = _read_text(args.sigma)
    s = Session(args, [sigma_text, *texts])
    return s, TheoryContext(s.models(sigma_text), s.se)


def cmd_explain(args: argparse.Namespace) -> None:
    texts = [args.alpha] + ([args.gamma] if args.gamma else [])
    s, ctx = _theory(args, texts)
    alpha = s.models(args.alpha)
    if args.gamma:
        verdict = explains(ctx, s.models(args.gamma), alpha, args.rel)
        _emit(args, {"explains": verdict, "relation": args.rel}, ["true" if verdict else "false"])
        return
    result = preferred_explanation(ctx, alpha, args.rel)
    payload = dict(_set_payload(result.core), relation=args.rel, depth=result.depth)
    _emit(args, payload, [s.show(result.core)])


def cmd_central(args: argparse.Namespace) -> None:
    s, ctx = _theory(args, [args.alpha])
    result = central(ctx, s.models(args.alpha))
    _emit(args, _set_payload(result), [s.show(result)])


def cmd_distance(args: argparse.Namespace) -> None:
    s = Session(args, [args.first, args.second])
    x, y = s.models(args.first), s.models(args.second)
    low, high = min_distance(x, y, s.se), hausdorff(x, y, s.se)
    show = lambda v: "inf" if v == math.inf else str(int(v))  # noqa: E731
    _emit(args, {"min": _number(low), "hausdorff": _number(high)},
          [f"min: {show(low)}", f"hausdorff: {show(high)}"])


def _report_lines(reports) -> list[str]:
    lines = []
    for r in reports:
        count = r.coverage.get("instances")
        lines.append(f"{r.postulate:14s} {r.verdict:9s} {r.subject} {r.mode} instances={count}")
        for w in r.witnesses[:1]:
            lines.append(f"  witness: {json.dumps(w, sort_keys=True)}")
    return lines


def cmd_check(args: argparse.Namespace) -> None:
    if args.family == "suite":
        data = run_suite(SuiteSettings(seed=args.seed, jobs=args.jobs,
                                       revision_samples=args.samples or 100_000,
                                       merging_samples=args.samples or 10_000))
        if args.json:
            print(json.dumps(data, sort_keys=True))
        else:
            for section in ("revision", "merging", "abduction"):
                for r in data[section]:
                    print(f"{r['postulate']:14s} {r['verdict']:9s} {r['subject']} {r['mode']}")
            for c in data["counterexamples"]:
                print(f"{c['postulate']:14s} {'violated' if c['violated'] else 'holds':9s} {c['relation']} {c['name']}")
        return
    if args.family == "counterexamples":
        rows = [{"name": e.name, "postulate": e.postulate, "relation": r, "violated": replay(e, r)}
                for e in KNOWN_COUNTEREXAMPLES for r in e.relations]
        if args.json:
            print(json.dumps(rows, sort_keys=True))
        else:
            for row in rows:
                print(f"{row['postulate']:14s} {row['relation']:5s} "
                      f"{'violated' if row['violated'] else 'holds'}  {row['name']}")
        return
    if args.family == "abduction":
        configs = default_abduction_configs(args.seed)
        if args.atoms:
            configs = [c for c in configs if c.atoms == ",".join(Alphabet.of(args.atoms).atoms)]
        reports = check_abduction(args.rel, configs, args.postulate or None, jobs=args.jobs)
    else:
        alphabet = Alphabet.of(args.atoms or "a,b")
        se = parse_se(args.se, alphabet)
        mode = "exhaustive" if args.mode == "exhaustive" else "sampled"
        if args.family == "revision":
            op = unified_revision_operator(se) if args.unified else revision_operator(se)
            subject = f"{'revise_f' if args.unified else 'revise'}/{args.se}"
            reports = check_revision(op, alphabet, mode, samples=args.samples or 100_000, seed=args.seed,
                                     subject=subject, postulates=args.postulate or None)
        else:
            reports = check_merging(merging_operator(args.agg, se), alphabet, mode,
                                    samples=args.samples or 10_000, seed=args.seed,
                                    subject=f"merge:{args.agg}/{args.se}", postulates=args.postulate or None)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], sort_keys=True))
    else:
        for line in _report_lines(reports):
            print(line)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--atoms", help="comma-separated atoms; inferred from the formulas when omitted")
    common.add_argument("--se", default="hamming:1",
                        help="hamming:<r> | restricted:<atoms>:<r> | restricted2:<atoms> | explicit:<path>")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--minterms", action="store_true", help="print model lists instead of formulas")

    parser = _Parser(prog="morphlog", description="Morphological operators on propositional formulas.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, handler, help_text: str, *positional: str):
        p = sub.add_parser(name, parents=[common], help=help_text)
        for arg in positional:
            p.add_argument(arg)
        p.set_defaults(handler=handler)
        return p

    add("parse", cmd_parse, "parse and print a formula", "formula")
    add("models", cmd_models, "list the models of a formula", "formula")
    for name, handler in (("dilate", cmd_dilate), ("erode", cmd_erode)):
        add(name, handler, f"{name} a formula", "formula").add_argument("--n", type=int, default=1)
    add("open", cmd_open, "opening", "formula")
    add("close", cmd_close, "closing", "formula")
    add("skeleton", cmd_skeleton, "morphological skeleton", "formula")
    add("ue", cmd_ue, "ultimate erosion", "formula")
    add("last-erosion", cmd_last_erosion, "last nonempty erosion and its depth", "formula")
    add("components", cmd_components, "connected components", "formula")
    add("reconstruct", cmd_reconstruct, "reconstruction of a mask from a marker", "marker", "mask")
    add("stratify", cmd_stratify, "rank worlds by erosions and dilations of a theory", "sigma")
    add("revise", cmd_revise, "revise beliefs by new information", "phi", "psi")
    p = add("merge", cmd_merge, "merge a profile under a constraint")
    p.add_argument("members", nargs="*", help="profile members (appended after --profile lines)")
    p.add_argument("--profile", help="file with one formula per line")
    p.add_argument("--mu", help="integrity constraint (default: T)")
    p.add_argument("--agg", choices=AGGREGATIONS, default="sum")
    p = add("explain", cmd_explain, "preferred explanation core, or test a candidate", "alpha")
    p.add_argument("gamma", nargs="?", help="candidate explanation to test")
    p.add_argument("--sigma", required=True, help="background theory: formula or file")
    p.add_argument("--rel", choices=RELATIONS, default="lc")
    p = add("central", cmd_central, "most central models of an observation", "alpha")
    p.add_argument("--sigma", required=True, help="background theory: formula or file")
    add("distance", cmd_distance, "dilation distance and Hausdorff distance", "first", "second")
    p = add("check", cmd_check, "run postulate checkers")
    p.add_argument("family", choices=("revision", "merging", "abduction", "counterexamples", "suite"))
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--agg", choices=AGGREGATIONS, default="sum")
    p.add_argument("--rel", choices=("lneu", "lned", "lc", "ue"), default="lc")
    p.add_argument("--unified", action="store_true", help="check the central-model revision instead")
    p.add_argument("--postulate", action="append",
                   choices=REVISION_POSTULATES + MERGING_POSTULATES + ABDUCTION_POSTULATES)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.handler(args)
    except (UsageError, ValueError) as exc:
        print(f"morphlog: error: {exc}", file=sys.stderr)
        return 1
    except SemanticError as exc:
        print(f"morphlog: {exc}", file=sys.stderr)
        return 2
    except MorphlogError as exc:  # pragma: no cover - every error is one of the two kinds
        print(f"morphlog: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
