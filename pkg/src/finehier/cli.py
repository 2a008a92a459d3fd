"""Command-line front end.

Exit codes: 0 success, 1 domain error (no reduction, failed precondition,
invalid family, budget), 2 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Dict, Optional, Sequence

from . import checks
from .category import CategoryError, category_image, check_preservation
from .families import (FamilyError, NotContinuous, determine, evaluate, format_family,
                       format_path, parse_family, parse_partition, problems, reduce_family)
from .hausdorff import (DepthOverflow, NonStabilizing, hausdorff_extract, limit_partition,
                        parse_guess_table)
from .hierarchy import DEFAULT_BUDGET, PreconditionError, ShapeMismatch, classify
from .ordinals import OrdinalSyntaxError
from .spaces import (Cylinder, NoReduction, NotOpen, SpaceFormatError, format_set,
                     format_space, parse_map, parse_set, parse_space)
from .trees import (BudgetExceeded, LinearizationError, TreeSyntaxError, format_tree, h_leq,
                    linearize, parse_tree)


class DomainError(Exception):
    pass


PARSE_ERRORS = (SpaceFormatError, TreeSyntaxError, OrdinalSyntaxError, OSError)
DOMAIN_ERRORS = (DomainError, NoReduction, NotOpen, NotContinuous, FamilyError, CategoryError,
                 PreconditionError, ShapeMismatch, NonStabilizing, DepthOverflow,
                 BudgetExceeded, LinearizationError)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _space(args, path: str):
    X = parse_space(_read(path))
    if isinstance(X, Cylinder) and X.d > args.budget_depth:
        raise DomainError(f"cylinder depth {X.d} exceeds --budget-depth {args.budget_depth}")
    return X


def _family_json(F) -> Dict[str, Any]:
    return {"shape": format_tree(F.shape),
            "sets": {format_path(p): format_set(S) for p, S in sorted(F.sets.items())}}


def _result_json(r) -> Dict[str, Any]:
    return {"status": r.status, "examined": r.examined,
            "witness": _family_json(r.witness) if r.witness is not None else None}


# -- verbs ------------------------------------------------------------------

def cmd_tree_compare(args) -> Dict[str, Any]:
    a, b = parse_tree(_read(args.a)), parse_tree(_read(args.b))
    le, w = h_leq(a, b)
    ge, _ = h_leq(b, a)
    relation = {(True, True): "equivalent", (True, False): "less",
                (False, True): "greater", (False, False): "incomparable"}[(le, ge)]
    out = {"relation": relation, "a_le_b": le, "b_le_a": ge}
    if w is not None:
        out["witness"] = {".".join(map(str, k)) or "r": ".".join(map(str, v)) or "r"
                          for k, v in sorted(w.mapping.items())}
    return out


def cmd_tree_linearize(args) -> Dict[str, Any]:
    trees = [parse_tree(line) for line in _read(args.file).splitlines()
             if line.split("#", 1)[0].strip()]
    ranks = linearize(trees)
    return {"ranks": [{"rank": r.position,
                       "classes": [[format_tree(t) for t in c] for c in r.classes]}
                      for r in ranks]}


def cmd_space_load(args) -> Dict[str, Any]:
    X = _space(args, args.space)
    return {"space": format_space(X).strip(), "points": len(X.points),
            "open_sets": len(X.open_sets())}


def cmd_family_validate(args) -> Dict[str, Any]:
    X = _space(args, args.space)
    F = parse_family(_read(args.family), X)
    found = problems(F)
    if found:
        raise DomainError("invalid family: " + "; ".join(found))
    return {"valid": True, "paths": len(F.sets)}


def cmd_family_reduce(args) -> Dict[str, Any]:
    X = _space(args, args.space)
    F = parse_family(_read(args.family), X)
    G = reduce_family(F)
    return {"family": _family_json(G), "text": format_family(G)}


def cmd_family_eval(args) -> Dict[str, Any]:
    X = _space(args, args.space)
    F = parse_family(_read(args.family), X)
    points = [p for p in X.points if args.point is None or str(p) == args.point]
    if not points:
        raise DomainError(f"no point named {args.point}")
    rows = []
    for x in points:
        e = evaluate(F, x)
        rows.append({"point": str(x), "labels": sorted(e.labels),
                     "value": e.value, "runs": [format_path(p) for p, _ in e.runs]})
    d = determine(F)
    return {"determines": d.ok, "diagnostic": None if d.ok else
            {"point": str(d.point), "reason": d.reason, "labels": sorted(d.labels)},
            "points": rows}


def cmd_classify(args) -> Dict[str, Any]:
    X = _space(args, args.space)
    A = parse_partition(_read(args.partition), X)
    trees = [parse_tree(line) for line in _read(args.trees).splitlines()
             if line.split("#", 1)[0].strip()]
    c = classify(A, trees, args.budget_nodes)
    return {"results": [{"tree": format_tree(t), **_result_json(r)} for t, r in c.results],
            "minimal": [format_tree(t) for t in c.minimal],
            "violations": [[format_tree(a), format_tree(b)] for a, b in c.violations]}


def _map(args):
    X, Y = _space(args, args.domain), _space(args, args.codomain)
    return parse_map(_read(args.map), X, Y)


def cmd_category_image(args) -> Dict[str, Any]:
    f = _map(args)
    S = parse_set(_read(args.set), f.domain)
    return {"category_image": format_set(category_image(f, S)),
            "image": format_set(f.image(S))}


def cmd_preservation_check(args) -> Dict[str, Any]:
    f = _map(args)
    A = parse_partition(_read(args.partition), f.codomain)
    T = parse_tree(_read(args.tree))
    r = check_preservation(f, A, T, args.budget_nodes)
    return {"codomain": _result_json(r.codomain), "domain": _result_json(r.domain),
            "pushed_witness_verifies": r.pushed_verifies,
            "pulled_witness_verifies": r.pulled_verifies,
            "decided": r.decided, "holds": r.holds}


def cmd_hausdorff_extract(args) -> Dict[str, Any]:
    m = parse_guess_table(_read(args.table))
    if m.d > args.budget_depth:
        raise DomainError(f"depth {m.d} exceeds --budget-depth {args.budget_depth}")
    e = hausdorff_extract(m)
    out = {"tree": format_tree(e.tree), "family": _family_json(e.family),
           "r_sequence": [sorted(s or "-" for s in level) for level in e.rsequence.levels],
           "partition": {str(x): e.partition(x) for x in e.partition.space.points}}
    if args.verify:
        limit = limit_partition(m)
        agree = sum(limit(x) == e.partition(x) for x in limit.space.points)
        out["limit_match"] = f"{agree}/{len(limit.space.points)}"
        if agree != len(limit.space.points):
            raise DomainError(f"limit-match: {out['limit_match']}")
    return out


def cmd_selftest(args) -> Dict[str, Any]:
    results = checks.run_all(full=args.full, seed=args.seed)
    out = {"checks": [{"name": r.name, "passed": r.passed, "cases": r.cases,
                       "failures": r.failures} for r in results]}
    if not all(r.passed for r in results):
        out["failed"] = True
    return out


# -- human-readable rendering -------------------------------------------------

def render(verb: str, out: Dict[str, Any]) -> str:
    if verb == "tree-compare":
        lines = [out["relation"]]
        if "witness" in out:
            lines.append("map: " + ", ".join(f"{k}->{v}" for k, v in out["witness"].items()))
        return "\n".join(lines)
    if verb == "tree-linearize":
        return "\n".join(f"rank {r['rank']}: " + " | ".join(" ~ ".join(c) for c in r["classes"])
                         for r in out["ranks"])
    if verb == "space-load":
        return f"{out['space']}\npoints: {out['points']}\nopen sets: {out['open_sets']}"
    if verb == "family-validate":
        return f"valid ({out['paths']} paths)"
    if verb == "family-reduce":
        return out["text"].rstrip()
    if verb == "family-eval":
        lines = [f"{'point':<10} value  runs"]
        for row in out["points"]:
            val = row["value"] if row["value"] is not None else \
                ("conflict " + "/".join(map(str, row["labels"])) if row["labels"] else "none")
            lines.append(f"{row['point']:<10} {val!s:<6} {' '.join(row['runs'])}")
        if out["determines"]:
            lines.append("determines a partition")
        else:
            d = out["diagnostic"]
            lines.append(f"does not determine a partition: {d['reason']} at {d['point']}")
        return "\n".join(lines)
    if verb == "classify":
        lines = [f"{r['tree']:<40} {r['status']}" for r in out["results"]]
        lines.append("minimal: " + (", ".join(out["minimal"]) or "none"))
        lines.append(f"monotonicity violations: {len(out['violations'])}")
        return "\n".join(lines)
    if verb == "category-image":
        return f"f[S] = {out['category_image']}\nf(S) = {out['image']}"
    if verb == "preservation-check":
        return "\n".join([f"codomain: {out['codomain']['status']}",
                          f"domain:   {out['domain']['status']}",
                          f"pushed witness verifies: {out['pushed_witness_verifies']}",
                          f"pulled witness verifies: {out['pulled_witness_verifies']}",
                          "biconditional: " + ("holds" if out["holds"] else "FAILS")])
    if verb == "hausdorff-extract":
        lines = [f"tree: {out['tree']}", "family:"]
        lines += [f"  {p} => {s}" for p, s in out["family"]["sets"].items()]
        lines.append("r-sequence: " + " ; ".join(" ".join(level) or "(empty)"
                                                for level in out["r_sequence"]))
        if "limit_match" in out:
            lines.append(f"limit-match: {out['limit_match']}")
        return "\n".join(lines)
    if verb == "selftest":
        return "\n".join(("PASS " if c["passed"] else "FAIL ") + f"{c['name']} ({c['cases']} cases)"
                         + ("" if c["passed"] else f": {c['failures'][0]}")
                         for c in out["checks"])
    return json.dumps(out, sort_keys=True)


# -- entry point --------------------------------------------------------------

COMMANDS = {
    "tree-compare": (cmd_tree_compare, [("a", "first tree file"), ("b", "second tree file")]),
    "tree-linearize": (cmd_tree_linearize, [("file", "one tree per line")]),
    "space-load": (cmd_space_load, [("space", "space file")]),
    "family-validate": (cmd_family_validate, [("space", "space file"), ("family", "family file")]),
    "family-reduce": (cmd_family_reduce, [("space", "space file"), ("family", "family file")]),
    "family-eval": (cmd_family_eval, [("space", "space file"), ("family", "family file")]),
    "classify": (cmd_classify, [("space", "space file"), ("partition", "partition file"),
                                ("trees", "candidate trees, one per line")]),
    "category-image": (cmd_category_image, [("domain", "domain space"),
                                            ("codomain", "codomain space"),
                                            ("map", "map file"), ("set", "set file")]),
    "preservation-check": (cmd_preservation_check, [("domain", "domain space"),
                                                    ("codomain", "codomain space"),
                                                    ("map", "map file"),
                                                    ("partition", "partition of the codomain"),
                                                    ("tree", "tree file")]),
    "hausdorff-extract": (cmd_hausdorff_extract, [("table", "guess-table file")]),
    "selftest": (cmd_selftest, []),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--budget-nodes", type=int, default=DEFAULT_BUDGET,
                        help="cap on candidate sets examined by witness searches")
    common.add_argument("--budget-depth", type=int, default=8,
                        help="largest accepted cylinder depth")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    parser = argparse.ArgumentParser(prog="finehier",
                                     description="Fine-hierarchy toolkit for k-partitions")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, (_, positionals) in COMMANDS.items():
        p = sub.add_parser(verb, parents=[common])
        for name, help_ in positionals:
            p.add_argument(name, help=help_)
        if verb == "family-eval":
            p.add_argument("--point", help="evaluate a single point")
        if verb == "hausdorff-extract":
            p.add_argument("--verify", action="store_true",
                           help="compare with the limit of the guesses")
        if verb == "selftest":
            p.add_argument("--full", action="store_true", help="run at acceptance size")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.verb][0]
    try:
        out = func(args)
    except PARSE_ERRORS as e:
        return _fail(args, 2, "parse", e)
    except DOMAIN_ERRORS as e:
        return _fail(args, 1, "domain", e)
    code = 1 if out.get("failed") else 0
    if args.json:
        out = dict(out)
        out.pop("text", None)
        print(json.dumps(out, sort_keys=True, indent=2))
    else:
        print(render(args.verb, out))
    return code


def _fail(args, code: int, kind: str, e: Exception) -> int:
    report: Dict[str, Any] = {"error": type(e).__name__, "kind": kind, "message": str(e)}
    if isinstance(e, NoReduction):
        report["point"] = str(e.point)
    if isinstance(e, LinearizationError):
        report["pair"] = [format_tree(t) for t in e.pair]
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(f"error ({type(e).__name__}): {e}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
