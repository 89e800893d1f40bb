"""Command-line front end.  Reports are JSON with sorted keys; exit codes:
0 computed and all asserted properties hold, 1 input error, 2 a bound or
equality check failed, 3 indeterminate (a guard was exceeded)."""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import amalgam as ag
from . import automaton as am
from . import extremal as ex
from .dot import to_dot
from .groups import GroupError, construct_group, from_table, hom_from_generators, quotient
from .triangle import NotFound
from .words import WordError, free_product

SCHEMA = "amalgrank-report/1"
EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_INDETERMINATE = 0, 1, 2, 3


class InputError(ValueError):
    pass


class Violation(Exception):
    def __init__(self, report):
        super().__init__("a checked property failed")
        self.report = report


# --- session: the parsed input document ----------------------------------------------

class Session:
    def __init__(self, doc: dict, max_states: int = 100000):
        self.max_states = max_states
        self.groups = {}
        self.ambients = {}      # name -> FreeProduct
        self.amalgams = {}      # name -> AmalgamSpec
        self.subgroups = {}     # name -> (ambient name, automaton, spec entry)
        for g in doc.get("groups", []):
            self.groups[g["name"]] = self._group(g)
        for fp in doc.get("free_products", []):
            factors = [self._ref(self.groups, f, "group") for f in fp["factors"]]
            letters = {k: tuple(v) for k, v in fp.get("letters", {}).items()}
            self.ambients[fp["name"]] = free_product(*factors, letters=letters, name=fp["name"])
        for a in doc.get("amalgams", []):
            spec = self._amalgam(a)
            self.amalgams[a["name"]] = spec
            self.ambients[a["name"]] = spec.ambient_quotient
        self.raw_subgroups = dict(doc.get("subgroups", {}))

    @staticmethod
    def _ref(table, name, kind):
        try:
            return table[name]
        except KeyError:
            raise InputError(f"unknown {kind} {name!r}") from None

    def _group(self, g):
        if "table" in g:
            return from_table(g["table"], name=g["name"])
        kind = g.get("kind")
        args = g.get("args", [])
        if kind == "direct_product":
            return construct_group(kind, *(self._ref(self.groups, x, "group") for x in args))
        if kind == "quotient":
            return quotient(self._ref(self.groups, args[0], "group"), args[1])
        return construct_group(kind, *args)

    def _amalgam(self, a):
        if "builtin" in a:
            return ag.builtin_amalgam(a["builtin"])
        G1, G2, T = (self._ref(self.groups, a[k], "group") for k in ("G1", "G2", "T"))
        e1 = hom_from_generators(T, G1, {int(k): v for k, v in a["emb1"].items()})
        e2 = hom_from_generators(T, G2, {int(k): v for k, v in a["emb2"].items()})
        return ag.make_amalgam(G1, G2, T, e1, e2)

    def subgroup(self, name):
        if name not in self.subgroups:
            entry = self._ref(self.raw_subgroups, name, "subgroup")
            fp = self._ref(self.ambients, entry["ambient"], "ambient")
            gens = [fp.parse(w) for w in entry.get("generators", [])]
            if entry.get("normal_closure"):
                A = am.normal_closure_automaton(fp, gens, self.max_states)
            else:
                A = am.subgroup(fp, gens)
            self.subgroups[name] = (entry["ambient"], A, entry, gens)
        return self.subgroups[name]

    def lifted(self, spec_name, name):
        spec = self._ref(self.amalgams, spec_name, "amalgam")
        amb, A, entry, gens = self.subgroup(name)
        if amb != spec_name:
            raise InputError(f"subgroup {name!r} is not over amalgam {spec_name!r}")
        twists = entry.get("twists")
        if twists is None:
            return ag.make_lifted_subgroup(spec, A)
        twists = {int(k): int(v) for k, v in twists.items()}
        return ag.make_lifted_subgroup(spec, A, twists=twists, basis=gens)


def load_document(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input document: {exc}") from None


# --- JSON rendering ----------------------------------------------------------------------

def jsonable(value, fp=None):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return "inf" if math.isinf(value) else value
    if isinstance(value, dict):
        return {str(k): jsonable(v, fp) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v, fp) for v in value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v, fp) for v in value]
    return str(value)


def render(report: dict) -> str:
    return json.dumps(jsonable({"schema": SCHEMA, **report}), sort_keys=True, indent=2) + "\n"


def automaton_summary(A: am.Automaton) -> dict:
    fp = A.ambient
    data = am.euler_data(A)
    out = {
        "states": A.size,
        "complete": A.complete,
        "index": am.index(A),
        "factor_free": A.factor_free,
        "vertices": data.view.vertex_count,
        "edges": data.view.edge_count,
        "chi": data.chi,
        "reduced_rank": data.reduced_rank,
    }
    if A.factor_free:
        basis = am.free_basis(A)
        out["rank"] = len(basis)
        out["basis"] = [fp.format(w) for w in basis.generators]
    return out


# --- commands ------------------------------------------------------------------------------

def _session(args) -> Session:
    return Session(load_document(args.input), max_states=args.max_states)


def cmd_rank(args):
    s = _session(args)
    _, A, _, _ = s.subgroup(args.subgroup)
    return {"command": "rank", "subgroup": args.subgroup, **automaton_summary(A)}


def cmd_member(args):
    s = _session(args)
    amb, A, _, _ = s.subgroup(args.subgroup)
    fp = A.ambient
    w = fp.parse(args.word)
    report = {"command": "member", "subgroup": args.subgroup, "word": fp.format(w),
              "member": am.membership(A, w)}
    if report["member"] and A.factor_free:
        B = am.free_basis(A)
        u = am.express_in_basis(A, B, w)
        report["basis_word"] = [[i, e] for i, e in u]
    return report


def _pair(s: Session, names):
    (amb1, A1, _, _), (amb2, A2, _, _) = (s.subgroup(n) for n in names)
    if amb1 != amb2:
        raise InputError("the two subgroups live in different ambients")
    return A1, A2


def cmd_intersect(args):
    s = _session(args)
    A1, A2 = _pair(s, args.subgroups)
    P = am.intersect(A1, A2)
    return {"command": "intersect", "subgroups": list(args.subgroups), **automaton_summary(P)}


def cmd_verify_bound(args):
    s = _session(args)
    A1, A2 = _pair(s, args.subgroups)
    report = {"command": "verify-bound", "subgroups": list(args.subgroups),
              **am.check_eq2_bound(A1, A2)}
    if not report["holds"] or report["equality_consistent"] is False:
        raise Violation(report)
    return report


def cmd_verify_theorem2(args):
    s = _session(args)
    spec = s._ref(s.amalgams, args.amalgam, "amalgam")
    L1, L2 = (s.lifted(args.amalgam, n) for n in args.subgroups)
    report = {"command": "verify-theorem2", "amalgam": args.amalgam,
              "subgroups": list(args.subgroups), **ag.verify_theorem2(spec, L1, L2)}
    if not report["holds"]:
        raise Violation(report)
    return report


def _resolve_amalgam(value):
    if value is None:
        return None
    path = Path(value)
    if path.is_file():
        doc = load_document(path)
        amalgams = Session(doc).amalgams
        if not amalgams:
            raise InputError(f"{value} defines no amalgam")
        return amalgams[doc["amalgams"][0]["name"]]
    name = path.name[:-5] if path.name.endswith(".json") else value
    try:
        return ag.builtin_amalgam(name)
    except ag.AmalgamError as exc:
        raise InputError(str(exc)) from None


def _build(case, n, p, degree_bound, max_states):
    if case == 1:
        return ex.build_case1(p, n, degree_bound)
    if case == 2:
        return ex.build_case2(n, degree_bound)
    if case == 3:
        return ex.build_case3(n, max_states)
    if case == 4:
        return ex.build_case4(n, max_states)
    raise InputError(f"unknown case {case}")


def case_report(instance, spec=None, timings=None) -> dict:
    fp = instance.ambient
    rep = ex.verify_sharpness(instance, spec)
    if timings is not None:
        timings[f"case{instance.case}"] = rep.timings
    notes = {k: v for k, v in instance.notes.items()}
    out = {
        "case": instance.case,
        "params": instance.params,
        "ambient": fp.name,
        "designated": [fp.format(w) for w in instance.designated],
        "H2_generators": [fp.format(w) for w in instance.H2_generators],
        "notes": notes,
        "quotient": rep.quotient,
        "equality": rep.equality,
    }
    if rep.amalgam is not None:
        out["amalgam"] = rep.amalgam
    return out


def cmd_paper_case(args):
    spec = _resolve_amalgam(args.amalgam)
    timings = {}
    if args.all:
        plan = [(1, 1, 3), (2, 1, None), (3, args.n or 2, None), (4, args.n or 2, None)]
        reports = []
        for case, n, p in plan:
            inst = _build(case, n, p, args.degree_bound, args.max_states)
            reports.append(case_report(inst, spec if case == 3 and spec is not None
                                       and spec.T.order == n else None, timings))
        report = {"command": "paper-case", "cases": reports,
                  "equality": all(r["equality"] for r in reports)}
    else:
        if args.case is None:
            raise InputError("give --case or --all")
        inst = _build(args.case, args.n or (1 if args.case in (1, 2) else 2), args.p,
                      args.degree_bound, args.max_states)
        report = {"command": "paper-case", **case_report(inst, spec, timings)}
    if args.timings:
        print(json.dumps(timings, indent=2), file=sys.stderr)
    if not report["equality"]:
        raise Violation(report)
    return report


def cmd_export_dot(args):
    s = _session(args)
    _, A, _, _ = s.subgroup(args.subgroup)
    text = to_dot(A, args.subgroup)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    view = am.bipartite_view(A)
    return {"command": "export-dot", "subgroup": args.subgroup, "output": args.output,
            "vertices": view.vertex_count, "edges": view.edge_count}


# --- argument parsing and dispatch ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amalgrank", description=__doc__.split("\n")[0])
    parser.add_argument("--max-states", type=int, default=100000,
                        help="coset enumeration guard")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--input", "-i", required=True, help="JSON input document")
        p.set_defaults(func=func)
        return p

    p = with_input("rank", cmd_rank, "graph data, rank and free basis of a subgroup")
    p.add_argument("--subgroup", required=True)
    p = with_input("member", cmd_member, "membership of a word")
    p.add_argument("--subgroup", required=True)
    p.add_argument("--word", required=True)
    p = with_input("intersect", cmd_intersect, "intersection of two subgroups")
    p.add_argument("--subgroups", nargs=2, required=True)
    p = with_input("verify-bound", cmd_verify_bound, "intersection bound in a free product")
    p.add_argument("--subgroups", nargs=2, required=True)
    p = with_input("verify-theorem2", cmd_verify_theorem2, "intersection bound in an amalgam")
    p.add_argument("--amalgam", required=True)
    p.add_argument("--subgroups", nargs=2, required=True)
    p = with_input("export-dot", cmd_export_dot, "Graphviz drawing of a subgroup graph")
    p.add_argument("--subgroup", required=True)
    p.add_argument("--output", "-o")

    p = sub.add_parser("paper-case", help="build and verify an extremal pair")
    p.add_argument("--case", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--amalgam", help="built-in amalgam name or JSON document")
    p.add_argument("--degree-bound", type=int, default=12)
    p.add_argument("--all", action="store_true")
    p.add_argument("--timings", action="store_true", help="print timings to stderr")
    p.set_defaults(func=cmd_paper_case)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except Violation as v:
        sys.stdout.write(render(v.report))
        return EXIT_VIOLATION
    except (am.Indeterminate, NotFound) as exc:
        sys.stdout.write(render({"command": args.command, "indeterminate": str(exc)}))
        return EXIT_INDETERMINATE
    except (InputError, WordError, GroupError, ag.AmalgamError, am.AutomatonError,
            ex.ConstructionError, KeyError, TypeError) as exc:
        print(f"amalgrank: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
