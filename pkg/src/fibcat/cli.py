"""Command-line front end: ``fibcat <command> [options]``.

Every command prints one report, as JSON (``--json``, the default) or as
plain text.  Exit status: 0 when every verdict holds, 1 when one fails,
2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
import time
from importlib import resources
from typing import Any, Callable

import numpy as np

from . import dsl
from .cartesian import (
    is_cartesian,
    is_fibration,
    lemma1_counterexamples,
    make_cleavage,
    monicity_counterexamples,
    vh_factorizations,
    vh_pairs_equivalent,
)
from .category import CatFunctor, ValidationReport, validate_category, validate_functor
from .codomain import generic_composite
from .dual import build_dual, classify_dual_arrow, double_dual_iso
from .errors import FibcatError, GlueConditionViolated
from .finset import (
    check_adjunction,
    compose_family_comorphisms,
    is_distributivity_pullback,
    is_pullback_of_sets,
    pi_along,
    pullback,
)
from .generators import random_fibration, random_functor
from .glue import glue_functor, restrict, verify_glue_conditions
from .jets import jet_count, jet_object, jet_oracle, oracle_bijection
from .strength import (
    all_vector_fields,
    builtin_strengths,
    check_flow,
    check_projection_triangle,
    check_tensorial_strength,
    is_vector_field,
    prolong_field,
)
from .vect import (
    LinearBundleMap,
    check_cartesian_preservation,
    dagger_morphism,
    double_dagger_identification,
    reverse_dagger,
    tangent_from_omega,
)

SCHEMA_VERSION = "1.0"


class UsageError(Exception):
    """Bad flags or names that do not resolve; exit status 2."""


def jsonable(x: Any) -> Any:
    if hasattr(x, "as_dict"):
        return jsonable(x.as_dict())
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: jsonable(getattr(x, f.name)) for f in dataclasses.fields(x) if f.repr}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return [jsonable(v) for v in sorted(x)]
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclasses.dataclass
class Report:
    command: str
    verdicts: list[dict] = dataclasses.field(default_factory=list)
    witnesses: list[dict] = dataclasses.field(default_factory=list)
    data: dict = dataclasses.field(default_factory=dict)
    lines: list[str] = dataclasses.field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v["holds"] for v in self.verdicts)

    def verdict(self, name: str, holds: bool, detail: str | None = None, witness: Any = None) -> bool:
        self.verdicts.append({"name": name, "holds": bool(holds), "detail": detail})
        if witness is not None:
            self.witnesses.append({"verdict": name, "witness": jsonable(witness)})
        return bool(holds)

    def from_validation(self, name: str, rep: ValidationReport) -> bool:
        detail = None if rep.ok else rep.first.message
        for f in rep.failures:
            self.witnesses.append({"verdict": name, "witness": jsonable(f)})
        return self.verdict(name, rep.ok, detail)

    def as_dict(self, timing_ms: float | None = None) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "ok": self.ok,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
            "data": jsonable(self.data),
        }
        if timing_ms is not None:
            out["timing_ms"] = round(timing_ms, 3)
        return out

    def as_text(self) -> str:
        out = [f"{self.command}: {'PASS' if self.ok else 'FAIL'}"]
        for v in self.verdicts:
            tail = f": {v['detail']}" if v["detail"] else ""
            out.append(f"  {'PASS' if v['holds'] else 'FAIL'} {v['name']}{tail}")
        out.extend(f"  {line}" for line in self.lines)
        return "\n".join(out)


def fixtures_text() -> str:
    return resources.files("fibcat").joinpath("data/fixtures.fib").read_text()


def _need(doc: dsl.Document, name: str | None, kind: str, flag: str):
    if name is None:
        raise UsageError(f"{flag} is required")
    try:
        d = doc.get(name)
    except KeyError:
        raise UsageError(f"unknown {kind} {name!r}") from None
    if d.kind != kind:
        raise UsageError(f"{name!r} is a {d.kind}, not a {kind}")
    return d.value


def _arrow_names(C):
    return [C.arrow_name(f) for f in range(C.n_arrows)]


# Commands


def cmd_check(args, doc: dsl.Document) -> Report:
    r = Report("check")
    for d in doc.declarations:
        label = f"{d.kind} {d.name}"
        if d.kind == "category":
            r.from_validation(label, validate_category(d.value))
        elif d.kind == "functor":
            r.from_validation(label, validate_functor(d.value))
        elif d.kind == "glue":
            r.from_validation(label, verify_glue_conditions(d.value))
        else:
            r.verdict(label, True)  # shapes were checked while loading
    r.data["declarations"] = [{"kind": d.kind, "name": d.name} for d in doc.declarations]
    r.data["warnings"] = [w.as_dict() for w in doc.warnings]
    return r


def cmd_analyze(args, doc) -> Report:
    pi: CatFunctor = _need(doc, args.functor, "functor", "--functor")
    r = Report("analyze")
    if not r.from_validation("functor", validate_functor(pi)):
        return r
    total, base = pi.source, pi.target
    table = []
    for f in range(total.n_arrows):
        v = is_cartesian(pi, f)
        table.append(
            {
                "arrow": total.arrow_name(f),
                "source": total.object_name(total.dom(f)),
                "target": total.object_name(total.cod(f)),
                "base_arrow": base.arrow_name(pi.arr_map[f]),
                "vertical": pi.is_vertical(f),
                "cartesian": v.holds,
            }
        )
        r.lines.append(f"{total.arrow_name(f)} over {base.arrow_name(pi.arr_map[f])}: {'Cartesian' if v.holds else 'not Cartesian'}")
        if not v.holds:
            w = v.witness
            r.witnesses.append(
                {
                    "verdict": "cartesian-table",
                    "witness": {"arrow": total.arrow_name(f), "xi": base.arrow_name(w.xi), "Z": total.object_name(w.Z), **w.as_dict()},
                }
            )
    r.data["arrows"] = table
    fib = is_fibration(pi)
    missing = [{"base_arrow": base.arrow_name(a), "object": total.object_name(Y)} for a, Y in (fib.witness or [])]
    r.verdict("fibration", fib.holds, None if fib.holds else f"{len(missing)} missing Cartesian lifts", missing or None)
    r.data["fibration"] = fib.holds
    if fib.holds:
        c = make_cleavage(pi)
        r.data["cleavage"] = [
            {"base_arrow": base.arrow_name(a), "object": total.object_name(Y), "lift": total.arrow_name(h)}
            for (a, Y), h in sorted(c.choice.items())
        ]
        bad = [
            (total.arrow_name(p.composite), total.arrow_name(p.vertical), total.arrow_name(p.horizontal))
            for f in range(total.n_arrows)
            for p in vh_factorizations(pi, f)[:1]
            if any(vh_pairs_equivalent(p, q) is None for q in vh_factorizations(pi, f))
        ]
        unfactored = [total.arrow_name(f) for f in range(total.n_arrows) if not vh_factorizations(pi, f)]
        r.verdict("vh-factorization", not bad and not unfactored, None if not (bad or unfactored) else "factorization failure", (bad + unfactored) or None)
    lem = lemma1_counterexamples(pi)
    r.verdict("lemma1", not lem, None if not lem else f"{len(lem)} counterexamples", lem or None)
    mon = monicity_counterexamples(pi)
    r.verdict("cartesian-monic", not mon, None if not mon else f"{len(mon)} counterexamples", mon or None)
    return r


def dual_document(doc: dsl.Document, name: str, dual) -> dsl.Document:
    """A document holding the base, the dual total category and pi*."""
    base_name = doc.get(name).refs[1] if doc.get(name).refs else "B"
    out = dsl.Document()
    out.add("category", base_name, dual.projection.target)
    out.add("category", f"{name}_dual", dual.category)
    out.add("functor", f"{name}_star", dual.projection, (f"{name}_dual", base_name))
    return out


def cmd_dualize(args, doc) -> Report:
    pi = _need(doc, args.functor, "functor", "--functor")
    r = Report("dualize")
    if not r.from_validation("functor", validate_functor(pi)):
        return r
    fib = is_fibration(pi)
    if not r.verdict("fibration", fib.holds, None if fib.holds else "input is not a fibration"):
        return r
    dual = build_dual(pi, check=False)
    C = dual.category
    r.from_validation("dual-category", validate_category(C))
    r.from_validation("dual-projection", validate_functor(dual.projection))
    r.verdict("dual-fibration", is_fibration(dual.projection).holds)
    total = pi.source
    arrows, agree = [], True
    for g in range(C.n_arrows):
        try:
            kind = classify_dual_arrow(dual, g, cross_check=True)
        except FibcatError as e:
            agree, kind = False, f"disagreement: {e}"
        cls = dual.class_of[g]
        arrows.append(
            {
                "arrow": C.arrow_name(g),
                "source": C.object_name(C.dom(g)),
                "target": C.object_name(C.cod(g)),
                "base_arrow": pi.target.arrow_name(dual.projection.arr_map[g]),
                "kind": kind,
                "representatives": [[total.arrow_name(s.vertical), total.arrow_name(s.horizontal)] for s in cls.representatives],
            }
        )
        r.lines.append(f"{C.arrow_name(g)}: {C.object_name(C.dom(g))} -> {C.object_name(C.cod(g))} ({kind})")
    r.verdict("classification", agree)
    text = dsl.emit_document(dual_document(doc, args.functor, dual))
    r.data.update(objects=[C.object_name(o) for o in range(C.n_objects)], arrows=arrows, document=text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return r


def cmd_doubledual(args, doc) -> Report:
    pi = _need(doc, args.functor, "functor", "--functor")
    r = Report("doubledual")
    if not r.verdict("fibration", is_fibration(pi).holds):
        return r
    dd = double_dual_iso(pi)
    r.verdict("isomorphism", dd.is_isomorphism)
    r.verdict("over-base", dd.over_base)
    X, XX = dd.functor.source, dd.functor.target
    r.data["objects"] = [[X.object_name(o), XX.object_name(dd.functor.obj_map[o])] for o in range(X.n_objects)]
    r.data["arrows"] = [list(p) for p in dd.arrow_table()]
    r.lines.extend(f"{a} |-> {b}" for a, b in dd.arrow_table())
    return r


def cmd_glue(args, doc) -> Report:
    data = _need(doc, args.data, "glue", "--data")
    r = Report("glue")
    if not r.from_validation("glue-conditions", verify_glue_conditions(data)):
        return r
    pi = data.fibration
    F = glue_functor(data, make_cleavage(pi, "lowest"))
    G = glue_functor(data, make_cleavage(pi, "highest"))
    r.from_validation("functor", validate_functor(F))
    r.verdict("cleavage-independent", F.arr_map == G.arr_map)
    back = restrict(F, pi, data.target_projection)
    r.verdict(
        "restricts-back",
        back.cartesian_functor == dict(data.cartesian_functor)
        and all(back.fiber_functors[A].arr_map == data.fiber_functors[A].arr_map for A in data.fiber_functors),
    )
    total, T = pi.source, data.target
    r.data["arrows"] = [[total.arrow_name(f), T.arrow_name(F.arr_map[f])] for f in range(total.n_arrows)]
    r.lines.extend(f"{a} |-> {b}" for a, b in r.data["arrows"])
    return r


def cmd_finset(args, doc) -> Report:
    r = Report(f"finset {args.op}")
    if args.op == "pullback":
        al = _need(doc, args.map, "finmap", "--map")
        Y = _need(doc, (args.family or [None])[0], "family", "--family")
        P = pullback(al, Y)
        r.verdict("pullback-square", is_pullback_of_sets(P.to_base, P.to_total, al, Y.total_map()))
        r.data["fibers"] = list(P.bundle.fibers)
    elif args.op == "pi":
        al = _need(doc, args.map, "finmap", "--map")
        fams = args.family or [None]
        X = _need(doc, fams[0], "family", "--family")
        P = pi_along(al, X)
        Y = _need(doc, fams[1], "family", "--family") if len(fams) > 1 else P.bundle
        r.verdict("counit-universal", is_distributivity_pullback(P.counit_comorphism, method="yoneda").holds)
        r.from_validation("adjunction", check_adjunction(al, X, Y))
        r.data["fibers"] = list(P.bundle.fibers)
    elif args.op == "compose":
        names = args.comorphism or []
        if len(names) != 2:
            raise UsageError("finset compose needs --comorphism twice")
        f, g = (_need(doc, n, "comorphism", "--comorphism") for n in names)
        if f.target != g.source:
            raise UsageError(f"{names[0]} does not end where {names[1]} starts")
        h = compose_family_comorphisms(f, g)
        r.verdict("generic-agreement", generic_composite(f, g) == h)
        r.data["composite"] = {
            "base_map": list(h.base_map.values),
            "components": [list(c.values) for c in h.components],
        }
    return r


def cmd_jet(args, doc) -> Report:
    R = _need(doc, args.relation, "relation", "--relation")
    X = _need(doc, (args.family or [None])[0], "family", "--family")
    if X.base_size != R.base_size:
        raise UsageError("relation and family live over different sets")
    r = Report("jet")
    J = jet_object(R, X)
    fibers = J.bundle.fibers
    r.verdict("count-law", all(fibers[b] == jet_count(R, X, b) for b in range(R.base_size)))
    bij = oracle_bijection(R, X)
    oracle = jet_oracle(R, X).bundle.fibers
    r.verdict("oracle", tuple(oracle) == tuple(fibers) and all(sorted(row) == list(range(len(row))) for row in bij))
    r.data.update(fibers=list(fibers), neighborhoods=[list(R.neighbors(b)) for b in range(R.base_size)])
    return r


def _strengths(args):
    table = builtin_strengths()
    if args.functor is None:
        return table
    if args.functor not in table:
        raise UsageError(f"unknown built-in functor {args.functor!r}; choose from {sorted(table)}")
    return {args.functor: table[args.functor]}


def cmd_strength(args, doc) -> Report:
    r = Report(f"strength {args.op}")
    n = args.max_size if args.max_size is not None else 2
    for name, t in _strengths(args).items():
        if args.op == "check":
            r.from_validation(f"{name}:tensorial", check_tensorial_strength(t, max_size=n, max_q=n))
            if t.functor.projection is not None:
                r.from_validation(f"{name}:projection", check_projection_triangle(t, max_size=n, max_q=n))
        elif args.op == "flow":
            r.from_validation(f"{name}:flow", check_flow(t, max_D=2, max_size=min(n, 2)))
        elif args.op == "prolong":
            bad, total = [], 0
            for D in (1, 2):
                for M in range(min(n, 2) + 1):
                    for xi in all_vector_fields(D, M):
                        total += 1
                        if not is_vector_field(prolong_field(t, D, M, xi), D, t.functor.obj(M)):
                            bad.append((D, M, xi.values))
            r.verdict(f"{name}:sections", not bad, f"{total} fields prolonged", bad or None)
    return r


def cmd_vect(args, doc) -> Report:
    r = Report(f"vect {args.op}")
    if args.op == "dagger":
        t: LinearBundleMap = _need(doc, args.linmap, "linmap", "--linmap")
        d = dagger_morphism(t)
        ident = double_dagger_identification(t.source)
        back = reverse_dagger(d)
        r.verdict(
            "reverse-dagger",
            all(np.array_equal(a, b) for a, b in zip(back.matrices, t.matrices)) and all(np.array_equal(m, np.eye(len(m), dtype=int)) for m in ident),
        )
        src_id = LinearBundleMap.identity(t.source)
        r.verdict("identity", dagger_morphism(src_id) == type(d).identity(d.source))
        if t.is_pullback():
            r.verdict("cartesian-preserved", check_cartesian_preservation(t))
        r.data["matrices"] = [m.tolist() for m in d.matrices]
    elif args.op == "tangent":
        R = _need(doc, args.relation, "relation", "--relation")
        td = tangent_from_omega(R, args.field)
        expect = [len(R.neighbors(b)) - 1 for b in range(R.base_size)]
        r.verdict("dimensions", list(td.cotangent.dims) == expect == list(td.tangent.dims))
        r.data.update(cotangent=list(td.cotangent.dims), tangent=list(td.tangent.dims))
    return r


def cmd_suite(args, doc) -> Report:
    """Random fibrations through the core checks."""
    r = Report("suite")
    rng = random.Random(args.seed)
    counts = dict(factorization=0, lemma1=0, monicity=0, dual=0, doubledual=0, glue=0)
    n = args.count
    for _ in range(n):
        pi = random_fibration(rng, max_arrows=args.max_size or 40)
        total = pi.source
        fs = [vh_factorizations(pi, f) for f in range(total.n_arrows)]
        if all(fl and all(sum(1 for q in fl if vh_pairs_equivalent(p, q) is not None) == len(fl) for p in fl) for fl in fs):
            counts["factorization"] += 1
        counts["lemma1"] += not lemma1_counterexamples(pi)
        counts["monicity"] += not monicity_counterexamples(pi)
        dual = build_dual(pi)
        try:
            ok = is_fibration(dual.projection).holds
            for g in range(dual.category.n_arrows):
                classify_dual_arrow(dual, g)
        except FibcatError:
            ok = False
        counts["dual"] += ok
        counts["doubledual"] += double_dual_iso(pi).ok
        F = random_functor(total, total, rng)
        if F is not None:
            try:
                G = glue_functor(restrict(F, pi), make_cleavage(pi))
                counts["glue"] += G.arr_map == F.arr_map
            except GlueConditionViolated:
                pass
        else:
            counts["glue"] += 1
    for k, v in counts.items():
        r.verdict(k, v == n, f"{v}/{n}")
    r.data.update(seed=args.seed, count=n)
    return r


COMMANDS: dict[str, Callable] = {
    "check": cmd_check,
    "analyze": cmd_analyze,
    "dualize": cmd_dualize,
    "doubledual": cmd_doubledual,
    "glue": cmd_glue,
    "finset": cmd_finset,
    "jet": cmd_jet,
    "strength": cmd_strength,
    "vect": cmd_vect,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="DSL document (defaults to the shipped fixtures)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="plain-text report")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-size", type=int, default=None, help="enumeration bound")
    common.add_argument("--out", help="write the report (or, for dualize, the document) here")
    common.add_argument("--no-timing", action="store_true", help="omit timing_ms from JSON")

    p = argparse.ArgumentParser(prog="fibcat", description="Finite fibred-category checks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="validate every declaration")
    for name in ("analyze", "dualize", "doubledual"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--functor", required=True)
    sp = sub.add_parser("glue", parents=[common])
    sp.add_argument("--data", required=True)
    sp = sub.add_parser("finset", parents=[common])
    sp.add_argument("op", choices=["pullback", "pi", "compose"])
    sp.add_argument("--map")
    sp.add_argument("--family", action="append")
    sp.add_argument("--comorphism", action="append")
    sp = sub.add_parser("jet", parents=[common])
    sp.add_argument("--relation", required=True)
    sp.add_argument("--family", action="append", required=True)
    sp = sub.add_parser("strength", parents=[common])
    sp.add_argument("op", choices=["check", "flow", "prolong"])
    sp.add_argument("--functor", help="built-in functor name (default: all)")
    sp = sub.add_parser("vect", parents=[common])
    sp.add_argument("op", choices=["dagger", "tangent"])
    sp.add_argument("--linmap")
    sp.add_argument("--relation")
    sp.add_argument("--field", type=int, default=2)
    sp = sub.add_parser("suite", parents=[common])
    sp.add_argument("--count", type=int, default=50)
    return p


def load(path: str | None, validate: bool = True) -> dsl.Document:
    text = fixtures_text() if path is None else open(path).read()
    return dsl.parse_document(text, validate=validate)


def run_command(argv: list[str], doc: dsl.Document | None = None) -> dict:
    """Run one command in-process and return its JSON report (without timing)."""
    args = build_parser().parse_args(argv)
    if doc is None:
        doc = load(args.input, validate=args.command != "check") if args.command != "suite" else dsl.Document()
    return COMMANDS[args.command](args, doc).as_dict()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    start = time.perf_counter()
    try:
        doc = dsl.Document() if args.command == "suite" else load(args.input, validate=args.command != "check")
        report = COMMANDS[args.command](args, doc)
    except dsl.ParseError as e:
        for d in e.diagnostics:
            print(f"{args.input or 'fixtures.fib'}:{d}", file=sys.stderr)
        return 2
    except (UsageError, OSError) as e:
        print(f"fibcat: error: {e}", file=sys.stderr)
        return 2
    elapsed = (time.perf_counter() - start) * 1000
    if args.format == "text":
        out = report.as_text()
    else:
        out = json.dumps(report.as_dict(None if args.no_timing else elapsed), indent=2)
    if args.out and args.command != "dualize":
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
