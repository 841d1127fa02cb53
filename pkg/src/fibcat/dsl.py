"""A small line-oriented text format for categories, functors and finite data.

    category W2 { objects: a, b; arrow u: a -> b; }
    functor pi: E -> W2 { object X0 |-> a; arrow h0 |-> u; }
    finmap alpha: 2 -> 1 = [0, 0];
    family X over 2 = [2, 1];
    relation R on 3 = { (0,1), (1,0) };
    vectbundle V over 2 field 2 dims [1, 2];
    comorphism f over alpha from X to Y { at 0: [0, 1]; }
    linmap t over alpha from V to W { at 0: [[1, 0], [0, 1]]; }
    glue G: pi -> T { object X0 |-> p; vertical v |-> g; cartesian h0 |-> k; }

Identities are implicit and named ``id_<object>``; names that are not
plain identifiers are written in backquotes.  Composition is
diagrammatic: ``compose f.g = h`` means first f, then g.
"""
from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .cartesian import is_cartesian
from .category import CatFunctor, FiniteCategory, fiber, validate_category, validate_functor
from .errors import FibcatError
from .finset import FamilyComorphism, FinFamilyBundle, FinFunction
from .glue import GlueData
from .jets import NeighborhoodRelation
from .vect import FiniteField, FinVectorBundle, LinearBundleMap

# Dependency order: each kind only refers to kinds listed before it.
KINDS = ("category", "functor", "finmap", "family", "relation", "vectbundle", "comorphism", "linmap", "glue")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    line: int
    column: int
    message: str
    suggestion: str | None = None

    def __str__(self):
        hint = f" (did you mean {self.suggestion!r}?)" if self.suggestion else ""
        return f"{self.line}:{self.column}: {self.severity}: {self.message}{hint}"

    def as_dict(self):
        return {
            "severity": self.severity,
            "line": self.line,
            "column": self.column,
            "message": self.message,
            "suggestion": self.suggestion,
        }


class ParseError(FibcatError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        super().__init__("\n".join(str(d) for d in errors) or "parse failed")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, sym, eof
    text: str
    line: int
    column: int


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<quoted>`[^`\n]*`)"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>\|->|->|[{}()\[\]:;,.=])"
)


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens, diags = [], []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            diags.append(Diagnostic("error", line, col, f"unexpected character {text[pos]!r}"))
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind == "quoted":
                tokens.append(Token("ident", s[1:-1], line, col))
            elif kind in ("int", "ident", "sym"):
                tokens.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens, diags


class _Fail(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


@dataclass
class Ref:
    name: str
    token: Token


@dataclass
class RawDecl:
    kind: str
    name: str
    token: Token
    body: dict[str, Any] = field(default_factory=dict)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Token | None = None, suggestion=None):
        t = tok or self.tok
        raise _Fail(Diagnostic("error", t.line, t.column, msg, suggestion))

    def next(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def sym(self, s: str) -> Token:
        if self.tok.kind != "sym" or self.tok.text != s:
            self.fail(f"expected {s!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def at_sym(self, s: str) -> bool:
        return self.tok.kind == "sym" and self.tok.text == s

    def keyword(self, word: str) -> Token:
        if self.tok.kind != "ident" or self.tok.text != word:
            self.fail(f"expected {word!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def ident(self) -> Ref:
        if self.tok.kind != "ident":
            self.fail(f"expected a name, found {self.tok.text or 'end of input'!r}")
        t = self.next()
        return Ref(t.text, t)

    def integer(self) -> tuple[int, Token]:
        if self.tok.kind != "int":
            self.fail(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        t = self.next()
        return int(t.text), t

    def int_list(self) -> tuple[list[int], Token]:
        start = self.sym("[")
        out = []
        while not self.at_sym("]"):
            out.append(self.integer()[0])
            if not self.at_sym("]"):
                self.sym(",")
        self.sym("]")
        return out, start

    def matrix(self) -> tuple[list[list[int]], Token]:
        start = self.sym("[")
        rows = []
        while not self.at_sym("]"):
            rows.append(self.int_list()[0])
            if not self.at_sym("]"):
                self.sym(",")
        self.sym("]")
        return rows, start

    def recover(self):
        """Skip to the end of the current declaration."""
        depth = 0
        while self.tok.kind != "eof":
            t = self.next()
            if t.kind == "sym":
                if t.text == "{":
                    depth += 1
                elif t.text == "}":
                    depth -= 1
                    if depth <= 0:
                        if self.at_sym(";"):
                            self.next()
                        return
                elif t.text == ";" and depth == 0:
                    return
            if depth == 0 and self.tok.kind == "ident" and self.tok.text in KINDS:
                return

    def block(self, handlers: dict[str, Any]):
        self.sym("{")
        while not self.at_sym("}"):
            if self.tok.kind != "ident":
                self.fail(f"expected a statement, found {self.tok.text or 'end of input'!r}")
            word = self.tok.text
            if word not in handlers:
                close = difflib.get_close_matches(word, list(handlers), n=1)
                self.fail(f"unknown statement {word!r}", suggestion=close[0] if close else None)
            kw = self.next()
            handlers[word](kw)
            self.sym(";")
        self.sym("}")
        if self.at_sym(";"):
            self.next()

    def declaration(self) -> RawDecl:
        kw = self.tok
        if kw.kind != "ident" or kw.text not in KINDS:
            close = difflib.get_close_matches(kw.text, KINDS, n=1) if kw.kind == "ident" else []
            self.fail(f"unknown declaration {kw.text or 'end of input'!r}", suggestion=close[0] if close else None)
        self.next()
        name = self.ident()
        d = RawDecl(kw.text, name.name, name.token)
        getattr(self, f"_{kw.text}")(d)
        return d

    def _category(self, d: RawDecl):
        d.body.update(objects=[], arrows=[], compose=[])

        def objects(kw):
            self.sym(":")
            d.body["objects"].append(self.ident())
            while self.at_sym(","):
                self.next()
                d.body["objects"].append(self.ident())

        def arrow(kw):
            n = self.ident()
            self.sym(":")
            a = self.ident()
            self.sym("->")
            b = self.ident()
            d.body["arrows"].append((n, a, b))

        def compose(kw):
            f = self.ident()
            self.sym(".")
            g = self.ident()
            self.sym("=")
            h = self.ident()
            d.body["compose"].append((f, g, h))

        self.block({"objects": objects, "arrow": arrow, "compose": compose})

    def _mapping_block(self, d: RawDecl, words):
        for w in words:
            d.body[w] = []

        def make(w):
            def handler(kw):
                a = self.ident()
                self.sym("|->")
                b = self.ident()
                d.body[w].append((a, b, kw))

            return handler

        self.block({w: make(w) for w in words})

    def _functor(self, d: RawDecl):
        self.sym(":")
        d.body["source"] = self.ident()
        self.sym("->")
        d.body["target"] = self.ident()
        self._mapping_block(d, ("object", "arrow"))

    def _glue(self, d: RawDecl):
        self.sym(":")
        d.body["functor"] = self.ident()
        self.sym("->")
        d.body["target"] = self.ident()
        self._mapping_block(d, ("object", "vertical", "cartesian"))

    def _finmap(self, d: RawDecl):
        self.sym(":")
        d.body["dom"] = self.integer()
        self.sym("->")
        d.body["cod"] = self.integer()
        self.sym("=")
        d.body["values"] = self.int_list()
        self.sym(";")

    def _family(self, d: RawDecl):
        self.keyword("over")
        d.body["base"] = self.integer()
        self.sym("=")
        d.body["fibers"] = self.int_list()
        self.sym(";")

    def _relation(self, d: RawDecl):
        self.keyword("on")
        d.body["base"] = self.integer()
        self.sym("=")
        self.sym("{")
        pairs = []
        while not self.at_sym("}"):
            t = self.sym("(")
            i = self.integer()[0]
            self.sym(",")
            j = self.integer()[0]
            self.sym(")")
            pairs.append(((i, j), t))
            if not self.at_sym("}"):
                self.sym(",")
        self.sym("}")
        self.sym(";")
        d.body["pairs"] = pairs

    def _vectbundle(self, d: RawDecl):
        self.keyword("over")
        d.body["base"] = self.integer()
        self.keyword("field")
        d.body["q"] = self.integer()
        self.keyword("dims")
        d.body["dims"] = self.int_list()
        self.sym(";")

    def _components(self, d: RawDecl, matrix: bool):
        self.keyword("over")
        d.body["map"] = self.ident()
        self.keyword("from")
        d.body["source"] = self.ident()
        self.keyword("to")
        d.body["target"] = self.ident()
        d.body["at"] = []

        def at(kw):
            a, t = self.integer()
            self.sym(":")
            d.body["at"].append((a, t, self.matrix()[0] if matrix else self.int_list()[0]))

        self.block({"at": at})

    def _comorphism(self, d: RawDecl):
        self._components(d, matrix=False)

    def _linmap(self, d: RawDecl):
        self._components(d, matrix=True)


@dataclass(frozen=True)
class Declaration:
    kind: str
    name: str
    value: Any
    line: int
    column: int
    refs: tuple[str, ...] = ()


@dataclass
class Document:
    declarations: list[Declaration] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)

    def __getitem__(self, name: str):
        return self.get(name).value

    def get(self, name: str) -> Declaration:
        for d in self.declarations:
            if d.name == name:
                return d
        raise KeyError(name)

    def names(self, kind: str | None = None) -> list[str]:
        return [d.name for d in self.declarations if kind is None or d.kind == kind]

    def of_kind(self, kind: str) -> dict[str, Any]:
        return {d.name: d.value for d in self.declarations if d.kind == kind}

    def structure(self) -> dict[str, tuple]:
        return {d.name: (d.kind, d.refs, structure(d.value)) for d in self.declarations}

    def add(self, kind: str, name: str, value, refs=()) -> None:
        if name in self.names():
            raise KeyError(f"duplicate name {name!r}")
        self.declarations.append(Declaration(kind, name, value, 0, 0, tuple(refs)))


def structure(value) -> tuple:
    """A comparable rendering of a declaration value, names included."""
    if isinstance(value, FiniteCategory):
        return (
            "category",
            value.n_objects,
            value.arrows,
            value.identity,
            tuple(sorted(value.comp.items())),
            tuple(value.object_names or ()),
            tuple(value.arrow_names or ()),
        )
    if isinstance(value, CatFunctor):
        return ("functor", structure(value.source), structure(value.target), value.obj_map, value.arr_map)
    if isinstance(value, LinearBundleMap):
        return ("linmap", value.base_map, value.source, value.target, tuple((m.shape, tuple(m.ravel().tolist())) for m in value.matrices))
    if isinstance(value, GlueData):
        return (
            "glue",
            structure(value.fibration),
            structure(value.target),
            tuple((A, F.obj_map, F.arr_map) for A, F in sorted(value.fiber_functors.items())),
            tuple(sorted(value.cartesian_functor.items())),
        )
    return (type(value).__name__, value)


class _Resolver:
    def __init__(self, raws: list[RawDecl], validate: bool):
        self.raws = raws
        self.validate = validate
        self.diags: list[Diagnostic] = []
        self.values: dict[str, Any] = {}
        self.kinds: dict[str, str] = {}
        self.refs: dict[str, tuple[str, ...]] = {}
        self.by_name = {}
        for r in raws:
            if r.name in self.by_name:
                self.error(r.token, f"duplicate name {r.name!r}")
            else:
                self.by_name[r.name] = r

    def error(self, tok: Token, msg: str, suggestion=None):
        self.diags.append(Diagnostic("error", tok.line, tok.column, msg, suggestion))

    def warn(self, tok: Token, msg: str):
        self.diags.append(Diagnostic("warning", tok.line, tok.column, msg))

    def lookup(self, ref: Ref, kind: str):
        r = self.by_name.get(ref.name)
        if r is None or r.kind != kind:
            pool = [n for n, x in self.by_name.items() if x.kind == kind]
            close = difflib.get_close_matches(ref.name, pool, n=1)
            what = "unknown" if r is None else f"{r.kind}, not a"
            self.error(ref.token, f"{what} {kind} {ref.name!r}" if r is None else f"{ref.name!r} is a {what} {kind}", close[0] if close else None)
            return None
        if ref.name not in self.values:
            return None  # the referenced declaration failed; its own diagnostic suffices
        return self.values[ref.name]

    def run(self):
        for kind in KINDS:
            for r in self.raws:
                if r.kind == kind and self.by_name.get(r.name) is r:
                    try:
                        value = getattr(self, f"_{kind}")(r)
                    except FibcatError as e:
                        self.error(r.token, f"{kind} {r.name!r}: {e}")
                        value = None
                    except (ValueError, IndexError, KeyError) as e:
                        self.error(r.token, f"{kind} {r.name!r}: {e}")
                        value = None
                    if value is not None:
                        self.values[r.name] = value
                        self.kinds[r.name] = kind

    def _names_index(self, refs: list[Ref], pool: dict[str, int], what: str):
        out = []
        for ref in refs:
            if ref.name not in pool:
                close = difflib.get_close_matches(ref.name, list(pool), n=1)
                self.error(ref.token, f"unknown {what} {ref.name!r}", close[0] if close else None)
                out.append(None)
            else:
                out.append(pool[ref.name])
        return out

    def _category(self, r: RawDecl):
        objs = r.body["objects"]
        ok = True
        seen = {}
        for o in objs:
            if o.name in seen:
                self.error(o.token, f"duplicate object {o.name!r}")
                ok = False
            seen[o.name] = len(seen)
        arrow_names = {f"id_{o}": i for o, i in seen.items()}
        arrows = []
        for n, a, b in r.body["arrows"]:
            if n.name in arrow_names:
                self.error(n.token, f"duplicate arrow {n.name!r}")
                ok = False
                continue
            d, c = self._names_index([a, b], seen, "object")
            if d is None or c is None:
                ok = False
                continue
            arrow_names[n.name] = len(seen) + len(arrows)
            arrows.append((n.name, a.name, b.name))
        if not ok:
            return None
        dims = {n: (a, b) for n, a, b in arrows}
        for o in seen:
            dims[f"id_{o}"] = (o, o)
        comps = {}
        for f, g, h in r.body["compose"]:
            idx = self._names_index([f, g, h], arrow_names, "arrow")
            if None in idx:
                ok = False
                continue
            if dims[f.name][1] != dims[g.name][0]:
                self.error(f.token, f"{f.name}.{g.name} is not composable: {f.name} ends at {dims[f.name][1]}, {g.name} starts at {dims[g.name][0]}")
                ok = False
                continue
            if dims[h.name] != (dims[f.name][0], dims[g.name][1]):
                self.error(h.token, f"{h.name} has the wrong endpoints for {f.name}.{g.name}")
                ok = False
                continue
            if (f.name, g.name) in comps:
                self.error(f.token, f"composite {f.name}.{g.name} given twice")
                ok = False
                continue
            comps[(f.name, g.name)] = h.name
        for n, a, b in arrows:
            for m, a2, b2 in arrows:
                if b == a2 and (n, m) not in comps:
                    self.error(r.token, f"category {r.name!r}: missing composite {n}.{m}", f"compose {n}.{m} = ...")
                    ok = False
        if not ok:
            return None
        cat = FiniteCategory.from_names(list(seen), arrows, comps)
        if self.validate:
            rep = validate_category(cat)
            if not rep.ok:
                self.error(r.token, f"category {r.name!r}: {rep.first.message}")
                return None
        return cat

    def _functor(self, r: RawDecl):
        S = self.lookup(r.body["source"], "category")
        T = self.lookup(r.body["target"], "category")
        if S is None or T is None:
            return None
        self.refs[r.name] = (r.body["source"].name, r.body["target"].name)
        obj = self._assign(r, r.body["object"], S.object_names, T.object_names, "object")
        arr = self._assign(r, r.body["arrow"], S.arrow_names, T.arrow_names, "arrow")
        if obj is None or arr is None:
            return None
        for o in range(S.n_objects):
            if obj[o] is None:
                self.error(r.token, f"functor {r.name!r}: object {S.object_name(o)!r} is not mapped")
                return None
        for f in range(S.n_arrows):
            if arr[f] is None:
                if S.is_identity(f):
                    arr[f] = T.identity[obj[S.dom(f)]]
                else:
                    self.error(r.token, f"functor {r.name!r}: arrow {S.arrow_name(f)!r} is not mapped")
                    return None
        F = CatFunctor(S, T, tuple(obj), tuple(arr), r.name)
        if self.validate:
            rep = validate_functor(F)
            if not rep.ok:
                self.error(r.token, f"functor {r.name!r}: {rep.first.message}")
                return None
        return F

    def _assign(self, r, entries, src_names, tgt_names, what):
        src_ix = {n: i for i, n in enumerate(src_names)}
        tgt_ix = {n: i for i, n in enumerate(tgt_names)}
        out = [None] * len(src_names)
        ok = True
        for a, b, _ in entries:
            i, j = self._names_index([a], src_ix, what)[0], self._names_index([b], tgt_ix, what)[0]
            if i is None or j is None:
                ok = False
                continue
            if out[i] is not None:
                self.error(a.token, f"{what} {a.name!r} mapped twice")
                ok = False
                continue
            out[i] = j
        return out if ok else None

    def _finmap(self, r: RawDecl):
        (n, _), (m, _) = r.body["dom"], r.body["cod"]
        vals, tok = r.body["values"]
        return self._shape(tok, lambda: FinFunction(n, m, tuple(vals)))

    def _shape(self, tok, build):
        try:
            return build()
        except FibcatError as e:
            self.error(tok, str(e))
            return None

    def _family(self, r: RawDecl):
        (n, _), (fibers, tok) = r.body["base"], r.body["fibers"]
        if len(fibers) != n:
            self.error(tok, f"family over {n} points lists {len(fibers)} fibres")
            return None
        return self._shape(tok, lambda: FinFamilyBundle(tuple(fibers)))

    def _relation(self, r: RawDecl):
        n, _ = r.body["base"]
        pairs = set()
        for (i, j), t in r.body["pairs"]:
            if not (0 <= i < n and 0 <= j < n):
                self.error(t, f"pair {(i, j)} leaves the base of size {n}")
                return None
            pairs.add((i, j))
        missing = [b for b in range(n) if (b, b) not in pairs]
        if missing:
            self.warn(r.token, f"relation {r.name!r}: added reflexive pairs for {missing}")
        return NeighborhoodRelation.reflexive_closure(n, pairs)

    def _vectbundle(self, r: RawDecl):
        (n, _), (q, qt), (dims, dt) = r.body["base"], r.body["q"], r.body["dims"]
        if q not in FiniteField.SUPPORTED:
            self.error(qt, f"field order {q} is not supported; use one of {FiniteField.SUPPORTED}")
            return None
        if len(dims) != n:
            self.error(dt, f"bundle over {n} points lists {len(dims)} dimensions")
            return None
        return self._shape(dt, lambda: FinVectorBundle(q, tuple(dims)))

    def _component_map(self, r: RawDecl, src_kind: str):
        al = self.lookup(r.body["map"], "finmap")
        X = self.lookup(r.body["source"], src_kind)
        Y = self.lookup(r.body["target"], src_kind)
        if al is None or X is None or Y is None:
            return None
        self.refs[r.name] = (r.body["map"].name, r.body["source"].name, r.body["target"].name)
        comps: dict[int, Any] = {}
        for a, t, vals in r.body["at"]:
            if not 0 <= a < al.dom_size:
                self.error(t, f"component index {a} outside the domain of size {al.dom_size}")
                return None
            if a in comps:
                self.error(t, f"component {a} given twice")
                return None
            comps[a] = (vals, t)
        return al, X, Y, comps

    def _comorphism(self, r: RawDecl):
        got = self._component_map(r, "family")
        if got is None:
            return None
        al, X, Y, comps = got
        if (X.base_size, Y.base_size) != (al.dom_size, al.cod_size):
            self.error(r.token, f"comorphism {r.name!r}: families do not match the base map")
            return None
        out = []
        for a in range(al.dom_size):
            dom, cod = Y.fibers[al(a)], X.fibers[a]
            if a not in comps:
                if dom == 0:
                    out.append(FinFunction(0, cod, ()))
                    continue
                self.error(r.token, f"comorphism {r.name!r}: missing component at {a}")
                return None
            vals, t = comps[a]
            f = self._shape(t, lambda: FinFunction(dom, cod, tuple(vals)))
            if f is None:
                return None
            out.append(f)
        return FamilyComorphism(al, X, Y, tuple(out))

    def _linmap(self, r: RawDecl):
        got = self._component_map(r, "vectbundle")
        if got is None:
            return None
        al, X, Y, comps = got
        if (X.base_size, Y.base_size) != (al.dom_size, al.cod_size) or X.q != Y.q:
            self.error(r.token, f"linmap {r.name!r}: bundles do not match the base map")
            return None
        mats = []
        for a in range(al.dom_size):
            rows, cols = Y.dims[al(a)], X.dims[a]
            if a not in comps:
                if rows * cols == 0:
                    mats.append(np.zeros((rows, cols), dtype=int))
                    continue
                self.error(r.token, f"linmap {r.name!r}: missing component at {a}")
                return None
            vals, t = comps[a]
            M = np.array(vals, dtype=int).reshape(len(vals), -1) if vals and vals[0] else np.zeros((len(vals), 0), dtype=int)
            if len(vals) == 0:
                M = np.zeros((0, cols), dtype=int)
            if M.shape != (rows, cols) or any(len(v) != cols for v in vals):
                self.error(t, f"matrix at {a} should be {rows}x{cols}")
                return None
            if ((M < 0) | (M >= X.q)).any():
                self.error(t, f"matrix at {a} has entries outside GF({X.q})")
                return None
            mats.append(M)
        return LinearBundleMap(al, X, Y, tuple(mats))

    def _glue(self, r: RawDecl):
        pi = self.lookup(r.body["functor"], "functor")
        T = self.lookup(r.body["target"], "category")
        if pi is None or T is None:
            return None
        self.refs[r.name] = (r.body["functor"].name, r.body["target"].name)
        total = pi.source
        obj = self._assign(r, r.body["object"], total.object_names, T.object_names, "object")
        vert = self._assign(r, r.body["vertical"], total.arrow_names, T.arrow_names, "arrow")
        cart = self._assign(r, r.body["cartesian"], total.arrow_names, T.arrow_names, "arrow")
        if obj is None or vert is None or cart is None:
            return None
        for X in range(total.n_objects):
            if obj[X] is None:
                self.error(r.token, f"glue {r.name!r}: object {total.object_name(X)!r} is not mapped")
                return None
        for f in range(total.n_arrows):
            if total.is_identity(f):
                vert[f] = T.identity[obj[total.dom(f)]] if vert[f] is None else vert[f]
                cart[f] = T.identity[obj[total.dom(f)]] if cart[f] is None else cart[f]
        for ref, _, kw in r.body["vertical"]:
            f = total.arrow_names.index(ref.name)
            if not pi.is_vertical(f):
                self.error(ref.token, f"{ref.name!r} is not vertical")
                return None
        for ref, _, kw in r.body["cartesian"]:
            f = total.arrow_names.index(ref.name)
            if not is_cartesian(pi, f):
                self.error(ref.token, f"{ref.name!r} is not Cartesian")
                return None
        fibers = {}
        for A in range(pi.target.n_objects):
            fb = fiber(pi, A)
            for f in fb.arrows:
                if vert[f] is None:
                    self.error(r.token, f"glue {r.name!r}: vertical arrow {total.arrow_name(f)!r} is not mapped")
                    return None
            fibers[A] = CatFunctor(fb.category, T, tuple(obj[X] for X in fb.objects), tuple(vert[f] for f in fb.arrows))
        cartesian = {}
        for f in range(total.n_arrows):
            if is_cartesian(pi, f):
                if cart[f] is None:
                    self.error(r.token, f"glue {r.name!r}: Cartesian arrow {total.arrow_name(f)!r} is not mapped")
                    return None
                cartesian[f] = cart[f]
        return GlueData(pi, T, fibers, cartesian)


def parse_with_diagnostics(text: str, validate: bool = True) -> tuple[Document | None, list[Diagnostic]]:
    """Parse without raising; returns (document or None, all diagnostics)."""
    tokens, diags = tokenize(text)
    p = _Parser(tokens)
    raws = []
    while p.tok.kind != "eof":
        try:
            raws.append(p.declaration())
        except _Fail as f:
            diags.append(f.diag)
            start = p.i
            p.recover()
            if p.i == start:
                p.next()
    res = _Resolver(raws, validate)
    res.run()
    diags.extend(res.diags)
    diags.sort(key=lambda d: (d.line, d.column))
    if any(d.severity == "error" for d in diags):
        return None, diags
    doc = Document(
        [
            Declaration(r.kind, r.name, res.values[r.name], r.token.line, r.token.column, res.refs.get(r.name, ()))
            for r in raws
        ],
        [d for d in diags if d.severity == "warning"],
    )
    return doc, diags


def parse_document(text: str, validate: bool = True) -> Document:
    doc, diags = parse_with_diagnostics(text, validate)
    if doc is None:
        raise ParseError(diags)
    return doc


# Emission


def quote(name: str) -> str:
    return name if _IDENT.match(name) else f"`{name}`"


def _ints(xs) -> str:
    return "[" + ", ".join(str(int(x)) for x in xs) + "]"


def _arrow_label(C: FiniteCategory, f: int) -> str:
    """Identities are always written id_<object>, the name the parser gives them."""
    if C.is_identity(f):
        return quote("id_" + C.object_name(C.arrows[f][0]))
    return quote(C.arrow_name(f))


def emit_category(name: str, C: FiniteCategory) -> str:
    lines = [f"category {quote(name)} {{"]
    if C.n_objects:
        lines.append("  objects: " + ", ".join(quote(C.object_name(o)) for o in range(C.n_objects)) + ";")
    for f in range(C.n_arrows):
        if not C.is_identity(f):
            d, c = C.arrows[f]
            lines.append(f"  arrow {_arrow_label(C, f)}: {quote(C.object_name(d))} -> {quote(C.object_name(c))};")
    for (f, g), h in sorted(C.comp.items()):
        if not (C.is_identity(f) or C.is_identity(g)):
            lines.append(f"  compose {_arrow_label(C, f)}.{_arrow_label(C, g)} = {_arrow_label(C, h)};")
    lines.append("}")
    return "\n".join(lines)


def emit_functor(name: str, F: CatFunctor, source: str, target: str) -> str:
    S, T = F.source, F.target
    lines = [f"functor {quote(name)}: {quote(source)} -> {quote(target)} {{"]
    for o in range(S.n_objects):
        lines.append(f"  object {quote(S.object_name(o))} |-> {quote(T.object_name(F.obj_map[o]))};")
    for f in range(S.n_arrows):
        if not S.is_identity(f):
            lines.append(f"  arrow {_arrow_label(S, f)} |-> {_arrow_label(T, F.arr_map[f])};")
    lines.append("}")
    return "\n".join(lines)


def _emit_decl(d: Declaration, doc: Document) -> str:
    v, n = d.value, quote(d.name)
    if d.kind == "category":
        return emit_category(d.name, v)
    if d.kind == "functor":
        src, tgt = d.refs or (_name_of(doc, v.source), _name_of(doc, v.target))
        return emit_functor(d.name, v, src, tgt)
    if d.kind == "finmap":
        return f"finmap {n}: {v.dom_size} -> {v.cod_size} = {_ints(v.values)};"
    if d.kind == "family":
        return f"family {n} over {v.base_size} = {_ints(v.fibers)};"
    if d.kind == "relation":
        pairs = ", ".join(f"({i},{j})" for i, j in sorted(v.pairs))
        return f"relation {n} on {v.base_size} = {{{pairs}}};"
    if d.kind == "vectbundle":
        return f"vectbundle {n} over {v.base_size} field {v.q} dims {_ints(v.dims)};"
    if d.kind in ("comorphism", "linmap"):
        m, s, t = (quote(x) for x in d.refs)
        lines = [f"{d.kind} {n} over {m} from {s} to {t} {{"]
        for a, c in enumerate(v.components if d.kind == "comorphism" else v.matrices):
            body = _ints(c.values) if d.kind == "comorphism" else "[" + ", ".join(_ints(row) for row in c.tolist()) + "]"
            lines.append(f"  at {a}: {body};")
        lines.append("}")
        return "\n".join(lines)
    if d.kind == "glue":
        fn, tn = (quote(x) for x in d.refs)
        pi, T = v.fibration, v.target
        total = pi.source
        lines = [f"glue {n}: {fn} -> {tn} {{"]
        for X in range(total.n_objects):
            lines.append(f"  object {quote(total.object_name(X))} |-> {quote(T.object_name(v.object_value(X)))};")
        for f in range(total.n_arrows):
            if pi.is_vertical(f) and not total.is_identity(f):
                lines.append(f"  vertical {_arrow_label(total, f)} |-> {_arrow_label(T, v.vertical_value(f))};")
        for f in sorted(v.cartesian_functor):
            if not total.is_identity(f):
                lines.append(f"  cartesian {_arrow_label(total, f)} |-> {_arrow_label(T, v.cartesian_functor[f])};")
        lines.append("}")
        return "\n".join(lines)
    raise ValueError(f"cannot emit {d.kind}")


def _name_of(doc: Document, cat: FiniteCategory) -> str:
    for d in doc.declarations:
        if d.kind == "category" and structure(d.value) == structure(cat):
            return d.name
    raise KeyError("functor endpoint is not a declared category")


def emit_document(doc: Document) -> str:
    """Canonical text: declarations grouped by kind, then sorted by name."""
    order = {k: i for i, k in enumerate(KINDS)}
    decls = sorted(doc.declarations, key=lambda d: (order[d.kind], d.name))
    return "".join(_emit_decl(d, doc) + "\n" for d in decls)
