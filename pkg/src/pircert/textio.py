"""Fully parenthesised text formats for terms, dumps, hints and certificates.

Grammar (one form per node; names are written ``(display uid)``)::

    kind  ::= * | (kfun kind kind)
    type  ::= Integer | BBool | BUnit | (tyvar name) | (fun type type)
            | (all name kind type) | (tylam name kind type) | (tyapp type type)
    term  ::= (var name) | (lam name type term) | (app term term)
            | (tyabs name kind term) | (inst term type)
            | (let rec|nonrec (binding+) term)
            | (data name (params (name kind)*) (constrs (name type*)*) (match name) term)
            | (int N) | (con True) | (con False) | (con unit) | (builtin ID)
    binding ::= (bind strict|nonstrict name type term)

Printing is canonical: single spaces, no line breaks, so the SHA-256 of the
printed text identifies a term.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .proof import (
    Certificate,
    CertStep,
    Derivation,
    EnvKind,
    EnvSnapshot,
    PassHints,
    PassId,
    RuleId,
    TERM_NS,
    TYPE_NS,
)
from .syntax import (
    App,
    BoolLit,
    Builtin,
    BuiltinId,
    Constructor,
    Data,
    DataDecl,
    IntLit,
    KArrow,
    Kind,
    Lam,
    Let,
    Name,
    Recursivity,
    Star,
    Strictness,
    Term,
    TermBinding,
    TyAbs,
    TyApp,
    TyBuiltinBool,
    TyForall,
    TyFun,
    TyInst,
    TyInteger,
    TyLam,
    TyUnitBuiltin,
    TyVar,
    Type,
    UnitLit,
    Var,
)

INPUT_LABEL = "input"
PASS_LABELS = {p.value: p for p in PassId}
MAX_DEPTH = 4000


class FormatError(Exception):
    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class DumpDocument:
    pass_label: str
    term: Term


# ---------------------------------------------------------------------------
# Reading s-expressions


@dataclass
class Atom:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s()]+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_INT = re.compile(r"-?[0-9]+\Z")
_NAT = re.compile(r"[0-9]+\Z")


def read_sexprs(src: str) -> list:
    """Tokenise and group into nested lists; never recurses."""
    line, line_start = 1, 0
    stack: list[SList] = [SList([], 1, 1)]
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:  # pragma: no cover - the pattern matches any character
            raise FormatError(line, pos - line_start + 1, "unreadable input")
        tok = m.group()
        col = pos - line_start + 1
        if tok == "(":
            if len(stack) > MAX_DEPTH:
                raise FormatError(line, col, "nesting too deep")
            stack.append(SList([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise FormatError(line, col, "unbalanced ')'")
            done = stack.pop()
            stack[-1].items.append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].items.append(Atom(tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    if len(stack) != 1:
        open_ = stack[-1]
        raise FormatError(line, pos - line_start + 1, f"unclosed '(' opened at {open_.line}:{open_.col}")
    return stack[0].items


def _end_pos(src: str) -> tuple[int, int]:
    lines = src.split("\n")
    return len(lines), len(lines[-1]) + 1


def _where(x) -> tuple[int, int]:
    return x.line, x.col


def _fail(x, msg: str) -> FormatError:
    return FormatError(*_where(x), msg)


def _atom(x, what: str) -> str:
    if not isinstance(x, Atom):
        raise _fail(x, f"expected {what}")
    return x.text


def _list(x, what: str, head: str | None = None, size: int | None = None) -> list:
    if not isinstance(x, SList):
        raise _fail(x, f"expected {what}")
    items = x.items
    if head is not None and (not items or not isinstance(items[0], Atom) or items[0].text != head):
        raise _fail(x, f"expected ({head} ...)")
    if size is not None and len(items) != size:
        raise _fail(x, f"{what}: expected {size - (head is not None)} fields, got {len(items) - (head is not None)}")
    return items


def _head(x) -> str | None:
    if isinstance(x, SList) and x.items and isinstance(x.items[0], Atom):
        return x.items[0].text
    return None


# ---------------------------------------------------------------------------
# Decoding


def _name(x) -> Name:
    items = _list(x, "a name (display uid)", size=2)
    display = _atom(items[0], "a display name")
    uid = _atom(items[1], "a uid")
    if not _IDENT.match(display):
        raise _fail(items[0], f"bad display name {display!r}")
    if not _NAT.match(uid):
        raise _fail(items[1], f"bad uid {uid!r}")
    return Name(display, int(uid))


def _kind(x) -> Kind:
    if isinstance(x, Atom):
        if x.text == "*":
            return Star()
        raise _fail(x, f"unknown kind {x.text!r}")
    items = _list(x, "a kind", head="kfun", size=3)
    return KArrow(_kind(items[1]), _kind(items[2]))


_TYPE_ATOMS = {"Integer": TyInteger(), "BBool": TyBuiltinBool(), "BUnit": TyUnitBuiltin()}


def _type(x) -> Type:
    if isinstance(x, Atom):
        if x.text in _TYPE_ATOMS:
            return _TYPE_ATOMS[x.text]
        raise _fail(x, f"unknown type {x.text!r}")
    head = _head(x)
    if head == "tyvar":
        return TyVar(_name(_list(x, "tyvar", size=2)[1]))
    if head == "fun":
        items = _list(x, "fun", size=3)
        return TyFun(_type(items[1]), _type(items[2]))
    if head == "tyapp":
        items = _list(x, "tyapp", size=3)
        return TyApp(_type(items[1]), _type(items[2]))
    if head in ("all", "tylam"):
        items = _list(x, head, size=4)
        cls = TyForall if head == "all" else TyLam
        return cls(_name(items[1]), _kind(items[2]), _type(items[3]))
    raise _fail(x, "expected a type")


_STRICTNESS = {s.value: s for s in Strictness}
_RECURSIVITY = {r.value: r for r in Recursivity}
_BUILTINS = {b.value: b for b in BuiltinId}


def _binding(x) -> TermBinding:
    items = _list(x, "a binding", head="bind", size=5)
    s = _atom(items[1], "strictness")
    if s not in _STRICTNESS:
        raise _fail(items[1], f"unknown strictness {s!r}")
    return TermBinding(_STRICTNESS[s], _name(items[2]), _type(items[3]), _term(items[4]))


def _decl(items: list) -> DataDecl:
    tyname = _name(items[1])
    params = []
    for p in _list(items[2], "params", head="params")[1:]:
        pi = _list(p, "a parameter", size=2)
        params.append((_name(pi[0]), _kind(pi[1])))
    constrs = []
    for c in _list(items[3], "constrs", head="constrs")[1:]:
        ci = _list(c, "a constructor")
        if not ci:
            raise _fail(c, "empty constructor")
        constrs.append(Constructor(_name(ci[0]), tuple(_type(t) for t in ci[1:])))
    match_name = _name(_list(items[4], "match", head="match", size=2)[1])
    return DataDecl(tyname, tuple(params), tuple(constrs), match_name)


def _term(x) -> Term:
    head = _head(x)
    if head is None:
        raise _fail(x, "expected a term")
    items = x.items
    if head == "var":
        return Var(_name(_list(x, "var", size=2)[1]))
    if head == "lam":
        _list(x, "lam", size=4)
        return Lam(_name(items[1]), _type(items[2]), _term(items[3]))
    if head == "app":
        _list(x, "app", size=3)
        return App(_term(items[1]), _term(items[2]))
    if head == "tyabs":
        _list(x, "tyabs", size=4)
        return TyAbs(_name(items[1]), _kind(items[2]), _term(items[3]))
    if head == "inst":
        _list(x, "inst", size=3)
        return TyInst(_term(items[1]), _type(items[2]))
    if head == "let":
        _list(x, "let", size=4)
        r = _atom(items[1], "rec or nonrec")
        if r not in _RECURSIVITY:
            raise _fail(items[1], f"unknown recursivity {r!r}")
        bs = tuple(_binding(b) for b in _list(items[2], "a binding group"))
        if not bs:
            raise _fail(items[2], "empty binding group")
        if _RECURSIVITY[r] is Recursivity.REC and len(bs) != 1:
            raise _fail(items[2], "recursive let must have exactly one binding")
        return Let(_RECURSIVITY[r], bs, _term(items[3]))
    if head == "data":
        _list(x, "data", size=6)
        return Data(_decl(items), _term(items[5]))
    if head == "int":
        v = _atom(_list(x, "int", size=2)[1], "an integer")
        if not _INT.match(v):
            raise _fail(items[1], f"bad integer {v!r}")
        return IntLit(int(v))
    if head == "con":
        v = _atom(_list(x, "con", size=2)[1], "a constant")
        if v == "True":
            return BoolLit(True)
        if v == "False":
            return BoolLit(False)
        if v == "unit":
            return UnitLit()
        raise _fail(items[1], f"unknown constant {v!r}")
    if head == "builtin":
        v = _atom(_list(x, "builtin", size=2)[1], "a builtin")
        if v not in _BUILTINS:
            raise _fail(items[1], f"unknown builtin {v!r}")
        return Builtin(_BUILTINS[v])
    raise _fail(x, f"unknown term form {head!r}")


def _single(src: str | bytes, what: str):
    if isinstance(src, bytes):
        try:
            src = src.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(1, e.start + 1, "input is not valid UTF-8") from None
    forms = read_sexprs(src)
    if len(forms) != 1:
        line, col = _where(forms[1]) if forms else _end_pos(src)
        raise FormatError(line, col, f"expected exactly one {what}, found {len(forms)}")
    return forms[0]


def _guard(fn, src: str | bytes, what: str):
    form = _single(src, what)
    try:
        return fn(form)
    except RecursionError:
        raise _fail(form, "nesting too deep") from None


def parse_term(src: str | bytes) -> Term:
    return _guard(_term, src, "term")


def parse_terms(src: str) -> list[Term]:
    """Zero or more whitespace-separated terms."""
    out = []
    for form in read_sexprs(src):
        try:
            out.append(_term(form))
        except RecursionError:
            raise _fail(form, "nesting too deep") from None
    return out


def parse_program(src: str | bytes) -> Term:
    """A bare term or the term of a dump document."""
    form = _single(src, "program")
    if _head(form) == "dump":
        return parse_dump(src).term
    return _guard(_term, src, "term")


def parse_type(src: str | bytes) -> Type:
    return _guard(_type, src, "type")


def parse_dump(src: str | bytes) -> DumpDocument:
    def dump(x) -> DumpDocument:
        items = _list(x, "a dump", head="dump", size=3)
        label = _atom(items[1], "a pass label")
        if label != INPUT_LABEL and label not in PASS_LABELS:
            raise _fail(items[1], f"unknown pass label {label!r}")
        return DumpDocument(label, _term(items[2]))

    return _guard(dump, src, "dump")


def parse_hints(src: str | bytes) -> PassHints:
    def hints(x) -> PassHints:
        items = _list(x, "hints", head="hints")
        if len(items) < 2 or _atom(items[1], "a pass label") != PassId.INLINE.value:
            raise _fail(x, "expected (hints inline name...)")
        return PassHints(tuple(_name(n) for n in items[2:]))

    return _guard(hints, src, "hints form")


# ---------------------------------------------------------------------------
# Printing


def _pn(n: Name) -> str:
    return f"({n.display} {n.uid})"


def print_kind(k: Kind) -> str:
    if isinstance(k, Star):
        return "*"
    return f"(kfun {print_kind(k.domain)} {print_kind(k.codomain)})"


def print_type(ty: Type) -> str:
    out: list[str] = []
    _emit_type(ty, out)
    return "".join(out)


def _emit_type(ty: Type, out: list[str]) -> None:
    match ty:
        case TyVar(n):
            out.append(f"(tyvar {_pn(n)})")
        case TyFun(a, b):
            out.append("(fun ")
            _emit_type(a, out)
            out.append(" ")
            _emit_type(b, out)
            out.append(")")
        case TyApp(a, b):
            out.append("(tyapp ")
            _emit_type(a, out)
            out.append(" ")
            _emit_type(b, out)
            out.append(")")
        case TyForall(a, k, body):
            out.append(f"(all {_pn(a)} {print_kind(k)} ")
            _emit_type(body, out)
            out.append(")")
        case TyLam(a, k, body):
            out.append(f"(tylam {_pn(a)} {print_kind(k)} ")
            _emit_type(body, out)
            out.append(")")
        case TyInteger():
            out.append("Integer")
        case TyBuiltinBool():
            out.append("BBool")
        case TyUnitBuiltin():
            out.append("BUnit")
        case _:
            raise TypeError(f"not a type: {ty!r}")


def _emit_term(t: Term, out: list[str]) -> None:
    match t:
        case Var(n):
            out.append(f"(var {_pn(n)})")
        case Lam(x, ty, body):
            out.append(f"(lam {_pn(x)} ")
            _emit_type(ty, out)
            out.append(" ")
            _emit_term(body, out)
            out.append(")")
        case App(f, a):
            out.append("(app ")
            _emit_term(f, out)
            out.append(" ")
            _emit_term(a, out)
            out.append(")")
        case TyAbs(a, k, body):
            out.append(f"(tyabs {_pn(a)} {print_kind(k)} ")
            _emit_term(body, out)
            out.append(")")
        case TyInst(s, ty):
            out.append("(inst ")
            _emit_term(s, out)
            out.append(" ")
            _emit_type(ty, out)
            out.append(")")
        case Let(rec, bs, body):
            out.append(f"(let {rec.value} (")
            for i, b in enumerate(bs):
                if i:
                    out.append(" ")
                out.append(f"(bind {b.strictness.value} {_pn(b.name)} ")
                _emit_type(b.annotation, out)
                out.append(" ")
                _emit_term(b.rhs, out)
                out.append(")")
            out.append(") ")
            _emit_term(body, out)
            out.append(")")
        case Data(decl, body):
            out.append(f"(data {_pn(decl.tyname)} (params")
            for p, k in decl.params:
                out.append(f" ({_pn(p)} {print_kind(k)})")
            out.append(") (constrs")
            for c in decl.constructors:
                out.append(f" ({_pn(c.name)}")
                for ty in c.args:
                    out.append(" ")
                    _emit_type(ty, out)
                out.append(")")
            out.append(f") (match {_pn(decl.match_name)}) ")
            _emit_term(body, out)
            out.append(")")
        case IntLit(v):
            out.append(f"(int {v})")
        case BoolLit(v):
            out.append(f"(con {'True' if v else 'False'})")
        case UnitLit():
            out.append("(con unit)")
        case Builtin(b):
            out.append(f"(builtin {b.value})")
        case _:
            raise TypeError(f"not a term: {t!r}")


def print_term(t: Term) -> str:
    out: list[str] = []
    _emit_term(t, out)
    return "".join(out)


def term_digest(t: Term) -> str:
    return hashlib.sha256(print_term(t).encode("utf-8")).hexdigest()


def print_dump(doc: DumpDocument) -> str:
    return f"(dump {doc.pass_label} {print_term(doc.term)})\n"


def print_hints(h: PassHints) -> str:
    names = "".join(" " + _pn(n) for n in h.eliminated)
    return f"(hints {PassId.INLINE.value}{names})\n"


# ---------------------------------------------------------------------------
# Derivations and certificates
#
#   derivation ::= (RULE-ID env source target [(witness term)] derivation*)
#   env        ::= (env) | (env inline (name term)*) | (env rename (term|type name name)*)
#                | (env strictness (name strict|nonstrict)*)
#   certificate ::= (certificate step*)
#   step        ::= (step PASS SOURCE-HASH TARGET-HASH (witnesses term*) derivation)

_RULES = {r.value: r for r in RuleId}
_HEX = re.compile(r"[0-9a-f]{64}\Z")


def _emit_env(env: EnvSnapshot, out: list[str]) -> None:
    if env.kind is EnvKind.EMPTY:
        out.append("(env)")
        return
    out.append(f"(env {env.kind.value}")
    for e in env.entries:
        if env.kind is EnvKind.INLINE:
            out.append(f" ({_pn(e[0])} ")
            _emit_term(e[1], out)
            out.append(")")
        elif env.kind is EnvKind.RENAME:
            out.append(f" ({e[0]} {_pn(e[1])} {_pn(e[2])})")
        else:
            out.append(f" ({_pn(e[0])} {e[1].value})")
    out.append(")")


def _emit_derivation(d: Derivation, out: list[str]) -> None:
    out.append(f"({d.rule.value} ")
    _emit_env(d.env, out)
    out.append(" ")
    _emit_term(d.source, out)
    out.append(" ")
    _emit_term(d.target, out)
    if d.witness is not None:
        out.append(" (witness ")
        _emit_term(d.witness, out)
        out.append(")")
    for p in d.premises:
        out.append(" ")
        _emit_derivation(p, out)
    out.append(")")


def print_derivation(d: Derivation) -> str:
    out: list[str] = []
    _emit_derivation(d, out)
    return "".join(out)


def _env(x) -> EnvSnapshot:
    items = _list(x, "an environment", head="env")
    if len(items) == 1:
        return EnvSnapshot()
    kind_text = _atom(items[1], "an environment kind")
    try:
        kind = EnvKind(kind_text)
    except ValueError:
        raise _fail(items[1], f"unknown environment kind {kind_text!r}") from None
    entries = []
    for e in items[2:]:
        if kind is EnvKind.INLINE:
            ei = _list(e, "an inline entry", size=2)
            entries.append((_name(ei[0]), _term(ei[1])))
        elif kind is EnvKind.RENAME:
            ei = _list(e, "a rename entry", size=3)
            ns = _atom(ei[0], "a namespace")
            if ns not in (TERM_NS, TYPE_NS):
                raise _fail(ei[0], f"unknown namespace {ns!r}")
            entries.append((ns, _name(ei[1]), _name(ei[2])))
        elif kind is EnvKind.STRICTNESS:
            ei = _list(e, "a strictness entry", size=2)
            s = _atom(ei[1], "strictness")
            if s not in _STRICTNESS:
                raise _fail(ei[1], f"unknown strictness {s!r}")
            entries.append((_name(ei[0]), _STRICTNESS[s]))
        else:
            raise _fail(e, "the empty environment has no entries")
    return EnvSnapshot(kind, tuple(entries))


def _derivation(x) -> Derivation:
    items = _list(x, "a derivation")
    if len(items) < 4:
        raise _fail(x, "a derivation needs a rule, an environment, a source and a target")
    rule_text = _atom(items[0], "a rule id")
    if rule_text not in _RULES:
        raise _fail(items[0], f"unknown rule {rule_text!r}")
    env = _env(items[1])
    source, target = _term(items[2]), _term(items[3])
    rest = items[4:]
    witness = None
    if rest and _head(rest[0]) == "witness":
        witness = _term(_list(rest[0], "witness", size=2)[1])
        rest = rest[1:]
    return Derivation(_RULES[rule_text], env, source, target, tuple(_derivation(p) for p in rest), witness)


def parse_derivation(src: str | bytes) -> Derivation:
    return _guard(_derivation, src, "derivation")


def _step(x) -> CertStep:
    items = _list(x, "a certificate step", head="step", size=6)
    label = _atom(items[1], "a pass label")
    if label not in PASS_LABELS:
        raise _fail(items[1], f"unknown pass label {label!r}")
    hashes = []
    for h in items[2:4]:
        text = _atom(h, "a hex digest")
        if not _HEX.match(text):
            raise _fail(h, f"bad digest {text!r}")
        hashes.append(text)
    witnesses = tuple(_term(w) for w in _list(items[4], "witnesses", head="witnesses")[1:])
    d = _derivation(items[5])
    return CertStep(PASS_LABELS[label], d.source, d.target, d, witnesses, hashes[0], hashes[1])


def _certificate(x) -> Certificate:
    items = _list(x, "a certificate", head="certificate")
    return Certificate(tuple(_step(s) for s in items[1:]))


def parse_certificate(src: str | bytes) -> Certificate:
    return _guard(_certificate, src, "certificate")


def print_certificate(c: Certificate) -> str:
    out = ["(certificate"]
    for s in c.steps:
        out.append(f"\n  (step {s.pass_id.value} {term_digest(s.source)} {term_digest(s.target)} (witnesses")
        for w in s.witnesses:
            out.append(" ")
            _emit_term(w, out)
        out.append(")\n    ")
        _emit_derivation(s.derivation, out)
        out.append(")")
    out.append(")\n")
    return "".join(out)
