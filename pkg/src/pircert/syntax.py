"""Abstract syntax of simplified PIR and the syntactic utilities every pass shares.

Names are (display, uid) pairs; only the uid takes part in equality. Terms and
types are immutable dataclasses, so structural ``==`` compares uid-for-uid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


@dataclass(frozen=True)
class Name:
    display: str = field(compare=False)
    uid: int

    def __repr__(self) -> str:
        return f"{self.display}_{self.uid}"


# ---------------------------------------------------------------------------
# Kinds and types


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class KArrow:
    domain: Kind
    codomain: Kind


Kind = Union[Star, KArrow]


@dataclass(frozen=True)
class TyVar:
    name: Name


@dataclass(frozen=True)
class TyFun:
    domain: Type
    codomain: Type


@dataclass(frozen=True)
class TyForall:
    binder: Name
    kind: Kind
    body: Type


@dataclass(frozen=True)
class TyLam:
    binder: Name
    kind: Kind
    body: Type


@dataclass(frozen=True)
class TyApp:
    fn: Type
    arg: Type


@dataclass(frozen=True)
class TyInteger:
    pass


@dataclass(frozen=True)
class TyBuiltinBool:
    pass


@dataclass(frozen=True)
class TyUnitBuiltin:
    pass


Type = Union[TyVar, TyFun, TyForall, TyLam, TyApp, TyInteger, TyBuiltinBool, TyUnitBuiltin]


# ---------------------------------------------------------------------------
# Terms


class Strictness(enum.Enum):
    STRICT = "strict"
    NONSTRICT = "nonstrict"


class Recursivity(enum.Enum):
    REC = "rec"
    NONREC = "nonrec"


class BuiltinId(enum.Enum):
    ADD_INTEGER = "addInteger"
    SUBTRACT_INTEGER = "subtractInteger"
    MULTIPLY_INTEGER = "multiplyInteger"
    LESS_THAN_EQ_INTEGER = "lessThanEqInteger"
    GREATER_THAN_EQ_INTEGER = "greaterThanEqInteger"
    EQUALS_INTEGER = "equalsInteger"
    IF_THEN_ELSE = "ifThenElse"
    FIX = "fix"

    @property
    def arity(self) -> int:
        """Number of term arguments before the builtin reduces."""
        if self is BuiltinId.IF_THEN_ELSE:
            return 3
        return 2


@dataclass(frozen=True)
class Var:
    name: Name


@dataclass(frozen=True)
class Lam:
    binder: Name
    annotation: Type
    body: Term


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True)
class TyAbs:
    binder: Name
    kind: Kind
    body: Term


@dataclass(frozen=True)
class TyInst:
    term: Term
    type: Type


@dataclass(frozen=True)
class TermBinding:
    strictness: Strictness
    name: Name
    annotation: Type
    rhs: Term


@dataclass(frozen=True)
class Constructor:
    name: Name
    args: tuple[Type, ...]


@dataclass(frozen=True)
class DataDecl:
    tyname: Name
    params: tuple[tuple[Name, Kind], ...]
    constructors: tuple[Constructor, ...]
    match_name: Name


@dataclass(frozen=True)
class Let:
    rec: Recursivity
    bindings: tuple[TermBinding, ...]
    body: Term


@dataclass(frozen=True)
class Data:
    decl: DataDecl
    body: Term


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class UnitLit:
    pass


@dataclass(frozen=True)
class Builtin:
    id: BuiltinId


Term = Union[Var, Lam, App, TyAbs, TyInst, Let, Data, IntLit, BoolLit, UnitLit, Builtin]

LEAVES = (Var, IntLit, BoolLit, UnitLit, Builtin)
CONSTANTS = (IntLit, BoolLit, UnitLit, Builtin)


class IllFormed(ValueError):
    """A term violates a structural invariant (e.g. a multi-binding rec let)."""


# ---------------------------------------------------------------------------
# Small constructors used throughout


def apps(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def arrows(*tys: Type) -> Type:
    """Right-nested function type ``t1 -> t2 -> ... -> tn``."""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = TyFun(t, out)
    return out


def kind_of_params(params: Iterable[tuple[Name, Kind]]) -> Kind:
    out: Kind = Star()
    for _, k in reversed(tuple(params)):
        out = KArrow(k, out)
    return out


def let_binders(let: Let) -> tuple[Name, ...]:
    return tuple(b.name for b in let.bindings)


def data_term_binders(decl: DataDecl) -> tuple[Name, ...]:
    return tuple(c.name for c in decl.constructors) + (decl.match_name,)


# ---------------------------------------------------------------------------
# Children and paths


def children(t: Term) -> tuple[Term, ...]:
    """Immediate term children in a fixed order (rhs's before body for lets)."""
    match t:
        case Lam(body=b) | TyAbs(body=b) | Data(body=b):
            return (b,)
        case App(fn, arg):
            return (fn, arg)
        case TyInst(term=s):
            return (s,)
        case Let(bindings=bs, body=b):
            return tuple(x.rhs for x in bs) + (b,)
    return ()


def with_children(t: Term, new: tuple[Term, ...]) -> Term:
    match t:
        case Lam(x, ty, _):
            return Lam(x, ty, new[0])
        case TyAbs(a, k, _):
            return TyAbs(a, k, new[0])
        case Data(decl, _):
            return Data(decl, new[0])
        case App():
            return App(new[0], new[1])
        case TyInst(_, ty):
            return TyInst(new[0], ty)
        case Let(rec, bs, _):
            nb = tuple(TermBinding(b.strictness, b.name, b.annotation, r) for b, r in zip(bs, new))
            return Let(rec, nb, new[-1])
    return t


Path = tuple[int, ...]


def subterm(t: Term, path: Path) -> Term:
    for i in path:
        cs = children(t)
        if not 0 <= i < len(cs):
            raise IndexError(f"path {path} leaves the term")
        t = cs[i]
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    cs = list(children(t))
    i = path[0]
    if not 0 <= i < len(cs):
        raise IndexError(f"path {path} leaves the term")
    cs[i] = replace_at(cs[i], path[1:], new)
    return with_children(t, tuple(cs))


def positions(t: Term, prefix: Path = ()) -> Iterator[tuple[Path, Term]]:
    """Pre-order enumeration of (path, subterm)."""
    stack = [(prefix, t)]
    while stack:
        p, s = stack.pop()
        yield p, s
        cs = children(s)
        for i in range(len(cs) - 1, -1, -1):
            stack.append((p + (i,), cs[i]))


def term_size(t: Term) -> int:
    return sum(1 for _ in positions(t))


# ---------------------------------------------------------------------------
# Free variables


def free_type_vars_of_type(ty: Type) -> frozenset[Name]:
    match ty:
        case TyVar(n):
            return frozenset((n,))
        case TyFun(a, b) | TyApp(a, b):
            return free_type_vars_of_type(a) | free_type_vars_of_type(b)
        case TyForall(a, _, body) | TyLam(a, _, body):
            return free_type_vars_of_type(body) - {a}
    return frozenset()


def free_vars(t: Term) -> frozenset[Name]:
    """Term variables with a free occurrence in ``t``."""
    match t:
        case Var(n):
            return frozenset((n,))
        case Lam(x, _, body):
            return free_vars(body) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case TyAbs(body=body) | TyInst(term=body):
            return free_vars(body)
        case Let(Recursivity.REC, bs, body):
            out = free_vars(body)
            for b in bs:
                out |= free_vars(b.rhs)
            return out - set(let_binders(t))
        case Let(_, bs, body):
            out = free_vars(body) - set(let_binders(t))
            bound: set[Name] = set()
            for b in bs:
                out |= free_vars(b.rhs) - bound
                bound.add(b.name)
            return out
        case Data(decl, body):
            return free_vars(body) - set(data_term_binders(decl))
    return frozenset()


def free_type_vars(t: Term) -> frozenset[Name]:
    """Type variables with a free occurrence anywhere in ``t`` (annotations included)."""
    match t:
        case Lam(_, ty, body):
            return free_type_vars_of_type(ty) | free_type_vars(body)
        case App(f, a):
            return free_type_vars(f) | free_type_vars(a)
        case TyAbs(a, _, body):
            return free_type_vars(body) - {a}
        case TyInst(s, ty):
            return free_type_vars(s) | free_type_vars_of_type(ty)
        case Let(_, bs, body):
            out = free_type_vars(body)
            for b in bs:
                out |= free_type_vars_of_type(b.annotation) | free_type_vars(b.rhs)
            return out
        case Data(decl, body):
            inner: frozenset[Name] = frozenset()
            for c in decl.constructors:
                for ty in c.args:
                    inner |= free_type_vars_of_type(ty)
            inner -= {p for p, _ in decl.params}
            return (inner | free_type_vars(body)) - {decl.tyname}
    return frozenset()


# ---------------------------------------------------------------------------
# Names in use


def _type_uids(ty: Type, out: set[int]) -> None:
    match ty:
        case TyVar(n):
            out.add(n.uid)
        case TyFun(a, b) | TyApp(a, b):
            _type_uids(a, out)
            _type_uids(b, out)
        case TyForall(a, _, body) | TyLam(a, _, body):
            out.add(a.uid)
            _type_uids(body, out)


def all_uids(t: Term) -> set[int]:
    """Every uid mentioned anywhere in ``t``, binders and occurrences, both namespaces."""
    out: set[int] = set()
    for _, s in positions(t):
        match s:
            case Var(n):
                out.add(n.uid)
            case Lam(x, ty, _):
                out.add(x.uid)
                _type_uids(ty, out)
            case TyAbs(a, _, _):
                out.add(a.uid)
            case TyInst(_, ty):
                _type_uids(ty, out)
            case Let(_, bs, _):
                for b in bs:
                    out.add(b.name.uid)
                    _type_uids(b.annotation, out)
            case Data(decl, _):
                out.add(decl.tyname.uid)
                out.add(decl.match_name.uid)
                for p, _ in decl.params:
                    out.add(p.uid)
                for c in decl.constructors:
                    out.add(c.name.uid)
                    for ty in c.args:
                        _type_uids(ty, out)
    return out


def _type_binders(ty: Type, out: list[Name]) -> None:
    match ty:
        case TyFun(a, b) | TyApp(a, b):
            _type_binders(a, out)
            _type_binders(b, out)
        case TyForall(a, _, body) | TyLam(a, _, body):
            out.append(a)
            _type_binders(body, out)


def binding_sites(t: Term, inside_types: bool = True) -> list[Name]:
    """All binder occurrences, with repetition.

    ``inside_types=False`` skips forall/type-lambda binders nested in types.
    """
    out: list[Name] = []
    tb = _type_binders if inside_types else (lambda ty, acc: None)
    for _, s in positions(t):
        match s:
            case Lam(x, ty, _):
                out.append(x)
                tb(ty, out)
            case TyAbs(a, _, _):
                out.append(a)
            case TyInst(_, ty):
                tb(ty, out)
            case Let(_, bs, _):
                for b in bs:
                    out.append(b.name)
                    tb(b.annotation, out)
            case Data(decl, _):
                out.append(decl.tyname)
                out.extend(p for p, _ in decl.params)
                for c in decl.constructors:
                    out.append(c.name)
                    for ty in c.args:
                        tb(ty, out)
                out.append(decl.match_name)
    return out


def globally_unique(t: Term) -> bool:
    """No uid bound twice at term level, and no bound uid also occurring free.

    Binders inside types are local to the type and may repeat (types get copied
    into annotations by several passes).
    """
    seen: set[int] = set()
    for n in binding_sites(t, inside_types=False):
        if n.uid in seen:
            return False
        seen.add(n.uid)
    free = {n.uid for n in free_vars(t)} | {n.uid for n in free_type_vars(t)}
    return not (seen & free)


def fresh_name(avoid: Iterable[Name], display: str) -> Name:
    """A name whose uid is one more than the largest uid in ``avoid``."""
    uids = [n.uid for n in avoid]
    return Name(display, max(uids) + 1 if uids else 0)


class NameSupply:
    """Monotone source of fresh uids above everything already in a term."""

    def __init__(self, *terms: Term, start: int = 0) -> None:
        top = start - 1
        for t in terms:
            uids = all_uids(t)
            if uids:
                top = max(top, max(uids))
        self._next = top + 1

    def fresh(self, display: str) -> Name:
        n = Name(display, self._next)
        self._next += 1
        return n


# ---------------------------------------------------------------------------
# Scope checking


def _unbound_in_type(ty: Type, tyenv: frozenset[Name], out: list[Name]) -> None:
    match ty:
        case TyVar(n):
            if n not in tyenv:
                out.append(n)
        case TyFun(a, b) | TyApp(a, b):
            _unbound_in_type(a, tyenv, out)
            _unbound_in_type(b, tyenv, out)
        case TyForall(a, _, body) | TyLam(a, _, body):
            _unbound_in_type(body, tyenv | {a}, out)


def unbound_names(t: Term) -> list[Name]:
    """Variable occurrences (term or type) with no enclosing binder, in pre-order."""
    out: list[Name] = []

    def go(s: Term, env: frozenset[Name], tyenv: frozenset[Name]) -> None:
        match s:
            case Var(n):
                if n not in env:
                    out.append(n)
            case Lam(x, ty, body):
                _unbound_in_type(ty, tyenv, out)
                go(body, env | {x}, tyenv)
            case App(f, a):
                go(f, env, tyenv)
                go(a, env, tyenv)
            case TyAbs(a, _, body):
                go(body, env, tyenv | {a})
            case TyInst(s1, ty):
                go(s1, env, tyenv)
                _unbound_in_type(ty, tyenv, out)
            case Let(rec, bs, body):
                if rec is Recursivity.REC:
                    inner = env | set(let_binders(s))
                    for b in bs:
                        _unbound_in_type(b.annotation, tyenv, out)
                        go(b.rhs, inner, tyenv)
                    go(body, inner, tyenv)
                else:
                    cur = env
                    for b in bs:
                        _unbound_in_type(b.annotation, tyenv, out)
                        go(b.rhs, cur, tyenv)
                        cur = cur | {b.name}
                    go(body, cur, tyenv)
            case Data(decl, body):
                inner_ty = tyenv | {decl.tyname}
                params = inner_ty | {p for p, _ in decl.params}
                for c in decl.constructors:
                    for ty in c.args:
                        _unbound_in_type(ty, params, out)
                go(body, env | set(data_term_binders(decl)), inner_ty)

    go(t, frozenset(), frozenset())
    return out


def check_well_formed(t: Term) -> None:
    """Raise IllFormed when a structural invariant of the syntax is violated."""
    for _, s in positions(t):
        match s:
            case Let(rec, bs, _):
                if not bs:
                    raise IllFormed("let with an empty binding group")
                if rec is Recursivity.REC and len(bs) != 1:
                    raise IllFormed("recursive let must have exactly one binding")
            case Data(decl, _):
                names = [c.name.uid for c in decl.constructors] + [decl.match_name.uid]
                if len(set(names)) != len(names):
                    raise IllFormed(f"datatype {decl.tyname!r}: constructor and match names clash")


# ---------------------------------------------------------------------------
# Alpha-equivalence


class _Scope:
    """Binder levels for one side of an alpha comparison, split by namespace."""

    __slots__ = ("terms", "types")

    def __init__(self, terms: dict[int, int] | None = None, types: dict[int, int] | None = None):
        self.terms = terms or {}
        self.types = types or {}

    def bind_term(self, n: Name, level: int) -> _Scope:
        d = dict(self.terms)
        d[n.uid] = level
        return _Scope(d, self.types)

    def bind_type(self, n: Name, level: int) -> _Scope:
        d = dict(self.types)
        d[n.uid] = level
        return _Scope(self.terms, d)


def _same_var(a: Name, b: Name, sa: dict[int, int], sb: dict[int, int]) -> bool:
    la, lb = sa.get(a.uid), sb.get(b.uid)
    if la is None and lb is None:
        return a.uid == b.uid
    return la == lb


def _kind_eq(a: Kind, b: Kind) -> bool:
    return a == b


class _Alpha:
    def __init__(self) -> None:
        self.level = 0

    def next(self) -> int:
        self.level += 1
        return self.level

    def ty(self, a: Type, b: Type, sa: _Scope, sb: _Scope) -> bool:
        match a, b:
            case TyVar(x), TyVar(y):
                return _same_var(x, y, sa.types, sb.types)
            case TyFun(a1, a2), TyFun(b1, b2):
                return self.ty(a1, b1, sa, sb) and self.ty(a2, b2, sa, sb)
            case TyApp(a1, a2), TyApp(b1, b2):
                return self.ty(a1, b1, sa, sb) and self.ty(a2, b2, sa, sb)
            case (TyForall(x, k1, body1), TyForall(y, k2, body2)) | (
                TyLam(x, k1, body1),
                TyLam(y, k2, body2),
            ):
                if not _kind_eq(k1, k2):
                    return False
                lv = self.next()
                return self.ty(body1, body2, sa.bind_type(x, lv), sb.bind_type(y, lv))
            case (TyInteger(), TyInteger()) | (TyBuiltinBool(), TyBuiltinBool()) | (
                TyUnitBuiltin(),
                TyUnitBuiltin(),
            ):
                return True
        return False

    def term(self, a: Term, b: Term, sa: _Scope, sb: _Scope) -> bool:
        match a, b:
            case Var(x), Var(y):
                return _same_var(x, y, sa.terms, sb.terms)
            case Lam(x, t1, body1), Lam(y, t2, body2):
                if not self.ty(t1, t2, sa, sb):
                    return False
                lv = self.next()
                return self.term(body1, body2, sa.bind_term(x, lv), sb.bind_term(y, lv))
            case App(f1, a1), App(f2, a2):
                return self.term(f1, f2, sa, sb) and self.term(a1, a2, sa, sb)
            case TyAbs(x, k1, body1), TyAbs(y, k2, body2):
                if not _kind_eq(k1, k2):
                    return False
                lv = self.next()
                return self.term(body1, body2, sa.bind_type(x, lv), sb.bind_type(y, lv))
            case TyInst(s1, t1), TyInst(s2, t2):
                return self.term(s1, s2, sa, sb) and self.ty(t1, t2, sa, sb)
            case Let(r1, bs1, body1), Let(r2, bs2, body2):
                if r1 != r2 or len(bs1) != len(bs2):
                    return False
                if r1 is Recursivity.REC:
                    ia, ib = sa, sb
                    for x, y in zip(bs1, bs2):
                        lv = self.next()
                        ia, ib = ia.bind_term(x.name, lv), ib.bind_term(y.name, lv)
                    for x, y in zip(bs1, bs2):
                        if x.strictness != y.strictness or not self.ty(x.annotation, y.annotation, sa, sb):
                            return False
                        if not self.term(x.rhs, y.rhs, ia, ib):
                            return False
                    return self.term(body1, body2, ia, ib)
                ia, ib = sa, sb
                for x, y in zip(bs1, bs2):
                    if x.strictness != y.strictness or not self.ty(x.annotation, y.annotation, sa, sb):
                        return False
                    if not self.term(x.rhs, y.rhs, ia, ib):
                        return False
                    lv = self.next()
                    ia, ib = ia.bind_term(x.name, lv), ib.bind_term(y.name, lv)
                return self.term(body1, body2, ia, ib)
            case Data(d1, body1), Data(d2, body2):
                if len(d1.params) != len(d2.params) or len(d1.constructors) != len(d2.constructors):
                    return False
                lv = self.next()
                ta, tb = sa.bind_type(d1.tyname, lv), sb.bind_type(d2.tyname, lv)
                pa, pb = ta, tb
                for (p1, k1), (p2, k2) in zip(d1.params, d2.params):
                    if not _kind_eq(k1, k2):
                        return False
                    lv = self.next()
                    pa, pb = pa.bind_type(p1, lv), pb.bind_type(p2, lv)
                ba, bb = ta, tb
                for c1, c2 in zip(d1.constructors, d2.constructors):
                    if len(c1.args) != len(c2.args):
                        return False
                    if not all(self.ty(x, y, pa, pb) for x, y in zip(c1.args, c2.args)):
                        return False
                    lv = self.next()
                    ba, bb = ba.bind_term(c1.name, lv), bb.bind_term(c2.name, lv)
                lv = self.next()
                ba, bb = ba.bind_term(d1.match_name, lv), bb.bind_term(d2.match_name, lv)
                return self.term(body1, body2, ba, bb)
            case (IntLit(), IntLit()) | (BoolLit(), BoolLit()) | (UnitLit(), UnitLit()) | (
                Builtin(),
                Builtin(),
            ):
                return a == b
        return False


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Equality up to consistent renaming of bound names (term and type binders)."""
    return _Alpha().term(t1, t2, _Scope(), _Scope())


def alpha_eq_type(a: Type, b: Type) -> bool:
    return _Alpha().ty(a, b, _Scope(), _Scope())


# ---------------------------------------------------------------------------
# Renaming of type variables (capture-free because callers pass fresh targets)


def rename_type(ty: Type, mapping: dict[Name, Name]) -> Type:
    match ty:
        case TyVar(n):
            return TyVar(mapping.get(n, n))
        case TyFun(a, b):
            return TyFun(rename_type(a, mapping), rename_type(b, mapping))
        case TyApp(a, b):
            return TyApp(rename_type(a, mapping), rename_type(b, mapping))
        case TyForall(a, k, body):
            inner = {x: y for x, y in mapping.items() if x != a}
            return TyForall(a, k, rename_type(body, inner))
        case TyLam(a, k, body):
            inner = {x: y for x, y in mapping.items() if x != a}
            return TyLam(a, k, rename_type(body, inner))
    return ty


# ---------------------------------------------------------------------------
# Variable-for-variable substitution


def subst_var(t: Term, old: Name, new: Name) -> Term:
    """Replace free occurrences of term variable ``old`` by ``new``.

    Raises IllFormed if ``new`` would be captured by a binder inside ``t``.
    """
    if old == new:
        return t

    def go(s: Term) -> Term:
        match s:
            case Var(n):
                return Var(new) if n == old else s
            case Lam(x, ty, body):
                if x == old:
                    return s
                if x == new and old in free_vars(body):
                    raise IllFormed(f"substituting {new!r} for {old!r} is captured")
                return Lam(x, ty, go(body))
            case Let(rec, bs, body):
                names = let_binders(s)
                if rec is Recursivity.REC:
                    if old in names:
                        return s
                    if new in names and old in free_vars(s):
                        raise IllFormed(f"substituting {new!r} for {old!r} is captured")
                    return with_children(s, tuple(go(c) for c in children(s)))
                out = []
                shadowed = False
                for i, b in enumerate(bs):
                    rhs = b.rhs if shadowed else go(b.rhs)
                    out.append(TermBinding(b.strictness, b.name, b.annotation, rhs))
                    if b.name == old:
                        shadowed = True
                    elif b.name == new and not shadowed and old in free_vars(Let(rec, bs[i + 1:], body) if i + 1 < len(bs) else body):
                        raise IllFormed(f"substituting {new!r} for {old!r} is captured")
                return Let(rec, tuple(out), body if shadowed else go(body))
            case Data(decl, body):
                binders = data_term_binders(decl)
                if old in binders:
                    return s
                if new in binders and old in free_vars(body):
                    raise IllFormed(f"substituting {new!r} for {old!r} is captured")
                return Data(decl, go(body))
        return with_children(s, tuple(go(c) for c in children(s)))

    return go(t)


# ---------------------------------------------------------------------------
# Datatype helpers


def constructor_arities(decl: DataDecl) -> dict[Name, int]:
    return {c.name: len(c.args) for c in decl.constructors}


def unspine(t: Term) -> tuple[Term, list[Term | Type]]:
    """Split an application spine into its head and arguments (terms or types)."""
    args: list[Term | Type] = []
    while True:
        match t:
            case App(f, a):
                args.append(a)
                t = f
            case TyInst(s, ty):
                args.append(ty)
                t = s
            case _:
                args.reverse()
                return t, args


def is_type(x: object) -> bool:
    return isinstance(x, (TyVar, TyFun, TyForall, TyLam, TyApp, TyInteger, TyBuiltinBool, TyUnitBuiltin))
