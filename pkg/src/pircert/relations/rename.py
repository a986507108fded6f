"""Search for renaming derivations: Δ ⊢ t ▷α t'."""

from __future__ import annotations

from ..proof import TERM_NS, TYPE_NS, Derivation, EnvKind, EnvSnapshot, PassId, RuleId
from ..syntax import (
    App,
    Data,
    Lam,
    Let,
    Name,
    Path,
    Recursivity,
    Term,
    TyAbs,
    TyApp,
    TyForall,
    TyFun,
    TyInst,
    TyLam,
    TyVar,
    Type,
    Var,
    CONSTANTS,
    free_type_vars,
    free_type_vars_of_type,
    free_vars,
)
from .common import CheckFailure

P = PassId.RENAME
Env = tuple[tuple[str, Name, Name], ...]


def _lookup(env: Env, ns: str, x: Name) -> Name | None:
    for n, a, b in env:
        if n == ns and a == x:
            return b
    return None


def _capture_ok(env: Env, ns: str, x: Name, y: Name, scope_fv: frozenset[Name]) -> bool:
    # no other free z of the scope was also renamed to y
    return not any(n == ns and b == y and a != x and a in scope_fv for n, a, b in env)


def root_env(t: Term) -> Env:
    terms = sorted(free_vars(t), key=lambda n: n.uid)
    types = sorted(free_type_vars(t), key=lambda n: n.uid)
    return tuple((TERM_NS, n, n) for n in terms) + tuple((TYPE_NS, n, n) for n in types)


class _Search:
    def fail(self, path: Path, reason: str):
        raise CheckFailure(P, path, reason)

    def ty(self, env: Env, a: Type, b: Type, path: Path) -> None:
        match a, b:
            case TyVar(x), TyVar(y):
                if _lookup(env, TYPE_NS, x) != y:
                    self.fail(path, f"type variable {x!r} is not renamed to {y!r}")
            case TyFun(a1, a2), TyFun(b1, b2):
                self.ty(env, a1, b1, path)
                self.ty(env, a2, b2, path)
            case TyApp(a1, a2), TyApp(b1, b2):
                self.ty(env, a1, b1, path)
                self.ty(env, a2, b2, path)
            case (TyForall(x, k, body), TyForall(y, k2, body2)) | (TyLam(x, k, body), TyLam(y, k2, body2)):
                if type(a) is not type(b) or k != k2:
                    self.fail(path, "type binder mismatch")
                if not _capture_ok(env, TYPE_NS, x, y, free_type_vars_of_type(body) - {x}):
                    self.fail(path, f"renaming type binder to {y!r} captures")
                self.ty(((TYPE_NS, x, y),) + env, body, body2, path)
            case _:
                if a != b or isinstance(a, (TyVar, TyFun, TyApp, TyForall, TyLam)):
                    self.fail(path, "type mismatch")

    def term(self, env: Env, s: Term, t: Term, path: Path) -> Derivation:
        snap = EnvSnapshot(EnvKind.RENAME, env)
        match s, t:
            case Var(x), Var(y):
                if _lookup(env, TERM_NS, x) != y:
                    self.fail(path, f"{x!r} is not renamed to {y!r}")
                return Derivation(RuleId.RENAME_VAR, snap, s, t)
            case Lam(x, ty, body), Lam(y, ty2, body2):
                self.ty(env, ty, ty2, path)
                if not _capture_ok(env, TERM_NS, x, y, free_vars(body) - {x}):
                    self.fail(path, f"renaming {x!r} to {y!r} captures a free variable")
                d = self.term(((TERM_NS, x, y),) + env, body, body2, path + (0,))
                return Derivation(RuleId.RENAME_ABS, snap, s, t, (d,))
            case TyAbs(a, k, body), TyAbs(b, k2, body2):
                if k != k2:
                    self.fail(path, "kind mismatch")
                if not _capture_ok(env, TYPE_NS, a, b, free_type_vars(body) - {a}):
                    self.fail(path, f"renaming {a!r} to {b!r} captures a free type variable")
                d = self.term(((TYPE_NS, a, b),) + env, body, body2, path + (0,))
                return Derivation(RuleId.RENAME_ABS, snap, s, t, (d,))
            case App(f, a), App(g, b):
                return Derivation(RuleId.RENAME_CONG_APP, snap, s, t,
                                  (self.term(env, f, g, path + (0,)), self.term(env, a, b, path + (1,))))
            case TyInst(e, ty), TyInst(e2, ty2):
                self.ty(env, ty, ty2, path)
                return Derivation(RuleId.RENAME_CONG_INST, snap, s, t, (self.term(env, e, e2, path + (0,)),))
            case Let(), Let():
                return self.let(env, s, t, path)
            case Data(), Data():
                return self.data(env, s, t, path)
            case _ if isinstance(s, CONSTANTS) and s == t:
                return Derivation(RuleId.RENAME_CONG_CONST, snap, s, t)
        self.fail(path, f"{type(s).__name__} cannot be renamed to {type(t).__name__}")

    def let(self, env: Env, s: Let, t: Let, path: Path) -> Derivation:
        if s.rec is not t.rec or len(s.bindings) != len(t.bindings):
            self.fail(path, "let shape mismatch")
        for b, c in zip(s.bindings, t.bindings):
            if b.strictness is not c.strictness:
                self.fail(path, "strictness changed")
            self.ty(env, b.annotation, c.annotation, path)
        n = len(s.bindings)
        prem = []
        if s.rec is Recursivity.REC:
            b, c = s.bindings[0], t.bindings[0]
            scope = (free_vars(b.rhs) | free_vars(s.body)) - {b.name}
            if not _capture_ok(env, TERM_NS, b.name, c.name, scope):
                self.fail(path, f"renaming {b.name!r} to {c.name!r} captures a free variable")
            inner = ((TERM_NS, b.name, c.name),) + env
            prem.append(self.term(inner, b.rhs, c.rhs, path + (0,)))
            prem.append(self.term(inner, s.body, t.body, path + (1,)))
        else:
            cur = env
            for i, (b, c) in enumerate(zip(s.bindings, t.bindings)):
                prem.append(self.term(cur, b.rhs, c.rhs, path + (i,)))
                rest = Let(s.rec, s.bindings[i + 1:], s.body) if i + 1 < n else s.body
                if not _capture_ok(cur, TERM_NS, b.name, c.name, free_vars(rest) - {b.name}):
                    self.fail(path, f"renaming {b.name!r} to {c.name!r} captures a free variable")
                cur = ((TERM_NS, b.name, c.name),) + cur
            prem.append(self.term(cur, s.body, t.body, path + (n,)))
        return Derivation(RuleId.RENAME_LET, EnvSnapshot(EnvKind.RENAME, env), s, t, tuple(prem))

    def data(self, env: Env, s: Data, t: Data, path: Path) -> Derivation:
        d, e = s.decl, t.decl
        if (len(d.params) != len(e.params) or len(d.constructors) != len(e.constructors)
                or any(len(c.args) != len(c2.args) for c, c2 in zip(d.constructors, e.constructors))
                or any(k != k2 for (_, k), (_, k2) in zip(d.params, e.params))):
            self.fail(path, "datatype shape mismatch")
        ctor_ftv = frozenset().union(*(free_type_vars_of_type(a) for c in d.constructors for a in c.args))
        body_ftv = free_type_vars(s.body)
        if not _capture_ok(env, TYPE_NS, d.tyname, e.tyname,
                           ((ctor_ftv - {p for p, _ in d.params}) | body_ftv) - {d.tyname}):
            self.fail(path, f"renaming datatype {d.tyname!r} captures")
        with_t = ((TYPE_NS, d.tyname, e.tyname),) + env
        cur = with_t
        for (p, _), (p2, _) in zip(d.params, e.params):
            if not _capture_ok(cur, TYPE_NS, p, p2, ctor_ftv - {p}):
                self.fail(path, f"renaming parameter {p!r} captures")
            cur = ((TYPE_NS, p, p2),) + cur
        for c, c2 in zip(d.constructors, e.constructors):
            for a, a2 in zip(c.args, c2.args):
                self.ty(cur, a, a2, path)
        body_fv = free_vars(s.body)
        cur = with_t
        olds = [c.name for c in d.constructors] + [d.match_name]
        news = [c.name for c in e.constructors] + [e.match_name]
        for x, y in zip(olds, news):
            if not _capture_ok(cur, TERM_NS, x, y, body_fv - {x}):
                self.fail(path, f"renaming {x!r} to {y!r} captures a free variable")
            cur = ((TERM_NS, x, y),) + cur
        d0 = self.term(cur, s.body, t.body, path + (0,))
        return Derivation(RuleId.RENAME_DATA, EnvSnapshot(EnvKind.RENAME, env), s, t, (d0,))


def check_rename(t: Term, t2: Term) -> Derivation:
    return _Search().term(root_env(t), t, t2, ())
