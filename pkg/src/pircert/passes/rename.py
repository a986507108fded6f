"""Global renaming: every binding site gets its own uid."""

from __future__ import annotations

from ..syntax import (
    App,
    Constructor,
    Data,
    DataDecl,
    Lam,
    Let,
    Name,
    NameSupply,
    Recursivity,
    Term,
    TermBinding,
    TyAbs,
    TyApp,
    TyForall,
    TyFun,
    TyInst,
    TyLam,
    TyVar,
    Type,
    Var,
    free_type_vars,
    free_vars,
)
from .common import PassOutput, require_scoped


class _Renamer:
    def __init__(self, t: Term):
        self.used = {n.uid for n in free_vars(t)} | {n.uid for n in free_type_vars(t)}
        self.supply = NameSupply(t)

    def pick(self, n: Name) -> Name:
        # keep the uid at its first binding site, freshen every later one
        if n.uid not in self.used:
            self.used.add(n.uid)
            return n
        m = self.supply.fresh(n.display)
        self.used.add(m.uid)
        return m

    def ty(self, t: Type, env: dict[Name, Name]) -> Type:
        match t:
            case TyVar(n):
                return TyVar(env.get(n, n))
            case TyFun(a, b):
                return TyFun(self.ty(a, env), self.ty(b, env))
            case TyApp(a, b):
                return TyApp(self.ty(a, env), self.ty(b, env))
            case TyForall(a, k, body):
                a2 = self.pick(a)
                return TyForall(a2, k, self.ty(body, {**env, a: a2}))
            case TyLam(a, k, body):
                a2 = self.pick(a)
                return TyLam(a2, k, self.ty(body, {**env, a: a2}))
        return t

    def term(self, t: Term, env: dict[Name, Name], tenv: dict[Name, Name]) -> Term:
        match t:
            case Var(n):
                return Var(env.get(n, n))
            case Lam(x, ty, body):
                ty2 = self.ty(ty, tenv)
                x2 = self.pick(x)
                return Lam(x2, ty2, self.term(body, {**env, x: x2}, tenv))
            case App(f, a):
                return App(self.term(f, env, tenv), self.term(a, env, tenv))
            case TyAbs(a, k, body):
                a2 = self.pick(a)
                return TyAbs(a2, k, self.term(body, env, {**tenv, a: a2}))
            case TyInst(s, ty):
                return TyInst(self.term(s, env, tenv), self.ty(ty, tenv))
            case Let(Recursivity.REC, bs, body):
                new = {b.name: self.pick(b.name) for b in bs}
                inner = {**env, **new}
                out = tuple(TermBinding(b.strictness, new[b.name], self.ty(b.annotation, tenv),
                                        self.term(b.rhs, inner, tenv)) for b in bs)
                return Let(Recursivity.REC, out, self.term(body, inner, tenv))
            case Let(rec, bs, body):
                cur = env
                out = []
                for b in bs:
                    ann = self.ty(b.annotation, tenv)
                    rhs = self.term(b.rhs, cur, tenv)
                    x2 = self.pick(b.name)
                    out.append(TermBinding(b.strictness, x2, ann, rhs))
                    cur = {**cur, b.name: x2}
                return Let(rec, tuple(out), self.term(body, cur, tenv))
            case Data(decl, body):
                tn = self.pick(decl.tyname)
                inner_t = {**tenv, decl.tyname: tn}
                params = [(p, self.pick(p), k) for p, k in decl.params]
                ptenv = {**inner_t, **{p: p2 for p, p2, _ in params}}
                ctors = []
                cenv = dict(env)
                for c in decl.constructors:
                    args = tuple(self.ty(a, ptenv) for a in c.args)
                    c2 = self.pick(c.name)
                    cenv[c.name] = c2
                    ctors.append(Constructor(c2, args))
                m2 = self.pick(decl.match_name)
                cenv[decl.match_name] = m2
                d2 = DataDecl(tn, tuple((p2, k) for _, p2, k in params), tuple(ctors), m2)
                return Data(d2, self.term(body, cenv, inner_t))
        return t


def run_rename(t: Term) -> PassOutput:
    require_scoped(t)
    return PassOutput(_Renamer(t).term(t, {}, {}))
