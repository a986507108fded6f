"""Thunking: non-strict bindings become strict bindings of unit-accepting lambdas."""

from __future__ import annotations

from ..syntax import (
    App,
    Data,
    Lam,
    Let,
    Name,
    NameSupply,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    TyFun,
    TyUnitBuiltin,
    UnitLit,
    Var,
    children,
    data_term_binders,
    with_children,
)
from .common import PassOutput, require_unique

NS = Strictness.NONSTRICT


class _Thunker:
    def __init__(self, t: Term):
        self.supply = NameSupply(t)

    def binding(self, b: TermBinding, env: dict[Name, Strictness]) -> TermBinding:
        rhs = self.go(b.rhs, env)
        if b.strictness is NS:
            u = self.supply.fresh("u")
            return TermBinding(Strictness.STRICT, b.name, TyFun(TyUnitBuiltin(), b.annotation),
                               Lam(u, TyUnitBuiltin(), rhs))
        return TermBinding(b.strictness, b.name, b.annotation, rhs)

    def go(self, t: Term, env: dict[Name, Strictness]) -> Term:
        match t:
            case Var(x):
                return App(t, UnitLit()) if env.get(x) is NS else t
            case Lam(x, ty, body):
                return Lam(x, ty, self.go(body, {**env, x: Strictness.STRICT}))
            case Data(decl, body):
                inner = {**env, **{n: Strictness.STRICT for n in data_term_binders(decl)}}
                return Data(decl, self.go(body, inner))
            case Let(Recursivity.REC, bs, body):
                inner = {**env, **{b.name: b.strictness for b in bs}}
                return Let(Recursivity.REC, tuple(self.binding(b, inner) for b in bs), self.go(body, inner))
            case Let(rec, bs, body):
                cur = env
                out = []
                for b in bs:
                    out.append(self.binding(b, cur))
                    cur = {**cur, b.name: b.strictness}
                return Let(rec, tuple(out), self.go(body, cur))
        return with_children(t, tuple(self.go(c, env) for c in children(t)))


def run_thunk(t: Term) -> PassOutput:
    require_unique(t)
    return PassOutput(_Thunker(t).go(t, {}))
