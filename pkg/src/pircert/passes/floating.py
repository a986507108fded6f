"""Let-floating: hoist lets outwards as far as the side conditions allow, then merge."""

from __future__ import annotations

from ..syntax import (
    App,
    Lam,
    Let,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    TyInst,
    children,
    free_vars,
    let_binders,
    with_children,
)
from .common import PassOutput, require_unique


def _all_nonstrict(let: Let) -> bool:
    return all(b.strictness is Strictness.NONSTRICT for b in let.bindings)


def _wrap(lets: list[Let], body: Term) -> Term:
    for let in reversed(lets):
        body = Let(let.rec, let.bindings, body)
    return body


def _hoist(t: Term) -> Term:
    t = with_children(t, tuple(_hoist(c) for c in children(t)))
    match t:
        case Lam(x, ty, body):
            lets = []
            while (isinstance(body, Let) and _all_nonstrict(body)
                   and x not in let_binders(body)
                   and all(x not in free_vars(b.rhs) for b in body.bindings)):
                lets.append(body)
                body = body.body
            return _wrap(lets, Lam(x, ty, body))
        case App(f, a):
            lets = []
            while isinstance(f, Let) and not (set(let_binders(f)) & free_vars(a)):
                lets.append(f)
                f = f.body
            while (isinstance(a, Let) and _all_nonstrict(a)
                   and not (set(let_binders(a)) & free_vars(f))):
                lets.append(a)
                a = a.body
            return _wrap(lets, App(f, a))
        case TyInst(s, ty):
            lets = []
            while isinstance(s, Let):
                lets.append(s)
                s = s.body
            return _wrap(lets, TyInst(s, ty))
        case Let(Recursivity.NONREC, (b,), body):
            lets = []
            rhs = b.rhs
            while (isinstance(rhs, Let)
                   and (b.strictness is Strictness.STRICT or _all_nonstrict(rhs))
                   and b.name not in let_binders(rhs)
                   and not (set(let_binders(rhs)) & free_vars(body))):
                lets.append(rhs)
                rhs = rhs.body
            if not lets:
                return t
            return _wrap(lets, Let(Recursivity.NONREC, (TermBinding(b.strictness, b.name, b.annotation, rhs),), body))
    return t


def _merge(t: Term) -> Term:
    t = with_children(t, tuple(_merge(c) for c in children(t)))
    if isinstance(t, Let) and t.rec is Recursivity.NONREC:
        bs = t.bindings
        body = t.body
        while isinstance(body, Let) and body.rec is Recursivity.NONREC:
            bs = bs + body.bindings
            body = body.body
        return Let(Recursivity.NONREC, bs, body)
    return t


def run_float(t: Term) -> PassOutput:
    require_unique(t)
    return PassOutput(_merge(_hoist(t)))
