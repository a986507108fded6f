"""Dead-binding elimination based on strong liveness."""

from __future__ import annotations

from ..syntax import (
    Data,
    Let,
    Name,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    children,
    constructor_arities,
    free_vars,
    with_children,
)
from .common import PassOutput, is_value, require_unique


def _removable(b: TermBinding, arity: dict[Name, int]) -> bool:
    return b.strictness is Strictness.NONSTRICT or is_value(b.rhs, arity)


def _dce(t: Term, arity: dict[Name, int]) -> Term:
    match t:
        case Data(decl, body):
            return Data(decl, _dce(body, {**arity, **constructor_arities(decl)}))
        case Let(rec, bs, body):
            # the body first: liveness is judged on the result
            body2 = _dce(body, arity)
            live = free_vars(body2)
            if rec is Recursivity.REC:
                b = bs[0]
                if b.name not in live and _removable(b, arity):
                    return body2
                return Let(rec, (TermBinding(b.strictness, b.name, b.annotation, _dce(b.rhs, arity)),), body2)
            kept: list[TermBinding] = []
            for b in reversed(bs):
                if b.name not in live and _removable(b, arity):
                    continue
                rhs = _dce(b.rhs, arity)
                kept.append(TermBinding(b.strictness, b.name, b.annotation, rhs))
                live = (live - {b.name}) | free_vars(rhs)
            if not kept:
                return body2
            return Let(rec, tuple(reversed(kept)), body2)
    return with_children(t, tuple(_dce(c, arity) for c in children(t)))


def run_dce(t: Term) -> PassOutput:
    require_unique(t)
    return PassOutput(_dce(t, {}))
