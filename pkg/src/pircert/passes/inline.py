"""Inlining of trivial non-strict bindings, fused with removal of the now-dead lets."""

from __future__ import annotations

from ..proof import PassHints
from ..syntax import (
    Data,
    Let,
    Name,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    Var,
    CONSTANTS,
    children,
    free_vars,
    is_type,
    unspine,
    with_children,
)
from .common import PassOutput, require_unique

DEFAULT_BUDGET = 100


def _trivial(t: Term, ctors: frozenset[Name]) -> bool:
    if isinstance(t, (Var, *CONSTANTS)):
        return True
    head, args = unspine(t)
    return (isinstance(head, Var) and head.name in ctors
            and all(is_type(a) or isinstance(a, (Var, *CONSTANTS)) for a in args))


class _Inliner:
    def __init__(self, budget: int):
        self.budget = budget
        self.eliminated: list[Name] = []

    def go(self, t: Term, gamma: dict[Name, Term], ctors: frozenset[Name]) -> Term:
        match t:
            case Var(x):
                if x in gamma and self.budget > 0:
                    self.budget -= 1
                    return self.go(gamma[x], gamma, ctors)
                return t
            case Data(decl, body):
                inner = ctors | {c.name for c in decl.constructors}
                return Data(decl, self.go(body, gamma, inner))
            case Let(Recursivity.REC, _, _):
                return with_children(t, tuple(self.go(c, gamma, ctors) for c in children(t)))
            case Let(rec, bs, body):
                cur = dict(gamma)
                out: list[TermBinding] = []
                candidates: set[Name] = set()
                for b in bs:
                    rhs = self.go(b.rhs, cur, ctors)
                    out.append(TermBinding(b.strictness, b.name, b.annotation, rhs))
                    if b.strictness is Strictness.NONSTRICT and _trivial(b.rhs, ctors):
                        cur[b.name] = b.rhs
                        candidates.add(b.name)
                body2 = self.go(body, cur, ctors)
                # drop candidates that no longer occur in what follows them
                live = free_vars(body2)
                kept: list[TermBinding] = []
                dropped: list[Name] = []
                for b in reversed(out):
                    if b.name in candidates and b.name not in live:
                        dropped.append(b.name)
                        continue
                    kept.append(b)
                    live = (live - {b.name}) | free_vars(b.rhs)
                self.eliminated.extend(reversed(dropped))
                if not kept:
                    return body2
                return Let(rec, tuple(reversed(kept)), body2)
        return with_children(t, tuple(self.go(c, gamma, ctors) for c in children(t)))


def run_inline(t: Term, budget: int = DEFAULT_BUDGET) -> PassOutput:
    require_unique(t)
    inl = _Inliner(budget)
    out = inl.go(t, {}, frozenset())
    return PassOutput(out, PassHints(tuple(inl.eliminated)))
