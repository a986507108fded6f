"""The three lowering passes: recursive lets, datatypes, non-recursive lets."""

from __future__ import annotations

from ..encoding import RecursiveDatatype, check_nonrecursive, scott_encode
from ..syntax import (
    App,
    Builtin,
    BuiltinId,
    Data,
    Lam,
    Let,
    NameSupply,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    TyFun,
    Var,
    children,
    subst_var,
    with_children,
)
from .common import (
    MutualRecursionUnsupported,
    PassOutput,
    RecursiveDatatypeUnsupported,
    UnexpectedBinding,
    require_scoped,
    require_unique,
)


def fix_type(ty):
    return TyFun(TyFun(ty, ty), ty)


def run_encode_rec(t: Term) -> PassOutput:
    require_unique(t)
    supply = NameSupply(t)

    def go(s: Term) -> Term:
        s = with_children(s, tuple(go(c) for c in children(s)))
        if not (isinstance(s, Let) and s.rec is Recursivity.REC):
            return s
        if len(s.bindings) != 1:
            raise MutualRecursionUnsupported(f"recursive group of {len(s.bindings)} bindings")
        b = s.bindings[0]
        fix = supply.fresh("fix")
        # the lambda gets its own binder so the output stays globally unique
        y = supply.fresh(b.name.display)
        fn = Lam(y, b.annotation, subst_var(b.rhs, b.name, y))
        return Let(Recursivity.NONREC,
                   (TermBinding(Strictness.STRICT, fix, fix_type(b.annotation), Builtin(BuiltinId.FIX)),),
                   Let(Recursivity.NONREC, (TermBinding(b.strictness, b.name, b.annotation, App(Var(fix), fn)),),
                       s.body))

    return PassOutput(go(t))


def run_encode_data(t: Term) -> PassOutput:
    require_unique(t)
    supply = NameSupply(t)

    def go(s: Term) -> Term:
        s = with_children(s, tuple(go(c) for c in children(s)))
        if isinstance(s, Data):
            try:
                check_nonrecursive(s.decl)
            except RecursiveDatatype as e:
                raise RecursiveDatatypeUnsupported(str(e)) from None
            return scott_encode(s.decl, s.body, supply)
        return s

    return PassOutput(go(t))


def run_encode_nonrec(t: Term) -> PassOutput:
    require_scoped(t)

    def go(s: Term) -> Term:
        s = with_children(s, tuple(go(c) for c in children(s)))
        if not isinstance(s, Let):
            return s
        if s.rec is Recursivity.REC:
            raise UnexpectedBinding(f"recursive let of {s.bindings[0].name!r}")
        out = s.body
        for b in reversed(s.bindings):
            if b.strictness is not Strictness.STRICT:
                raise UnexpectedBinding(f"non-strict let of {b.name!r}")
            out = App(Lam(b.name, b.annotation, out), b.rhs)
        return out

    return PassOutput(go(t))
