"""Search for derivations of the three lowering passes."""

from __future__ import annotations

from ..encoding import RecursiveDatatype, check_nonrecursive, scott_parts, unscott
from ..proof import EMPTY_ENV, Derivation, PassId, RuleId
from ..syntax import (
    App,
    Builtin,
    BuiltinId,
    Data,
    Lam,
    Let,
    NameSupply,
    Path,
    Recursivity,
    Strictness,
    Term,
    TyFun,
    Var,
    alpha_eq,
    alpha_eq_type,
    free_vars,
    subst_var,
    IllFormed,
)
from .common import CheckFailure, MutualRecursionUnsupported, UnexpectedBinding, congruence

# -- recursive lets ----------------------------------------------------------


def _enc_rec(s: Term, t: Term, path: Path) -> Derivation:
    P = PassId.ENCODE_REC
    if not (isinstance(s, Let) and s.rec is Recursivity.REC):
        return congruence(P, EMPTY_ENV, s, t, path, lambda i, a, b, p: _enc_rec(a, b, p))
    if len(s.bindings) != 1:
        raise MutualRecursionUnsupported(P, path, "recursive group with more than one binding")
    b = s.bindings[0]
    match t:
        case Let(Recursivity.NONREC, (fb,), Let(Recursivity.NONREC, (c,), body2)):
            pass
        case _:
            raise CheckFailure(P, path, "recursive let is not encoded with fix")
    fix = fb.name
    if fb.strictness is not Strictness.STRICT or fb.rhs != Builtin(BuiltinId.FIX):
        raise CheckFailure(P, path, "fix binding is not the strict fix builtin")
    if not alpha_eq_type(fb.annotation, TyFun(TyFun(b.annotation, b.annotation), b.annotation)):
        raise CheckFailure(P, path, "fix binding has the wrong type")
    if fix == b.name or fix in free_vars(b.rhs) or fix in free_vars(s.body):
        raise CheckFailure(P, path, "fix binder is not fresh")
    if c.name != b.name or c.strictness is not b.strictness or not alpha_eq_type(c.annotation, b.annotation):
        raise CheckFailure(P, path, f"binding {b.name!r} changed")
    match c.rhs:
        case App(Var(f), Lam(y, ty, inner)) if f == fix:
            pass
        case _:
            raise CheckFailure(P, path, "rhs is not fix applied to a lambda")
    if not alpha_eq_type(ty, b.annotation):
        raise CheckFailure(P, path, "fix lambda has the wrong type")
    try:
        t1 = subst_var(inner, y, b.name)
    except IllFormed:
        raise CheckFailure(P, path, "fix lambda captures the recursive name") from None
    if not alpha_eq(Lam(y, ty, inner), Lam(b.name, ty, t1)):
        raise CheckFailure(P, path, "fix lambda is not a renaming of the recursive body")
    prem = (_enc_rec(b.rhs, t1, path + (0,)), _enc_rec(s.body, body2, path + (1,)))
    return Derivation(RuleId.ENCREC_LET, EMPTY_ENV, s, t, prem)


def check_encode_rec(t: Term, t2: Term) -> Derivation:
    return _enc_rec(t, t2, ())


# -- datatypes -----------------------------------------------------------------


def _scott(s: Term, t: Term, path: Path, supply: NameSupply) -> Derivation:
    P = PassId.ENCODE_DATA
    sub = lambda i, a, b, p: _scott(a, b, p, supply)  # noqa: E731
    if not isinstance(s, Data):
        return congruence(P, EMPTY_ENV, s, t, path, sub)
    decl = s.decl
    try:
        check_nonrecursive(decl)
    except RecursiveDatatype as e:
        raise CheckFailure(P, path, str(e)) from None
    split = unscott(t, len(decl.constructors))
    if split is None:
        raise CheckFailure(P, path, "target is not a Scott-encoded datatype")
    head, tyarg, ctor_terms, matcher = split
    parts = scott_parts(decl, supply)
    if head.binder != decl.tyname or head.kind != parts.kind:
        raise CheckFailure(P, path, "type abstraction does not bind the datatype")
    if not alpha_eq_type(tyarg, parts.type_arg):
        raise CheckFailure(P, path, "type argument is not the Scott type")
    for c, got, want in zip(decl.constructors, ctor_terms, parts.constructor_terms):
        if not alpha_eq(got, want):
            raise CheckFailure(P, path, f"constructor {c.name!r} is not encoded correctly")
    if not alpha_eq(matcher, parts.matcher):
        raise CheckFailure(P, path, "match function is not the identity")
    body = head.body
    for c, ty in zip(decl.constructors, parts.constructor_types):
        if not (isinstance(body, Lam) and body.binder == c.name and alpha_eq_type(body.annotation, ty)):
            raise CheckFailure(P, path, f"constructor {c.name!r} is not abstracted")
        body = body.body
    if not (isinstance(body, Lam) and body.binder == decl.match_name
            and alpha_eq_type(body.annotation, parts.match_type)):
        raise CheckFailure(P, path, "match function is not abstracted")
    d = _scott(s.body, body.body, path + (0,), supply)
    return Derivation(RuleId.SCOTT_DATA, EMPTY_ENV, s, t, (d,))


def check_encode_data(t: Term, t2: Term) -> Derivation:
    return _scott(t, t2, (), NameSupply(t, t2))


# -- non-recursive lets --------------------------------------------------------


def _redex(s: Term, t: Term, path: Path) -> Derivation:
    P = PassId.ENCODE_NONREC
    if not isinstance(s, Let):
        return congruence(P, EMPTY_ENV, s, t, path, lambda i, a, b, p: _redex(a, b, p))
    for b in s.bindings:
        if s.rec is Recursivity.REC or b.strictness is not Strictness.STRICT:
            raise UnexpectedBinding(P, path, f"unexpected {s.rec.value} {b.strictness.value} binding {b.name!r}")
    prem = []
    cur = t
    for i, b in enumerate(s.bindings):
        match cur:
            case App(Lam(x, ty, inner), arg) if x == b.name and alpha_eq_type(ty, b.annotation):
                prem.append(_redex(b.rhs, arg, path + (i,)))
                cur = inner
            case _:
                raise CheckFailure(P, path, f"binding {b.name!r} is not a beta redex")
    prem.append(_redex(s.body, cur, path + (len(s.bindings),)))
    return Derivation(RuleId.REDEX_LET, EMPTY_ENV, s, t, tuple(prem))


def check_encode_nonrec(t: Term, t2: Term) -> Derivation:
    return _redex(t, t2, ())
