"""Scott-encoding templates shared by the EncodeData pass and its relation checker."""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    App,
    DataDecl,
    Lam,
    Name,
    NameSupply,
    Star,
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
    apps,
    arrows,
    free_type_vars_of_type,
    kind_of_params,
    rename_type,
)


class RecursiveDatatype(ValueError):
    pass


def check_nonrecursive(decl: DataDecl) -> None:
    for c in decl.constructors:
        for ty in c.args:
            if decl.tyname in free_type_vars_of_type(ty):
                raise RecursiveDatatype(f"constructor {c.name!r} mentions {decl.tyname!r}")


def _fresh_params(decl: DataDecl, supply: NameSupply) -> tuple[list[tuple[Name, object]], dict[Name, Name]]:
    ps = [(supply.fresh(p.display), k) for p, k in decl.params]
    return ps, {old: new for (old, _), (new, _) in zip(decl.params, ps)}


def _applied(head: Type, params: list) -> Type:
    for p, _ in params:
        head = TyApp(head, TyVar(p))
    return head


def _foralls(params: list, body: Type) -> Type:
    for p, k in reversed(params):
        body = TyForall(p, k, body)
    return body


def _tyabs(params: list, body: Term) -> Term:
    for p, k in reversed(params):
        body = TyAbs(p, k, body)
    return body


def scott_type(decl: DataDecl, mapping: dict[Name, Name], r: Name) -> Type:
    """``∀R. (τ̄1 → R) → … → (τ̄k → R) → R`` with params renamed by ``mapping``."""
    rv = TyVar(r)
    cases = [arrows(*(rename_type(t, mapping) for t in c.args), rv) for c in decl.constructors]
    return TyForall(r, Star(), arrows(*cases, rv))


@dataclass(frozen=True)
class ScottParts:
    kind: object
    constructor_types: tuple[Type, ...]
    match_type: Type
    type_arg: Type
    constructor_terms: tuple[Term, ...]
    matcher: Term


def scott_parts(decl: DataDecl, supply: NameSupply) -> ScottParts:
    """Build every piece of the encoding with fresh binders from ``supply``."""
    tv = TyVar(decl.tyname)

    ctor_types = []
    for c in decl.constructors:
        ps, m = _fresh_params(decl, supply)
        ctor_types.append(_foralls(ps, arrows(*(rename_type(t, m) for t in c.args), _applied(tv, ps))))

    ps, m = _fresh_params(decl, supply)
    match_type = _foralls(ps, TyFun(_applied(tv, ps), scott_type(decl, m, supply.fresh("a"))))

    ps, m = _fresh_params(decl, supply)
    type_arg: Type = scott_type(decl, m, supply.fresh("a"))
    for p, k in reversed(ps):
        type_arg = TyLam(p, k, type_arg)

    ctor_terms = []
    for i, c in enumerate(decl.constructors):
        ps, m = _fresh_params(decl, supply)
        args = [(supply.fresh(f"arg_{j}"), rename_type(t, m)) for j, t in enumerate(c.args)]
        r = supply.fresh("a")
        cases = [(supply.fresh(f"case_{d.name.display}"), arrows(*(rename_type(t, m) for t in d.args), TyVar(r)))
                 for d in decl.constructors]
        body: Term = apps(Var(cases[i][0]), *(Var(a) for a, _ in args))
        for x, ty in reversed(cases):
            body = Lam(x, ty, body)
        body = TyAbs(r, Star(), body)
        for a, ty in reversed(args):
            body = Lam(a, ty, body)
        ctor_terms.append(_tyabs(ps, body))

    ps, m = _fresh_params(decl, supply)
    x = supply.fresh("x")
    matcher = _tyabs(ps, Lam(x, scott_type(decl, m, supply.fresh("a")), Var(x)))

    return ScottParts(kind_of_params(decl.params), tuple(ctor_types), match_type, type_arg,
                      tuple(ctor_terms), matcher)


def scott_encode(decl: DataDecl, body: Term, supply: NameSupply) -> Term:
    parts = scott_parts(decl, supply)
    inner = Lam(decl.match_name, parts.match_type, body)
    for c, ty in zip(reversed(decl.constructors), reversed(parts.constructor_types)):
        inner = Lam(c.name, ty, inner)
    head = TyInst(TyAbs(decl.tyname, parts.kind, inner), parts.type_arg)
    return apps(head, *parts.constructor_terms, parts.matcher)


def unscott(t: Term, n_ctors: int) -> tuple[TyAbs, Type, list[Term], Term] | None:
    """Split an encoded datatype into (head, type argument, constructor terms, matcher)."""
    args: list[Term] = []
    for _ in range(n_ctors + 1):
        if not isinstance(t, App):
            return None
        args.append(t.arg)
        t = t.fn
    args.reverse()
    if not isinstance(t, TyInst) or not isinstance(t.term, TyAbs):
        return None
    return t.term, t.type, args[:-1], args[-1]
