"""Search for inlining derivations, composed with DCE through a witness term."""

from __future__ import annotations

from ..proof import Derivation, EnvKind, EnvSnapshot, PassHints, PassId, RuleId
from ..syntax import (
    Data,
    Lam,
    Let,
    Name,
    Path,
    Recursivity,
    Term,
    TermBinding,
    TyAbs,
    Var,
    alpha_eq_type,
    children,
    data_term_binders,
    free_type_vars,
    free_vars,
    positions,
    with_children,
)
from .common import CheckFailure, congruence
from .dce import check_dce

P = PassId.INLINE
Env = tuple[tuple[Name, Term], ...]


def without(env: Env, terms: set[Name] = frozenset(), types: set[Name] = frozenset()) -> Env:
    """Drop entries shadowed by, or mentioning, the given binders."""
    return tuple((x, r) for x, r in env
                 if x not in terms and not (free_vars(r) & terms) and not (free_type_vars(r) & types))


def _lookup(env: Env, x: Name) -> Term | None:
    for y, r in reversed(env):
        if y == x:
            return r
    return None


class _Search:
    def rel(self, env: Env, s: Term, t: Term, path: Path, chain: frozenset[Name] = frozenset()) -> Derivation:
        snap = EnvSnapshot(EnvKind.INLINE, env)
        match s:
            case Var(x):
                if t == s:
                    return Derivation(RuleId.INLINE_VAR_2, snap, s, t)
                rhs = _lookup(env, x)
                if rhs is None:
                    raise CheckFailure(P, path, f"{x!r} is not inlinable here")
                if x in chain:
                    raise CheckFailure(P, path, f"cyclic inlining through {x!r}")
                d = self.rel(env, rhs, t, path, chain | {x})
                return Derivation(RuleId.INLINE_VAR_1, snap, s, t, (d,))
            case Lam(x, _, _):
                inner = without(env, {x})
                return congruence(P, snap, s, t, path, lambda i, a, b, p: self.rel(inner, a, b, p))
            case TyAbs(a, _, _):
                inner = without(env, types={a})
                return congruence(P, snap, s, t, path, lambda i, a_, b, p: self.rel(inner, a_, b, p))
            case Data(decl, _):
                inner = without(env, set(data_term_binders(decl)), {decl.tyname})
                return congruence(P, snap, s, t, path, lambda i, a, b, p: self.rel(inner, a, b, p))
            case Let():
                return self.let(env, s, t, path)
        return congruence(P, snap, s, t, path, lambda i, a, b, p: self.rel(env, a, b, p))

    def let(self, env: Env, s: Let, t: Term, path: Path) -> Derivation:
        if not isinstance(t, Let) or t.rec is not s.rec or len(t.bindings) != len(s.bindings):
            raise CheckFailure(P, path, "let does not match target")
        for b, c in zip(s.bindings, t.bindings):
            if b.name != c.name or b.strictness is not c.strictness or not alpha_eq_type(b.annotation, c.annotation):
                raise CheckFailure(P, path, f"binding {b.name!r} changed")
        n = len(s.bindings)
        prem = []
        if s.rec is Recursivity.REC:
            b = s.bindings[0]
            inner = without(env, {b.name}) + ((b.name, b.rhs),)
            prem.append(self.rel(inner, b.rhs, t.bindings[0].rhs, path + (0,)))
        else:
            inner = env
            for i, (b, c) in enumerate(zip(s.bindings, t.bindings)):
                prem.append(self.rel(inner, b.rhs, c.rhs, path + (i,)))
                inner = without(inner, {b.name}) + ((b.name, b.rhs),)
        prem.append(self.rel(inner, s.body, t.body, path + (n,)))
        return Derivation(RuleId.INLINE_LET, EnvSnapshot(EnvKind.INLINE, env), s, t, tuple(prem))


def witness_for(t: Term, t2: Term, hints: PassHints) -> Term:
    """The source with hinted lets kept and every other position shaped like the target.

    Where the two disagree on shape the source is kept, so the inline search
    reports the mismatch at that point.
    """
    elim = frozenset(hints.eliminated)

    def go(s: Term, u: Term) -> Term:
        match s:
            case Var():
                return u
            case Let(rec, bs, body):
                keep = [b for b in bs if b.name not in elim]
                if not keep:
                    urhs, ubody = {}, u
                elif isinstance(u, Let) and [c.name for c in u.bindings] == [b.name for b in keep]:
                    urhs, ubody = {c.name: c.rhs for c in u.bindings}, u.body
                else:
                    return s
                out = tuple(TermBinding(b.strictness, b.name, b.annotation,
                                        go(b.rhs, urhs[b.name]) if b.name in urhs else b.rhs) for b in bs)
                return Let(rec, out, go(body, ubody))
        cs, us = children(s), children(u)
        if type(s) is not type(u) or len(cs) != len(us):
            return s
        return with_children(s, tuple(go(a, b) for a, b in zip(cs, us)))

    return go(t, t2)


def check_inline(t: Term, t2: Term, hints: PassHints) -> Derivation:
    binders = {b.name for _, s in positions(t) if isinstance(s, Let) for b in s.bindings}
    for x in hints.eliminated:
        if x not in binders:
            raise CheckFailure(P, (), f"hinted {x!r} is not let-bound in the source")
    w = witness_for(t, t2, hints)
    d1 = _Search().rel((), t, w, ())
    try:
        d2 = check_dce(w, t2)
    except CheckFailure as e:
        raise CheckFailure(P, e.path, f"witness does not reduce to target: {e.reason}") from None
    return Derivation(RuleId.COMPOSE_WITNESS, EnvSnapshot(), t, t2, (d1, d2), witness=w)
