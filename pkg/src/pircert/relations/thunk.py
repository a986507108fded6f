"""Search for thunking derivations under a strictness environment."""

from __future__ import annotations

from ..proof import Derivation, EnvKind, EnvSnapshot, PassId, RuleId
from ..syntax import (
    App,
    Data,
    Lam,
    Let,
    Name,
    Path,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    TyFun,
    TyUnitBuiltin,
    UnitLit,
    Var,
    alpha_eq_type,
    data_term_binders,
    free_vars,
)
from .common import CheckFailure, congruence

P = PassId.THUNK
NS = Strictness.NONSTRICT
Env = tuple[tuple[Name, Strictness], ...]


def _lookup(env: Env, x: Name) -> Strictness | None:
    for y, s in reversed(env):
        if y == x:
            return s
    return None


class _Search:
    def rel(self, env: Env, s: Term, t: Term, path: Path) -> Derivation:
        snap = EnvSnapshot(EnvKind.STRICTNESS, env)
        match s:
            case Var(x):
                if _lookup(env, x) is NS:
                    if t != App(s, UnitLit()):
                        raise CheckFailure(P, path, f"occurrence of non-strict {x!r} is not forced")
                    return Derivation(RuleId.THUNK_VAR, snap, s, t)
                if t != s:
                    raise CheckFailure(P, path, f"variable {x!r} changed")
                return Derivation(RuleId.THUNK_CONG_VAR, snap, s, t)
            case Lam(x, _, _):
                inner = env + ((x, Strictness.STRICT),)
                return congruence(P, snap, s, t, path, lambda i, a, b, p: self.rel(inner, a, b, p))
            case Data(decl, _):
                inner = env + tuple((n, Strictness.STRICT) for n in data_term_binders(decl))
                return congruence(P, snap, s, t, path, lambda i, a, b, p: self.rel(inner, a, b, p))
            case Let():
                return self.let(env, s, t, path)
        return congruence(P, snap, s, t, path, lambda i, a, b, p: self.rel(env, a, b, p))

    def binding(self, env: Env, b: TermBinding, c: TermBinding, path: Path) -> Derivation:
        if b.name != c.name:
            raise CheckFailure(P, path, f"binding {b.name!r} renamed")
        if b.strictness is NS:
            if c.strictness is not Strictness.STRICT:
                raise CheckFailure(P, path, f"{b.name!r} was not made strict")
            if not alpha_eq_type(c.annotation, TyFun(TyUnitBuiltin(), b.annotation)):
                raise CheckFailure(P, path, f"{b.name!r} annotation is not a unit function")
            if not (isinstance(c.rhs, Lam) and c.rhs.annotation == TyUnitBuiltin()):
                raise CheckFailure(P, path, f"{b.name!r} is not wrapped in a unit lambda")
            if c.rhs.binder in free_vars(b.rhs):
                raise CheckFailure(P, path, f"unit binder of {b.name!r} is not fresh")
            return self.rel(env, b.rhs, c.rhs.body, path)
        if c.strictness is not b.strictness or not alpha_eq_type(b.annotation, c.annotation):
            raise CheckFailure(P, path, f"strict binding {b.name!r} changed")
        return self.rel(env, b.rhs, c.rhs, path)

    def let(self, env: Env, s: Let, t: Term, path: Path) -> Derivation:
        if not isinstance(t, Let) or t.rec is not s.rec or len(t.bindings) != len(s.bindings):
            raise CheckFailure(P, path, "let does not match target")
        n = len(s.bindings)
        prem = []
        if s.rec is Recursivity.REC:
            inner = env + tuple((b.name, b.strictness) for b in s.bindings)
            for i, (b, c) in enumerate(zip(s.bindings, t.bindings)):
                prem.append(self.binding(inner, b, c, path + (i,)))
        else:
            inner = env
            for i, (b, c) in enumerate(zip(s.bindings, t.bindings)):
                prem.append(self.binding(inner, b, c, path + (i,)))
                inner = inner + ((b.name, b.strictness),)
        prem.append(self.rel(inner, s.body, t.body, path + (n,)))
        any_ns = any(b.strictness is NS for b in s.bindings)
        rule = RuleId.THUNK_LET_NONSTRICT if any_ns else RuleId.THUNK_LET_STRICT
        return Derivation(rule, EnvSnapshot(EnvKind.STRICTNESS, env), s, t, tuple(prem))


def check_thunk(t: Term, t2: Term) -> Derivation:
    return _Search().rel((), t, t2, ())
