"""Search for dead-binding-elimination derivations."""

from __future__ import annotations

from ..passes.common import is_value
from ..proof import EMPTY_ENV, Derivation, PassId, RuleId
from ..syntax import (
    Data,
    Let,
    Name,
    Path,
    Recursivity,
    Strictness,
    Term,
    alpha_eq_type,
    constructor_arities,
    free_vars,
)
from .common import CheckFailure, congruence

P = PassId.DCE


def _kept(s: Let, t: Term) -> tuple[list[int], Term]:
    """Indices of the source bindings that survive, and the target's body."""
    if isinstance(t, Let) and t.rec is s.rec:
        names = [b.name for b in s.bindings]
        idx: list[int] = []
        j = 0
        for c in t.bindings:
            while j < len(names) and names[j] != c.name:
                j += 1
            if j == len(names):
                break
            idx.append(j)
            j += 1
        else:
            return idx, t.body
    return [], t


def _rel(s: Term, t: Term, path: Path, arity: dict[Name, int]) -> Derivation:
    match s:
        case Data(decl, _):
            inner = {**arity, **constructor_arities(decl)}
            return congruence(P, EMPTY_ENV, s, t, path, lambda i, a, b, p: _rel(a, b, p, inner))
        case Let(rec, bs, body):
            idx, tbody = _kept(s, t)
            kept_target = t.bindings if idx else ()
            for i, c in zip(idx, kept_target):
                b = bs[i]
                if b.strictness is not c.strictness or not alpha_eq_type(b.annotation, c.annotation):
                    raise CheckFailure(P, path, f"binding {b.name!r} changed")
            prem = [_rel(bs[i].rhs, c.rhs, path + (i,), arity) for i, c in zip(idx, kept_target)]
            prem.append(_rel(body, tbody, path + (len(bs),), arity))
            removed = [i for i in range(len(bs)) if i not in idx]
            strict_removed = False
            for i in removed:
                b = bs[i]
                if rec is Recursivity.REC:
                    scope = tbody
                else:
                    later = tuple(c for k, c in zip(idx, kept_target) if k > i)
                    scope = Let(rec, later, tbody) if later else tbody
                if b.name in free_vars(scope):
                    raise CheckFailure(P, path, f"removed binding {b.name!r} is still used")
                if b.strictness is Strictness.STRICT:
                    if not is_value(b.rhs, arity):
                        raise CheckFailure(P, path, f"strict binding {b.name!r} is not a value")
                    strict_removed = True
            if not removed:
                rule = RuleId.DCE_CONG_LET
            elif strict_removed:
                rule = RuleId.DCE_LET_STRICT_VALUE
            else:
                rule = RuleId.DCE_LET_NONSTRICT
            return Derivation(rule, EMPTY_ENV, s, t, tuple(prem))
    return congruence(P, EMPTY_ENV, s, t, path, lambda i, a, b, p: _rel(a, b, p, arity))


def check_dce(t: Term, t2: Term) -> Derivation:
    return _rel(t, t2, (), {})
