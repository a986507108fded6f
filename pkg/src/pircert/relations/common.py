from __future__ import annotations

from ..proof import CONG_RULES, Derivation, EnvSnapshot, PassId, node_tag
from ..syntax import (
    App,
    Data,
    Lam,
    Let,
    Path,
    Term,
    TyAbs,
    TyInst,
    alpha_eq_type,
    children,
)


class CheckFailure(Exception):
    def __init__(self, pass_id: PassId, path: Path, reason: str):
        super().__init__(f"{pass_id.value} at {list(path)}: {reason}")
        self.pass_id = pass_id
        self.path = path
        self.reason = reason


class UnexpectedBinding(CheckFailure):
    pass


class MutualRecursionUnsupported(CheckFailure):
    pass


def same_shape(s: Term, t: Term) -> bool:
    """Same constructor with the same non-term fields (binders exact, types up to alpha)."""
    if type(s) is not type(t):
        return False
    match s:
        case Lam(x, ty, _):
            return x == t.binder and alpha_eq_type(ty, t.annotation)
        case TyAbs(a, k, _):
            return a == t.binder and k == t.kind
        case TyInst(_, ty):
            return alpha_eq_type(ty, t.type)
        case Let(rec, bs, _):
            return (rec is t.rec and len(bs) == len(t.bindings)
                    and all(b.name == c.name and b.strictness is c.strictness
                            and alpha_eq_type(b.annotation, c.annotation)
                            for b, c in zip(bs, t.bindings)))
        case Data(decl, _):
            return decl == t.decl
        case App():
            return True
    # leaves: variables and constants compare exactly
    return s == t


def congruence(pid: PassId, env: EnvSnapshot, s: Term, t: Term, path: Path, sub) -> Derivation:
    """Apply the pass's congruence rule at ``s``; ``sub(i, s_i, t_i, path_i)`` relates children."""
    rule = CONG_RULES[pid].get(node_tag(s))
    if rule is None:
        raise CheckFailure(pid, path, f"no congruence rule for {node_tag(s)}")
    if not same_shape(s, t):
        raise CheckFailure(pid, path, f"{node_tag(s)} node does not match target {node_tag(t)}")
    prem = tuple(sub(i, a, b, path + (i,)) for i, (a, b) in enumerate(zip(children(s), children(t))))
    return Derivation(rule, env, s, t, prem)
