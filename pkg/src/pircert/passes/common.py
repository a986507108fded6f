from __future__ import annotations

from dataclasses import dataclass

from ..proof import NO_HINTS, PassHints
from ..syntax import (
    App,
    Builtin,
    BoolLit,
    IntLit,
    Lam,
    Name,
    Term,
    TyAbs,
    UnitLit,
    Var,
    globally_unique,
    is_type,
    unbound_names,
    unspine,
)


class PassError(Exception):
    pass


class IllScoped(PassError):
    def __init__(self, names: list[Name]):
        self.names = names
        super().__init__("unbound: " + ", ".join(map(repr, names)))


class NotUnique(PassError):
    def __init__(self) -> None:
        super().__init__("input is not globally unique")


class MutualRecursionUnsupported(PassError):
    pass


class RecursiveDatatypeUnsupported(PassError):
    pass


class UnexpectedBinding(PassError):
    pass


class BadPath(PassError):
    pass


@dataclass(frozen=True)
class PassOutput:
    term: Term
    hints: PassHints = NO_HINTS


def require_scoped(t: Term) -> None:
    bad = unbound_names(t)
    if bad:
        raise IllScoped(bad)


def require_unique(t: Term) -> None:
    require_scoped(t)
    if not globally_unique(t):
        raise NotUnique()


def is_value(t: Term, arity: dict[Name, int]) -> bool:
    """Syntactic values: abstractions, constants and saturated constructors of values."""
    match t:
        case Lam() | TyAbs() | IntLit() | BoolLit() | UnitLit() | Builtin():
            return True
    head, args = unspine(t)
    if not isinstance(head, Var) or head.name not in arity:
        return False
    terms = [a for a in args if not is_type(a)]
    return len(terms) == arity[head.name] and all(is_value(a, arity) for a in terms)
