"""Small local edits used to probe the checkers for false acceptance."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..syntax import (
    Data,
    IntLit,
    Lam,
    Let,
    Name,
    Path,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    Var,
    children,
    data_term_binders,
    free_vars,
    positions,
    replace_at,
    subterm,
    with_children,
)
from .common import BadPath


class MutationKind(enum.Enum):
    SWAP_VAR_OCCURRENCE = "swap-var"
    PERTURB_INT_LIT = "perturb-int"
    DROP_LAMBDA = "drop-lambda"
    FLIP_STRICTNESS = "flip-strictness"
    RENAME_CAPTURE = "rename-capture"


@dataclass(frozen=True)
class Mutation:
    kind: MutationKind
    location: Path


def scope_at(t: Term, path: Path) -> list[Name]:
    """Term variables in scope at ``path``, outermost first."""
    scope: list[Name] = []
    for i in path:
        match t:
            case Lam(x, _, _):
                scope.append(x)
            case Data(decl, _):
                scope.extend(data_term_binders(decl))
            case Let(Recursivity.REC, bs, _):
                scope.extend(b.name for b in bs)
            case Let(_, bs, _):
                scope.extend(b.name for b in bs[:i])
        cs = children(t)
        if not 0 <= i < len(cs):
            raise BadPath(f"path {path} leaves the term")
        t = cs[i]
    return scope


def _swap_target(t: Term, path: Path, x: Name) -> Name | None:
    for n in reversed(scope_at(t, path)):
        if n != x:
            return n
    return None


def _rename_occurrences(t: Term, old: Name, new: Name) -> Term:
    # deliberately capture-unaware
    if isinstance(t, Var):
        return Var(new) if t.name == old else t
    return with_children(t, tuple(_rename_occurrences(c, old, new) for c in children(t)))


def _capture_target(node: Term) -> Name | None:
    match node:
        case Lam(x, _, body):
            others = sorted(free_vars(body) - {x}, key=lambda n: n.uid)
        case Let(_, bs, _):
            others = sorted(free_vars(node) - {bs[0].name}, key=lambda n: n.uid)
        case _:
            return None
    return others[0] if others else None


def applicable(t: Term, kind: MutationKind, path: Path) -> bool:
    node = subterm(t, path)
    match kind:
        case MutationKind.PERTURB_INT_LIT:
            return isinstance(node, IntLit)
        case MutationKind.SWAP_VAR_OCCURRENCE:
            return isinstance(node, Var) and _swap_target(t, path, node.name) is not None
        case MutationKind.DROP_LAMBDA:
            return isinstance(node, Lam)
        case MutationKind.FLIP_STRICTNESS:
            return isinstance(node, Let)
        case MutationKind.RENAME_CAPTURE:
            return _capture_target(node) is not None
    return False


def sites(t: Term, kind: MutationKind) -> list[Path]:
    return [p for p, _ in positions(t) if applicable(t, kind, p)]


def mutate(t: Term, m: Mutation) -> Term:
    try:
        node = subterm(t, m.location)
    except IndexError as e:
        raise BadPath(str(e)) from None
    if not applicable(t, m.kind, m.location):
        raise BadPath(f"{m.kind.value} does not apply at {m.location}")
    match m.kind:
        case MutationKind.PERTURB_INT_LIT:
            new: Term = IntLit(node.value + 1)
        case MutationKind.SWAP_VAR_OCCURRENCE:
            new = Var(_swap_target(t, m.location, node.name))
        case MutationKind.DROP_LAMBDA:
            new = node.body
        case MutationKind.FLIP_STRICTNESS:
            b = node.bindings[0]
            flipped = Strictness.NONSTRICT if b.strictness is Strictness.STRICT else Strictness.STRICT
            nb = (TermBinding(flipped, b.name, b.annotation, b.rhs),) + node.bindings[1:]
            new = Let(node.rec, nb, node.body)
        case MutationKind.RENAME_CAPTURE:
            z = _capture_target(node)
            if isinstance(node, Lam):
                new = Lam(z, node.annotation, _rename_occurrences(node.body, node.binder, z))
            else:
                b = node.bindings[0]
                renamed = _rename_occurrences(node, b.name, z)
                nb = (TermBinding(b.strictness, z, b.annotation, renamed.bindings[0].rhs),) + renamed.bindings[1:]
                new = Let(node.rec, nb, renamed.body)
    return replace_at(t, m.location, new)
