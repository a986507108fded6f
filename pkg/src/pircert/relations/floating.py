"""Search for let-floating derivations: chains of single float steps."""

from __future__ import annotations

import heapq
import itertools
from typing import Iterator

from ..proof import EMPTY_ENV, Derivation, PassId, RuleId
from ..syntax import (
    App,
    Lam,
    Let,
    Name,
    Recursivity,
    Strictness,
    Term,
    TermBinding,
    TyInst,
    Path,
    children,
    free_vars,
    let_binders,
    positions,
    replace_at,
    with_children,
)
from .common import CheckFailure

P = PassId.FLOAT_LET
DEFAULT_MAX_STEPS = 64
MAX_EXPANSIONS = 4000


def _nonstrict(let: Let) -> bool:
    return all(b.strictness is Strictness.NONSTRICT for b in let.bindings)


def local_steps(q: Term) -> Iterator[tuple[RuleId, Term]]:
    """Every single float rewrite whose redex is ``q`` itself."""
    match q:
        case Lam(x, ty, Let(rec, bs, body) as let):
            if _nonstrict(let) and x not in let_binders(let) and all(x not in free_vars(b.rhs) for b in bs):
                yield RuleId.FLOAT_LET_LAM, Let(rec, bs, Lam(x, ty, body))
        case App(f, a):
            if isinstance(f, Let) and not (set(let_binders(f)) & free_vars(a)):
                yield RuleId.FLOAT_LET_APP, Let(f.rec, f.bindings, App(f.body, a))
            if isinstance(a, Let) and _nonstrict(a) and not (set(let_binders(a)) & free_vars(f)):
                yield RuleId.FLOAT_LET_APP, Let(a.rec, a.bindings, App(f, a.body))
        case TyInst(Let(rec, bs, body), ty):
            yield RuleId.FLOAT_LET_APP, Let(rec, bs, TyInst(body, ty))
    if not isinstance(q, Let) or q.rec is not Recursivity.NONREC:
        return
    body = q.body
    if len(q.bindings) == 1:
        b = q.bindings[0]
        inner = b.rhs
        # out of the right-hand side
        if (isinstance(inner, Let) and (b.strictness is Strictness.STRICT or _nonstrict(inner))
                and b.name not in let_binders(inner) and not (set(let_binders(inner)) & free_vars(body))):
            yield RuleId.FLOAT_LET_LET, Let(inner.rec, inner.bindings,
                                            Let(q.rec, (TermBinding(b.strictness, b.name, b.annotation, inner.body),), body))
        # past a neighbouring let in the body
        if (isinstance(body, Let) and b.name not in let_binders(body)
                and all(b.name not in free_vars(c.rhs) for c in body.bindings)
                and not (set(let_binders(body)) & free_vars(b.rhs))
                and (b.strictness is Strictness.NONSTRICT or _nonstrict(body))):
            yield RuleId.FLOAT_LET_LET, Let(body.rec, body.bindings, Let(q.rec, q.bindings, body.body))
    if isinstance(body, Let) and body.rec is Recursivity.NONREC:
        yield RuleId.FLOAT_MERGE, Let(Recursivity.NONREC, q.bindings + body.bindings, body.body)


def steps(t: Term, focus: list[Path] | None = None,
          groups: list[tuple[Name, ...]] | None = None) -> Iterator[tuple[RuleId, Term]]:
    """Single steps anywhere in ``t``.

    With ``focus``, only redexes overlapping a focus position are tried; with
    ``groups``, merges must produce a contiguous run of one of the groups
    (groups are never split or reordered, so any other merge is a dead end).
    """
    for p, q in positions(t):
        if focus is not None and not any(p[:len(d)] == d or d[:len(p)] == p for d in focus):
            continue
        for rule, r in local_steps(q):
            if rule is RuleId.FLOAT_MERGE and groups is not None and not _run_of(let_binders(r), groups):
                continue
            yield rule, replace_at(t, p, r)


def _run_of(names: tuple[Name, ...], groups: list[tuple[Name, ...]]) -> bool:
    n = len(names)
    return any(g[i:i + n] == names for g in groups for i in range(len(g) - n + 1))


def _groups(t: Term) -> list[tuple[Name, ...]]:
    return [let_binders(q) for _, q in positions(t) if isinstance(q, Let)]


def _same_node(a: Term, b: Term) -> bool:
    if type(a) is not type(b) or len(children(a)) != len(children(b)):
        return False
    if isinstance(a, Let):
        return a.rec is b.rec and [(c.strictness, c.name, c.annotation) for c in a.bindings] == \
            [(c.strictness, c.name, c.annotation) for c in b.bindings]
    return with_children(a, children(b)) == b


def _diffs(a: Term, b: Term, prefix: Path = ()) -> list[Path]:
    """Outermost positions where ``a`` and ``b`` disagree."""
    if a == b:
        return []
    if not _same_node(a, b):
        return [prefix]
    out: list[Path] = []
    for i, (x, y) in enumerate(zip(children(a), children(b))):
        out += _diffs(x, y, prefix + (i,))
    return out


def _distance(a: Term, b: Term) -> int:
    """Crude structural distance: size of the parts that differ."""
    if a == b:
        return 0
    ca, cb = children(a), children(b)
    if type(a) is not type(b) or len(ca) != len(cb):
        return len(ca) + len(cb) + 2
    return 1 + sum(_distance(x, y) for x, y in zip(ca, cb))


def _relations(t: Term) -> set[tuple]:
    """Placement facts for let-bound names: which lets and lambdas sit above them, and group order."""
    out: set[tuple] = set()

    def go(q: Term, above: tuple[tuple, ...]) -> None:
        if isinstance(q, Let):
            names = let_binders(q)
            for i, x in enumerate(names):
                out.update((a, x) for a in above)
                out.update(("same", x, y) for y in names[i + 1:])
            above = above + tuple(("let", x) for x in names)
        elif isinstance(q, Lam):
            above = above + (("lam", q.binder),)
        for c in children(q):
            go(c, above)

    go(t, ())
    return out


def _chain(path: list[tuple[RuleId, Term, Term]], end: Term) -> Derivation:
    d = Derivation(RuleId.FLOAT_REFL, EMPTY_ENV, end, end)
    for rule, s, t in reversed(path):
        step = Derivation(rule, EMPTY_ENV, s, t)
        d = Derivation(RuleId.FLOAT_TRANS, EMPTY_ENV, s, d.target, (step, d))
    return d


def check_float(t: Term, t2: Term, max_steps: int = DEFAULT_MAX_STEPS) -> Derivation:
    if t == t2:
        return _chain([], t)
    counter = itertools.count()
    goal = _relations(t2)

    def score(q: Term) -> tuple[int, int]:
        return len(_relations(q) ^ goal), _distance(q, t2)

    frontier = [(score(t), 0, next(counter), t)]
    groups = _groups(t2)
    parent: dict[Term, tuple[Term, RuleId] | None] = {t: None}
    depth = {t: 0}
    truncated = False
    expanded = 0
    while frontier:
        _, d, _, cur = heapq.heappop(frontier)
        if cur == t2:
            path = []
            node = cur
            while parent[node] is not None:
                prev, rule = parent[node]
                path.append((rule, prev, node))
                node = prev
            path.reverse()
            return _chain(path, t2)
        expanded += 1
        if expanded > MAX_EXPANSIONS:
            raise CheckFailure(P, (), "search budget exhausted")
        if d >= max_steps:
            truncated = True
            continue
        for rule, nxt in steps(cur, _diffs(cur, t2), groups):
            if nxt in depth:
                continue
            depth[nxt] = d + 1
            parent[nxt] = (cur, rule)
            heapq.heappush(frontier, (score(nxt), d + 1, next(counter), nxt))
    raise CheckFailure(P, (), "search budget exhausted" if truncated else "no admissible step")
