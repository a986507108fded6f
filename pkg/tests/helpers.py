"""Shared fixtures-as-functions and independent oracles for the test suite.

The oracles deliberately avoid the package's own traversal helpers so that a
bug in ``pircert.syntax`` cannot hide itself.
"""

from __future__ import annotations

import functools
import re
from pathlib import Path

from pircert.cli import DUMP_FILES
from pircert.corpus import generate_corpus
from pircert.passes import PipelineRun, run_pipeline_full
from pircert.passes.common import is_value
from pircert.syntax import (
    App,
    Data,
    Lam,
    Let,
    Name,
    Recursivity,
    Strictness,
    TermBinding,
    TyAbs,
    TyForall,
    TyApp,
    TyFun,
    TyInst,
    TyLam,
    TyVar,
    Var,
    constructor_arities,
)
from pircert.textio import Atom, parse_dump, parse_hints, parse_program, parse_term, read_sexprs

FIXTURES = Path(__file__).parent / "fixtures" / "timelock"

T = parse_term

# criterion number -> one-line verdict, printed in the pytest summary
ACCEPTANCE: dict[int, str] = {}

LOOP_SRC = "(let rec ((bind nonstrict (loop 9) Integer (var (loop 9)))) (var (loop 9)))"


@functools.lru_cache(maxsize=None)
def corpus(n: int, seed: int) -> tuple:
    return tuple(generate_corpus(n, seed))


@functools.lru_cache(maxsize=None)
def runs(n: int, seed: int) -> tuple[PipelineRun, ...]:
    return tuple(run_pipeline_full(t) for t in corpus(n, seed))


def timelock_source():
    return parse_program((FIXTURES / "source.pir").read_text())


def timelock_dumps() -> list:
    return [parse_dump((FIXTURES / f).read_text()) for f in DUMP_FILES]


def timelock_hints():
    return parse_hints((FIXTURES / "hints.dump").read_text())


def shift_uids(src: str, k: int) -> str:
    """Add ``k`` to every uid in printed syntax: an alpha-variant for closed terms."""
    return re.sub(r"\((?!int )([A-Za-z_][\w']*) (\d+)\)", lambda m: f"({m.group(1)} {int(m.group(2)) + k})", src)


# ---------------------------------------------------------------------------
# Free variables by walking the raw s-expression


def _uid(x) -> int:
    return int(x.items[1].text)


def sexpr_free_vars(src: str) -> set[int]:
    """Uids of free term variables, computed from the concrete syntax alone."""
    (top,) = read_sexprs(src)
    out: set[int] = set()

    def walk(x, bound: frozenset[int]) -> None:
        if isinstance(x, Atom):
            return
        head = x.items[0].text if x.items and isinstance(x.items[0], Atom) else None
        match head:
            case "var":
                if _uid(x.items[1]) not in bound:
                    out.add(_uid(x.items[1]))
            case "lam":
                walk(x.items[3], bound | {_uid(x.items[1])})
            case "let":
                binds = x.items[2].items
                names = [_uid(b.items[2]) for b in binds]
                if x.items[1].text == "rec":
                    inner = bound | set(names)
                    for b in binds:
                        walk(b.items[4], inner)
                    walk(x.items[3], inner)
                else:
                    scope = bound
                    for b, n in zip(binds, names):
                        walk(b.items[4], scope)
                        scope = scope | {n}
                    walk(x.items[3], scope)
            case "data":
                ctors = [_uid(c.items[0]) for c in x.items[3].items[1:]]
                walk(x.items[5], bound | set(ctors) | {_uid(x.items[4].items[1])})
            case "tyabs":
                walk(x.items[3], bound)
            case "inst":
                walk(x.items[1], bound)
            case "app":
                walk(x.items[1], bound)
                walk(x.items[2], bound)
            case _:
                pass

    walk(top, frozenset())
    return out


# ---------------------------------------------------------------------------
# Alpha-equivalence by canonical numbering of binders


def canon(t) -> object:
    """Replace every bound name by the index of its binding site in pre-order."""
    counter = [0]

    # term and type variables live in separate namespaces
    def bind(env: dict, n: Name, ns: str = "term") -> dict:
        counter[0] += 1
        return {**env, (ns, n.uid): counter[0]}

    def ref(env: dict, n: Name, ns: str = "term") -> object:
        return ("b", env[ns, n.uid]) if (ns, n.uid) in env else ("f", ns, n.uid)

    def ty(x, env: dict) -> object:
        match x:
            case TyVar(n):
                return ref(env, n, "type")
            case TyFun(a, b):
                return ("fun", ty(a, env), ty(b, env))
            case TyForall(n, k, b):
                return ("all", k, ty(b, bind(env, n, "type")))
            case TyLam(n, k, b):
                return ("tylam", k, ty(b, bind(env, n, "type")))
            case TyApp(a, b):
                return ("tyapp", ty(a, env), ty(b, env))
        return x

    def tm(x, env: dict) -> object:
        match x:
            case Var(n):
                return ref(env, n)
            case Lam(n, a, b):
                at = ty(a, env)
                return ("lam", at, tm(b, bind(env, n)))
            case App(f, a):
                return ("app", tm(f, env), tm(a, env))
            case TyAbs(n, k, b):
                return ("tyabs", k, tm(b, bind(env, n, "type")))
            case TyInst(f, a):
                return ("inst", tm(f, env), ty(a, env))
            case Let(rec, bs, body):
                if rec is Recursivity.REC:
                    inner = env
                    for b in bs:
                        inner = bind(inner, b.name)
                    parts = tuple((b.strictness, ty(b.annotation, env), tm(b.rhs, inner)) for b in bs)
                    return ("letrec", parts, tm(body, inner))
                parts = []
                for b in bs:
                    parts.append((b.strictness, ty(b.annotation, env), tm(b.rhs, env)))
                    env = bind(env, b.name)
                return ("let", tuple(parts), tm(body, env))
            case Data(d, body):
                e2 = bind(env, d.tyname, "type")
                e = e2
                ps = []
                for p, k in d.params:
                    e = bind(e, p, "type")
                    ps.append(k)
                cs = tuple(tuple(ty(a, e) for a in c.args) for c in d.constructors)
                for c in d.constructors:
                    e2 = bind(e2, c.name)
                e2 = bind(e2, d.match_name)
                return ("data", tuple(ps), cs, tm(body, e2))
        return x

    return tm(t, {})


def alpha_oracle(a, b) -> bool:
    return canon(a) == canon(b)


# ---------------------------------------------------------------------------
# Dead-code fixpoint by single removals


def _occurrences(t, uid: int) -> int:
    match t:
        case Var(n):
            return int(n.uid == uid)
        case Lam(_, _, b) | TyAbs(_, _, b) | Data(_, b):
            return _occurrences(b, uid)
        case App(f, a):
            return _occurrences(f, uid) + _occurrences(a, uid)
        case TyInst(f, _):
            return _occurrences(f, uid)
        case Let(_, bs, body):
            return sum(_occurrences(b.rhs, uid) for b in bs) + _occurrences(body, uid)
    return 0


def _arity(t) -> dict:
    out = {}

    def go(x):
        match x:
            case Data(d, b):
                out.update(constructor_arities(d))
                go(b)
            case Lam(_, _, b) | TyAbs(_, _, b):
                go(b)
            case App(f, a):
                go(f)
                go(a)
            case TyInst(f, _):
                go(f)
            case Let(_, bs, body):
                for b in bs:
                    go(b.rhs)
                go(body)

    go(t)
    return out


def _bindings(t, out: dict) -> dict:
    match t:
        case Let(_, bs, body):
            for b in bs:
                out[b.name.uid] = b
                _bindings(b.rhs, out)
            _bindings(body, out)
        case Lam(_, _, b) | TyAbs(_, _, b) | Data(_, b) | TyInst(b, _):
            _bindings(b, out)
        case App(f, a):
            _bindings(f, out)
            _bindings(a, out)
    return out


def _remove_one(t, root, arity, orig):
    """Remove the first removable dead binding found, or return None."""
    match t:
        case Let(rec, bs, body):
            for i, b in enumerate(bs):
                # strict bindings qualify by their rhs as written in the input
                removable = b.strictness is Strictness.NONSTRICT or is_value(orig[b.name.uid].rhs, arity)
                if removable and _occurrences(root, b.name.uid) == _occurrences(b.rhs, b.name.uid):
                    rest = bs[:i] + bs[i + 1:]
                    return Let(rec, rest, body) if rest else body
            for i, b in enumerate(bs):
                r = _remove_one(b.rhs, root, arity, orig)
                if r is not None:
                    nb = TermBinding(b.strictness, b.name, b.annotation, r)
                    return Let(rec, bs[:i] + (nb,) + bs[i + 1:], body)
            r = _remove_one(body, root, arity, orig)
            return None if r is None else Let(rec, bs, r)
        case Lam(n, a, b):
            r = _remove_one(b, root, arity, orig)
            return None if r is None else Lam(n, a, r)
        case TyAbs(n, k, b):
            r = _remove_one(b, root, arity, orig)
            return None if r is None else TyAbs(n, k, r)
        case Data(d, b):
            r = _remove_one(b, root, arity, orig)
            return None if r is None else Data(d, r)
        case TyInst(f, a):
            r = _remove_one(f, root, arity, orig)
            return None if r is None else TyInst(r, a)
        case App(f, a):
            r = _remove_one(f, root, arity, orig)
            if r is not None:
                return App(r, a)
            r = _remove_one(a, root, arity, orig)
            return None if r is None else App(f, r)
    return None


def dce_oracle(t):
    """Remove dead removable bindings one at a time until none is left."""
    arity, orig = _arity(t), _bindings(t, {})
    while True:
        r = _remove_one(t, t, arity, orig)
        if r is None:
            return t
        t = r
