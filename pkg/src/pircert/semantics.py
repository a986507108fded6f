"""Fuel-bounded big-step interpreter and the observation harness."""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .syntax import (
    App,
    BoolLit,
    Builtin,
    BuiltinId,
    Data,
    IntLit,
    Lam,
    Let,
    Name,
    Recursivity,
    Strictness,
    Term,
    TyAbs,
    TyInst,
    UnitLit,
    Var,
    is_type,
    unbound_names,
)

DEFAULT_FUEL = 100_000
STACK_BYTES = 512 * 1024 * 1024


# -- values -------------------------------------------------------------------


@dataclass(frozen=True)
class VInt:
    value: int


@dataclass(frozen=True)
class VBool:
    value: bool


@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True, eq=False)
class VClosure:
    env: "Env"
    binder: Name
    body: Term


@dataclass(frozen=True, eq=False)
class VTyClosure:
    env: "Env"
    binder: Name
    body: Term


@dataclass(frozen=True)
class VConstr:
    """A constructor, saturated once ``len(args) == arity``."""
    tag: Name
    index: int
    n_constructors: int
    arity: int
    args: tuple["Value", ...] = ()


@dataclass(frozen=True, eq=False)
class VMatch:
    """The match function of a datatype; ``scrutinee`` and ``arms`` fill in as it is applied."""
    tags: tuple[Name, ...]
    scrutinee: VConstr | None = None
    arms: tuple["Value", ...] = ()


@dataclass(frozen=True, eq=False)
class VBuiltinPartial:
    id: BuiltinId
    collected: tuple["Value", ...] = ()


Value = Union[VInt, VBool, VUnit, VClosure, VTyClosure, VConstr, VMatch, VBuiltinPartial]


@dataclass(frozen=True)
class Forced:
    value: Value


@dataclass(eq=False)
class Delayed:
    env: "Env"
    term: Term


Env = dict  # Name -> Forced | Delayed; never mutated after construction except to tie a rec knot


# -- results -------------------------------------------------------------------


@dataclass(frozen=True)
class Ok:
    value: Value


@dataclass(frozen=True)
class OutOfFuel:
    pass


@dataclass(frozen=True)
class EvalError:
    message: str


EvalResult = Union[Ok, OutOfFuel, EvalError]


class _NoFuel(Exception):
    pass


class _Stuck(Exception):
    pass


# -- evaluator -------------------------------------------------------------------


class _Machine:
    def __init__(self, fuel: int):
        self.fuel = fuel

    def eval(self, t: Term, env: Env) -> Value:
        self.fuel -= 1
        if self.fuel < 0:
            raise _NoFuel
        match t:
            case Var(x):
                cell = env.get(x)
                if cell is None:
                    raise _Stuck(f"unbound variable {x!r}")
                if isinstance(cell, Forced):
                    return cell.value
                return self.eval(cell.term, cell.env)
            case Lam(x, _, body):
                return VClosure(env, x, body)
            case App(f, a):
                fv = self.eval(f, env)
                return self.apply(fv, self.eval(a, env))
            case TyAbs(x, _, body):
                return VTyClosure(env, x, body)
            case TyInst(inner, _):
                v = self.eval(inner, env)
                if isinstance(v, VTyClosure):
                    return self.eval(v.body, v.env)
                if isinstance(v, VClosure):
                    raise _Stuck("type instantiation of a term function")
                if isinstance(v, (VInt, VBool, VUnit)):
                    raise _Stuck("type instantiation of a constant")
                return v  # builtins, constructors and match functions are type-erased
            case Let(rec, bindings, body):
                return self.eval(body, self.bind(rec, bindings, env))
            case Data(decl, body):
                inner = dict(env)
                k = len(decl.constructors)
                for i, c in enumerate(decl.constructors):
                    inner[c.name] = Forced(VConstr(c.name, i, k, len(c.args)))
                inner[decl.match_name] = Forced(VMatch(tuple(c.name for c in decl.constructors)))
                return self.eval(body, inner)
            case IntLit(n):
                return VInt(n)
            case BoolLit(b):
                return VBool(b)
            case UnitLit():
                return VUnit()
            case Builtin(b):
                return VBuiltinPartial(b)
        raise _Stuck(f"cannot evaluate {type(t).__name__}")

    def bind(self, rec: Recursivity, bindings, env: Env) -> Env:
        if rec is Recursivity.REC:
            inner = dict(env)
            for b in bindings:
                inner[b.name] = Delayed(inner, b.rhs)
            for b in bindings:
                if b.strictness is Strictness.STRICT:
                    inner[b.name] = Forced(self.eval(b.rhs, inner))
            return inner
        for b in bindings:
            cell = Forced(self.eval(b.rhs, env)) if b.strictness is Strictness.STRICT else Delayed(env, b.rhs)
            env = {**env, b.name: cell}
        return env

    def apply(self, f: Value, a: Value) -> Value:
        match f:
            case VClosure(env, x, body):
                return self.eval(body, {**env, x: Forced(a)})
            case VConstr(tag, i, k, n, args) if len(args) < n:
                return VConstr(tag, i, k, n, args + (a,))
            case VMatch(tags, None, _):
                if not isinstance(a, VConstr) or a.tag not in tags or len(a.args) != a.arity:
                    raise _Stuck("match applied to a non-constructor")
                return self._select(VMatch(tags, a))
            case VMatch(tags, c, arms):
                return self._select(VMatch(tags, c, arms + (a,)))
            case VBuiltinPartial(b, got):
                got = got + (a,)
                if len(got) < b.arity:
                    return VBuiltinPartial(b, got)
                return self.delta(b, got)
        raise _Stuck(f"cannot apply {type(f).__name__}")

    def _select(self, m: VMatch) -> Value:
        if len(m.arms) < len(m.tags):
            return m
        out = m.arms[m.scrutinee.index]
        for x in m.scrutinee.args:
            out = self.apply(out, x)
        return out

    def delta(self, b: BuiltinId, args: tuple[Value, ...]) -> Value:
        if b is BuiltinId.FIX:
            f, v = args
            return self.apply(self.apply(f, VBuiltinPartial(BuiltinId.FIX, (f,))), v)
        if b is BuiltinId.IF_THEN_ELSE:
            c, x, y = args
            if not isinstance(c, VBool):
                raise _Stuck("ifThenElse on a non-boolean")
            return x if c.value else y
        x, y = args
        if not (isinstance(x, VInt) and isinstance(y, VInt)):
            raise _Stuck(f"{b.value} on non-integers")
        m, n = x.value, y.value
        match b:
            case BuiltinId.ADD_INTEGER:
                return VInt(m + n)
            case BuiltinId.SUBTRACT_INTEGER:
                return VInt(m - n)
            case BuiltinId.MULTIPLY_INTEGER:
                return VInt(m * n)
            case BuiltinId.LESS_THAN_EQ_INTEGER:
                return VBool(m <= n)
            case BuiltinId.GREATER_THAN_EQ_INTEGER:
                return VBool(m >= n)
            case BuiltinId.EQUALS_INTEGER:
                return VBool(m == n)
        raise _Stuck(f"unknown builtin {b}")


def _on_big_stack(fn: Callable[[], EvalResult]) -> EvalResult:
    out: list[EvalResult] = []

    def run() -> None:
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 2_000_000))
        try:
            out.append(fn())
        except RecursionError:
            out.append(EvalError("evaluation too deep"))
        finally:
            sys.setrecursionlimit(old)

    prev = threading.stack_size()
    threading.stack_size(STACK_BYTES)
    try:
        th = threading.Thread(target=run)
        th.start()
    finally:
        threading.stack_size(prev)
    th.join()
    return out[0]


def _run(t: Term, fuel: int, post: Callable[[_Machine, Value], Value] | None = None) -> EvalResult:
    def go() -> EvalResult:
        m = _Machine(fuel)
        try:
            v = m.eval(t, {})
            if post is not None:
                v = post(m, v)
            return Ok(v)
        except _NoFuel:
            return OutOfFuel()
        except _Stuck as e:
            return EvalError(str(e))
    return _on_big_stack(go)


def eval(t: Term, fuel: int = DEFAULT_FUEL) -> EvalResult:  # noqa: A001 - the operation's name
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    return _run(t, fuel)


# -- observation -------------------------------------------------------------------


@dataclass(frozen=True)
class Unobservable:
    what: str


def _discriminate(m: _Machine, v: Value) -> Value:
    """Normalize boolean-like data by applying it to ``@Integer 1 0``."""
    match v:
        case VInt() | VBool() | VUnit():
            return v
        case VConstr(_, i, 2, 0, ()):
            return VInt(1 if i == 0 else 0)
        case VTyClosure(env, _, body):
            try:
                out = m.apply(m.apply(m.eval(body, env), VInt(1)), VInt(0))
            except _Stuck:
                return Unobservable("function result")
            if isinstance(out, VInt):
                return out
    return Unobservable(type(v).__name__)


def observe(t: Term, fuel: int = DEFAULT_FUEL) -> EvalResult:
    """Evaluate and map the result to an observation (Ok of VInt/VBool/VUnit or Unobservable)."""
    return _run(t, fuel, _discriminate)


@dataclass(frozen=True)
class Verdict:
    agree: bool
    inconclusive: bool
    left: EvalResult
    right: EvalResult


def compare(t1: Term, t2: Term, fuel: int = DEFAULT_FUEL) -> Verdict:
    a, b = observe(t1, fuel), observe(t2, fuel)
    match a, b:
        case OutOfFuel(), OutOfFuel():
            return Verdict(True, True, a, b)
        case EvalError(), EvalError():
            return Verdict(True, False, a, b)
        case Ok(x), Ok(y):
            ok = not isinstance(x, Unobservable) and not isinstance(y, Unobservable) and x == y
            return Verdict(ok, False, a, b)
    return Verdict(False, False, a, b)


def observe_eq(t1: Term, t2: Term, fuel: int = DEFAULT_FUEL) -> bool:
    return compare(t1, t2, fuel).agree


def scope_check(t: Term) -> list[Name]:
    """Unbound names in ``t``; empty means well-scoped."""
    return unbound_names(t)


# -- harness -------------------------------------------------------------------


class HarnessError(ValueError):
    pass


def _entry(t: Term, scope: dict[str, Name]) -> tuple[Callable[[Term], Term], Term, dict[str, Name]]:
    """Find the program's entry lambda beneath its prelude of lets, datatypes and redexes.

    Returns a rebuild function, the entry term and the names visible there by display.
    """
    match t:
        case Let(rec, bs, body):
            inner = {**scope, **{b.name.display: b.name for b in bs}}
            k, e, sc = _entry(body, inner)
            return (lambda x: Let(rec, bs, k(x))), e, sc
        case Data(decl, body):
            names = [decl.tyname] + [c.name for c in decl.constructors] + [decl.match_name]
            k, e, sc = _entry(body, {**scope, **{n.display: n for n in names}})
            return (lambda x: Data(decl, k(x))), e, sc
        case App() | TyInst():
            spine: list[Term | object] = []
            head = t
            while isinstance(head, (App, TyInst)):
                spine.append(head.arg if isinstance(head, App) else head.type)
                head = head.fn if isinstance(head, App) else head.term
            spine.reverse()
            if isinstance(head, (Lam, TyAbs)):
                return _entry_redex(head, spine, scope)
    if isinstance(t, Lam):
        return (lambda x: x), t, scope
    raise HarnessError("program has no entry function")


def _entry_redex(head: Term, spine: list, scope: dict[str, Name]):
    binders = []
    body = head
    for _ in spine:
        if not isinstance(body, (Lam, TyAbs)):
            raise HarnessError("redex prelude is not saturated")
        binders.append(body)
        body = body.body
    k, e, sc = _entry(body, {**scope, **{b.binder.display: b.binder for b in binders}})

    def rebuild(x: Term) -> Term:
        inner = k(x)
        for b in reversed(binders):
            inner = Lam(b.binder, b.annotation, inner) if isinstance(b, Lam) else TyAbs(b.binder, b.kind, inner)
        for a in spine:
            inner = TyInst(inner, a) if is_type(a) else App(inner, a)
        return inner

    return rebuild, e, sc


def _resolve(t: Term, scope: dict[str, Name]) -> Term:
    match t:
        case Var(x):
            if x.display not in scope:
                raise HarnessError(f"input mentions {x.display!r}, which is not in scope")
            return Var(scope[x.display])
        case App(f, a):
            return App(_resolve(f, scope), _resolve(a, scope))
        case TyInst(f, ty):
            return TyInst(_resolve(f, scope), ty)
    return t


def with_inputs(t: Term, inputs: Sequence[Term]) -> Term:
    """Apply the program's entry function to ``inputs``.

    Variables in the inputs are resolved by display name against the binders
    visible at the entry point, so one input works across all dumps.
    """
    rebuild, entry, scope = _entry(t, {})
    applied: Term = entry
    for a in inputs:
        applied = App(applied, _resolve(a, scope))
    return rebuild(applied)


def render_value(v: object) -> str:
    match v:
        case VInt(n):
            return f"(int {n})"
        case VBool(b):
            return f"(con {'True' if b else 'False'})"
        case VUnit():
            return "(con unit)"
        case VConstr(tag, _, _, _, args):
            return "(" + " ".join([tag.display] + [render_value(a) for a in args]) + ")" if args else tag.display
        case Unobservable(what):
            return f"<unobservable {what}>"
    return f"<{type(v).__name__}>"


def render_result(r: EvalResult) -> str:
    match r:
        case Ok(v):
            return f"Ok {render_value(v)}"
        case OutOfFuel():
            return "OutOfFuel"
        case EvalError(msg):
            return f"RuntimeError {msg}"
    return repr(r)


__all__ = [
    "DEFAULT_FUEL", "Delayed", "EvalError", "EvalResult", "Forced", "HarnessError", "Ok", "OutOfFuel",
    "Unobservable", "VBool", "VBuiltinPartial", "VClosure", "VConstr", "VInt", "VMatch", "VTyClosure",
    "VUnit", "Value", "Verdict", "compare", "eval", "observe", "observe_eq", "render_result",
    "render_value", "scope_check", "with_inputs",
]
