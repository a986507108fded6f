"""Seeded generator of small, closed, well-typed programs of observable type."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .syntax import (
    App,
    BoolLit,
    Builtin,
    BuiltinId,
    Constructor,
    Data,
    DataDecl,
    IntLit,
    Lam,
    Let,
    Name,
    Recursivity,
    Star,
    Strictness,
    Term,
    TermBinding,
    TyAbs,
    TyApp,
    TyBuiltinBool,
    TyFun,
    TyInst,
    TyInteger,
    TyUnitBuiltin,
    TyVar,
    Type,
    UnitLit,
    Var,
    apps,
    term_size,
)

MAX_NODES = 50

INT, BOOL, UNIT = TyInteger(), TyBuiltinBool(), TyUnitBuiltin()
NS, S = Strictness.NONSTRICT, Strictness.STRICT


@dataclass(frozen=True)
class _DataInfo:
    decl: DataDecl

    def type_of(self, args: tuple[Type, ...]) -> Type:
        out: Type = TyVar(self.decl.tyname)
        for a in args:
            out = TyApp(out, a)
        return out

    def ctor_args(self, i: int, args: tuple[Type, ...]) -> tuple[Type, ...]:
        sub = {p: a for (p, _), a in zip(self.decl.params, args)}
        return tuple(sub.get(t.name, t) if isinstance(t, TyVar) else t
                     for t in self.decl.constructors[i].args)


Env = tuple[tuple[Name, Type], ...]


class _Gen:
    def __init__(self, rng: random.Random, budget: int):
        self.rng = rng
        self.budget = budget
        self.uid = 0
        self.datas_made = 0

    def name(self, display: str) -> Name:
        self.uid += 1
        return Name(display, self.uid)

    def binder(self, display: str, env: Env) -> tuple[Name, Env]:
        """A fresh binder, occasionally shadowing an outer variable's uid."""
        if env and self.rng.random() < 0.08:
            old = self.rng.choice(env)[0]
            return Name(display, old.uid), tuple(e for e in env if e[0] != old)
        return self.name(display), env

    def spend(self, n: int = 1) -> None:
        self.budget -= n

    # -- types

    def base(self) -> Type:
        return self.rng.choice([INT, INT, INT, BOOL, UNIT])

    def small_type(self, datas: tuple[_DataInfo, ...]) -> Type:
        r = self.rng.random()
        if datas and r < 0.2:
            d = self.rng.choice(datas)
            return d.type_of(tuple(INT for _ in d.decl.params))
        if r < 0.3:
            return TyFun(INT, INT)
        return self.base()

    # -- terms

    def leaf(self, ty: Type, env: Env, datas: tuple[_DataInfo, ...]) -> Term:
        cands = [x for x, t in env if t == ty]
        if cands and self.rng.random() < 0.6:
            self.spend()
            return Var(self.rng.choice(cands))
        if ty == INT:
            self.spend()
            return IntLit(self.rng.randint(0, 5))
        if ty == BOOL:
            self.spend()
            return BoolLit(self.rng.random() < 0.5)
        if ty == UNIT:
            self.spend()
            return UnitLit()
        if isinstance(ty, TyFun):
            x, env2 = self.binder("x", env)
            self.spend()
            return Lam(x, ty.domain, self.leaf(ty.codomain, env2 + ((x, ty.domain),), datas))
        info, args = self._data_of(ty, datas)
        if info is not None:
            i = self.rng.randrange(len(info.decl.constructors))
            return self.construct(info, i, args, env, datas, leaf=True)
        if cands:
            self.spend()
            return Var(cands[0])
        raise ValueError(f"cannot build a value of {ty}")

    @staticmethod
    def _data_of(ty: Type, datas: tuple[_DataInfo, ...]):
        args: list[Type] = []
        while isinstance(ty, TyApp):
            args.append(ty.arg)
            ty = ty.fn
        if isinstance(ty, TyVar):
            for d in datas:
                if d.decl.tyname == ty.name:
                    return d, tuple(reversed(args))
        return None, ()

    def construct(self, info: _DataInfo, i: int, args: tuple[Type, ...], env: Env,
                  datas: tuple[_DataInfo, ...], leaf: bool = False) -> Term:
        head: Term = Var(info.decl.constructors[i].name)
        self.spend()
        for a in args:
            head = TyInst(head, a)
            self.spend()
        vals = [self.leaf(t, env, datas) if leaf else self.gen(t, env, datas)
                for t in info.ctor_args(i, args)]
        self.spend(len(vals))
        return apps(head, *vals)

    def gen(self, ty: Type, env: Env, datas: tuple[_DataInfo, ...], depth: int = 0) -> Term:
        if self.budget <= 4 or depth > 6:
            return self.leaf(ty, env, datas)
        forms = ["leaf", "let", "let", "app_lam", "op", "match", "call", "rec", "poly", "data"]
        if isinstance(ty, TyFun):
            forms += ["lam", "lam", "lam"]
        while True:
            form = self.rng.choice(forms)
            out = getattr(self, "f_" + form)(ty, env, datas, depth + 1)
            if out is not None:
                return out

    def f_leaf(self, ty, env, datas, depth):
        return self.leaf(ty, env, datas)

    def f_lam(self, ty, env, datas, depth):
        x, env2 = self.binder("x", env)
        self.spend()
        return Lam(x, ty.domain, self.gen(ty.codomain, env2 + ((x, ty.domain),), datas, depth))

    def f_let(self, ty, env, datas, depth):
        bindings = []
        cur = env
        for _ in range(self.rng.choice([1, 1, 2])):
            sigma = self.small_type(datas)
            if self.rng.random() < 0.35:
                rhs = self.leaf(sigma, cur, datas)
            else:
                rhs = self.gen(sigma, cur, datas, depth)
            x, cur = self.binder("v", cur)
            strict = S if self.rng.random() < 0.4 else NS
            bindings.append(TermBinding(strict, x, sigma, rhs))
            cur = cur + ((x, sigma),)
            self.spend(2)
        self.spend()
        return Let(Recursivity.NONREC, tuple(bindings), self.gen(ty, cur, datas, depth))

    def f_rec(self, ty, env, datas, depth):
        if self.budget < 28 or self.rng.random() < 0.3:
            sigma = self.small_type(datas)
            x, env2 = self.binder("r", env)
            rhs = self.leaf(sigma, env, datas)
            self.spend(2)
            b = TermBinding(NS, x, sigma, rhs)
            return Let(Recursivity.REC, (b,), self.gen(ty, env2 + ((x, sigma),), datas, depth))
        # a terminating countdown: f n = if n <= 0 then e0 else op (f (n - 1)) e1
        fty = TyFun(INT, INT)
        f, env2 = self.binder("go", env)
        n = self.name("n")
        u0, u1 = self.name("u"), self.name("u")
        inner = env2 + ((f, fty), (n, INT))
        self.spend(20)
        e0 = self.leaf(INT, inner, datas)
        e1 = self.leaf(INT, inner, datas)
        op = self.rng.choice([BuiltinId.ADD_INTEGER, BuiltinId.MULTIPLY_INTEGER, BuiltinId.SUBTRACT_INTEGER])
        rec_call = App(Var(f), apps(Builtin(BuiltinId.SUBTRACT_INTEGER), Var(n), IntLit(1)))
        branch = TyFun(UNIT, INT)
        body = apps(TyInst(Builtin(BuiltinId.IF_THEN_ELSE), branch),
                    apps(Builtin(BuiltinId.LESS_THAN_EQ_INTEGER), Var(n), IntLit(0)),
                    Lam(u0, UNIT, e0),
                    Lam(u1, UNIT, apps(Builtin(op), rec_call, e1)),
                    UnitLit())
        strict = S if self.rng.random() < 0.6 else NS
        b = TermBinding(strict, f, fty, Lam(n, INT, body))
        scope = env2 + ((f, fty),)
        if ty == INT and self.rng.random() < 0.7:
            use = App(Var(f), IntLit(self.rng.randint(0, 4)))
            return Let(Recursivity.REC, (b,), use)
        return Let(Recursivity.REC, (b,), self.gen(ty, scope, datas, depth))

    def f_app_lam(self, ty, env, datas, depth):
        sigma = self.small_type(datas)
        x, env2 = self.binder("y", env)
        self.spend(2)
        fn = Lam(x, sigma, self.gen(ty, env2 + ((x, sigma),), datas, depth))
        return App(fn, self.gen(sigma, env, datas, depth))

    def f_op(self, ty, env, datas, depth):
        self.spend(3)
        if ty == INT:
            op = self.rng.choice([BuiltinId.ADD_INTEGER, BuiltinId.SUBTRACT_INTEGER, BuiltinId.MULTIPLY_INTEGER])
            return apps(Builtin(op), self.gen(INT, env, datas, depth), self.gen(INT, env, datas, depth))
        if ty == BOOL and self.rng.random() < 0.6:
            op = self.rng.choice([BuiltinId.LESS_THAN_EQ_INTEGER, BuiltinId.GREATER_THAN_EQ_INTEGER,
                                  BuiltinId.EQUALS_INTEGER])
            return apps(Builtin(op), self.gen(INT, env, datas, depth), self.gen(INT, env, datas, depth))
        self.spend(2)
        return apps(TyInst(Builtin(BuiltinId.IF_THEN_ELSE), ty), self.gen(BOOL, env, datas, depth),
                    self.gen(ty, env, datas, depth), self.gen(ty, env, datas, depth))

    def f_call(self, ty, env, datas, depth):
        fns = [(f, t) for f, t in env if isinstance(t, TyFun) and t.codomain == ty]
        if not fns:
            return None
        f, t = self.rng.choice(fns)
        self.spend(2)
        return App(Var(f), self.gen(t.domain, env, datas, depth))

    def f_poly(self, ty, env, datas, depth):
        a, x = self.name("a"), self.name("x")
        self.spend(5)
        ident = TyAbs(a, Star(), Lam(x, TyVar(a), Var(x)))
        return App(TyInst(ident, ty), self.gen(ty, env, datas, depth))

    def f_match(self, ty, env, datas, depth):
        if not datas:
            return None
        info = self.rng.choice(datas)
        args = tuple(INT for _ in info.decl.params)
        scrut_ty = info.type_of(args)
        cands = [x for x, t in env if t == scrut_ty]
        if cands and self.rng.random() < 0.6:
            scrut: Term = Var(self.rng.choice(cands))
            self.spend()
        else:
            i = self.rng.randrange(len(info.decl.constructors))
            scrut = self.construct(info, i, args, env, datas)
        head: Term = Var(info.decl.match_name)
        for a in args:
            head = TyInst(head, a)
        out = TyInst(App(head, scrut), ty)
        self.spend(3)
        for i in range(len(info.decl.constructors)):
            cur = env
            params = []
            for t in info.ctor_args(i, args):
                x, cur = self.binder("a", cur)
                params.append((x, t))
                cur = cur + ((x, t),)
            arm = self.gen(ty, cur, datas, depth) if self.budget > 8 else self.leaf(ty, cur, datas)
            for x, t in reversed(params):
                arm = Lam(x, t, arm)
                self.spend()
            out = App(out, arm)
        return out

    def f_data(self, ty, env, datas, depth):
        if self.datas_made >= 2 or self.budget < 15:
            return None
        self.datas_made += 1
        info = self.new_data(params=self.rng.random() < 0.3)
        self.spend(3)
        return Data(info.decl, self.gen(ty, env, datas + (info,), depth))

    def new_data(self, params: bool, shape: list[int] | None = None) -> _DataInfo:
        tyname = self.name("T")
        ps = ((self.name("p"), Star()),) if params else ()
        if shape is None:
            shape = [self.rng.randint(0, 2) for _ in range(self.rng.randint(1, 3))]
        ctors = []
        for i, arity in enumerate(shape):
            pool = [INT, BOOL] + [TyVar(p) for p, _ in ps]
            ctors.append(Constructor(self.name(f"C{i}"), tuple(self.rng.choice(pool) for _ in range(arity))))
        return _DataInfo(DataDecl(tyname, ps, tuple(ctors), self.name("match")))


def generate(rng: random.Random, max_nodes: int = MAX_NODES) -> Term:
    """One closed program whose result is an integer, a builtin boolean, unit or a two-way enum."""
    while True:
        g = _Gen(rng, max_nodes - 6)
        r = rng.random()
        if r < 0.15:
            info = g.new_data(params=False, shape=[0, 0])
            t: Term = Data(info.decl, g.gen(info.type_of(()), (), (info,)))
        else:
            ty = INT if r < 0.75 else BOOL if r < 0.95 else UNIT
            t = g.gen(ty, (), ())
        if term_size(t) <= max_nodes:
            return t


def generate_corpus(n: int, seed: int = 0, max_nodes: int = MAX_NODES) -> list[Term]:
    rng = random.Random(seed)
    return [generate(rng, max_nodes) for _ in range(n)]
