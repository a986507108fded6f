"""Trusted derivation and certificate checker.

Only syntax, proof and textio may be imported here: everything the kernel
trusts is in this file or in the core syntax utilities.
"""

from __future__ import annotations

from dataclasses import dataclass

from .proof import (
    CONG_RULES,
    FLOAT_STEPS,
    PIPELINE,
    RULE_PASS,
    TERM_NS,
    TYPE_NS,
    Certificate,
    Derivation,
    EnvKind,
    EnvSnapshot,
    PassId,
    RuleId,
    node_tag,
)
from .syntax import (
    App,
    BoolLit,
    Builtin,
    BuiltinId,
    Data,
    DataDecl,
    IntLit,
    KArrow,
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
    TyForall,
    TyFun,
    TyInst,
    TyLam,
    TyUnitBuiltin,
    TyVar,
    Type,
    UnitLit,
    Var,
    all_uids,
    alpha_eq,
    alpha_eq_type,
    children,
    free_type_vars,
    free_type_vars_of_type,
    free_vars,
)
from .textio import term_digest


@dataclass(frozen=True)
class Failure:
    step: int | None
    path: tuple[int, ...]
    rule: RuleId | None
    reason: str

    def __str__(self) -> str:
        where = "" if self.step is None else f"step {self.step} "
        rule = self.rule.value if self.rule else "-"
        return f"{where}node {list(self.path)} [{rule}]: {self.reason}"


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[Failure, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


class _Reject(Exception):
    pass


def _need(cond: bool, reason: str) -> None:
    if not cond:
        raise _Reject(reason)


# ---------------------------------------------------------------------------
# Shared node-level helpers


def _same_fields(s: Term, t: Term) -> bool:
    """Same constructor and same non-term fields (types up to alpha)."""
    if type(s) is not type(t):
        return False
    if isinstance(s, Lam):
        return s.binder == t.binder and alpha_eq_type(s.annotation, t.annotation)
    if isinstance(s, TyAbs):
        return s.binder == t.binder and s.kind == t.kind
    if isinstance(s, TyInst):
        return alpha_eq_type(s.type, t.type)
    if isinstance(s, Let):
        if s.rec is not t.rec or len(s.bindings) != len(t.bindings):
            return False
        return all(b.name == c.name and b.strictness is c.strictness and alpha_eq_type(b.annotation, c.annotation)
                   for b, c in zip(s.bindings, t.bindings))
    if isinstance(s, Data):
        return s.decl == t.decl
    if isinstance(s, App):
        return True
    return s == t


def _stitched(d: Derivation, pairs: list[tuple[Term, Term]]) -> None:
    _need(len(d.premises) == len(pairs), f"expected {len(pairs)} premises, got {len(d.premises)}")
    for i, (p, (src, tgt)) in enumerate(zip(d.premises, pairs)):
        _need(p.source == src, f"premise {i} has the wrong source")
        _need(p.target == tgt, f"premise {i} has the wrong target")


def _congruent(d: Derivation) -> None:
    s, t = d.source, d.target
    _need(_same_fields(s, t), f"{node_tag(s)} node is not congruent to its target")
    _stitched(d, list(zip(children(s), children(t))))


def _is_cong(pid: PassId, d: Derivation) -> bool:
    return CONG_RULES.get(pid, {}).get(node_tag(d.source)) is d.rule


def _value(t: Term, arity: dict[Name, int]) -> bool:
    if isinstance(t, (Lam, TyAbs, IntLit, BoolLit, UnitLit, Builtin)):
        return True
    args: list[Term] = []
    while isinstance(t, (App, TyInst)):
        if isinstance(t, App):
            args.append(t.arg)
            t = t.fn
        else:
            t = t.term
    if not isinstance(t, Var) or t.name not in arity:
        return False
    return len(args) == arity[t.name] and all(_value(a, arity) for a in args)


def _rest_fv(let: Let, i: int) -> frozenset[Name]:
    """Free term variables of what follows binding ``i`` of a non-recursive group."""
    if i + 1 < len(let.bindings):
        return free_vars(Let(let.rec, let.bindings[i + 1:], let.body))
    return free_vars(let.body)


# ---------------------------------------------------------------------------
# Per-relation validators. Each returns [(premise, context)] to descend into.


class _Validator:
    def __init__(self, pid: PassId):
        self.pid = pid
        self.failures: list[Failure] = []

    def run(self, d: Derivation) -> list[Failure]:
        try:
            root = self.root(d)
        except _Reject as e:
            return [Failure(None, (), d.rule, str(e))]
        except Exception as e:  # malformed input must not crash the kernel
            return [Failure(None, (), d.rule, f"malformed derivation: {type(e).__name__}")]
        stack = [(path, node, ctx, kind) for path, node, ctx, kind in root]
        while stack:
            path, node, ctx, kind = stack.pop()
            try:
                _need(isinstance(node, Derivation), "premise is not a derivation")
                _need(RULE_PASS.get(node.rule) is kind, f"rule {node.rule.value} does not belong to {kind.value}")
                subs = getattr(self, "v_" + kind.name.lower())(node, ctx)
            except _Reject as e:
                self.failures.append(Failure(None, path, getattr(node, "rule", None), str(e)))
                continue
            except Exception as e:
                self.failures.append(Failure(None, path, getattr(node, "rule", None),
                                             f"malformed node: {type(e).__name__}"))
                continue
            for i in range(len(subs) - 1, -1, -1):
                p, c = subs[i]
                stack.append((path + (i,), p, c, kind))
        return self.failures

    def root(self, d: Derivation):
        pid = self.pid
        _need(isinstance(d, Derivation), "not a derivation")
        if pid is PassId.INLINE:
            _need(d.rule is RuleId.COMPOSE_WITNESS, "inline derivations must compose through a witness")
            _need(d.env.kind is EnvKind.EMPTY and not d.env.entries, "root environment must be empty")
            w = d.witness
            _need(w is not None, "missing witness term")
            _stitched(d, [(d.source, w), (w, d.target)])
            return [((0,), d.premises[0], (), PassId.INLINE), ((1,), d.premises[1], {}, PassId.DCE)]
        if pid is PassId.RENAME:
            _need(d.env.kind is EnvKind.RENAME, "rename root needs a renaming environment")
            _need(all(len(e) == 3 and e[0] in (TERM_NS, TYPE_NS) and e[1] == e[2] for e in d.env.entries),
                  "root renaming environment must be the identity")
            return [((), d, d.env.entries, pid)]
        if pid is PassId.FLOAT_LET:
            _need(d.rule in (RuleId.FLOAT_TRANS, RuleId.FLOAT_REFL), "float derivations are chains")
            return [((), d, None, pid)]
        if pid is PassId.THUNK:
            return [((), d, (), pid)]
        if pid is PassId.DCE:
            return [((), d, {}, pid)]
        return [((), d, None, pid)]

    # -- rename -----------------------------------------------------------------

    @staticmethod
    def _look(env, ns: str, x: Name):
        for e in env:
            if e[0] == ns and e[1] == x:
                return e[2]
        return None

    @staticmethod
    def _no_capture(env, ns: str, x: Name, y: Name, fv: frozenset[Name]) -> None:
        for e in env:
            if e[0] == ns and e[2] == y and e[1] != x and e[1] in fv:
                raise _Reject(f"binder {y!r} captures {e[1]!r}")

    def _ren_ty(self, env, a: Type, b: Type) -> None:
        if isinstance(a, TyVar):
            _need(isinstance(b, TyVar) and self._look(env, TYPE_NS, a.name) == b.name,
                  f"type variable {a.name!r} not related")
        elif isinstance(a, (TyFun, TyApp)):
            _need(type(a) is type(b), "type shape differs")
            l1, r1 = (a.domain, a.codomain) if isinstance(a, TyFun) else (a.fn, a.arg)
            l2, r2 = (b.domain, b.codomain) if isinstance(b, TyFun) else (b.fn, b.arg)
            self._ren_ty(env, l1, l2)
            self._ren_ty(env, r1, r2)
        elif isinstance(a, (TyForall, TyLam)):
            _need(type(a) is type(b) and a.kind == b.kind, "type binder differs")
            self._no_capture(env, TYPE_NS, a.binder, b.binder, free_type_vars_of_type(a.body) - {a.binder})
            self._ren_ty(((TYPE_NS, a.binder, b.binder),) + env, a.body, b.body)
        else:
            _need(a == b, "base type differs")

    def v_rename(self, d: Derivation, env):
        _need(d.env == EnvSnapshot(EnvKind.RENAME, env), "environment does not match its context")
        s, t, r = d.source, d.target, d.rule
        if r is RuleId.RENAME_VAR:
            _need(isinstance(s, Var) and isinstance(t, Var), "not a variable")
            _need(self._look(env, TERM_NS, s.name) == t.name, f"({s.name!r}, {t.name!r}) not in environment")
            _stitched(d, [])
            return []
        if r is RuleId.RENAME_ABS:
            if isinstance(s, Lam):
                _need(isinstance(t, Lam), "target is not a lambda")
                self._ren_ty(env, s.annotation, t.annotation)
                self._no_capture(env, TERM_NS, s.binder, t.binder, free_vars(s.body) - {s.binder})
                inner = ((TERM_NS, s.binder, t.binder),) + env
            else:
                _need(isinstance(s, TyAbs) and isinstance(t, TyAbs) and s.kind == t.kind, "not an abstraction")
                self._no_capture(env, TYPE_NS, s.binder, t.binder, free_type_vars(s.body) - {s.binder})
                inner = ((TYPE_NS, s.binder, t.binder),) + env
            _stitched(d, [(s.body, t.body)])
            return [(d.premises[0], inner)]
        if r is RuleId.RENAME_CONG_APP:
            _need(isinstance(s, App) and isinstance(t, App), "not an application")
            _stitched(d, [(s.fn, t.fn), (s.arg, t.arg)])
            return [(p, env) for p in d.premises]
        if r is RuleId.RENAME_CONG_INST:
            _need(isinstance(s, TyInst) and isinstance(t, TyInst), "not an instantiation")
            self._ren_ty(env, s.type, t.type)
            _stitched(d, [(s.term, t.term)])
            return [(d.premises[0], env)]
        if r is RuleId.RENAME_CONG_CONST:
            _need(isinstance(s, (IntLit, BoolLit, UnitLit, Builtin)) and s == t, "constants differ")
            _stitched(d, [])
            return []
        if r is RuleId.RENAME_LET:
            return self._ren_let(d, env)
        if r is RuleId.RENAME_DATA:
            return self._ren_data(d, env)
        raise _Reject("not a rename rule")

    def _ren_let(self, d: Derivation, env):
        s, t = d.source, d.target
        _need(isinstance(s, Let) and isinstance(t, Let), "not a let")
        _need(s.rec is t.rec and len(s.bindings) == len(t.bindings), "let shape differs")
        for b, c in zip(s.bindings, t.bindings):
            _need(b.strictness is c.strictness, "strictness differs")
            self._ren_ty(env, b.annotation, c.annotation)
        pairs = [(b.rhs, c.rhs) for b, c in zip(s.bindings, t.bindings)] + [(s.body, t.body)]
        _stitched(d, pairs)
        if s.rec is Recursivity.REC:
            b, c = s.bindings[0], t.bindings[0]
            self._no_capture(env, TERM_NS, b.name, c.name, (free_vars(b.rhs) | free_vars(s.body)) - {b.name})
            inner = ((TERM_NS, b.name, c.name),) + env
            return [(p, inner) for p in d.premises]
        out = []
        cur = env
        for i, (b, c) in enumerate(zip(s.bindings, t.bindings)):
            out.append((d.premises[i], cur))
            self._no_capture(cur, TERM_NS, b.name, c.name, _rest_fv(s, i) - {b.name})
            cur = ((TERM_NS, b.name, c.name),) + cur
        out.append((d.premises[-1], cur))
        return out

    def _ren_data(self, d: Derivation, env):
        s, t = d.source, d.target
        _need(isinstance(s, Data) and isinstance(t, Data), "not a datatype")
        a, b = s.decl, t.decl
        _need(len(a.params) == len(b.params) and len(a.constructors) == len(b.constructors), "declaration differs")
        _need(all(k1 == k2 for (_, k1), (_, k2) in zip(a.params, b.params)), "parameter kinds differ")
        _need(all(len(c1.args) == len(c2.args) for c1, c2 in zip(a.constructors, b.constructors)),
              "constructor arities differ")
        ctor_ftv: frozenset[Name] = frozenset()
        for c in a.constructors:
            for ty in c.args:
                ctor_ftv |= free_type_vars_of_type(ty)
        scope = ((ctor_ftv - {p for p, _ in a.params}) | free_type_vars(s.body)) - {a.tyname}
        self._no_capture(env, TYPE_NS, a.tyname, b.tyname, scope)
        outer = ((TYPE_NS, a.tyname, b.tyname),) + env
        cur = outer
        for (p1, _), (p2, _) in zip(a.params, b.params):
            self._no_capture(cur, TYPE_NS, p1, p2, ctor_ftv - {p1})
            cur = ((TYPE_NS, p1, p2),) + cur
        for c1, c2 in zip(a.constructors, b.constructors):
            for x, y in zip(c1.args, c2.args):
                self._ren_ty(cur, x, y)
        body_fv = free_vars(s.body)
        cur = outer
        olds = [c.name for c in a.constructors] + [a.match_name]
        news = [c.name for c in b.constructors] + [b.match_name]
        for x, y in zip(olds, news):
            self._no_capture(cur, TERM_NS, x, y, body_fv - {x})
            cur = ((TERM_NS, x, y),) + cur
        _stitched(d, [(s.body, t.body)])
        return [(d.premises[0], cur)]

    # -- inline -----------------------------------------------------------------

    @staticmethod
    def _drop(env, terms=frozenset(), types=frozenset()):
        return tuple(e for e in env if e[0] not in terms and not (free_vars(e[1]) & terms)
                     and not (free_type_vars(e[1]) & types))

    def v_inline(self, d: Derivation, env):
        _need(d.env == EnvSnapshot(EnvKind.INLINE, env), "environment does not match its context")
        s, t, r = d.source, d.target, d.rule
        if r is RuleId.INLINE_VAR_1:
            _need(isinstance(s, Var), "not a variable")
            found = [e[1] for e in env if e[0] == s.name]
            _need(bool(found), f"env lookup: {s.name!r} is not bound to a definition")
            _stitched(d, [(found[-1], t)])
            return [(d.premises[0], env)]
        if r is RuleId.INLINE_VAR_2:
            _need(isinstance(s, Var) and s == t, "variable changed")
            _stitched(d, [])
            return []
        if r is RuleId.INLINE_LET:
            _need(isinstance(s, Let) and _same_fields(s, t), "let changed shape")
            pairs = [(b.rhs, c.rhs) for b, c in zip(s.bindings, t.bindings)] + [(s.body, t.body)]
            _stitched(d, pairs)
            if s.rec is Recursivity.REC:
                b = s.bindings[0]
                inner = self._drop(env, {b.name}) + ((b.name, b.rhs),)
                return [(p, inner) for p in d.premises]
            out, cur = [], env
            for i, b in enumerate(s.bindings):
                out.append((d.premises[i], cur))
                cur = self._drop(cur, {b.name}) + ((b.name, b.rhs),)
            out.append((d.premises[-1], cur))
            return out
        _need(_is_cong(PassId.INLINE, d), "rule does not apply to this node")
        _congruent(d)
        if isinstance(s, Lam):
            env = self._drop(env, {s.binder})
        elif isinstance(s, TyAbs):
            env = self._drop(env, types={s.binder})
        elif isinstance(s, Data):
            env = self._drop(env, {c.name for c in s.decl.constructors} | {s.decl.match_name}, {s.decl.tyname})
        return [(p, env) for p in d.premises]

    # -- dead code --------------------------------------------------------------

    def v_dce(self, d: Derivation, arity: dict[Name, int]):
        _need(d.env.kind is EnvKind.EMPTY and not d.env.entries, "dce nodes carry no environment")
        s, t, r = d.source, d.target, d.rule
        if r in (RuleId.DCE_LET_NONSTRICT, RuleId.DCE_LET_STRICT_VALUE, RuleId.DCE_CONG_LET):
            _need(isinstance(s, Let), "not a let")
            kept_n = len(d.premises) - 1
            _need(kept_n >= 0, "missing body premise")
            if kept_n == 0:
                kept_idx, kept_tgt, body_t = [], (), t
            else:
                _need(isinstance(t, Let) and t.rec is s.rec and len(t.bindings) == kept_n, "kept bindings differ")
                kept_idx, j = [], 0
                for c in t.bindings:
                    while j < len(s.bindings) and s.bindings[j].name != c.name:
                        j += 1
                    _need(j < len(s.bindings), f"{c.name!r} is not a source binding")
                    b = s.bindings[j]
                    _need(b.strictness is c.strictness and alpha_eq_type(b.annotation, c.annotation),
                          f"kept binding {b.name!r} changed")
                    kept_idx.append(j)
                    j += 1
                kept_tgt, body_t = t.bindings, t.body
            pairs = [(s.bindings[i].rhs, c.rhs) for i, c in zip(kept_idx, kept_tgt)] + [(s.body, body_t)]
            _stitched(d, pairs)
            removed = [i for i in range(len(s.bindings)) if i not in kept_idx]
            strict_removed = False
            for i in removed:
                b = s.bindings[i]
                if s.rec is Recursivity.REC:
                    live = free_vars(body_t)
                else:
                    later = tuple(c for k, c in zip(kept_idx, kept_tgt) if k > i)
                    live = free_vars(Let(s.rec, later, body_t)) if later else free_vars(body_t)
                _need(b.name not in live, f"removed {b.name!r} occurs in the result")
                if b.strictness is Strictness.STRICT:
                    _need(_value(b.rhs, arity), f"removed strict {b.name!r} is not a syntactic value")
                    strict_removed = True
            if r is RuleId.DCE_CONG_LET:
                _need(not removed, "congruence removed a binding")
            elif r is RuleId.DCE_LET_NONSTRICT:
                _need(bool(removed) and not strict_removed, "rule needs removed non-strict bindings only")
            else:
                _need(strict_removed, "rule needs a removed strict binding")
            return [(p, arity) for p in d.premises]
        _need(_is_cong(PassId.DCE, d), "rule does not apply to this node")
        _congruent(d)
        if isinstance(s, Data):
            arity = {**arity, **{c.name: len(c.args) for c in s.decl.constructors}}
        return [(p, arity) for p in d.premises]

    # -- let floating -------------------------------------------------------------

    def v_float_let(self, d: Derivation, _ctx):
        _need(d.env.kind is EnvKind.EMPTY and not d.env.entries, "float nodes carry no environment")
        if d.rule is RuleId.FLOAT_REFL:
            _need(d.source == d.target, "reflexivity relates different terms")
            _stitched(d, [])
            return []
        _need(d.rule is RuleId.FLOAT_TRANS, "chains are built from Float-Trans and Float-Refl")
        _need(len(d.premises) == 2, "Float-Trans has two premises")
        step, rest = d.premises
        _need(isinstance(step, Derivation) and step.rule in FLOAT_STEPS, "first premise must be a single step")
        _need(isinstance(rest, Derivation) and rest.rule in (RuleId.FLOAT_TRANS, RuleId.FLOAT_REFL),
              "second premise must be a chain")
        _need(step.source == d.source and rest.source == step.target and rest.target == d.target,
              "chain is not stitched")
        _need(step.env.kind is EnvKind.EMPTY and not step.env.entries and not step.premises,
              "single steps have no premises")
        self._float_step(step)
        return [(rest, None)]

    def _float_step(self, step: Derivation) -> None:
        s, t = step.source, step.target
        _need(s != t, "step changes nothing")
        while True:
            cs, ct = children(s), children(t)
            if type(s) is not type(t) or len(cs) != len(ct) or not _same_exact(s, t):
                break
            diff = [i for i in range(len(cs)) if cs[i] != ct[i]]
            if len(diff) != 1:
                break
            s, t = cs[diff[0]], ct[diff[0]]
        _need(any(r == t for r in _float_results(step.rule, s)), f"{step.rule.value} does not produce the target")

    # -- thunking -----------------------------------------------------------------

    def v_thunk(self, d: Derivation, env):
        _need(d.env == EnvSnapshot(EnvKind.STRICTNESS, env), "environment does not match its context")
        s, t, r = d.source, d.target, d.rule
        if isinstance(s, Var):
            found = [e[1] for e in env if e[0] == s.name]
            ns = bool(found) and found[-1] is Strictness.NONSTRICT
            if r is RuleId.THUNK_VAR:
                _need(ns, f"{s.name!r} is not non-strict")
                _need(t == App(s, UnitLit()), "occurrence is not applied to unit")
            else:
                _need(r is RuleId.THUNK_CONG_VAR and not ns and s == t, "variable is not related")
            _stitched(d, [])
            return []
        if r in (RuleId.THUNK_LET_NONSTRICT, RuleId.THUNK_LET_STRICT):
            _need(isinstance(s, Let) and isinstance(t, Let), "not a let")
            _need(s.rec is t.rec and len(s.bindings) == len(t.bindings), "let shape differs")
            any_ns = any(b.strictness is Strictness.NONSTRICT for b in s.bindings)
            _need((r is RuleId.THUNK_LET_NONSTRICT) == any_ns, "rule does not match binding strictness")
            pairs = []
            for b, c in zip(s.bindings, t.bindings):
                _need(b.name == c.name, "binder changed")
                if b.strictness is Strictness.NONSTRICT:
                    _need(c.strictness is Strictness.STRICT, f"{b.name!r} is still non-strict")
                    _need(alpha_eq_type(c.annotation, TyFun(TyUnitBuiltin(), b.annotation)),
                          f"{b.name!r} has the wrong annotation")
                    _need(isinstance(c.rhs, Lam) and c.rhs.annotation == TyUnitBuiltin(),
                          f"{b.name!r} is not a unit lambda")
                    _need(c.rhs.binder not in free_vars(b.rhs), "unit binder is not fresh")
                    pairs.append((b.rhs, c.rhs.body))
                else:
                    _need(c.strictness is b.strictness and alpha_eq_type(b.annotation, c.annotation),
                          f"{b.name!r} changed")
                    pairs.append((b.rhs, c.rhs))
            pairs.append((s.body, t.body))
            _stitched(d, pairs)
            if s.rec is Recursivity.REC:
                inner = env + tuple((b.name, b.strictness) for b in s.bindings)
                return [(p, inner) for p in d.premises]
            out, cur = [], env
            for i, b in enumerate(s.bindings):
                out.append((d.premises[i], cur))
                cur = cur + ((b.name, b.strictness),)
            out.append((d.premises[-1], cur))
            return out
        _need(_is_cong(PassId.THUNK, d), "rule does not apply to this node")
        _congruent(d)
        if isinstance(s, Lam):
            env = env + ((s.binder, Strictness.STRICT),)
        elif isinstance(s, Data):
            env = env + tuple((n, Strictness.STRICT) for n in
                              [c.name for c in s.decl.constructors] + [s.decl.match_name])
        return [(p, env) for p in d.premises]

    # -- recursive lets -----------------------------------------------------------

    def v_encode_rec(self, d: Derivation, _ctx):
        _need(d.env.kind is EnvKind.EMPTY and not d.env.entries, "no environment expected")
        s, t = d.source, d.target
        if d.rule is not RuleId.ENCREC_LET:
            _need(_is_cong(PassId.ENCODE_REC, d), "rule does not apply to this node")
            _need(not (isinstance(s, Let) and s.rec is Recursivity.REC), "recursive let must be encoded")
            _congruent(d)
            return [(p, None) for p in d.premises]
        _need(isinstance(s, Let) and s.rec is Recursivity.REC and len(s.bindings) == 1, "not a single recursive let")
        b = s.bindings[0]
        _need(isinstance(t, Let) and t.rec is Recursivity.NONREC and len(t.bindings) == 1, "no fix binding")
        fb = t.bindings[0]
        inner = t.body
        _need(isinstance(inner, Let) and inner.rec is Recursivity.NONREC and len(inner.bindings) == 1,
              "no encoded binding")
        c = inner.bindings[0]
        _need(fb.strictness is Strictness.STRICT and fb.rhs == Builtin(BuiltinId.FIX), "fix rhs is not the builtin")
        _need(alpha_eq_type(fb.annotation, TyFun(TyFun(b.annotation, b.annotation), b.annotation)),
              "fix annotation is wrong")
        _need(fb.name != b.name and fb.name not in free_vars(b.rhs) and fb.name not in free_vars(s.body),
              "fix binder is not fresh")
        _need(c.name == b.name and c.strictness is b.strictness and alpha_eq_type(c.annotation, b.annotation),
              "encoded binding changed")
        fn = c.rhs
        _need(isinstance(fn, App) and fn.fn == Var(fb.name) and isinstance(fn.arg, Lam), "rhs is not fix (λ..)")
        lam = fn.arg
        _need(alpha_eq_type(lam.annotation, b.annotation), "fix lambda annotation is wrong")
        _need(len(d.premises) == 2, "EncRec-Let has two premises")
        p0, p1 = d.premises
        _need(p0.source == b.rhs, "premise 0 has the wrong source")
        _need(alpha_eq(lam, Lam(b.name, lam.annotation, p0.target)), "fix lambda body is not the premise target")
        _need(p1.source == s.body and p1.target == inner.body, "premise 1 is not stitched")
        return [(p0, None), (p1, None)]

    # -- datatypes -----------------------------------------------------------------

    def v_encode_data(self, d: Derivation, _ctx):
        _need(d.env.kind is EnvKind.EMPTY and not d.env.entries, "no environment expected")
        s, t = d.source, d.target
        if d.rule is not RuleId.SCOTT_DATA:
            _need(_is_cong(PassId.ENCODE_DATA, d), "rule does not apply to this node")
            _congruent(d)
            return [(p, None) for p in d.premises]
        _need(isinstance(s, Data), "not a datatype")
        body = _check_scott(s.decl, t, max(all_uids(s) | all_uids(t) | {0}) + 1)
        _stitched(d, [(s.body, body)])
        return [(d.premises[0], None)]

    # -- non-recursive lets ----------------------------------------------------------

    def v_encode_nonrec(self, d: Derivation, _ctx):
        _need(d.env.kind is EnvKind.EMPTY and not d.env.entries, "no environment expected")
        s, t = d.source, d.target
        if d.rule is not RuleId.REDEX_LET:
            _need(_is_cong(PassId.ENCODE_NONREC, d), "rule does not apply to this node")
            _congruent(d)
            return [(p, None) for p in d.premises]
        _need(isinstance(s, Let) and s.rec is Recursivity.NONREC, "not a non-recursive let")
        pairs = []
        cur = t
        for b in s.bindings:
            _need(b.strictness is Strictness.STRICT, f"{b.name!r} is not strict")
            _need(isinstance(cur, App) and isinstance(cur.fn, Lam) and cur.fn.binder == b.name
                  and alpha_eq_type(cur.fn.annotation, b.annotation), f"{b.name!r} is not a beta redex")
            pairs.append((b.rhs, cur.arg))
            cur = cur.fn.body
        pairs.append((s.body, cur))
        _stitched(d, pairs)
        return [(p, None) for p in d.premises]


def _same_exact(s: Term, t: Term) -> bool:
    if isinstance(s, Lam):
        return s.binder == t.binder and s.annotation == t.annotation
    if isinstance(s, TyAbs):
        return s.binder == t.binder and s.kind == t.kind
    if isinstance(s, TyInst):
        return s.type == t.type
    if isinstance(s, Let):
        return s.rec is t.rec and [(b.strictness, b.name, b.annotation) for b in s.bindings] == \
            [(b.strictness, b.name, b.annotation) for b in t.bindings]
    if isinstance(s, Data):
        return s.decl == t.decl
    return isinstance(s, App) or s == t


def _lazy(let: Let) -> bool:
    return all(b.strictness is Strictness.NONSTRICT for b in let.bindings)


def _names(let: Let) -> set[Name]:
    return {b.name for b in let.bindings}


def _float_results(rule: RuleId, q: Term) -> list[Term]:
    """Every rewrite of ``q`` that ``rule`` permits at the root."""
    out: list[Term] = []
    if rule is RuleId.FLOAT_LET_LAM:
        if isinstance(q, Lam) and isinstance(q.body, Let):
            let = q.body
            if _lazy(let) and q.binder not in _names(let) and all(q.binder not in free_vars(b.rhs)
                                                                  for b in let.bindings):
                out.append(Let(let.rec, let.bindings, Lam(q.binder, q.annotation, let.body)))
    elif rule is RuleId.FLOAT_LET_APP:
        if isinstance(q, App):
            if isinstance(q.fn, Let) and not (_names(q.fn) & free_vars(q.arg)):
                out.append(Let(q.fn.rec, q.fn.bindings, App(q.fn.body, q.arg)))
            if isinstance(q.arg, Let) and _lazy(q.arg) and not (_names(q.arg) & free_vars(q.fn)):
                out.append(Let(q.arg.rec, q.arg.bindings, App(q.fn, q.arg.body)))
        elif isinstance(q, TyInst) and isinstance(q.term, Let):
            out.append(Let(q.term.rec, q.term.bindings, TyInst(q.term.body, q.type)))
    elif rule is RuleId.FLOAT_LET_LET:
        if isinstance(q, Let) and q.rec is Recursivity.NONREC and len(q.bindings) == 1:
            b = q.bindings[0]
            r = b.rhs
            if (isinstance(r, Let) and (b.strictness is Strictness.STRICT or _lazy(r))
                    and b.name not in _names(r) and not (_names(r) & free_vars(q.body))):
                moved = Let(q.rec, (TermBinding(b.strictness, b.name, b.annotation, r.body),), q.body)
                out.append(Let(r.rec, r.bindings, moved))
            n = q.body
            if (isinstance(n, Let) and b.name not in _names(n)
                    and all(b.name not in free_vars(c.rhs) for c in n.bindings)
                    and not (_names(n) & free_vars(b.rhs))
                    and (b.strictness is Strictness.NONSTRICT or _lazy(n))):
                out.append(Let(n.rec, n.bindings, Let(q.rec, q.bindings, n.body)))
    elif rule is RuleId.FLOAT_MERGE:
        if (isinstance(q, Let) and q.rec is Recursivity.NONREC and isinstance(q.body, Let)
                and q.body.rec is Recursivity.NONREC):
            out.append(Let(Recursivity.NONREC, q.bindings + q.body.bindings, q.body.body))
    return out


# ---------------------------------------------------------------------------
# Scott template, rebuilt independently of the compiler's encoder


def _check_scott(decl: DataDecl, t: Term, next_uid: int) -> Term:
    """Validate the encoding of ``decl`` in ``t``; return the encoded body."""
    for c in decl.constructors:
        for ty in c.args:
            _need(decl.tyname not in free_type_vars_of_type(ty), "recursive datatype")
    k = len(decl.constructors)
    args = []
    for _ in range(k + 1):
        _need(isinstance(t, App), "missing constructor or matcher argument")
        args.append(t.arg)
        t = t.fn
    args.reverse()
    _need(isinstance(t, TyInst) and isinstance(t.term, TyAbs), "head is not an instantiated type abstraction")
    head = t.term
    kind = Star()
    for _, pk in reversed(decl.params):
        kind = KArrow(pk, kind)
    _need(head.binder == decl.tyname and head.kind == kind, "type abstraction does not bind the datatype")

    r = Name("r", next_uid)
    params = [p for p, _ in decl.params]
    tv = TyVar(decl.tyname)

    def fn(*tys):
        out = tys[-1]
        for x in reversed(tys[:-1]):
            out = TyFun(x, out)
        return out

    def applied():
        out = tv
        for p in params:
            out = TyApp(out, TyVar(p))
        return out

    def over_params(body, ctor):
        for p, pk in reversed(decl.params):
            body = ctor(p, pk, body)
        return body

    case_tys = [fn(*c.args, TyVar(r)) for c in decl.constructors]
    scott = TyForall(r, Star(), fn(*case_tys, TyVar(r)))

    _need(alpha_eq_type(t.type, over_params(scott, TyLam)), "type argument is not the Scott type")

    body = head.body
    for c in decl.constructors:
        want = over_params(fn(*c.args, applied()), TyForall)
        _need(isinstance(body, Lam) and body.binder == c.name and alpha_eq_type(body.annotation, want),
              f"constructor {c.name!r} is not abstracted correctly")
        body = body.body
    want = over_params(TyFun(applied(), scott), TyForall)
    _need(isinstance(body, Lam) and body.binder == decl.match_name and alpha_eq_type(body.annotation, want),
          "match function is not abstracted correctly")

    uid = next_uid + 1
    for i, c in enumerate(decl.constructors):
        xs = [Name("x", uid + j) for j in range(len(c.args))]
        ks = [Name("k", uid + len(xs) + j) for j in range(k)]
        uid += len(xs) + k
        e: Term = Var(ks[i])
        for x in xs:
            e = App(e, Var(x))
        for kn, ty in reversed(list(zip(ks, case_tys))):
            e = Lam(kn, ty, e)
        e = TyAbs(r, Star(), e)
        for x, ty in reversed(list(zip(xs, c.args))):
            e = Lam(x, ty, e)
        _need(alpha_eq(args[i], over_params(e, TyAbs)), f"constructor {c.name!r} is not encoded correctly")
    x = Name("x", uid)
    _need(alpha_eq(args[k], over_params(Lam(x, scott, Var(x)), TyAbs)), "matcher is not the identity")
    return body.body


# ---------------------------------------------------------------------------
# Entry points


def validate_derivation(p: PassId, d: Derivation) -> ValidationReport:
    return ValidationReport(tuple(_Validator(p).run(d)))


def validate_certificate(c: Certificate, original: Term, final: Term) -> ValidationReport:
    fails: list[Failure] = []
    steps = c.steps
    if not steps:
        if original != final:
            fails.append(Failure(None, (), None, "empty certificate but the programs differ"))
        return ValidationReport(tuple(fails))
    if steps[0].source != original:
        fails.append(Failure(0, (), None, "first source is not the original program"))
    if steps[-1].target != final:
        fails.append(Failure(len(steps) - 1, (), None, "last target is not the final program"))
    last = -1
    for i, st in enumerate(steps):
        if i and steps[i - 1].target != st.source:
            fails.append(Failure(i, (), None, "broken chain"))
        idx = PIPELINE.index(st.pass_id)
        if idx <= last:
            fails.append(Failure(i, (), None, "passes out of pipeline order"))
        last = idx
        if st.source_hash and st.source_hash != term_digest(st.source):
            fails.append(Failure(i, (), None, "source digest mismatch"))
        if st.target_hash and st.target_hash != term_digest(st.target):
            fails.append(Failure(i, (), None, "target digest mismatch"))
        d = st.derivation
        if d.source != st.source or d.target != st.target:
            fails.append(Failure(i, (), d.rule, "derivation does not relate the step's terms"))
            continue
        if st.witnesses and st.witnesses != ((d.witness,) if d.witness is not None else ()):
            fails.append(Failure(i, (), d.rule, "recorded witnesses disagree with the derivation"))
        for f in validate_derivation(st.pass_id, d).failures:
            fails.append(Failure(i, f.path, f.rule, f.reason))
    return ValidationReport(tuple(fails))
