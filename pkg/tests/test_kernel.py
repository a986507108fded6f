import ast
import dataclasses
import random
from pathlib import Path

from helpers import LOOP_SRC, T, shift_uids, runs, timelock_dumps, timelock_hints
from pircert import kernel
from pircert.certify import certify
from pircert.kernel import validate_certificate, validate_derivation
from pircert.passes import Mutation, MutationKind, mutate, sites
from pircert.proof import (
    EMPTY_ENV,
    NO_HINTS,
    PIPELINE,
    RULE_PASS,
    Certificate,
    Derivation,
    EnvKind,
    EnvSnapshot,
    PassHints,
    PassId,
    RuleId,
)
from pircert.relations import CheckFailure, check_dce, check_pass
from pircert.semantics import compare
from pircert.syntax import Let, Name, positions
from pircert.textio import parse_certificate, parse_derivation, print_certificate, print_derivation, print_term


def test_dce_derivation_and_tampered_target() -> None:
    d = check_dce(T(f"(let nonrec ((bind nonstrict (x 1) Integer {LOOP_SRC})) (int 1))"), T("(int 1)"))
    assert validate_derivation(PassId.DCE, d).ok
    bad = dataclasses.replace(d, target=T("(int 2)"))
    report = validate_derivation(PassId.DCE, bad)
    assert not report.ok
    assert report.failures[0].path == ()


def test_inline_var_without_definition_fails_lookup() -> None:
    x, f = T("(var (x 1))"), T("(con False)")
    env = EnvSnapshot(EnvKind.INLINE, ())
    var1 = Derivation(RuleId.INLINE_VAR_1, env, x, f, (Derivation(RuleId.INLINE_CONG_CONST, env, f, f),))
    d = Derivation(RuleId.COMPOSE_WITNESS, EMPTY_ENV, x, f,
                   (var1, Derivation(RuleId.DCE_CONG_CONST, EMPTY_ENV, f, f)), witness=f)
    report = validate_derivation(PassId.INLINE, d)
    assert not report.ok
    assert "env lookup" in report.failures[0].reason


def test_rule_of_another_pass_rejected() -> None:
    t = T("(int 1)")
    d = Derivation(RuleId.RENAME_CONG_CONST, EnvSnapshot(EnvKind.RENAME, ()), t, t)
    assert not validate_derivation(PassId.DCE, d).ok


def timelock_certificate() -> tuple[Certificate, list]:
    terms = [d.term for d in timelock_dumps()]
    return certify(terms, timelock_hints()), terms


def test_timelock_certificate_validates() -> None:
    c, terms = timelock_certificate()
    assert validate_certificate(c, terms[0], terms[-1]).ok


def test_broken_chain() -> None:
    c, terms = timelock_certificate()
    steps = list(c.steps)
    steps[2] = dataclasses.replace(steps[2], source=terms[0], source_hash="")
    report = validate_certificate(Certificate(tuple(steps)), terms[0], terms[-1])
    assert any(f.reason == "broken chain" and f.step == 2 for f in report.failures)


def test_alpha_variant_final_is_caught() -> None:
    c, terms = timelock_certificate()
    final = terms[-1]
    # shift every uid: same program up to alpha, different names
    variant = T(shift_uids(print_term(final), 1000))
    assert variant != final
    assert not validate_certificate(c, terms[0], variant).ok


def test_out_of_order_and_digest_checks() -> None:
    c, terms = timelock_certificate()
    swapped = Certificate((c.steps[1], c.steps[0]) + c.steps[2:])
    reasons = {f.reason for f in validate_certificate(swapped, terms[0], terms[-1]).failures}
    assert "passes out of pipeline order" in reasons
    forged = Certificate((dataclasses.replace(c.steps[0], target_hash="0" * 64),) + c.steps[1:])
    reasons = {f.reason for f in validate_certificate(forged, terms[0], terms[-1]).failures}
    assert "target digest mismatch" in reasons


def test_empty_certificate() -> None:
    t = T("(int 1)")
    assert validate_certificate(Certificate(()), t, t).ok
    assert not validate_certificate(Certificate(()), t, T("(int 2)")).ok


def test_kernel_imports_only_core_modules() -> None:
    tree = ast.parse(Path(kernel.__file__).read_text())
    local = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom) and node.level:
            local.add(node.module)
        elif isinstance(node, ast.ImportFrom):
            assert node.module in ("__future__", "dataclasses"), node.module
        elif isinstance(node, ast.Import):
            raise AssertionError(f"unexpected import {ast.dump(node)}")
    assert local <= {"syntax", "proof", "textio"}


def test_validation_survives_reserialisation() -> None:
    for r in runs(60, 9):
        c = certify([d.term for d in r.dumps], r.hints)
        back = parse_certificate(print_certificate(c))
        assert validate_certificate(back, r.dumps[0].term, r.final) == validate_certificate(c, r.dumps[0].term, r.final)
        for s in c.steps:
            d2 = parse_derivation(print_derivation(s.derivation))
            assert validate_derivation(s.pass_id, d2) == validate_derivation(s.pass_id, s.derivation)


# ---------------------------------------------------------------------------
# Mutating derivations never yields a false acceptance


def _nodes(d: Derivation, path=()):
    yield path, d
    for i, p in enumerate(d.premises):
        yield from _nodes(p, path + (i,))


def _replace(d: Derivation, path, new: Derivation) -> Derivation:
    if not path:
        return new
    ps = list(d.premises)
    ps[path[0]] = _replace(ps[path[0]], path[1:], new)
    return dataclasses.replace(d, premises=tuple(ps))


def _mutate_term(rng, t):
    kinds = [k for k in MutationKind if sites(t, k)]
    if not kinds:
        return None
    k = rng.choice(kinds)
    return mutate(t, Mutation(k, rng.choice(sites(t, k))))


def _mutate_node(rng, p: PassId, n: Derivation):
    field = rng.choice(["rule", "env", "source", "target"])
    if field == "rule":
        others = [r for r, q in RULE_PASS.items() if q is p and r is not n.rule]
        return dataclasses.replace(n, rule=rng.choice(others))
    if field == "env":
        if not n.env.entries:
            return None
        es = list(n.env.entries)
        del es[rng.randrange(len(es))]
        return dataclasses.replace(n, env=EnvSnapshot(n.env.kind, tuple(es)))
    t = _mutate_term(rng, getattr(n, field))
    return None if t is None else dataclasses.replace(n, **{field: t})


def _hints_for(d: Derivation) -> PassHints:
    # the witness keeps the bindings the inline pass went on to remove
    if d.witness is None:
        return NO_HINTS
    kept = {b.name for _, s in positions(d.target) if isinstance(s, Let) for b in s.bindings}
    gone = [b.name for _, s in positions(d.witness) if isinstance(s, Let) for b in s.bindings if b.name not in kept]
    return PassHints(tuple(gone))


def test_mutated_derivations_are_rejected_or_genuine() -> None:
    rng = random.Random(12)
    pool = []
    for r in runs(80, 10):
        for i, p in enumerate(PIPELINE):
            h = r.hints if p is PassId.INLINE else NO_HINTS
            pool.append((p, check_pass(p, r.dumps[i].term, r.dumps[i + 1].term, h)))
    trials = accepted = 0
    while trials < 1000:
        p, d = rng.choice(pool)
        path, n = rng.choice(list(_nodes(d)))
        m = _mutate_node(rng, p, n)
        if m is None or m == n:
            continue
        trials += 1
        d2 = _replace(d, path, m)
        if not validate_derivation(p, d2).ok:
            continue
        accepted += 1
        try:
            check_pass(p, d2.source, d2.target, _hints_for(d2))
        except CheckFailure:
            raise AssertionError(f"kernel accepted an unrelated pair for {p.value}") from None
        assert compare(d2.source, d2.target).agree
    assert trials == 1000
