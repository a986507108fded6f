"""Hypothesis properties over random terms and seeded corpus programs."""

import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from helpers import alpha_oracle, shift_uids
from pircert.corpus import generate
from pircert.kernel import validate_derivation
from pircert.passes import run_pass, run_pipeline_full, run_rename
from pircert.proof import NO_HINTS, PIPELINE, PassId
from pircert.relations import check_pass
from pircert.semantics import compare, eval as evaluate
from pircert.syntax import (
    App,
    BoolLit,
    Constructor,
    Data,
    DataDecl,
    IntLit,
    Star,
    Lam,
    Let,
    Name,
    Recursivity,
    Strictness,
    TermBinding,
    TyAbs,
    TyBuiltinBool,
    TyFun,
    TyInst,
    TyInteger,
    TyVar,
    Var,
    alpha_eq,
    globally_unique,
)
from pircert.textio import parse_term, print_term

FAST = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])

# a small uid space makes shadowing and accidental alpha-equivalence common
names = st.builds(Name, st.sampled_from(["x", "y", "f"]), st.integers(0, 4))
types = st.recursive(
    st.one_of(st.just(TyInteger()), st.just(TyBuiltinBool()), st.builds(TyVar, names)),
    lambda inner: st.builds(TyFun, inner, inner),
    max_leaves=3,
)


def _terms(inner):
    binding = st.builds(TermBinding, st.sampled_from(list(Strictness)), names, types, inner)
    return st.one_of(
        st.builds(Lam, names, types, inner),
        st.builds(App, inner, inner),
        st.builds(TyAbs, names, st.just(Star()), inner),
        st.builds(TyInst, inner, types),
        st.builds(Let, st.just(Recursivity.NONREC), st.lists(binding, min_size=1, max_size=2).map(tuple), inner),
        st.builds(Let, st.just(Recursivity.REC), st.tuples(binding), inner),
        st.builds(
            lambda t, c, m, body: Data(DataDecl(t, (), (Constructor(c, (TyInteger(),)),), m), body),
            names, names, names, inner,
        ),
    )


terms = st.recursive(
    st.one_of(st.builds(Var, names), st.builds(IntLit, st.integers(-3, 3)), st.builds(BoolLit, st.booleans())),
    _terms,
    max_leaves=8,
)

seeds = st.integers(0, 2**32 - 1)


def program(seed: int):
    return generate(random.Random(seed))


@FAST
@given(terms)
def test_print_parse_round_trip(t) -> None:
    assert parse_term(print_term(t)) == t


@FAST
@given(terms, terms)
def test_alpha_eq_matches_canonical_numbering(a, b) -> None:
    assert alpha_eq(a, b) == alpha_oracle(a, b)
    assert alpha_eq(a, a)
    assert alpha_eq(a, b) == alpha_eq(b, a)


@FAST
@given(seeds)
def test_alpha_eq_is_transitive_through_renaming(seed: int) -> None:
    t = program(seed)
    r1 = run_rename(t).term
    r2 = run_rename(parse_term(shift_uids(print_term(t), 100))).term
    assert alpha_eq(t, r1) and alpha_eq(r1, r2) and alpha_eq(t, r2)


@FAST
@given(seeds)
def test_rename_invariants(seed: int) -> None:
    t = program(seed)
    out = run_rename(t).term
    assert alpha_eq(out, t) and globally_unique(out)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_every_pass_is_certified_and_preserves_meaning(seed: int) -> None:
    t = program(seed)
    run = run_pipeline_full(t)
    for i, p in enumerate(PIPELINE):
        s, u = run.dumps[i].term, run.dumps[i + 1].term
        d = check_pass(p, s, u, run.hints if p is PassId.INLINE else NO_HINTS)
        assert validate_derivation(p, d).ok
        assert compare(s, u).agree


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(PIPELINE[:4]))
def test_pass_output_is_related_to_itself(seed: int, p: PassId) -> None:
    t = run_rename(program(seed)).term
    once = run_pass(p, t).term
    check_pass(p, once, once)


@FAST
@given(seeds)
def test_evaluation_is_deterministic(seed: int) -> None:
    t = program(seed)
    assert evaluate(t, 5000) == evaluate(t, 5000)
