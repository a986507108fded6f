import random

import pytest

from helpers import T, runs, timelock_dumps, timelock_hints
from pircert.certify import certify
from pircert.passes import run_pipeline_full
from pircert.proof import Certificate, PassHints
from pircert.relations import check_rename
from pircert.proof import CertStep, PassId
from pircert.syntax import BoolLit, IntLit, Lam, Let, Name, Strictness, TyBuiltinBool, TyInteger, Var
from pircert.textio import (
    FormatError,
    parse_certificate,
    parse_derivation,
    parse_dump,
    parse_hints,
    parse_program,
    parse_term,
    parse_terms,
    print_certificate,
    print_derivation,
    print_dump,
    print_hints,
    print_term,
    term_digest,
)


def test_parse_lambda() -> None:
    assert parse_term("(lam (x 1) Integer (var (x 1)))") == Lam(Name("x", 1), TyInteger(), Var(Name("x", 1)))


def test_parse_let_keeps_uids() -> None:
    t = parse_term("(let nonrec ((bind nonstrict (x 7) BBool (con False)))(var (x 7)))")
    assert isinstance(t, Let)
    b = t.bindings[0]
    assert (b.strictness, b.name.uid, b.annotation, b.rhs) == (Strictness.NONSTRICT, 7, TyBuiltinBool(), BoolLit(False))
    assert parse_term(print_term(t)) == t


def test_duplicate_binders_are_not_a_format_error() -> None:
    parse_term("(lam (x 1) Integer (lam (x 1) Integer (var (x 1))))")


def test_unbalanced_reports_end_of_input() -> None:
    with pytest.raises(FormatError) as e:
        parse_term("(lam (x 1)")
    assert (e.value.line, e.value.column) == (1, 11)


@pytest.mark.parametrize("src", [
    "", "(var x)", "(lam (x 1) Integer)", "(int 1.5)", "(con maybe)", "(builtin nope)",
    "(let rec ((bind strict (f 1) Integer (int 0)) (bind strict (g 2) Integer (int 0))) (int 0))",
    "(let nonrec () (int 0))", "(int 1) (int 2)", ")", "(var (x -1))",
])
def test_malformed_terms(src: str) -> None:
    with pytest.raises(FormatError):
        parse_term(src)


def test_print_leaves() -> None:
    assert print_term(Var(Name("x", 1))) == "(var (x 1))"
    assert print_term(IntLit(0)) == "(int 0)"


def test_round_trip_corpus_and_dumps() -> None:
    for r in runs(200, 2):
        for d in r.dumps:
            assert parse_term(print_term(d.term)) == d.term
            assert parse_dump(print_dump(d)) == d


def test_parse_terms_and_program() -> None:
    assert parse_terms("") == []
    assert parse_terms("(int 1) (con True)") == [IntLit(1), BoolLit(True)]
    d = timelock_dumps()[4]
    assert parse_program(print_dump(d)) == d.term
    assert parse_program(print_term(d.term)) == d.term


def test_hints_round_trip() -> None:
    h = timelock_hints()
    assert [n.display for n in h.eliminated] == ["wild", "inlineMe"]
    assert parse_hints(print_hints(h)) == h
    assert parse_hints(print_hints(PassHints())) == PassHints()


def test_empty_certificate() -> None:
    assert parse_certificate("(certificate)") == Certificate(())
    assert parse_certificate(print_certificate(Certificate(()))) == Certificate(())


def test_single_rename_step_round_trips() -> None:
    s, t = T("(lam (x 1) Integer (var (x 1)))"), T("(lam (x 2) Integer (var (x 2)))")
    d = check_rename(s, t)
    c = Certificate((CertStep(PassId.RENAME, s, t, d),))
    back = parse_certificate(print_certificate(c))
    assert back.steps[0].derivation == d
    assert back.steps[0].source_hash == term_digest(s)
    assert print_certificate(back) == print_certificate(c)


def test_full_certificate_round_trips() -> None:
    run = run_pipeline_full(timelock_dumps()[0].term)
    c = certify([d.term for d in run.dumps], run.hints)
    text = print_certificate(c)
    back = parse_certificate(text)
    assert [s.derivation for s in back.steps] == [s.derivation for s in c.steps]
    assert [s.witnesses for s in back.steps] == [s.witnesses for s in c.steps]
    assert print_certificate(back) == text
    for s in c.steps:
        assert parse_derivation(print_derivation(s.derivation)) == s.derivation


def test_unknown_rule_is_format_error() -> None:
    s = T("(lam (x 1) Integer (var (x 1)))")
    text = print_certificate(Certificate((CertStep(PassId.RENAME, s, s, check_rename(s, s)),)))
    assert "Rename-Var" in text
    with pytest.raises(FormatError):
        parse_certificate(text.replace("Rename-Var", "Inline-Var-9"))


def test_truncated_certificate_is_format_error() -> None:
    s = T("(lam (x 1) Integer (var (x 1)))")
    text = print_certificate(Certificate((CertStep(PassId.RENAME, s, s, check_rename(s, s)),)))
    for cut in range(0, len(text) - 2, 7):
        with pytest.raises(FormatError):
            parse_certificate(text[:cut])


def test_fuzzed_inputs_never_crash() -> None:
    rng = random.Random(3)
    seeds = [print_term(r.dumps[k].term).encode() for r in runs(20, 2) for k in (0, 8)]
    for _ in range(1000):
        base = bytearray(rng.choice(seeds))
        for _ in range(rng.randint(1, 4)):
            i = rng.randrange(len(base))
            base[i:i + rng.randint(0, 3)] = bytes(rng.randrange(256) for _ in range(rng.randint(0, 3)))
        for fn in (parse_term, parse_certificate, parse_dump):
            try:
                fn(bytes(base))
            except FormatError:
                pass


def test_deep_nesting_is_format_error_not_crash() -> None:
    with pytest.raises(FormatError):
        parse_term("(app " * 100_000 + "(int 1)" + ")" * 100_000)
