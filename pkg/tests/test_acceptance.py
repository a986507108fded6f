"""The eight acceptance criteria, each at its stated threshold.

Every test records a one-line verdict that the conftest prints in the summary.
"""

import random
import time
from pathlib import Path

from click.testing import CliRunner

from helpers import ACCEPTANCE, FIXTURES, T, corpus, shift_uids, timelock_dumps
from pircert.certify import certify
from pircert.cli import DUMP_FILES, main
from pircert.kernel import validate_derivation
from pircert.passes import Mutation, MutationKind, mutate, run_pipeline_full, run_rename, sites
from pircert.proof import NO_HINTS, PIPELINE, PassId
from pircert.relations import CheckFailure, check_pass
from pircert.semantics import compare
from pircert.syntax import Data, Lam, Let, Strictness, Var, alpha_eq, globally_unique, positions, subterm
from pircert.textio import FormatError, parse_certificate, parse_dump, parse_term, print_certificate, print_term

SEED = 20240601


def record(n: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = f"criterion {n} ({title}): {'PASS' if ok else 'FAIL'} - {detail}"


# ---------------------------------------------------------------------------
# 1. golden timelock


def _lets(t) -> dict[str, tuple]:
    return {b.name.display: (p, s, b) for p, s in positions(t) if isinstance(s, Let) for b in s.bindings}


def _shape_checks(dumps) -> list[str]:
    terms = [d.term for d in dumps]
    bad = []
    if not globally_unique(terms[1]):
        bad.append("rename output is not globally unique")
    if {"inlineMe", "wild"} & set(_lets(terms[2])):
        bad.append("inlineMe/wild survive inlining")
    p_float, let_float, _ = _lets(terms[3])["floatMe"]
    if not isinstance(subterm(terms[3], p_float[:-1]), Lam):
        bad.append("floatMe is not hoisted to the match arm")
    if not any(isinstance(s, Var) and s.name.display == "lessThanEqInteger" for _, s in positions(let_float.body)):
        bad.append("floatMe does not scope over the comparison")
    groups = [len(s.bindings) for _, s in positions(terms[3]) if isinstance(s, Let)]
    if max(groups) < 2:
        bad.append("no let groups merged")
    if "addInteger" in _lets(terms[4]):
        bad.append("dead addInteger survives")
    _, _, fm = _lets(terms[5])["floatMe"]
    if fm.strictness is not Strictness.STRICT or not isinstance(fm.rhs, Lam):
        bad.append("floatMe not thunked")
    if terms[6] != terms[5]:
        bad.append("encode-rec changed a program without recursion")
    if any(isinstance(s, Data) for _, s in positions(terms[7])):
        bad.append("data survives encoding")
    if any(isinstance(s, Let) for _, s in positions(terms[8])):
        bad.append("let survives redex encoding")
    if not any(isinstance(s, Lam) and s.binder.display == "floatMe" for _, s in positions(terms[8])):
        bad.append("floatMe is not lambda-bound")
    return bad


def test_criterion_1_golden_timelock(tmp_path: Path) -> None:
    runner = CliRunner()
    start = time.perf_counter()
    r1 = runner.invoke(main, ["compile", str(FIXTURES / "source.pir"), "--out", str(tmp_path / "d")])
    r2 = runner.invoke(main, ["certify", str(tmp_path / "d"), "--out", str(tmp_path / "t.cert")])
    r3 = runner.invoke(main, ["check", str(tmp_path / "t.cert"),
                              str(tmp_path / "d" / DUMP_FILES[0]), str(tmp_path / "d" / DUMP_FILES[-1])])
    elapsed = time.perf_counter() - start
    produced = [parse_dump((tmp_path / "d" / f).read_text()) for f in DUMP_FILES] if r1.exit_code == 0 else []
    fixtures = timelock_dumps()
    matching = sum(alpha_eq(a.term, b.term) for a, b in zip(produced, fixtures))
    shape = _shape_checks(produced) if produced else ["no dumps"]
    ok = (r1.exit_code, r2.exit_code, r3.exit_code) == (0, 0, 0) and matching == 9 and not shape and elapsed < 10
    record(1, "golden timelock", ok,
           f"{matching}/9 dumps alpha-equal to fixtures, shape issues {shape or 'none'}, "
           f"compile+certify+check {elapsed:.2f}s (< 10s)")
    assert ok, ACCEPTANCE[1]


# ---------------------------------------------------------------------------
# 2 and 3. checker completeness and kernel agreement


_DERIVED: dict[str, object] = {}


def _completeness_run():
    if "result" not in _DERIVED:
        start = time.perf_counter()
        programs = corpus(500, SEED)
        derivations, failures = [], []
        for k, t in enumerate(programs):
            run = run_pipeline_full(t)
            for i, p in enumerate(PIPELINE):
                try:
                    d = check_pass(p, run.dumps[i].term, run.dumps[i + 1].term,
                                   run.hints if p is PassId.INLINE else NO_HINTS)
                    derivations.append((p, d))
                except CheckFailure as e:
                    failures.append((k, p.value, e.reason))
        _DERIVED["result"] = (len(programs), derivations, failures, time.perf_counter() - start)
    return _DERIVED["result"]


def test_criterion_2_checker_completeness() -> None:
    n, derivations, failures, elapsed = _completeness_run()
    total = len(derivations) + len(failures)
    ok = n >= 500 and not failures and elapsed < 60
    record(2, "checker completeness", ok,
           f"{len(derivations)}/{total} pass outputs accepted over {n} programs in {elapsed:.1f}s (< 60s)")
    assert ok, (ACCEPTANCE[2], failures[:5])


def test_criterion_3_kernel_agreement() -> None:
    _, derivations, _, _ = _completeness_run()
    rejected = [(p.value, validate_derivation(p, d).failures[0]) for p, d in derivations
                if not validate_derivation(p, d).ok]
    ok = bool(derivations) and not rejected
    record(3, "kernel agreement", ok, f"{len(derivations) - len(rejected)}/{len(derivations)} derivations validated")
    assert ok, (ACCEPTANCE[3], rejected[:5])


# ---------------------------------------------------------------------------
# 4. soundness under mutation


MUST_REJECT = (MutationKind.PERTURB_INT_LIT, MutationKind.SWAP_VAR_OCCURRENCE)


def test_criterion_4_soundness_under_mutation() -> None:
    rng = random.Random(SEED)
    runs = [run_pipeline_full(t) for t in corpus(400, SEED + 1)]
    per_pass = {}
    counterexamples, wrongly_accepted, accepted = [], [], 0
    for i, p in enumerate(PIPELINE):
        trials = 0
        while trials < 200:
            run = rng.choice(runs)
            src, tgt = run.dumps[i].term, run.dumps[i + 1].term
            kind = rng.choice(list(MutationKind))
            where = sites(tgt, kind)
            if not where:
                continue
            m = mutate(tgt, Mutation(kind, rng.choice(where)))
            if m == tgt:
                continue
            trials += 1
            try:
                check_pass(p, src, m, run.hints if p is PassId.INLINE else NO_HINTS)
            except CheckFailure:
                continue
            accepted += 1
            if kind in MUST_REJECT:
                wrongly_accepted.append((p.value, kind.value))
            # closed ground programs: the program itself is the only harness input
            if not compare(src, m).agree:
                counterexamples.append((p.value, kind.value, print_term(src), print_term(m)))
        per_pass[p.value] = trials
    ok = min(per_pass.values()) >= 200 and not counterexamples and not wrongly_accepted
    record(4, "soundness under mutation", ok,
           f"{sum(per_pass.values())} trials (>= 200 per pass), {accepted} accepted, "
           f"{len(counterexamples)} semantic counterexamples, "
           f"{len(wrongly_accepted)} perturb-int/swap-var accepted")
    assert ok, (ACCEPTANCE[4], counterexamples[:2], wrongly_accepted[:5])


# ---------------------------------------------------------------------------
# 5. semantic differential


def test_criterion_5_semantic_differential() -> None:
    programs = corpus(300, SEED + 2)
    disagree, inconclusive = [], 0
    for t in programs:
        v = compare(t, run_pipeline_full(t).final, 100_000)
        inconclusive += v.inconclusive
        if not v.agree:
            disagree.append(print_term(t))
    rate = inconclusive / len(programs)
    ok = not disagree and rate < 0.02
    record(5, "semantic differential", ok,
           f"{len(programs) - len(disagree)}/{len(programs)} agree at fuel 1e5, "
           f"both-OutOfFuel {rate:.1%} (< 2%)")
    assert ok, (ACCEPTANCE[5], disagree[:2])


# ---------------------------------------------------------------------------
# 6. rename invariants


def test_criterion_6_rename_invariants() -> None:
    programs = corpus(500, SEED)
    good = 0
    for t in programs:
        out = run_rename(t).term
        good += alpha_eq(out, t) and globally_unique(out)
    ok = good == len(programs)
    record(6, "rename invariants", ok, f"{good}/{len(programs)} outputs alpha-equal and globally unique")
    assert ok, ACCEPTANCE[6]


# ---------------------------------------------------------------------------
# 7. format round-trip and fuzzing


def _fuzz_inputs(rng: random.Random, seeds: list[bytes], n: int):
    for i in range(n):
        match i % 4:
            case 0:
                yield bytes(rng.randrange(256) for _ in range(rng.randint(0, 80)))
            case 1:
                yield bytes(rng.choice(b"() \n;-0123456789abcdefghijklmnopqrstuvwxyz*") for _ in range(rng.randint(0, 120)))
            case _:
                b = bytearray(rng.choice(seeds))
                for _ in range(rng.randint(1, 5)):
                    j = rng.randrange(len(b) + 1)
                    b[j:j + rng.randint(0, 4)] = bytes(rng.randrange(256) for _ in range(rng.randint(0, 3)))
                yield bytes(b)


def test_criterion_7_round_trip_and_fuzz() -> None:
    programs = corpus(500, SEED)
    terms_ok = sum(parse_term(print_term(t)) == t for t in programs)
    certs = 0
    sample = programs[:100]
    for t in sample:
        run = run_pipeline_full(t)
        c = certify([d.term for d in run.dumps], run.hints)
        text = print_certificate(c)
        back = parse_certificate(text)
        certs += back == c and print_certificate(back) == text
    rng = random.Random(SEED)
    seeds = [print_term(t).encode() for t in programs[:50]]
    seeds += [print_certificate(certify([d.term for d in run_pipeline_full(t).dumps],
                                        run_pipeline_full(t).hints)).encode() for t in programs[:3]]
    crashes, rejected, total = [], 0, 0
    for data in _fuzz_inputs(rng, seeds, 10_000):
        total += 1
        parse = parse_certificate if data.startswith(b"(certificate") else parse_term
        try:
            parse(data)
        except FormatError:
            rejected += 1
        except Exception as e:  # anything else is a crash
            crashes.append((data[:60], repr(e)))
    ok = terms_ok == len(programs) and certs == len(sample) and not crashes and total >= 10_000
    record(7, "format round-trip", ok,
           f"terms {terms_ok}/{len(programs)}, certificates {certs}/{len(sample)}, "
           f"{total} fuzz inputs, {rejected} FormatError, {len(crashes)} crashes")
    assert ok, (ACCEPTANCE[7], crashes[:3])


# ---------------------------------------------------------------------------
# 8. code substitution


def test_criterion_8_code_substitution(tmp_path: Path) -> None:
    programs = corpus(120, SEED + 3)
    runs = [run_pipeline_full(t) for t in programs]
    runner = CliRunner()
    trials, caught = 0, 0
    for i, run in enumerate(runs):
        cert = tmp_path / f"{i}.cert"
        cert.write_text(print_certificate(certify([d.term for d in run.dumps], run.hints)))
        original = tmp_path / f"{i}.orig"
        original.write_text(print_term(run.dumps[0].term))
        if i % 2 == 0:
            fake = T(shift_uids(print_term(run.final), 1000))
            assert alpha_eq(fake, run.final)
        else:
            fake = runs[(i + 1) % len(runs)].final
        if fake == run.final:
            continue  # nothing was substituted
        final = tmp_path / f"{i}.final"
        final.write_text(print_term(fake))
        trials += 1
        caught += runner.invoke(main, ["check", str(cert), str(original), str(final)]).exit_code == 1
    ok = trials >= 100 and caught == trials
    record(8, "code substitution", ok, f"{caught}/{trials} substituted finals rejected with exit 1 (>= 100 trials)")
    assert ok, ACCEPTANCE[8]
