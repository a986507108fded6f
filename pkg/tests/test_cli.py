from pathlib import Path

import pytest
from click.testing import CliRunner

from helpers import FIXTURES, corpus
from pircert.cli import DUMP_FILES, HINTS_FILE, main
from pircert.syntax import alpha_eq
from pircert.textio import parse_dump, print_term


def run(*args: str):
    return CliRunner().invoke(main, [str(a) for a in args])


@pytest.fixture
def compiled(tmp_path: Path) -> Path:
    out = tmp_path / "dumps"
    r = run("compile", FIXTURES / "source.pir", "--out", out)
    assert r.exit_code == 0, r.output
    return out


def test_compile_writes_nine_dumps(compiled: Path) -> None:
    assert sorted(p.name for p in compiled.iterdir()) == sorted(DUMP_FILES + [HINTS_FILE])
    for name in DUMP_FILES:
        got = parse_dump((compiled / name).read_text()).term
        want = parse_dump((FIXTURES / name).read_text()).term
        assert alpha_eq(got, want), name


def test_compile_plain_lambda(tmp_path: Path) -> None:
    src = tmp_path / "id.pir"
    src.write_text("(lam (x 1) Integer (var (x 1)))")
    assert run("compile", src, "--out", tmp_path / "d").exit_code == 0
    terms = [parse_dump((tmp_path / "d" / n).read_text()).term for n in DUMP_FILES]
    assert all(alpha_eq(t, terms[0]) for t in terms)


def test_compile_errors(tmp_path: Path) -> None:
    bad = tmp_path / "bad.pir"
    bad.write_text("(lam (x 1) Integer (var (y 2)))")
    assert run("compile", bad, "--out", tmp_path / "d").exit_code == 1
    bad.write_text("(lam (x 1) Integer")
    assert run("compile", bad, "--out", tmp_path / "d").exit_code == 2
    assert run("compile", tmp_path / "missing.pir", "--out", tmp_path / "d").exit_code == 2


def test_certify_and_check(compiled: Path, tmp_path: Path) -> None:
    cert = tmp_path / "t.cert"
    r = run("certify", compiled, "--out", cert)
    assert r.exit_code == 0, r.output
    r = run("check", cert, compiled / DUMP_FILES[0], compiled / DUMP_FILES[-1])
    assert r.exit_code == 0 and r.output.startswith("ok"), r.output


def test_certify_mutated_dump_names_the_pass(compiled: Path, tmp_path: Path) -> None:
    target = compiled / "04-dce.dump"
    target.write_text(target.read_text().replace("(int 0)", "(int 1)", 1))
    r = run("certify", compiled, "--out", tmp_path / "t.cert")
    assert r.exit_code == 1
    assert "dce" in r.output


def test_certify_missing_dump(compiled: Path, tmp_path: Path) -> None:
    (compiled / "05-thunk.dump").unlink()
    assert run("certify", compiled, "--out", tmp_path / "t.cert").exit_code == 2


def test_check_substituted_final_and_truncated_certificate(compiled: Path, tmp_path: Path) -> None:
    cert = tmp_path / "t.cert"
    assert run("certify", compiled, "--out", cert).exit_code == 0
    other = tmp_path / "other.pir"
    other.write_text(print_term(corpus(1, 0)[0]))
    assert run("check", cert, compiled / DUMP_FILES[0], other).exit_code == 1
    short = tmp_path / "short.cert"
    short.write_text(cert.read_text()[: len(cert.read_text()) // 2])
    assert run("check", short, compiled / DUMP_FILES[0], compiled / DUMP_FILES[-1]).exit_code == 2


def test_eval(tmp_path: Path) -> None:
    p = tmp_path / "p.pir"
    p.write_text("(app (lam (x 1) Integer (var (x 1))) (int 5))")
    r = run("eval", p)
    assert r.exit_code == 0 and r.output.strip() == "Ok (int 5)"
    r = run("eval", FIXTURES / "source.pir", "--inputs", "(app (var (Fixed 0)) (int 5)) (int 10)")
    assert r.exit_code == 0 and "True" in r.output
    p.write_text("(var (x 1))")
    assert run("eval", p).exit_code == 2


def test_diff(compiled: Path) -> None:
    src, final = compiled / DUMP_FILES[0], compiled / DUMP_FILES[-1]
    r = run("diff", src, final, "--inputs", "(app (var (Fixed 0)) (int 5)) (int 3)",
            "--inputs", "(var (Never 0)) (int 10)")
    assert r.exit_code == 0, r.output
    assert r.output.count("agree") == 2
    r = run("diff", src, final, "--fuel", "1", "--inputs", "(var (Never 0)) (int 10)")
    assert r.exit_code == 0 and "inconclusive" in r.output


def test_diff_disagreement(tmp_path: Path) -> None:
    a, b = tmp_path / "a.pir", tmp_path / "b.pir"
    a.write_text("(int 1)")
    b.write_text("(int 2)")
    r = run("diff", a, b)
    assert r.exit_code == 1 and "DISAGREE" in r.output
    b.write_text("(int")
    assert run("diff", a, b).exit_code == 2


def test_generate(tmp_path: Path) -> None:
    r = run("generate", "--seed", "3", "--count", "5", "--out", tmp_path / "c")
    assert r.exit_code == 0
    assert len(list((tmp_path / "c").iterdir())) == 5
