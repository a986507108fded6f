"""Command-line front end: compile, certify, check, eval, diff (and corpus generation)."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .certify import CertifyError, certify
from .corpus import MAX_NODES, generate_corpus
from .kernel import validate_certificate
from .passes import DEFAULT_BUDGET, PassError, PipelineError, run_pipeline_full
from .proof import PIPELINE, PassHints
from .relations import DEFAULT_MAX_STEPS
from .semantics import DEFAULT_FUEL, HarnessError, compare, eval as evaluate, render_result, with_inputs
from .syntax import unbound_names
from .textio import (
    INPUT_LABEL,
    FormatError,
    parse_certificate,
    parse_dump,
    parse_hints,
    parse_program,
    parse_terms,
    print_certificate,
    print_dump,
    print_hints,
    print_term,
)

OK, FAILED, BAD_INPUT = 0, 1, 2

DUMP_LABELS = [INPUT_LABEL] + [p.value for p in PIPELINE]
DUMP_FILES = [f"{i:02d}-{label}.dump" for i, label in enumerate(DUMP_LABELS)]
HINTS_FILE = "hints.dump"


class _InputError(Exception):
    pass


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise _InputError(f"cannot read {path}: {e}") from None


def _parse(fn, path: str | Path):
    try:
        return fn(_read(path))
    except FormatError as e:
        raise _InputError(f"{path}:{e}") from None


def _bail(code: int, msg: str) -> None:
    click.echo(msg, err=True)
    sys.exit(code)


def _inputs(raw: tuple[str, ...]) -> list[list]:
    try:
        return [parse_terms(r) for r in raw]
    except FormatError as e:
        raise _InputError(f"bad --inputs: {e}") from None


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Translation validation for a simplified PIR pipeline."""


@main.command()
@click.argument("program", type=click.Path(dir_okay=False))
@click.option("--out", "out", required=True, type=click.Path(file_okay=False), help="Dump directory.")
@click.option("--inline-budget", default=DEFAULT_BUDGET, show_default=True, type=click.IntRange(min=0))
def compile(program: str, out: str, inline_budget: int) -> None:  # noqa: A001
    """Run the eight passes and write nine dumps plus the inliner hints."""
    try:
        t = _parse(parse_program, program)
    except _InputError as e:
        _bail(BAD_INPUT, str(e))
    try:
        run = run_pipeline_full(t, inline_budget)
    except PipelineError as e:
        _bail(FAILED, f"pass {e.index} ({e.pass_id.value}): {e.cause}")
    except PassError as e:
        _bail(FAILED, str(e))
    d = Path(out)
    try:
        d.mkdir(parents=True, exist_ok=True)
        for name, doc in zip(DUMP_FILES, run.dumps):
            (d / name).write_text(print_dump(doc), encoding="utf-8")
        (d / HINTS_FILE).write_text(print_hints(run.hints), encoding="utf-8")
    except OSError as e:
        _bail(BAD_INPUT, f"cannot write dumps: {e}")
    click.echo(f"wrote {len(DUMP_FILES)} dumps to {d}")


def _load_dumps(directory: str) -> tuple[list, PassHints]:
    d = Path(directory)
    terms = []
    for name, label in zip(DUMP_FILES, DUMP_LABELS):
        doc = _parse(parse_dump, d / name)
        if doc.pass_label != label:
            raise _InputError(f"{d / name}: expected a {label} dump, found {doc.pass_label}")
        terms.append(doc.term)
    hints = _parse(parse_hints, d / HINTS_FILE)
    return terms, hints


@main.command("certify")
@click.argument("dumps", type=click.Path(file_okay=False))
@click.option("--out", "out", required=True, type=click.Path(dir_okay=False), help="Certificate file.")
@click.option("--float-max-steps", default=DEFAULT_MAX_STEPS, show_default=True, type=click.IntRange(min=1))
def certify_cmd(dumps: str, out: str, float_max_steps: int) -> None:
    """Search a derivation for every adjacent pair of dumps and write the certificate."""
    try:
        terms, hints = _load_dumps(dumps)
    except _InputError as e:
        _bail(BAD_INPUT, str(e))
    try:
        cert = certify(terms, hints, float_max_steps)
    except CertifyError as e:
        _bail(FAILED, f"certification failed: {e}")
    try:
        Path(out).write_text(print_certificate(cert), encoding="utf-8")
    except OSError as e:
        _bail(BAD_INPUT, f"cannot write certificate: {e}")
    click.echo(f"certified {len(cert.steps)} passes -> {out}")


@main.command()
@click.argument("certificate", type=click.Path(dir_okay=False))
@click.argument("original", type=click.Path(dir_okay=False))
@click.argument("final", type=click.Path(dir_okay=False))
def check(certificate: str, original: str, final: str) -> None:
    """Validate a certificate with the kernel against the original and final programs."""
    try:
        cert = _parse(parse_certificate, certificate)
        t0 = _parse(parse_program, original)
        t1 = _parse(parse_program, final)
    except _InputError as e:
        _bail(BAD_INPUT, str(e))
    report = validate_certificate(cert, t0, t1)
    if report.ok:
        click.echo(f"ok: {len(cert.steps)} steps validated")
        return
    for f in report.failures:
        click.echo(f"FAIL {f}")
    sys.exit(FAILED)


@main.command("eval")
@click.argument("program", type=click.Path(dir_okay=False))
@click.option("--fuel", default=DEFAULT_FUEL, show_default=True, type=click.IntRange(min=1))
@click.option("--inputs", "raw", default=None, help="Terms passed to the program's entry function.")
def eval_cmd(program: str, fuel: int, raw: str | None) -> None:
    """Evaluate a closed program and print the result."""
    try:
        t = _parse(parse_program, program)
        if raw is not None:
            t = with_inputs(t, _inputs((raw,))[0])
    except (_InputError, HarnessError) as e:
        _bail(BAD_INPUT, str(e))
    if unbound_names(t):
        _bail(BAD_INPUT, "program is not closed: " + ", ".join(map(repr, unbound_names(t))))
    click.echo(render_result(evaluate(t, fuel)))


@main.command()
@click.argument("source", type=click.Path(dir_okay=False))
@click.argument("final", type=click.Path(dir_okay=False))
@click.option("--fuel", default=DEFAULT_FUEL, show_default=True, type=click.IntRange(min=1))
@click.option("--inputs", "raw", multiple=True, help="One input set (terms); repeat for more.")
def diff(source: str, final: str, fuel: int, raw: tuple[str, ...]) -> None:
    """Compare observations of two programs, once per input set."""
    try:
        a = _parse(parse_program, source)
        b = _parse(parse_program, final)
        sets = _inputs(raw) if raw else [None]
        cases = [(a, b, "-") if s is None else
                 (with_inputs(a, s), with_inputs(b, s), " ".join(map(print_term, s))) for s in sets]
    except (_InputError, HarnessError) as e:
        _bail(BAD_INPUT, str(e))
    all_agree = True
    for x, y, label in cases:
        v = compare(x, y, fuel)
        verdict = "inconclusive (both OutOfFuel)" if v.inconclusive else "agree" if v.agree else "DISAGREE"
        click.echo(f"[{label}] {verdict}: {render_result(v.left)} | {render_result(v.right)}")
        all_agree &= v.agree
    sys.exit(OK if all_agree else FAILED)


@main.command()
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--count", default=10, show_default=True, type=click.IntRange(min=1))
@click.option("--max-nodes", default=MAX_NODES, show_default=True, type=click.IntRange(min=1))
@click.option("--out", "out", required=True, type=click.Path(file_okay=False))
def generate(seed: int, count: int, max_nodes: int, out: str) -> None:
    """Write seeded random corpus programs, one term per file."""
    d = Path(out)
    try:
        d.mkdir(parents=True, exist_ok=True)
        for i, t in enumerate(generate_corpus(count, seed, max_nodes)):
            (d / f"prog-{i:04d}.pir").write_text(print_term(t) + "\n", encoding="utf-8")
    except OSError as e:
        _bail(BAD_INPUT, f"cannot write corpus: {e}")
    click.echo(f"wrote {count} programs to {d}")


if __name__ == "__main__":
    main()
