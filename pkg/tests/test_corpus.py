from helpers import corpus
from pircert.corpus import MAX_NODES, generate_corpus
from pircert.semantics import Ok, Unobservable, observe
from pircert.syntax import Data, Let, Recursivity, positions, term_size, unbound_names


def test_seeded_and_reproducible() -> None:
    assert generate_corpus(20, seed=5) == generate_corpus(20, seed=5)
    assert generate_corpus(20, seed=5) != generate_corpus(20, seed=6)


def test_programs_are_small_and_closed() -> None:
    for t in corpus(500, 1):
        assert term_size(t) <= MAX_NODES
        assert not unbound_names(t)


def test_programs_have_observable_results() -> None:
    for t in corpus(300, 1):
        r = observe(t)
        assert not (isinstance(r, Ok) and isinstance(r.value, Unobservable))


def test_corpus_exercises_every_construct() -> None:
    seen = set()
    for t in corpus(500, 1):
        for _, s in positions(t):
            seen.add(type(s).__name__)
            if isinstance(s, Let):
                seen.add(s.rec.value)
                seen.update(b.strictness.value for b in s.bindings)
                if len(s.bindings) > 1:
                    seen.add("group")
            if isinstance(s, Data) and s.decl.params:
                seen.add("params")
    assert {"Lam", "App", "TyAbs", "TyInst", "Let", "Data", "IntLit", "BoolLit", "UnitLit", "Builtin",
            Recursivity.REC.value, "strict", "nonstrict", "group", "params"} <= seen
