"""Build certificates from a chain of dumps by running the per-pass searchers."""

from __future__ import annotations

from typing import Sequence

from .proof import NO_HINTS, PIPELINE, Certificate, CertStep, PassHints, PassId
from .relations import DEFAULT_MAX_STEPS, CheckFailure, check_pass
from .syntax import Term


class CertifyError(Exception):
    def __init__(self, index: int, failure: CheckFailure):
        super().__init__(f"pass {index + 1} ({failure.pass_id.value}) at {list(failure.path)}: {failure.reason}")
        self.index = index
        self.failure = failure


def certify(terms: Sequence[Term], hints: PassHints = NO_HINTS,
            float_max_steps: int = DEFAULT_MAX_STEPS) -> Certificate:
    """Relate ``terms[i]`` to ``terms[i+1]`` by the i-th pipeline pass, for every i."""
    if len(terms) != len(PIPELINE) + 1:
        raise ValueError(f"expected {len(PIPELINE) + 1} terms, got {len(terms)}")
    steps = []
    for i, p in enumerate(PIPELINE):
        s, t = terms[i], terms[i + 1]
        try:
            d = check_pass(p, s, t, hints if p is PassId.INLINE else NO_HINTS, float_max_steps)
        except CheckFailure as e:
            raise CertifyError(i, e) from None
        witnesses = (d.witness,) if d.witness is not None else ()
        steps.append(CertStep(p, s, t, d, witnesses))
    return Certificate(tuple(steps))
