from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..proof import NO_HINTS, PIPELINE, PassHints, PassId
from ..syntax import Term
from ..textio import INPUT_LABEL, DumpDocument
from .common import PassError, PassOutput
from .dce import run_dce
from .encode import run_encode_data, run_encode_nonrec, run_encode_rec
from .floating import run_float
from .inline import DEFAULT_BUDGET, run_inline
from .rename import run_rename
from .thunk import run_thunk


class PipelineError(Exception):
    def __init__(self, index: int, pass_id: PassId, cause: PassError):
        self.index = index
        self.pass_id = pass_id
        self.cause = cause
        super().__init__(f"pass {index} ({pass_id.value}): {cause}")


def pass_runners(inline_budget: int = DEFAULT_BUDGET) -> dict[PassId, Callable[[Term], PassOutput]]:
    return {
        PassId.RENAME: run_rename,
        PassId.INLINE: lambda t: run_inline(t, inline_budget),
        PassId.FLOAT_LET: run_float,
        PassId.DCE: run_dce,
        PassId.THUNK: run_thunk,
        PassId.ENCODE_REC: run_encode_rec,
        PassId.ENCODE_DATA: run_encode_data,
        PassId.ENCODE_NONREC: run_encode_nonrec,
    }


def run_pass(p: PassId, t: Term, inline_budget: int = DEFAULT_BUDGET) -> PassOutput:
    return pass_runners(inline_budget)[p](t)


@dataclass(frozen=True)
class PipelineRun:
    dumps: tuple[DumpDocument, ...]
    hints: PassHints

    @property
    def final(self) -> Term:
        return self.dumps[-1].term


def run_pipeline_full(t: Term, inline_budget: int = DEFAULT_BUDGET) -> PipelineRun:
    runners = pass_runners(inline_budget)
    dumps = [DumpDocument(INPUT_LABEL, t)]
    hints = NO_HINTS
    for i, p in enumerate(PIPELINE):
        try:
            out = runners[p](dumps[-1].term)
        except PassError as e:
            raise PipelineError(i, p, e) from e
        if p is PassId.INLINE:
            hints = out.hints
        dumps.append(DumpDocument(p.value, out.term))
    return PipelineRun(tuple(dumps), hints)


def run_pipeline(t: Term, inline_budget: int = DEFAULT_BUDGET) -> list[DumpDocument]:
    return list(run_pipeline_full(t, inline_budget).dumps)
