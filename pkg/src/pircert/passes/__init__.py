from .common import (
    BadPath,
    IllScoped,
    MutualRecursionUnsupported,
    NotUnique,
    PassError,
    PassOutput,
    RecursiveDatatypeUnsupported,
    UnexpectedBinding,
)
from .dce import run_dce
from .encode import run_encode_data, run_encode_nonrec, run_encode_rec
from .floating import run_float
from .inline import DEFAULT_BUDGET, run_inline
from .mutate import Mutation, MutationKind, mutate, sites
from .pipeline import PipelineError, PipelineRun, pass_runners, run_pass, run_pipeline, run_pipeline_full
from .rename import run_rename
from .thunk import run_thunk

__all__ = [
    "BadPath", "IllScoped", "MutualRecursionUnsupported", "NotUnique", "PassError", "PassOutput",
    "RecursiveDatatypeUnsupported", "UnexpectedBinding", "run_dce", "run_encode_data",
    "run_encode_nonrec", "run_encode_rec", "run_float", "DEFAULT_BUDGET", "run_inline", "Mutation",
    "MutationKind", "mutate", "sites", "PipelineError", "PipelineRun", "pass_runners", "run_pass",
    "run_pipeline", "run_pipeline_full", "run_rename", "run_thunk",
]
