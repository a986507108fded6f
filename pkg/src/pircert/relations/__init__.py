"""Per-pass searchers that build derivations in each translation relation."""

from __future__ import annotations

from ..proof import NO_HINTS, Derivation, PassHints, PassId
from ..syntax import Term
from .common import CheckFailure, MutualRecursionUnsupported, UnexpectedBinding
from .dce import check_dce
from .encode import check_encode_data, check_encode_nonrec, check_encode_rec
from .floating import DEFAULT_MAX_STEPS, check_float
from .inline import check_inline
from .rename import check_rename
from .thunk import check_thunk


def check_pass(p: PassId, t: Term, t2: Term, hints: PassHints = NO_HINTS,
               float_max_steps: int = DEFAULT_MAX_STEPS) -> Derivation:
    """Dispatch to the checker for ``p``. Raises only CheckFailure."""
    try:
        match p:
            case PassId.RENAME:
                return check_rename(t, t2)
            case PassId.INLINE:
                return check_inline(t, t2, hints)
            case PassId.FLOAT_LET:
                return check_float(t, t2, float_max_steps)
            case PassId.DCE:
                return check_dce(t, t2)
            case PassId.THUNK:
                return check_thunk(t, t2)
            case PassId.ENCODE_REC:
                return check_encode_rec(t, t2)
            case PassId.ENCODE_DATA:
                return check_encode_data(t, t2)
            case PassId.ENCODE_NONREC:
                return check_encode_nonrec(t, t2)
    except CheckFailure:
        raise
    except RecursionError:
        raise CheckFailure(p, (), "term too deep to check") from None
    except Exception as e:  # a searcher bug must not look like acceptance
        raise CheckFailure(p, (), f"internal error: {type(e).__name__}: {e}") from None
    raise CheckFailure(p, (), f"unknown pass {p!r}")


__all__ = [
    "CheckFailure", "MutualRecursionUnsupported", "UnexpectedBinding", "check_dce", "check_encode_data",
    "check_encode_nonrec", "check_encode_rec", "check_float", "check_inline", "check_pass",
    "check_rename", "check_thunk", "DEFAULT_MAX_STEPS",
]
