"""Plain data shared by the searchers, the kernel and the text formats.

Nothing here decides whether a derivation is valid; that is the kernel's job.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .syntax import (
    App,
    BoolLit,
    Builtin,
    Data,
    IntLit,
    Lam,
    Let,
    Name,
    Strictness,
    Term,
    TyAbs,
    TyInst,
    UnitLit,
    Var,
)


class PassId(enum.Enum):
    RENAME = "rename"
    INLINE = "inline"
    FLOAT_LET = "float-let"
    DCE = "dce"
    THUNK = "thunk"
    ENCODE_REC = "encode-rec"
    ENCODE_DATA = "encode-data"
    ENCODE_NONREC = "encode-nonrec"

    @property
    def index(self) -> int:
        return PIPELINE.index(self)


PIPELINE: tuple[PassId, ...] = tuple(PassId)


class RuleId(enum.Enum):
    # inline (plus Compose-Witness for the fused inline+dce pass)
    INLINE_VAR_1 = "Inline-Var-1"
    INLINE_VAR_2 = "Inline-Var-2"
    INLINE_LET = "Inline-Let"
    INLINE_APP = "Inline-App"
    INLINE_LAM = "Inline-Lam"
    INLINE_CONG_TYABS = "Inline-Cong-TyAbs"
    INLINE_CONG_INST = "Inline-Cong-Inst"
    INLINE_CONG_DATA = "Inline-Cong-Data"
    INLINE_CONG_CONST = "Inline-Cong-Const"
    COMPOSE_WITNESS = "Compose-Witness"
    # rename
    RENAME_VAR = "Rename-Var"
    RENAME_ABS = "Rename-Abs"
    RENAME_LET = "Rename-Let"
    RENAME_DATA = "Rename-Data"
    RENAME_CONG_APP = "Rename-Cong-App"
    RENAME_CONG_INST = "Rename-Cong-Inst"
    RENAME_CONG_CONST = "Rename-Cong-Const"
    # let-floating
    FLOAT_LET_LAM = "Float-Let-Lam"
    FLOAT_LET_APP = "Float-Let-App"
    FLOAT_LET_LET = "Float-Let-Let"
    FLOAT_MERGE = "Float-Merge"
    FLOAT_REFL = "Float-Refl"
    FLOAT_TRANS = "Float-Trans"
    # dead code
    DCE_LET_NONSTRICT = "DCE-Let-nonstrict"
    DCE_LET_STRICT_VALUE = "DCE-Let-strict-value"
    DCE_CONG_VAR = "DCE-Cong-Var"
    DCE_CONG_LAM = "DCE-Cong-Lam"
    DCE_CONG_APP = "DCE-Cong-App"
    DCE_CONG_TYABS = "DCE-Cong-TyAbs"
    DCE_CONG_INST = "DCE-Cong-Inst"
    DCE_CONG_LET = "DCE-Cong-Let"
    DCE_CONG_DATA = "DCE-Cong-Data"
    DCE_CONG_CONST = "DCE-Cong-Const"
    # thunking of non-strict bindings
    THUNK_LET_NONSTRICT = "Thunk-Let-nonstrict"
    THUNK_LET_STRICT = "Thunk-Let-strict"
    THUNK_VAR = "Thunk-Var"
    THUNK_CONG_VAR = "Thunk-Cong-Var"
    THUNK_CONG_LAM = "Thunk-Cong-Lam"
    THUNK_CONG_APP = "Thunk-Cong-App"
    THUNK_CONG_TYABS = "Thunk-Cong-TyAbs"
    THUNK_CONG_INST = "Thunk-Cong-Inst"
    THUNK_CONG_DATA = "Thunk-Cong-Data"
    THUNK_CONG_CONST = "Thunk-Cong-Const"
    # recursive lets
    ENCREC_LET = "EncRec-Let"
    ENCREC_CONG_VAR = "EncRec-Cong-Var"
    ENCREC_CONG_LAM = "EncRec-Cong-Lam"
    ENCREC_CONG_APP = "EncRec-Cong-App"
    ENCREC_CONG_TYABS = "EncRec-Cong-TyAbs"
    ENCREC_CONG_INST = "EncRec-Cong-Inst"
    ENCREC_CONG_LET = "EncRec-Cong-Let"
    ENCREC_CONG_DATA = "EncRec-Cong-Data"
    ENCREC_CONG_CONST = "EncRec-Cong-Const"
    # datatypes
    SCOTT_DATA = "Scott-Data"
    SCOTT_CONG_VAR = "Scott-Cong-Var"
    SCOTT_CONG_LAM = "Scott-Cong-Lam"
    SCOTT_CONG_APP = "Scott-Cong-App"
    SCOTT_CONG_TYABS = "Scott-Cong-TyAbs"
    SCOTT_CONG_INST = "Scott-Cong-Inst"
    SCOTT_CONG_LET = "Scott-Cong-Let"
    SCOTT_CONG_CONST = "Scott-Cong-Const"
    # non-recursive lets
    REDEX_LET = "Redex-Let"
    REDEX_CONG_VAR = "Redex-Cong-Var"
    REDEX_CONG_LAM = "Redex-Cong-Lam"
    REDEX_CONG_APP = "Redex-Cong-App"
    REDEX_CONG_TYABS = "Redex-Cong-TyAbs"
    REDEX_CONG_INST = "Redex-Cong-Inst"
    REDEX_CONG_DATA = "Redex-Cong-Data"
    REDEX_CONG_CONST = "Redex-Cong-Const"


def node_tag(t: Term) -> str:
    """Constructor family of a term, as used by the congruence tables."""
    match t:
        case Var():
            return "Var"
        case Lam():
            return "Lam"
        case App():
            return "App"
        case TyAbs():
            return "TyAbs"
        case TyInst():
            return "Inst"
        case Let():
            return "Let"
        case Data():
            return "Data"
        case IntLit() | BoolLit() | UnitLit() | Builtin():
            return "Const"
    raise TypeError(f"not a term: {t!r}")


def _family(prefix: str, tags: str) -> dict[str, RuleId]:
    return {tag: RuleId(f"{prefix}-Cong-{tag}") for tag in tags.split()}


# Congruence rule per constructor, for each relation. Constructors missing from a
# table are handled only by that relation's specific rules.
CONG_RULES: dict[PassId, dict[str, RuleId]] = {
    PassId.RENAME: {"App": RuleId.RENAME_CONG_APP, "Inst": RuleId.RENAME_CONG_INST,
                    "Const": RuleId.RENAME_CONG_CONST},
    PassId.INLINE: {"Lam": RuleId.INLINE_LAM, "App": RuleId.INLINE_APP,
                    "TyAbs": RuleId.INLINE_CONG_TYABS, "Inst": RuleId.INLINE_CONG_INST,
                    "Data": RuleId.INLINE_CONG_DATA, "Const": RuleId.INLINE_CONG_CONST},
    PassId.DCE: _family("DCE", "Var Lam App TyAbs Inst Let Data Const"),
    PassId.THUNK: _family("Thunk", "Var Lam App TyAbs Inst Data Const"),
    PassId.ENCODE_REC: _family("EncRec", "Var Lam App TyAbs Inst Let Data Const"),
    PassId.ENCODE_DATA: _family("Scott", "Var Lam App TyAbs Inst Let Const"),
    PassId.ENCODE_NONREC: _family("Redex", "Var Lam App TyAbs Inst Data Const"),
}

RULE_PASS: dict[RuleId, PassId] = {}
for _p, _table in CONG_RULES.items():
    for _r in _table.values():
        RULE_PASS[_r] = _p
RULE_PASS.update({
    RuleId.INLINE_VAR_1: PassId.INLINE, RuleId.INLINE_VAR_2: PassId.INLINE,
    RuleId.INLINE_LET: PassId.INLINE, RuleId.COMPOSE_WITNESS: PassId.INLINE,
    RuleId.RENAME_VAR: PassId.RENAME, RuleId.RENAME_ABS: PassId.RENAME,
    RuleId.RENAME_LET: PassId.RENAME, RuleId.RENAME_DATA: PassId.RENAME,
    RuleId.FLOAT_LET_LAM: PassId.FLOAT_LET, RuleId.FLOAT_LET_APP: PassId.FLOAT_LET,
    RuleId.FLOAT_LET_LET: PassId.FLOAT_LET, RuleId.FLOAT_MERGE: PassId.FLOAT_LET,
    RuleId.FLOAT_REFL: PassId.FLOAT_LET, RuleId.FLOAT_TRANS: PassId.FLOAT_LET,
    RuleId.DCE_LET_NONSTRICT: PassId.DCE, RuleId.DCE_LET_STRICT_VALUE: PassId.DCE,
    RuleId.THUNK_LET_NONSTRICT: PassId.THUNK, RuleId.THUNK_LET_STRICT: PassId.THUNK,
    RuleId.THUNK_VAR: PassId.THUNK,
    RuleId.ENCREC_LET: PassId.ENCODE_REC,
    RuleId.SCOTT_DATA: PassId.ENCODE_DATA,
    RuleId.REDEX_LET: PassId.ENCODE_NONREC,
})
assert set(RULE_PASS) == set(RuleId)

FLOAT_STEPS = frozenset({RuleId.FLOAT_LET_LAM, RuleId.FLOAT_LET_APP, RuleId.FLOAT_LET_LET, RuleId.FLOAT_MERGE})


class EnvKind(enum.Enum):
    EMPTY = "empty"
    INLINE = "inline"
    RENAME = "rename"
    STRICTNESS = "strictness"


TERM_NS = "term"
TYPE_NS = "type"


@dataclass(frozen=True)
class EnvSnapshot:
    """Environment in force at a derivation node.

    inline: ``((x, rhs), ...)`` oldest first; rename: ``((ns, x, y), ...)`` newest
    first; strictness: ``((x, strictness), ...)`` oldest first.
    """

    kind: EnvKind = EnvKind.EMPTY
    entries: tuple = ()

    def inline_map(self) -> dict[Name, Term]:
        return dict(self.entries)

    def strictness_map(self) -> dict[Name, Strictness]:
        return dict(self.entries)


EMPTY_ENV = EnvSnapshot()


@dataclass(frozen=True)
class Derivation:
    rule: RuleId
    env: EnvSnapshot
    source: Term
    target: Term
    premises: tuple[Derivation, ...] = ()
    witness: Term | None = None

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


@dataclass(frozen=True)
class PassHints:
    eliminated: tuple[Name, ...] = ()


NO_HINTS = PassHints()


@dataclass(frozen=True)
class CertStep:
    pass_id: PassId
    source: Term
    target: Term
    derivation: Derivation
    witnesses: tuple[Term, ...] = ()
    # digests as written in a certificate file; empty when built in memory
    source_hash: str = field(default="", compare=False)
    target_hash: str = field(default="", compare=False)


@dataclass(frozen=True)
class Certificate:
    steps: tuple[CertStep, ...] = ()
