"""Finite labelled transition systems and their linear-time congruences."""

from .congruences import (
    CATALOGUE,
    equivalent,
    hasse_edges,
    implies,
    lookup,
    maximal_equating,
    minimal_distinguishing,
    verdict_table,
)
from .expr import eval_expr, parse_expr
from .lts import (
    TAU,
    Lts,
    LtsError,
    bisim_quotient,
    bisimilar,
    classify_state,
    parse_lts,
    reachable_part,
    render_lts,
)
from .normalform import NormalForm, determinize, normalize, pd, una
from .operators import (
    BLG,
    DLG,
    LLG,
    RenameRelation,
    hide,
    internal_choice,
    internal_choice_composed,
    make_constant,
    parallel,
    prefix,
    rename,
    retag,
)
from .oracle import GenParams, crosscheck, enumerate_bounded, random_lts
from .semantics import Component, component_view, trim_relevant

__version__ = "0.1.0"
