"""Variable-set automata and the spanner algebra."""

from .algebra import (
    VariableClash,
    cartesian_product,
    concat,
    decompose,
    difference,
    intersection,
    join,
    project,
    rename,
    rename_dagger,
    restrict_markers,
    synchronized_product,
    union,
    union_all,
)
from .ordering import determinize, order_markers
from .va import (
    EPS,
    VA,
    InvariantError,
    Label,
    NotSequential,
    StateLimitExceeded,
    check_functional,
    check_ordered,
    check_sequential,
    eliminate_epsilon,
    empty,
    explore,
    normalize,
    reduce_states,
    trim,
    universal,
)

__all__ = [
    "EPS",
    "VA",
    "InvariantError",
    "Label",
    "NotSequential",
    "StateLimitExceeded",
    "VariableClash",
    "cartesian_product",
    "check_functional",
    "check_ordered",
    "check_sequential",
    "concat",
    "decompose",
    "determinize",
    "difference",
    "eliminate_epsilon",
    "empty",
    "explore",
    "intersection",
    "join",
    "normalize",
    "order_markers",
    "reduce_states",
    "project",
    "rename",
    "rename_dagger",
    "restrict_markers",
    "synchronized_product",
    "trim",
    "union",
    "union_all",
    "universal",
]
