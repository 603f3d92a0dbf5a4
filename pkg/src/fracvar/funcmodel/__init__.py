"""Function models, closed-set descriptions and monotonicity structure."""

from .detect import KReport, detect_K, detect_K_report
from .expr import (ExprEvalError, ExprFunction, ExprSyntaxError, parse, parse_expression,
                   taylor_eval, to_source)
from .pl import PLFunction, SeqPLFunction, hat, identity
from .sets import (ClosedSetDesc, Interval, cantor_depth_groups, cantor_prefix,
                   contiguous_intervals, derived_set, point)

__all__ = [
    "ClosedSetDesc", "ExprEvalError", "ExprFunction", "ExprSyntaxError", "Interval", "KReport",
    "PLFunction", "SeqPLFunction", "cantor_depth_groups", "cantor_prefix", "contiguous_intervals",
    "derived_set", "detect_K", "detect_K_report", "hat", "identity", "parse", "parse_expression",
    "point", "taylor_eval", "to_source",
]
