from __future__ import annotations

from dataclasses import dataclass

from ..funcmodel.pl import PLFunction
from ..variation import as_pl
from .vfunc import ReparamInputError


@dataclass(frozen=True)
class Normalized:
    """``function = source o map^-1``, where ``map`` is the rescaled variation function of the source."""

    function: PLFunction
    map: PLFunction


def nonconstant_normalize(f) -> Normalized:
    """Reparametrize by the rescaled variation ``x -> a + (b-a) V(f,[a,x]) / V(f,[a,b])``.

    The image of a piecewise-linear ``K_f`` stays finite, hence null.
    """
    pl = as_pl(f)
    if pl is None:
        raise ReparamInputError("normalization needs a piecewise-linear or sequence-defined function")
    bp, vals = pl.breakpoints, pl.values
    for x0, x1, y0, y1 in zip(bp, bp[1:], vals, vals[1:]):
        if y0 == y1:
            raise ReparamInputError(f"f is constant on [{x0}, {x1}]")
    a, b = bp[0], bp[-1]
    cum = [0]
    for y0, y1 in zip(vals, vals[1:]):
        cum.append(cum[-1] + abs(y1 - y0))
    new_bp = [a + (b - a) * c / cum[-1] for c in cum]
    new_bp[-1] = b
    return Normalized(PLFunction(tuple(new_bp), vals), PLFunction(bp, tuple(new_bp)))
