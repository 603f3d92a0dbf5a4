"""Self-homeomorphisms whose first ``n`` derivatives vanish on the preimage of a given closed set."""

from __future__ import annotations

from typing import Optional

from ..classify import DecompositionWitness
from ..funcmodel.pl import identity
from ..funcmodel.sets import ClosedSetDesc, Interval, cantor_depth_groups, contiguous_intervals
from .assemble import Reparametrization, assemble
from .certify import certify_derivatives
from .vfunc import ReparamInputError


def cantor_witness(depth: int, domain=(0.0, 1.0)) -> DecompositionWitness:
    """``A_1 = {a, b}`` and ``A_d`` = endpoints first appearing at level ``d``."""
    dom = Interval(*domain)
    groups = cantor_depth_groups(depth, domain)
    return DecompositionWitness("cbvg", tuple(ClosedSetDesc.from_points(dom, g) for g in groups if g))


def zahorski_build(K: ClosedSetDesc, witness: DecompositionWitness, n: int,
                   windows=None, P: Optional[int] = None) -> tuple[Reparametrization, list]:
    """Run the assembly with the identity in place of ``f`` and ``K`` in place of ``K_f``.

    Returns ``(r, certificates)``; ``r.h`` is the homeomorphism and the
    certificates are taken at every point of ``h^-1(K)``.
    """
    if not contiguous_intervals(K):
        raise ReparamInputError("K has no contiguous intervals; no homeomorphism can be flat on all of it")
    if not K.is_finite:
        raise ReparamInputError("K must be a null set; pass the endpoints of a Cantor prefix")
    a, b = K.domain.lo, K.domain.hi
    r = assemble(identity(a, b), witness, n, K=K, P=P)
    certs = certify_derivatives(r, r.K_g, windows)
    return r, certs
