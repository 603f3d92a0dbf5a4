from .assemble import (HomeomorphismReport, Reparametrization, WeightScheduleError, WitnessRejected,
                       assemble, key_estimate_instances, sbvg_subsequence, verify_homeomorphism)
from .bridge import QuadratureError, SmoothBridge, c_norm, make_bridge, w, w_derivative
from .certify import (CertificateInputError, Certifiable, DerivativeCertificate, all_decaying,
                      certify_derivatives, from_function, from_reparametrization)
from .normalize import Normalized, nonconstant_normalize
from .vfunc import (ReparamInputError, VariationFunction, admissible_triples, build_v, check_growth_bound,
                    measure_zero_check)
from .zahorski import cantor_witness, zahorski_build

__all__ = [
    "CertificateInputError", "Certifiable", "DerivativeCertificate", "HomeomorphismReport",
    "Normalized", "QuadratureError", "ReparamInputError", "Reparametrization", "SmoothBridge",
    "VariationFunction", "WeightScheduleError", "WitnessRejected", "admissible_triples",
    "all_decaying", "assemble", "build_v", "c_norm", "cantor_witness", "certify_derivatives",
    "check_growth_bound", "key_estimate_instances", "from_function", "from_reparametrization", "make_bridge",
    "measure_zero_check", "nonconstant_normalize", "sbvg_subsequence", "verify_homeomorphism", "w",
    "w_derivative", "zahorski_build",
]
