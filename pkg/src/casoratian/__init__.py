"""Casorati determinants, their asymptotics, and the discrete hungry Lotka-Volterra system."""

from .asymptotics import (
    AsymptoticFit,
    expand_casorati_terms,
    kappa_groups,
    pole_table,
    ratio_estimate,
    verify_theorem1,
    verify_theorem2,
)
from .determinants import (
    casorati_det,
    check_g_equals_casorati,
    check_tau_factorization,
    g_det,
    hankel_det,
    tau,
)
from .dhlv import (
    AuxiliaryRow,
    DhlvState,
    convergence_check,
    dhlv_step,
    dhlv_table,
    seed_from_poles,
    simulate,
    state_from_determinants,
    u_from_v,
    v_from_determinants,
    v_from_tau,
    v_from_u,
)
from .errors import (
    CasoratianError,
    ConfigError,
    IdentityViolation,
    TableRangeError,
    ZeroCasorati,
    ZeroDenominator,
    ZeroTau,
)
from .numeric import EXACT, FLOAT, det_bruteforce, det_exact, det_float
from .series import (
    CoefficientTable,
    DeltaSchedule,
    PoleModel,
    build_table,
    evolution_rates,
    shift_table,
)

__all__ = [
    "EXACT",
    "FLOAT",
    "det_bruteforce",
    "det_exact",
    "det_float",
    "AsymptoticFit",
    "AuxiliaryRow",
    "CasoratianError",
    "CoefficientTable",
    "ConfigError",
    "DeltaSchedule",
    "DhlvState",
    "IdentityViolation",
    "PoleModel",
    "TableRangeError",
    "ZeroCasorati",
    "ZeroDenominator",
    "ZeroTau",
    "build_table",
    "casorati_det",
    "check_g_equals_casorati",
    "check_tau_factorization",
    "convergence_check",
    "dhlv_step",
    "dhlv_table",
    "evolution_rates",
    "expand_casorati_terms",
    "g_det",
    "hankel_det",
    "kappa_groups",
    "pole_table",
    "ratio_estimate",
    "seed_from_poles",
    "shift_table",
    "simulate",
    "state_from_determinants",
    "tau",
    "u_from_v",
    "v_from_determinants",
    "v_from_tau",
    "v_from_u",
    "verify_theorem1",
    "verify_theorem2",
]
__version__ = "0.1.0"
