"""Exact Kummer-plane geometry, Humbert discriminants, cycle regulators and
higher Green's functions."""

from .arith import (
    BigComplex,
    BigReal,
    QuadVal,
    Rat,
    UniPoly,
    quad_solve,
    recognize_algebraic,
)
from .cycle import (
    BlowupLocalData,
    CyclePresentation,
    RegulatorResult,
    blowup_data,
    build_cycle,
    conjugate_swap,
    f_p_eval,
    regulator_h4,
)
from .geometry import (
    Conic,
    ProjLine,
    ProjPoint,
    conic_line_meet,
    conic_through_5,
    incident,
    is_tangent,
)
from .greens import (
    GreensValue,
    PrincipalPart,
    TruncationPolicy,
    UHPoint,
    cross_check,
    green_k,
    greens_combo,
    hecke_green,
    legendre_q,
    reduce_fd,
)
from .kummer import (
    BWCase,
    KummerConfig,
    ModuliParams,
    build_config,
    bw_cases,
    h4_h8_factors,
    h4_line,
    hecke_components,
    humbert5_conic,
    humbert5_discriminant,
)
from .nslattice import (
    EndElt,
    NSClass,
    cm_cycle,
    cm_z,
    humbert_norm,
    ns_pair,
    sigma_star,
)

__version__ = "0.1.0"

__all__ = [
    "BigComplex", "BigReal", "QuadVal", "Rat", "UniPoly",
    "quad_solve", "recognize_algebraic",
    "Conic", "ProjLine", "ProjPoint",
    "conic_through_5", "conic_line_meet", "is_tangent", "incident",
    "ModuliParams", "KummerConfig", "BWCase",
    "build_config", "humbert5_conic", "humbert5_discriminant",
    "h4_h8_factors", "h4_line", "bw_cases", "hecke_components",
    "BlowupLocalData", "CyclePresentation", "RegulatorResult",
    "blowup_data", "f_p_eval", "build_cycle", "regulator_h4", "conjugate_swap",
    "EndElt", "NSClass", "ns_pair", "humbert_norm", "cm_z", "sigma_star", "cm_cycle",
    "UHPoint", "PrincipalPart", "TruncationPolicy", "GreensValue",
    "legendre_q", "reduce_fd", "green_k", "hecke_green", "greens_combo", "cross_check",
    "__version__",
]
