"""Exact-arithmetic engine for the KP hierarchy in several variables."""

from .config import TruncationConfig, default_config, flow_guard
from .errors import (
    FlowInconsistency,
    KPNError,
    NoValuation,
    NotDressable,
    NotInvertible,
    NotTransversal,
    UsageError,
    WindowTooSmall,
)
from .grassmann import (
    GrPoint,
    KPoint,
    adjoint_wave,
    ba_function,
    bilinear_check,
    is_F0,
    k_extend,
    perp,
    point_from_wave,
    stationary_indices,
    trivial_point,
    wave_from_point,
)
from .hierarchy import (
    DressingOp,
    LaxTuple,
    dress,
    finite_gap_certificate,
    integrate_flows,
    lax_residual,
    undress,
    wave_contract_residual,
    wave_function,
)
from .krichever import GeometryData, builtin_geometry, krichever_point, ring_basis
from .pdo import (
    Pdo,
    commutator,
    pdo_adjoint,
    pdo_invert,
    pdo_mul,
    pdo_pow,
    pdo_split,
    pdo_symbol,
)
from .tpoly import TimePoly
from .wavefunction import WaveFunction
from .xseries import XSeries, build_exponential, pairing, residue, valuation

__all__ = [
    "TruncationConfig",
    "default_config",
    "flow_guard",
    "KPNError",
    "UsageError",
    "NotInvertible",
    "NoValuation",
    "NotDressable",
    "FlowInconsistency",
    "NotTransversal",
    "WindowTooSmall",
    "TimePoly",
    "XSeries",
    "Pdo",
    "WaveFunction",
    "GrPoint",
    "KPoint",
    "DressingOp",
    "LaxTuple",
    "GeometryData",
    "build_exponential",
    "pairing",
    "residue",
    "valuation",
    "pdo_mul",
    "pdo_split",
    "pdo_invert",
    "pdo_pow",
    "pdo_adjoint",
    "pdo_symbol",
    "commutator",
    "dress",
    "undress",
    "integrate_flows",
    "lax_residual",
    "wave_function",
    "wave_contract_residual",
    "finite_gap_certificate",
    "is_F0",
    "trivial_point",
    "wave_from_point",
    "point_from_wave",
    "ba_function",
    "k_extend",
    "perp",
    "adjoint_wave",
    "bilinear_check",
    "stationary_indices",
    "builtin_geometry",
    "ring_basis",
    "krichever_point",
]
