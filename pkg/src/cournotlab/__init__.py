"""Simulation and stability laboratory for a delayed mixed-oligopoly Cournot map."""

from .bifurcation import (
    BifurcationKind,
    BifurcationPoint,
    ParityCase,
    StabilityRegionRow,
    critical_alpha,
    flip_boundary,
    ns_boundary,
    stability_region,
)
from .dynamics import (
    AttractorSummary,
    AttractorType,
    DiagramRow,
    InitPolicy,
    LyapunovEstimate,
    PhasePortrait,
    SweepSpec,
    bifurcation_diagram,
    classify_attractor,
    default_initial_history,
    largest_lyapunov,
    phase_portrait,
)
from .equilibria import (
    AssumptionReport,
    Equilibrium,
    EquilibriumKind,
    boundary_equilibrium,
    check_assumptions,
    positive_equilibrium,
    reduced_fixed_point,
)
from .errors import (
    AssumptionError,
    ConfigError,
    CournotError,
    DegenerateBoundaryError,
    DimensionError,
    DivergenceError,
    NoCrossingError,
    NotStableAtStartError,
    NumericalError,
    ValidationError,
)
from .model import (
    DEFAULT_BLOWUP,
    DelayConfig,
    EconomicReport,
    HistoryState,
    MarketParams,
    Trajectory,
    economic_report,
    embedded_jacobian,
    jacobian_blocks,
    simulate,
    step,
)
from .spectral import (
    CharPoly,
    CharPolyKind,
    DelayFreeReport,
    DelayIndependentVerdict,
    EpsilonTriple,
    SpectrumReport,
    StabilityClass,
    delay_free_stable,
    delay_independent_verdict,
    epsilon_triple,
    full_char_poly,
    k_factor,
    no_public_firm_spectrum,
    poly_roots,
    reduced_char_poly,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "AssumptionReport",
    "AttractorSummary",
    "AttractorType",
    "BifurcationKind",
    "BifurcationPoint",
    "CharPoly",
    "CharPolyKind",
    "ConfigError",
    "CournotError",
    "DEFAULT_BLOWUP",
    "DegenerateBoundaryError",
    "DelayConfig",
    "DelayFreeReport",
    "DelayIndependentVerdict",
    "DiagramRow",
    "DimensionError",
    "DivergenceError",
    "EconomicReport",
    "EpsilonTriple",
    "Equilibrium",
    "EquilibriumKind",
    "HistoryState",
    "InitPolicy",
    "LyapunovEstimate",
    "MarketParams",
    "NoCrossingError",
    "NotStableAtStartError",
    "NumericalError",
    "ParityCase",
    "PhasePortrait",
    "SpectrumReport",
    "StabilityClass",
    "StabilityRegionRow",
    "SweepSpec",
    "Trajectory",
    "ValidationError",
    "bifurcation_diagram",
    "boundary_equilibrium",
    "check_assumptions",
    "classify_attractor",
    "critical_alpha",
    "default_initial_history",
    "delay_free_stable",
    "delay_independent_verdict",
    "economic_report",
    "embedded_jacobian",
    "epsilon_triple",
    "flip_boundary",
    "full_char_poly",
    "jacobian_blocks",
    "k_factor",
    "largest_lyapunov",
    "no_public_firm_spectrum",
    "ns_boundary",
    "phase_portrait",
    "poly_roots",
    "positive_equilibrium",
    "reduced_char_poly",
    "reduced_fixed_point",
    "simulate",
    "stability_region",
    "step",
]
