"""Numerical laboratory for a constrained eavesdropping attack on BB84.

The package models an eavesdropper on a weak-coherent-pulse BB84 link who
splits or intercepts pulses by photon number while tuning her blocking and
measuring probabilities so the receiver's sifted-bit count and error rate
stay exactly at their undisturbed values. It provides the closed-form
information yield and constraint solutions, an independent pulse-level
Monte Carlo cross-check, and sweep/feasibility tooling with CSV and SVG
output.
"""

from .core import AttackPlan, ParameterError, SystemParams, poisson_pmf, poisson_tail
from .strategy import (
    DEFAULT_L_MAX,
    DEFAULT_MU_MAX,
    DEFAULT_TRUNCATION_TOL,
    MIN_EXPLOITABLE_PHOTONS,
    DirectAttackTable,
    TableFormatError,
    TruncationError,
    build_default_table,
    build_pessimistic_table,
    direct_attack_rate,
    load_table,
)
from .analytic import (
    AnalyticReport,
    DegenerateModelError,
    errors_attacked,
    errors_baseline,
    eve_information,
    full_report,
    sifted_bits_attacked,
    sifted_bits_baseline,
    solve_blocking_prob,
    solve_measuring_prob,
)
from .montecarlo import (
    DEFAULT_CHUNK_PULSES,
    DEFAULT_SIGMA,
    PULSE_DRAWS,
    ComparisonVerdict,
    SimConfig,
    SimTally,
    StatCheck,
    compare_to_analytic,
    simulate,
)
from .sweep import (
    CLASS_BOTH,
    CLASS_DEGENERATE,
    CLASS_PB,
    CLASS_PM,
    DEFAULT_M,
    MODE_ERROR_ONLY,
    MODE_MATCHED,
    PARAM_NAMES,
    CurvePoint,
    SweepAxis,
    SweepSpec,
    classify_feasibility,
    parse_csv,
    run_sweep,
    write_csv,
)
from .svgplot import PlotStyle, render_svg

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "ParameterError",
    "SystemParams",
    "AttackPlan",
    "poisson_pmf",
    "poisson_tail",
    # strategy
    "DEFAULT_L_MAX",
    "DEFAULT_MU_MAX",
    "DEFAULT_TRUNCATION_TOL",
    "MIN_EXPLOITABLE_PHOTONS",
    "DirectAttackTable",
    "TruncationError",
    "TableFormatError",
    "build_default_table",
    "build_pessimistic_table",
    "load_table",
    "direct_attack_rate",
    # analytic
    "AnalyticReport",
    "DegenerateModelError",
    "sifted_bits_baseline",
    "sifted_bits_attacked",
    "errors_baseline",
    "errors_attacked",
    "solve_blocking_prob",
    "solve_measuring_prob",
    "eve_information",
    "full_report",
    # montecarlo
    "PULSE_DRAWS",
    "DEFAULT_CHUNK_PULSES",
    "DEFAULT_SIGMA",
    "SimConfig",
    "SimTally",
    "simulate",
    "StatCheck",
    "ComparisonVerdict",
    "compare_to_analytic",
    # sweep
    "PARAM_NAMES",
    "MODE_MATCHED",
    "MODE_ERROR_ONLY",
    "CLASS_BOTH",
    "CLASS_PB",
    "CLASS_PM",
    "CLASS_DEGENERATE",
    "DEFAULT_M",
    "SweepAxis",
    "SweepSpec",
    "CurvePoint",
    "run_sweep",
    "classify_feasibility",
    "write_csv",
    "parse_csv",
    # svg
    "PlotStyle",
    "render_svg",
]
