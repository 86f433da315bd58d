"""Slow-fast analysis of a two-variable Belousov-Zhabotinsky model.

Critical-curve geometry, equilibrium and Hopf analysis, the canard
criticality quantity, an adaptive integrator with section events, and
limit-cycle tools for canard explosions and nested cycles.
"""
__version__ = "0.1.0"

from .canard import (CanardReport, Criticality, Fold, A_at_fold, canard_report,
                     hopf_criticality, normal_form_coefficients, q_double_star, quantity_A,
                     quantity_A_from_coefficients, rescale_factors)
from .critical import (FoldCubic, FoldReport, ShapeClass, classify_shape, curve_derivatives,
                       curve_value, fold_points, landing_points, q_star)
from .cycles import (CycleShape, ExplosionBracket, LimitCycleEstimate, NestedCyclesResult,
                     SweepRow, amplitude_sweep, classify_cycle_shape, find_limit_cycle,
                     explosion_threshold, locate_cycle_fold, locate_explosion,
                     nested_cycles)
from .equilibrium import (EquilibriumReport, HopfData, Regime, Stability, classify, eigenvalues,
                          equilibrium, f_for_equilibrium, hopf_points, trace_w)
from .errors import (BracketInvalid, BZError, ConvergedToEquilibrium, DegenerateFold,
                     DomainError, NoConvergence, NoCrossing, NoHopfRoots, OrbitEscaped,
                     ParamsError, SignChangeNotFound)
from .integrator import (Direction, Formulation, IntegratorOptions, Section, SectionEvent,
                         Termination, Trajectory, integrate, integrate_to_section)
from .model import Params, State, fast_field, jacobian, polynomial_field, slow_field

__all__ = [
    "__version__", "CanardReport", "Criticality", "Fold", "A_at_fold", "canard_report",
    "hopf_criticality", "normal_form_coefficients", "q_double_star", "quantity_A",
    "quantity_A_from_coefficients", "rescale_factors", "FoldCubic", "FoldReport", "ShapeClass",
    "classify_shape", "curve_derivatives", "curve_value", "fold_points", "landing_points",
    "q_star", "CycleShape", "ExplosionBracket", "LimitCycleEstimate", "NestedCyclesResult",
    "SweepRow", "amplitude_sweep", "classify_cycle_shape", "find_limit_cycle",
    "explosion_threshold", "locate_cycle_fold", "locate_explosion", "nested_cycles",
    "EquilibriumReport", "HopfData", "Regime", "Stability", "classify", "eigenvalues",
    "equilibrium", "f_for_equilibrium", "hopf_points", "trace_w", "BracketInvalid", "BZError",
    "ConvergedToEquilibrium", "DegenerateFold", "DomainError", "NoConvergence", "NoCrossing",
    "NoHopfRoots", "OrbitEscaped", "ParamsError", "SignChangeNotFound", "Direction",
    "Formulation", "IntegratorOptions", "Section", "SectionEvent", "Termination", "Trajectory",
    "integrate", "integrate_to_section", "Params", "State", "fast_field", "jacobian",
    "polynomial_field", "slow_field",
]
