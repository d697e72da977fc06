"""Exponential functionals of Levy processes with rational Laplace
exponent: Mellin transform, density, CDF, moments, Asian option prices,
and an exact-path Monte Carlo cross-check."""

from ._backend import backend_name
from .density import (G1, G2, GVectors, SeriesEval, build_vectors, cdf,
                      density, density_asymptotic, density_best,
                      density_reliable,
                      density_via_inversion, hyper_pFq,
                      leading_tail_coefficient, normalization_check,
                      price_asian, quantiles, recovered_mellin,
                      tail_exponent)
from .errors import (AssumptionError, BreakpointError, ConvergenceError,
                     DomainError, ExpoLevyError, InfinitePriceError,
                     ModelInvalidError, MomentError, MultipleRootError,
                     NumericalFailure, PoleError, PreconditionError,
                     RootCountError, StripError, UsageError,
                     ValidationFailure)
from .mellin import (MellinParams, big_G, build_params, joint_transform,
                     log_gamma, mellin_transform, moment, params_from_model,
                     reciprocal_gamma)
from .model import (JumpTerm, LevyModel, dump_model, jump_intensity,
                    laplace_exponent, levy_density, load_model, mean,
                    model_from_dict, model_to_dict, validate)
from .montecarlo import (JumpSampler, McConfig, McReport, McRow,
                         compare_report, estimate_joint, estimate_mellin,
                         sample_jump, simulate_exponential_functional,
                         simulate_killed_pair)
from .roots import (AssumptionReport, Polynomial, RationalForm, RootSet,
                    check_assumptions, cramer_abscissa, solve, to_rational)

__version__ = "0.1.0"

__all__ = [
    "AssumptionError", "AssumptionReport", "BreakpointError",
    "ConvergenceError", "DomainError", "ExpoLevyError", "G1", "G2",
    "GVectors", "InfinitePriceError", "JumpSampler", "JumpTerm", "LevyModel",
    "McConfig", "McReport", "McRow", "MellinParams", "ModelInvalidError",
    "MomentError", "MultipleRootError", "NumericalFailure", "PoleError",
    "Polynomial", "PreconditionError", "RationalForm", "RootCountError",
    "RootSet", "SeriesEval", "StripError", "UsageError", "ValidationFailure",
    "backend_name", "big_G", "build_params", "build_vectors", "cdf",
    "check_assumptions", "compare_report", "cramer_abscissa", "density",
    "density_asymptotic", "density_best", "density_reliable",
    "density_via_inversion",
    "dump_model", "estimate_joint", "estimate_mellin", "hyper_pFq",
    "joint_transform", "jump_intensity", "laplace_exponent",
    "leading_tail_coefficient", "levy_density", "load_model", "log_gamma",
    "mean", "mellin_transform", "model_from_dict", "model_to_dict", "moment",
    "normalization_check", "params_from_model", "price_asian", "quantiles",
    "reciprocal_gamma", "recovered_mellin", "sample_jump",
    "simulate_exponential_functional",
    "simulate_killed_pair", "solve", "tail_exponent", "to_rational",
    "validate",
]
