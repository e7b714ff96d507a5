"""Numerical toolkit for general Dirichlet series ``sum a_n exp(-lambda_n s)``.

Submodules: ``frequency`` (gap conditions, basis decompositions), ``series``
(polynomials, Riesz/Abel means, abscissa estimates), ``group`` (torus models,
Haar and flow norms), ``kernels`` (Poisson and Perron kernels), ``maximal``
(Carleson-type maximal operators), ``helson`` (random-character simulation).
"""
from ._accel import BACKEND
from .errors import (AccuracyNotAchieved, DirichletLabError, InvalidAbscissa, InvalidExponent, InvalidFrequency,
                     InvalidModel, InvalidParameter, InvalidRelations, ModelMismatch, NotCoprime,
                     RelationInconclusive, UndefinedAbscissa)
from .frequency import (BasisDecomposition, ConditionReport, Frequency, check_condition, decompose_basis,
                        l_value, ordinary_decomposition, parse_frequency)
from .group import GroupModel, build_model, haar_sample, lp_norm, model_for, ordinary_model
from .series import DirichletPolynomial, partial_sum, riesz_mean, sigma_u_estimate
from .maximal import carleson_maximal, carleson_norm, rational_direction, unimodular_plan

__version__ = "0.1.0"

__all__ = [
    "AccuracyNotAchieved", "DirichletLabError", "InvalidAbscissa", "InvalidExponent", "InvalidFrequency",
    "InvalidModel", "InvalidParameter", "InvalidRelations", "ModelMismatch", "NotCoprime",
    "RelationInconclusive", "UndefinedAbscissa",
    "BACKEND", "BasisDecomposition", "ConditionReport", "DirichletPolynomial", "Frequency", "GroupModel",
    "build_model", "carleson_maximal", "carleson_norm", "check_condition", "decompose_basis", "haar_sample",
    "l_value", "lp_norm", "model_for", "ordinary_decomposition", "ordinary_model", "parse_frequency",
    "partial_sum", "rational_direction", "riesz_mean", "sigma_u_estimate", "unimodular_plan",
]
