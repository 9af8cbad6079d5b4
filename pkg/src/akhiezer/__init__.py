"""Akhiezer polynomials on several intervals.

Two pipelines compute the same objects: quadrature and recurrences
(geometry, quadrature, opoly, monodromy) and the hyperelliptic curve with
its theta function (surface, theta, formulas).
"""

from src.akhiezer.geometry import IntervalSet, validate_interval_set
from src.akhiezer.quadrature import build_rules, integrate
from src.akhiezer.opoly import RecurrenceTable, eval_P, eval_Q, stieltjes, y_matrix
from src.akhiezer.monodromy import residues, schlesinger_fd, tau_identities
from src.akhiezer.surface import HyperellipticCurve, PeriodData, abel, omega3, periods
from src.akhiezer.theta import ThetaContext, theta, theta_dlog
from src.akhiezer.formulas import (
    ThetaPipeline,
    P_n_theta,
    a_n_theta,
    b_n_theta,
    build_pipeline,
    h_n_theta,
    hankel_theta,
)

__all__ = [
    "IntervalSet",
    "validate_interval_set",
    "build_rules",
    "integrate",
    "RecurrenceTable",
    "eval_P",
    "eval_Q",
    "stieltjes",
    "y_matrix",
    "residues",
    "schlesinger_fd",
    "tau_identities",
    "HyperellipticCurve",
    "PeriodData",
    "abel",
    "omega3",
    "periods",
    "ThetaContext",
    "theta",
    "theta_dlog",
    "ThetaPipeline",
    "P_n_theta",
    "a_n_theta",
    "b_n_theta",
    "build_pipeline",
    "h_n_theta",
    "hankel_theta",
]
