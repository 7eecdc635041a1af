"""Certified Casimir observables for a massless Dirichlet scalar in a rectangular box."""
from .analysis import ScanResult, features, find_extremum, find_zero, fit_asymptote, fit_small_a2, scan
from .boxmodel import FULL, POSITIVE, BoxGeometry, SideId, enumerate_shell
from .dirichlet import CertifiedValue, DerivSelector, TruncationParams, kernel, xx, xy
from .errors import BracketError, CasimirError, ContinuationNote, DomainError, EdgeError, FitError, PoleError
from .heatkernel import heat_large, heat_small
from .observables import (StressTensorVEV, energy_ren, force_ren, pressure, pressure_prescription_check,
                          rescale, stress_energy, xi_critical)
from .specfun import gamma, p_func, rgamma, upper_gamma

__all__ = [
    "BoxGeometry", "SideId", "POSITIVE", "FULL", "enumerate_shell",
    "CertifiedValue", "DerivSelector", "TruncationParams", "kernel", "xx", "xy",
    "heat_large", "heat_small",
    "StressTensorVEV", "stress_energy", "pressure", "pressure_prescription_check",
    "energy_ren", "force_ren", "rescale", "xi_critical",
    "ScanResult", "scan", "find_extremum", "find_zero", "fit_small_a2", "fit_asymptote", "features",
    "gamma", "rgamma", "upper_gamma", "p_func",
    "CasimirError", "PoleError", "DomainError", "EdgeError", "BracketError", "FitError", "ContinuationNote",
]
