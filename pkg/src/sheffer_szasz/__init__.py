"""Generalized Szász operators built on multiple Sheffer polynomials."""

__version__ = "0.1.0"

from .analysis import (
    bound_gavrea_rasa,
    bound_modulus,
    bound_steklov,
    error_sweep,
    gavrea_rasa_report,
    korovkin_report,
    modulus,
    second_modulus,
    sup_norms,
)
from .families import Family, FamilyConstants, builtin, family_from_json, validate_family
from .operator import GrowthEnvelope, apply, diagonal_profile, lemma1_sums, moments_closed, szasz, weights
from .series import BiSeries, series_eval, series_exp, series_mul, series_partial, sheffer_table

__all__ = [
    "BiSeries", "Family", "FamilyConstants", "GrowthEnvelope",
    "apply", "bound_gavrea_rasa", "bound_modulus", "bound_steklov", "builtin",
    "diagonal_profile", "error_sweep", "family_from_json", "gavrea_rasa_report",
    "korovkin_report", "lemma1_sums", "modulus", "moments_closed", "second_modulus",
    "series_eval", "series_exp", "series_mul", "series_partial", "sheffer_table",
    "sup_norms", "szasz", "validate_family", "weights",
]  # fmt: skip
