"""Membership functions, linguistic variables, Mamdani and Takagi-Sugeno inference."""

from .forecaster import FisForecaster, fis_train
from .membership import SHAPES, MembershipFunction, membership
from .rulefile import format_rule, format_rulebases, format_rules, parse_rule, parse_rulebases, parse_rules
from .rules import MamdaniRule, MamdaniSystem, TsRule, generate_rules, mamdani_infer, ts_infer
from .variables import (
    DAY_LABELS,
    HUMIDITY_LABELS,
    LOAD_LABELS,
    TEMPERATURE_LABELS,
    WIND_CHILL_LABELS,
    WIND_SPEED_LABELS,
    LinguisticVariable,
    fuzzify,
    make_partition,
)

__all__ = [
    "DAY_LABELS",
    "HUMIDITY_LABELS",
    "LOAD_LABELS",
    "SHAPES",
    "TEMPERATURE_LABELS",
    "WIND_CHILL_LABELS",
    "WIND_SPEED_LABELS",
    "FisForecaster",
    "LinguisticVariable",
    "MamdaniRule",
    "MamdaniSystem",
    "MembershipFunction",
    "TsRule",
    "fis_train",
    "format_rule",
    "format_rulebases",
    "format_rules",
    "fuzzify",
    "generate_rules",
    "make_partition",
    "mamdani_infer",
    "membership",
    "parse_rule",
    "parse_rulebases",
    "parse_rules",
    "ts_infer",
]
