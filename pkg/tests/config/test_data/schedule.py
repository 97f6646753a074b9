"""Test data for the schedule section."""

from gneseek.const import CONF_A1, CONF_A2

VALID_DATA = [
    {
        "description": "Reproduction exponents",
        "config": {CONF_A1: 0.2, CONF_A2: 0.8},
    },
    {
        "description": "Balanced exponents",
        "config": {CONF_A1: 1 / 3, CONF_A2: 0.75},
    },
]

INVALID_DATA = [
    {
        "description": "a1 on the open upper end should fail validation",
        "config": {CONF_A1: 0.5},
        "error": "must lie strictly inside (0, 0.5)",
    },
    {
        "description": "a1 of zero should fail validation",
        "config": {CONF_A1: 0.0},
        "error": "must lie strictly inside (0, 0.5)",
    },
    {
        "description": "a2 below two thirds should fail validation",
        "config": {CONF_A2: 0.6},
        "error": "must lie strictly inside (0.666667, 1)",
    },
    {
        "description": "a2 of one should fail validation",
        "config": {CONF_A2: 1},
        "error": "must lie strictly inside (0.666667, 1)",
    },
]
