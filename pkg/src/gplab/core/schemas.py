"""JSON schemas for run configurations and input documents."""

from typing import Any

from .constants import (
    FORMAT_CSV,
    FORMAT_JSON,
    GROUP_BS,
    GROUP_H5_FULL,
    GROUP_H5_GAMMA1,
    GROUP_H5_GAMMA2,
    SUITE_BS,
    SUITE_CERTIFICATE,
    SUITE_DIAGONAL,
    SUITE_H5,
    SUITE_MATHER,
    SUITE_PIPELINE,
)

RATIONAL_PATTERN = r"^-?[0-9]+(/[1-9][0-9]*)?$"

_RATIONAL: dict[str, Any] = {"type": "string", "pattern": RATIONAL_PATTERN}
_POSITIVE: dict[str, Any] = {"type": "integer", "minimum": 1}
_NATURAL: dict[str, Any] = {"type": "integer", "minimum": 0}

MATHER_PARAMS_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "a_prime": _RATIONAL,
        "a": _RATIONAL,
        "b": _RATIONAL,
        "b_prime": _RATIONAL,
        "alpha": _RATIONAL,
    },
    "additionalProperties": False,
}

RUN_CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "suite": {
            "type": "string",
            "enum": [
                SUITE_H5,
                SUITE_BS,
                SUITE_MATHER,
                SUITE_DIAGONAL,
                SUITE_CERTIFICATE,
                SUITE_PIPELINE,
            ],
        },
        "group": {
            "type": "string",
            "enum": [GROUP_H5_GAMMA1, GROUP_H5_GAMMA2, GROUP_H5_FULL, GROUP_BS],
        },
        "element": {"type": ["string", "object"]},
        "n": _NATURAL,
        "n_max": _POSITIVE,
        "m_max": _POSITIVE,
        "k_max": _POSITIVE,
        "verify_m_max": _POSITIVE,
        "radius": _NATURAL,
        "budget": _POSITIVE,
        "sample_count": _POSITIVE,
        "seed": _NATURAL,
        "format": {"type": "string", "enum": [FORMAT_JSON, FORMAT_CSV]},
        "params": MATHER_PARAMS_SCHEMA,
    },
    "additionalProperties": False,
}

ELEMENT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"type": "string", "enum": ["pl", "unitri", "dyadic"]}},
}

RANK_INPUT_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "anyOf": [
        {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {
                    "type": "string",
                    "enum": ["finite", "union", "image", "family"],
                },
            },
        },
        {
            "type": "object",
            "required": ["families"],
            "properties": {
                "scaffold": {"type": "object"},
                "families": {"type": "array", "items": {"type": "object"}},
            },
        },
        {
            "type": "object",
            "required": ["points"],
            "properties": {"points": {"type": "array"}},
        },
        {
            "type": "object",
            "required": ["construction", "n"],
            "properties": {
                "construction": {"type": "string"},
                "n": _NATURAL,
            },
            "additionalProperties": False,
        },
    ],
}
