"""Structural schema for KnowsRecord v0.9 documents.

``RECORD_SCHEMA`` is the JSON Schema the ``$schema`` root key points at,
expressed as a plain dict so tests can cross-check it with an off-the-shelf
validator.  :func:`validate_tree` is an independent evaluator for the schema
subset used here; the linter's check 1 is built on it so its verdict stays
equivalent to validating the raw tree against the schema.
"""

from __future__ import annotations

import re
from typing import Any

from . import model
from .model import enum_values, is_timestamp

_SEMVER_PATTERN = r"^\d+\.\d+\.\d+$"
_PROFILE_PATTERN = r"^.+@[1-9]\d*$"

_ANCHOR_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["representation_ref", "locator_type", "locator"],
    "properties": {
        "representation_ref": {"type": "string", "minLength": 1},
        "locator_type": {"enum": sorted(enum_values(model.AnchorLocatorType))},
        "locator": {"type": "string", "minLength": 1},
    },
}

_PROVENANCE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["origin", "actor", "generated_at"],
    "properties": {
        "origin": {"enum": sorted(enum_values(model.Origin))},
        "actor": {
            "type": "object",
            "additionalProperties": False,
            "required": ["name", "type"],
            "properties": {
                "name": {"type": "string", "minLength": 1},
                "type": {"enum": sorted(enum_values(model.ActorType))},
            },
        },
        "generated_at": {"type": "string", "format": "date-time"},
        "method": {"type": "string"},
        "verification": {"type": "string"},
        "x_extensions": {"type": "object"},
    },
}

_CONFIDENCE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["claim_strength", "extraction_fidelity"],
    "properties": {
        "claim_strength": {"enum": sorted(enum_values(model.ConfidenceLevel))},
        "extraction_fidelity": {"enum": sorted(enum_values(model.ConfidenceLevel))},
    },
}

_OBSERVATION_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["metric"],
    "properties": {
        "metric": {"type": "string", "minLength": 1},
        "value": {"type": "number"},
        "unit": {"type": "string"},
        "qualitative_value": {"type": "string", "minLength": 1},
    },
    "oneOf": [
        {"required": ["value"], "not": {"required": ["qualitative_value"]}},
        {"required": ["qualitative_value"], "not": {"required": ["value"]}},
    ],
}

_ARTIFACT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["id", "artifact_type", "role", "title"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "artifact_type": {"enum": sorted(enum_values(model.ArtifactType))},
        "role": {"enum": sorted(enum_values(model.ArtifactRole))},
        "title": {"type": "string", "minLength": 1},
        "identifiers": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "properties": {
                "doi": {"type": "string", "minLength": 1},
                "arxiv": {"type": "string", "minLength": 1},
                "isbn": {"type": "string", "minLength": 1},
                "url": {"type": "string", "minLength": 1},
            },
        },
        "representations": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "media_type", "locator"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "media_type": {"type": "string", "minLength": 1},
                    "locator": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["type", "value"],
                        "properties": {
                            "type": {"enum": sorted(enum_values(model.LocatorType))},
                            "value": {"type": "string", "minLength": 1},
                        },
                    },
                },
            },
        },
        "x_extensions": {"type": "object"},
    },
}

_STATEMENT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["id", "statement_type", "text", "about_ref", "status"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "statement_type": {"enum": sorted(enum_values(model.StatementType))},
        "text": {"type": "string", "minLength": 1},
        "about_ref": {"type": "string", "minLength": 1},
        "status": {"enum": sorted(enum_values(model.StatementStatus))},
        "modality": {"enum": sorted(enum_values(model.Modality))},
        "source_anchors": {"type": "array", "items": _ANCHOR_SCHEMA},
        "confidence": _CONFIDENCE_SCHEMA,
        "provenance": _PROVENANCE_SCHEMA,
        "x_extensions": {"type": "object"},
    },
}

_EVIDENCE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["id", "evidence_type", "summary"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "evidence_type": {"enum": sorted(enum_values(model.EvidenceType))},
        "summary": {"type": "string", "minLength": 1},
        "source_anchors": {"type": "array", "items": _ANCHOR_SCHEMA},
        "observations": {"type": "array", "items": _OBSERVATION_SCHEMA},
        "provenance": _PROVENANCE_SCHEMA,
        "x_extensions": {"type": "object"},
    },
}

_RELATION_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["id", "subject_ref", "predicate", "object_ref"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "subject_ref": {"type": "string", "minLength": 1},
        "predicate": {"enum": sorted(enum_values(model.Predicate))},
        "object_ref": {"type": "string", "minLength": 1},
        "citation_intent": {"enum": sorted(enum_values(model.CitationIntent))},
        "x_extensions": {"type": "object"},
    },
}

_ACTION_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["id", "action_type", "label", "target_ref", "interface", "safety"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "action_type": {"enum": sorted(enum_values(model.ActionType))},
        "label": {"type": "string", "minLength": 1},
        "target_ref": {"type": "string", "minLength": 1},
        "interface": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "locator"],
            "properties": {
                "kind": {"enum": sorted(enum_values(model.InterfaceKind))},
                "locator": {"type": "string", "minLength": 1},
            },
        },
        "safety": {
            "type": "object",
            "additionalProperties": False,
            "required": ["sandbox_required", "network", "secrets_required", "side_effects"],
            "properties": {
                "sandbox_required": {"type": "boolean"},
                "network": {"type": "boolean"},
                "secrets_required": {"type": "boolean"},
                "side_effects": {"enum": sorted(enum_values(model.SideEffects))},
            },
        },
        "x_extensions": {"type": "object"},
    },
}

RECORD_SCHEMA: dict[str, Any] = {
    "$id": model.SCHEMA_URI,
    "type": "object",
    "additionalProperties": False,
    "required": list(model.ROOT_REQUIRED_FIELDS),
    "properties": {
        "$schema": {"type": "string", "minLength": 1},
        "knows_version": {"type": "string", "pattern": _SEMVER_PATTERN},
        "record_id": {"type": "string", "minLength": 1, "pattern": r"^[^#]+$"},
        "profile": {"type": "string", "pattern": _PROFILE_PATTERN},
        "subject_ref": {"type": "string", "minLength": 1},
        "title": {"type": "string", "minLength": 1},
        "summary": {"type": "string", "minLength": 1},
        "authors": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "affiliation": {"type": "string"},
                    "role": {"type": "string"},
                    "orcid": {"type": "string"},
                },
            },
        },
        "license": {"type": "string", "minLength": 1},
        "coverage": {
            "type": "object",
            "additionalProperties": False,
            "required": ["statements", "evidence"],
            "properties": {
                "statements": {"enum": sorted(enum_values(model.CoverageStatements))},
                "evidence": {"enum": sorted(enum_values(model.CoverageEvidence))},
            },
        },
        "artifacts": {"type": "array", "items": _ARTIFACT_SCHEMA},
        "statements": {"type": "array", "items": _STATEMENT_SCHEMA},
        "evidence": {"type": "array", "items": _EVIDENCE_SCHEMA},
        "relations": {"type": "array", "items": _RELATION_SCHEMA},
        "provenance": _PROVENANCE_SCHEMA,
        "version": {
            "type": "object",
            "additionalProperties": False,
            "required": ["spec", "record", "source"],
            "properties": {
                "spec": {"type": "string", "pattern": _SEMVER_PATTERN},
                "record": {"type": "string", "minLength": 1},
                "source": {"type": "string", "minLength": 1},
            },
        },
        "freshness": {
            "type": "object",
            "additionalProperties": False,
            "required": ["as_of", "update_policy"],
            "properties": {
                "as_of": {"type": "string", "format": "date-time"},
                "update_policy": {"enum": sorted(enum_values(model.UpdatePolicy))},
                "stale_after": {"type": "string", "format": "date-time"},
            },
        },
        "abstract": {"type": "string"},
        "venue": {"type": "string"},
        "year": {"type": "integer"},
        "keywords": {"type": "array", "items": {"type": "string"}},
        "record_status": {"enum": sorted(enum_values(model.RecordStatus))},
        "replaces": {"type": "string", "minLength": 1, "pattern": r"^[^#]+$"},
        "actions": {"type": "array", "items": _ACTION_SCHEMA},
        "resources": {"type": "array"},
        "external_metadata_refs": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["standard", "locator"],
                "properties": {
                    "standard": {"enum": sorted(enum_values(model.MetadataStandard))},
                    "locator": {"type": "string", "minLength": 1},
                },
            },
        },
        "extensions": {"type": "object"},
    },
}


# ---------------------------------------------------------------------------
# Evaluator for the schema subset above


_TYPE_CHECKS = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
}


def _evaluate(value: Any, schema: dict[str, Any], path: str) -> list[tuple[str, str]]:
    problems: list[tuple[str, str]] = []

    expected = schema.get("type")
    if expected is not None and not _TYPE_CHECKS[expected](value):
        problems.append((path, f"expected {expected}"))
        return problems

    if "enum" in schema and value not in schema["enum"]:
        problems.append((path, f"value {value!r} not in enumeration"))
        return problems

    if isinstance(value, str):
        if len(value) < schema.get("minLength", 0):
            problems.append((path, "string must be non-empty"))
        pattern = schema.get("pattern")
        if pattern is not None and re.search(pattern, value) is None:
            problems.append((path, f"string does not match {pattern}"))
        if schema.get("format") == "date-time" and not is_timestamp(value):
            problems.append((path, "not a valid RFC 3339 timestamp"))

    if isinstance(value, dict):
        for key in schema.get("required", ()):
            if key not in value:
                problems.append((_join(path, key), "required field missing"))
        props = schema.get("properties", {})
        if schema.get("additionalProperties") is False:
            for key in value:
                if key not in props:
                    problems.append((_join(path, key), "unknown field"))
        if len(value) < schema.get("minProperties", 0):
            problems.append((path, "at least one field required"))
        for key, sub in props.items():
            if key in value:
                problems.extend(_evaluate(value[key], sub, _join(path, key)))
        one_of = schema.get("oneOf")
        if one_of is not None:
            hits = 0
            for branch in one_of:
                ok = all(k in value for k in branch.get("required", ()))
                negated = branch.get("not", {}).get("required", ())
                ok = ok and not any(k in value for k in negated)
                hits += ok
            if hits != 1:
                problems.append((path, "exactly one alternative must hold"))

    if isinstance(value, list):
        if len(value) < schema.get("minItems", 0):
            problems.append((path, "at least one item required"))
        items = schema.get("items")
        if items is not None:
            for i, item in enumerate(value):
                problems.extend(_evaluate(item, items, _join(path, str(i))))

    return problems


def _join(path: str, key: str) -> str:
    return f"{path}/{key}" if path else key


def validate_tree(tree: Any) -> list[tuple[str, str]]:
    """Structural violations of a raw document tree as (path, message) pairs."""
    return _evaluate(tree, RECORD_SCHEMA, "")
