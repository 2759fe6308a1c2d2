"""JSON Schemas for everything the command line prints."""

SPAN = {
    "type": "array",
    "items": {"type": "integer", "minimum": 0},
    "minItems": 2,
    "maxItems": 2,
}

MAPPING = {
    "type": "object",
    "additionalProperties": {"oneOf": [SPAN, {"type": "null"}]},
}

LABEL = {
    "type": "object",
    "required": ["type", "value"],
    "properties": {
        "type": {"enum": ["letter", "open", "close", "eps"]},
        "value": {"type": ["string", "null"]},
    },
    "additionalProperties": False,
}

VA = {
    "type": "object",
    "required": ["alphabet", "variables", "states", "initial", "finals", "transitions"],
    "properties": {
        "alphabet": {"type": "array", "items": {"type": "string"}},
        "variables": {"type": "array", "items": {"type": "string"}},
        "states": {"type": "integer", "minimum": 1},
        "initial": {"type": "integer", "minimum": 0},
        "finals": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "label", "to"],
                "properties": {
                    "from": {"type": "integer", "minimum": 0},
                    "label": LABEL,
                    "to": {"type": "integer", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

VA_STATS = {
    "type": "object",
    "required": ["states", "transitions"],
    "properties": {
        "states": {"type": "integer"},
        "transitions": {"type": "integer"},
    },
}

NULLABLE_SPAN = {"oneOf": [SPAN, {"type": "null"}]}

RULE_ANALYSIS = {
    "type": "object",
    "required": ["pairs", "max_disjoint", "hitting_number", "hitters", "variable_inclusion_like", "has_empty_rhs"],
    "properties": {
        "pairs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lhs", "rhs", "covering"],
                "properties": {"lhs": NULLABLE_SPAN, "rhs": NULLABLE_SPAN, "covering": NULLABLE_SPAN},
            },
        },
        "max_disjoint": {"type": "integer", "minimum": 0},
        "hitting_number": {"type": ["integer", "null"]},
        "hitters": {"oneOf": [{"type": "array", "items": {"type": "integer"}}, {"type": "null"}]},
        "variable_inclusion_like": {"type": "boolean"},
        "has_empty_rhs": {"type": "boolean"},
    },
}

RULE_REPORT = {
    "type": "object",
    "required": ["reflexive", "antisymmetric", "transitive", "violations", "checked"],
    "properties": {
        "reflexive": {"type": "boolean"},
        "antisymmetric": {"type": "boolean"},
        "transitive": {"type": "boolean"},
        "violations": {"type": "array", "items": {"type": "string"}},
        "checked": {"type": "integer", "minimum": 0},
    },
}

MANIFEST = {
    "type": "object",
    "required": ["va", "document", "threshold", "rule"],
    "properties": {
        "va": {"oneOf": [{"type": "string"}, VA]},
        "document": {"type": "string"},
        "threshold": {"type": "integer", "minimum": 0},
        "rule": {"type": "string"},
    },
}

SKYLINE_STATS = {
    "type": "object",
    "required": ["mode", "rule", "input_count", "output_count"],
    "properties": {
        "mode": {"enum": ["direct", "compiled"]},
        "rule": {"type": "string"},
        "input_count": {"type": "integer", "minimum": 0},
        "output_count": {"type": "integer", "minimum": 0},
        "va_states": {"type": "integer"},
        "va_transitions": {"type": "integer"},
        "seconds": {"type": "number"},
    },
}

NROBP_SUMMARY = {
    "type": "object",
    "required": ["nodes", "edges", "variables", "read_once"],
    "properties": {
        "nodes": {"type": "integer", "minimum": 0},
        "edges": {"type": "integer", "minimum": 0},
        "variables": {"type": "array", "items": {"type": "string"}},
        "read_once": {"type": "boolean"},
        "models": {"type": "integer", "minimum": 0},
    },
}
