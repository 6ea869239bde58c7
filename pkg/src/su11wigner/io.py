"""File formats: state-spec JSON, grid CSV and d-function tables.

Grid CSV layout::

    # format: "su11wigner-grid/1"
    # convention: "literal"
    # grid: {...}
    # <more "key: json" comment lines>
    xi_re,xi_im,tau,chi,w_re,w_im,w_abs
    ...

Header values are JSON documents written with sorted keys. Floats in the
table use 17 significant digits, so parsing a file and writing it again
reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import jsonschema
import numpy as np

from .states import StateSpec
from .wigner import WignerField

__all__ = [
    "STATE_SPEC_SCHEMA",
    "SpecError",
    "parse_complex",
    "encode_complex",
    "spec_from_json",
    "spec_to_json",
    "load_spec",
    "GridFile",
    "FIELD_COLUMNS",
    "field_to_gridfile",
    "format_gridfile",
    "parse_gridfile",
    "format_float",
]

FIELD_COLUMNS = ("xi_re", "xi_im", "tau", "chi", "w_re", "w_im", "w_abs")
GRID_FORMAT = "su11wigner-grid/1"

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_HALF_INTEGER = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*2|\.0|\.5)?\s*$"}]}

STATE_SPEC_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "su11wigner state spec",
    "type": "object",
    "required": ["variant", "params"],
    "additionalProperties": False,
    "properties": {
        "variant": {"enum": list(StateSpec.VARIANTS)},
        "params": {"type": "object"},
        "cutoff": {
            "oneOf": [
                {"type": "integer", "minimum": 0},
                {"const": "auto"},
                {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
                {"type": "null"},
            ]
        },
    },
    "allOf": [
        {
            "if": {"properties": {"variant": {"const": "tmsv"}}},
            "then": {
                "properties": {
                    "params": {"required": ["xi"], "additionalProperties": False, "properties": {"xi": _COMPLEX}},
                    "cutoff": {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "null"}]},
                }
            },
        },
        {
            "if": {"properties": {"variant": {"const": "coherent_times_squeezed"}}},
            "then": {
                "properties": {
                    "params": {
                        "required": ["alpha", "xi"],
                        "additionalProperties": False,
                        "properties": {"alpha": _COMPLEX, "xi": _COMPLEX},
                    }
                }
            },
        },
        {
            "if": {"properties": {"variant": {"const": "su11_coherent"}}},
            "then": {
                "properties": {
                    "params": {
                        "required": ["k", "xi"],
                        "additionalProperties": False,
                        "properties": {"k": _HALF_INTEGER, "xi": _COMPLEX},
                    },
                    "cutoff": {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "null"}]},
                }
            },
        },
        {
            "if": {"properties": {"variant": {"const": "raw_amplitudes"}}},
            "then": {
                "properties": {
                    "params": {
                        "required": ["entries"],
                        "additionalProperties": False,
                        "properties": {
                            "entries": {
                                "type": "array",
                                "items": {
                                    "type": "array",
                                    "prefixItems": [
                                        {"type": "integer", "minimum": 0},
                                        {"type": "integer", "minimum": 0},
                                        {"type": "number"},
                                        {"type": "number"},
                                    ],
                                    "minItems": 4,
                                    "maxItems": 4,
                                },
                            }
                        },
                    },
                    "cutoff": {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "null"}]},
                }
            },
        },
    ],
}


class SpecError(ValueError):
    """A state spec that fails the schema or the parameter domain checks."""


def parse_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def spec_from_json(doc: dict) -> StateSpec:
    """Validate a JSON document and turn it into a :class:`StateSpec`.

    Raises
    ------
    SpecError
        On schema violations or out-of-domain parameters (such as ``|xi| >= 1``).
    """
    try:
        jsonschema.validate(doc, STATE_SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecError(f"schema violation at {path}: {exc.message}") from None
    params = dict(doc["params"])
    variant = doc["variant"]
    if variant == "raw_amplitudes":
        params["entries"] = [(e[0], e[1], complex(e[2], e[3])) for e in params["entries"]]
    else:
        for key in ("xi", "alpha"):
            if key in params:
                params[key] = parse_complex(params[key])
    cutoff = doc.get("cutoff")
    if isinstance(cutoff, list):
        cutoff = tuple(cutoff)
    try:
        return StateSpec(variant, params, cutoff)
    except (ValueError, TypeError) as exc:
        raise SpecError(str(exc)) from None


def spec_to_json(spec: StateSpec) -> dict:
    params: dict[str, Any] = {}
    for key, value in spec.params.items():
        if key == "entries":
            params[key] = [[int(na), int(nb), complex(a).real, complex(a).imag] for na, nb, a in value]
        elif key in ("xi", "alpha"):
            params[key] = encode_complex(value)
        elif key == "k":
            params[key] = str(value)
        else:
            params[key] = value
    cutoff = list(spec.cutoff) if isinstance(spec.cutoff, tuple) else spec.cutoff
    return {"variant": spec.variant, "params": params, "cutoff": cutoff}


def load_spec(path: str) -> StateSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from None
    return spec_from_json(doc)


def format_float(x: float) -> str:
    """Seventeen significant digits: enough to round-trip any double."""
    return "%.17g" % x


def _header_value(value: Any) -> str:
    return json.dumps(value, sort_keys=True, allow_nan=True)


@dataclass
class GridFile:
    """Parsed grid CSV: ordered header entries plus the numeric table."""

    header: list[tuple[str, Any]]
    columns: tuple[str, ...]
    data: np.ndarray  # (P, len(columns))

    def header_dict(self) -> dict[str, Any]:
        return dict(self.header)


def field_to_gridfile(field: WignerField, extra: dict[str, Any] | None = None) -> GridFile:
    pts = field.points
    vals = field.values
    data = np.column_stack([pts.xi.real, pts.xi.imag, pts.tau, pts.chi, vals.real, vals.imag, np.abs(vals)])
    header: list[tuple[str, Any]] = [
        ("format", GRID_FORMAT),
        ("convention", field.convention.value),
        ("grid", field.grid.to_dict()),
    ]
    for key, value in sorted((extra or {}).items()):
        header.append((key, value))
    header.append(("metadata", field.metadata))
    return GridFile(header, FIELD_COLUMNS, data)


def format_gridfile(gf: GridFile) -> str:
    lines = [f"# {key}: {_header_value(value)}" for key, value in gf.header]
    lines.append(",".join(gf.columns))
    for row in gf.data:
        lines.append(",".join(format_float(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_gridfile(text: str) -> GridFile:
    header: list[tuple[str, Any]] = []
    columns: tuple[str, ...] | None = None
    rows: list[list[float]] = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        if line.startswith("#"):
            if columns is not None:
                raise ValueError(f"line {n}: comment after the column header")
            key, sep, raw = line[1:].strip().partition(": ")
            if not sep:
                raise ValueError(f"line {n}: malformed header comment")
            header.append((key, json.loads(raw)))
        elif columns is None:
            columns = tuple(line.split(","))
        else:
            fields = line.split(",")
            if len(fields) != len(columns):
                raise ValueError(f"line {n}: expected {len(columns)} fields")
            rows.append([float(f) for f in fields])
    if columns is None:
        raise ValueError("missing column header")
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return GridFile(header, columns, data)


def dfunc_table(rows: list[tuple[int, int, int, float, float]]) -> str:
    out = ["twice_k,twice_mu,twice_mu_prime,tau,d_value"]
    for tk, tm, tmp, tau, val in rows:
        out.append(f"{tk},{tm},{tmp},{format_float(tau)},{format_float(val + 0.0)}")
    return "\n".join(out) + "\n"
