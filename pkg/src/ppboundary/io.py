"""JSON descriptors for channels, generators and operator systems.

Complex numbers are written as ``[re, im]``; plain numbers are accepted on
input as real values. A matrix is a list of rows.

Channel::

    {"algebra": {"blocks": [2]},
     "map": {"kind": "kraus", "operators": [M, ...]}}

``kind`` is one of ``kraus``, ``choi`` (``"matrix"``), ``superop``
(``"matrix"``) or ``schur`` (``"matrix"`` or a parameter ``"c"``).

Generator::

    {"generator": {"kind": "gkls", "H": M, "jumps": [M, ...]}}
    {"generator": {"kind": "superop", "matrix": M}, "algebra": {...}}
    {"generator": {"kind": "schur", "c": z}}
    {"generator": {"kind": "decay", "a": 1.0, "q": [1, 0.5]}}

Operator system::

    {"system": {"ambient_dim": n, "basis": [M, ...]}}
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import (
    AlgebraShape,
    ChoiMatrix,
    KrausMap,
    Superoperator,
    choi_to_kraus,
    kraus_to_superop,
    schur_superop,
)
from .errors import ParseError
from .obstruct import OperatorSystem, pinching_pure_family
from .semigroup import Generator, gkls_assemble

SCHEMA_VERSION = 1


# -- scalars and matrices ----------------------------------------------------


def parse_complex(v) -> complex:
    if isinstance(v, bool):
        raise ParseError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise ParseError(f"expected a number or [re, im], got {v!r}")


def parse_matrix(m, square: bool = True) -> np.ndarray:
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise ParseError("a matrix must be a nonempty list of rows")
    n = len(m[0])
    if any(len(r) != n for r in m):
        raise ParseError("matrix rows have different lengths")
    a = np.array([[parse_complex(v) for v in r] for r in m], dtype=complex)
    if square and a.shape[0] != a.shape[1]:
        raise ParseError(f"expected a square matrix, got {a.shape}")
    return a


def encode(obj: Any):
    """Plain-JSON form: complex -> [re, im], arrays -> nested lists."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_real(obj.real), _real(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "as_dict"):
        return encode(obj.as_dict())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _real(x) -> float | str | None:
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    x = float(f"{x:.17g}")
    return 0.0 if x == 0 else x


def dumps(obj: Any) -> str:
    return json.dumps(encode(obj), sort_keys=True, indent=2)


# -- descriptors -------------------------------------------------------------


def _shape(desc: dict, default: AlgebraShape | None = None) -> AlgebraShape:
    alg = desc.get("algebra")
    if alg is None:
        if default is None:
            raise ParseError("missing 'algebra'")
        return default
    blocks = alg.get("blocks") if isinstance(alg, dict) else None
    if not isinstance(blocks, list) or not blocks or not all(isinstance(b, int) and b > 0 for b in blocks):
        raise ParseError("'algebra.blocks' must be a list of positive integers")
    return AlgebraShape(tuple(blocks))


def parse_channel(desc: dict) -> tuple[Superoperator, KrausMap | None]:
    """Superoperator and, when available on a single block, a Kraus form."""
    m = desc.get("map")
    if not isinstance(m, dict) or "kind" not in m:
        raise ParseError("missing 'map' with a 'kind'")
    kind = m["kind"]
    try:
        if kind == "kraus":
            ops = tuple(parse_matrix(k) for k in m["operators"])
            k = KrausMap(ops)
            shape = _shape(desc, k.shape)
            if shape != k.shape:
                raise ParseError("Kraus maps are given on a single block")
            return kraus_to_superop(k), k
        if kind == "choi":
            C = parse_matrix(m["matrix"])
            d = int(round(math.sqrt(C.shape[0])))
            if d * d != C.shape[0]:
                raise ParseError("Choi matrix size must be a square")
            k = choi_to_kraus(ChoiMatrix(d, C))
            return kraus_to_superop(k), k
        if kind == "superop":
            shape = _shape(desc)
            return Superoperator(shape, parse_matrix(m["matrix"])), None
        if kind == "schur":
            if "c" in m:
                from .models import schur_map

                return schur_map(parse_complex(m["c"])), None
            return schur_superop(parse_matrix(m["matrix"])), None
    except KeyError as exc:
        raise ParseError(f"map of kind {kind!r} is missing {exc}") from exc
    raise ParseError(f"unknown map kind {kind!r}")


def parse_generator(desc: dict) -> Generator:
    g = desc.get("generator")
    if not isinstance(g, dict) or "kind" not in g:
        raise ParseError("missing 'generator' with a 'kind'")
    kind = g["kind"]
    try:
        if kind == "gkls":
            H = parse_matrix(g["H"])
            jumps = [parse_matrix(v) for v in g.get("jumps", [])]
            return gkls_assemble(H, jumps)
        if kind == "superop":
            return Generator(_shape(desc), parse_matrix(g["matrix"]))
        if kind == "schur":
            from .models import schur_generator

            return schur_generator(parse_complex(g["c"]))
        if kind == "decay":
            from .models import decay_generator

            return decay_generator(float(g.get("a", 1.0)), [float(v) for v in g["q"]])
    except KeyError as exc:
        raise ParseError(f"generator of kind {kind!r} is missing {exc}") from exc
    raise ParseError(f"unknown generator kind {kind!r}")


def parse_system(desc: dict) -> tuple[OperatorSystem, list[np.ndarray]]:
    """Operator system and any candidate pure elements supplied with it."""
    s = desc.get("system", desc)
    if "basis" not in s:
        raise ParseError("missing 'system.basis'")
    basis = [parse_matrix(b) for b in s["basis"]]
    S = OperatorSystem.from_basis(basis, s.get("ambient_dim"))
    cands = []
    fam = s.get("candidates")
    if isinstance(fam, dict) and fam.get("family") == "pinching":
        grid = int(fam.get("grid", 8))
        cands = pinching_pure_family(2 * np.pi * np.arange(grid) / grid, S.ambient_dim)
    elif isinstance(fam, list):
        cands = [parse_matrix(c) for c in fam]
    return S, cands


def load(path) -> dict:
    p = Path(path)
    try:
        desc = json.loads(p.read_text())
    except FileNotFoundError as exc:
        raise ParseError(f"no such file: {p}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: invalid JSON ({exc})") from exc
    if not isinstance(desc, dict):
        raise ParseError(f"{p}: top level must be an object")
    ver = desc.get("schema", SCHEMA_VERSION)
    if ver != SCHEMA_VERSION:
        raise ParseError(f"{p}: unsupported schema version {ver}")
    desc.setdefault("name", p.stem)
    return desc


def kind_of(desc: dict) -> str:
    if "system" in desc:
        return "system"
    if "map" in desc:
        return "channel"
    if "generator" in desc:
        return "generator"
    raise ParseError("descriptor has none of 'map', 'generator', 'system'")


def matrix_to_json(a) -> list:
    return encode(np.asarray(a, dtype=complex))


def channel_descriptor(T: Superoperator | None = None, kraus: KrausMap | None = None, **extra) -> dict:
    if kraus is not None:
        m = {"kind": "kraus", "operators": [matrix_to_json(k) for k in kraus.operators]}
        shape = kraus.shape
    else:
        m = {"kind": "superop", "matrix": matrix_to_json(T.matrix)}
        shape = T.shape
    return {"schema": SCHEMA_VERSION, "algebra": {"blocks": list(shape.block_dims)}, "map": m, **extra}


__all__ = [
    "SCHEMA_VERSION",
    "parse_complex",
    "parse_matrix",
    "encode",
    "dumps",
    "parse_channel",
    "parse_generator",
    "parse_system",
    "load",
    "kind_of",
    "matrix_to_json",
    "channel_descriptor",
]
