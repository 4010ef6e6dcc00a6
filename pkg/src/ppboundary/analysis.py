"""Report assembly shared by the command line and the corpus check.

Every report is a plain dict (before JSON encoding) with a ``status`` of
``ok``, ``validation_failed`` or ``theory_violation``. Random sampling is
driven by a single seed so identical inputs give identical reports.
"""

from __future__ import annotations

import cmath
import os
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .algebra import KrausMap, Superoperator, validate_map
from .boundary import (
    automorphy_check,
    boundary_or_none,
    cross_peripheral_residual,
    multiplicative_domain,
    pf_maximality_check,
    pp_chain,
    q_tau,
    verify_cstar_axioms,
)
from .errors import BoundaryTrivial, CorpusMismatch, InputError, NumericalError, PPBError, TheoryViolation
from .obstruct import cn_compatibility
from .semigroup import (
    DEFAULT_TIMES,
    LONG_TIMES,
    Generator,
    build_boundary_continuous,
    continuous_eigenspaces,
    decompose_generator,
    dimension_corollary_check,
    ideal_Ia,
    qms_automorphy_check,
    semigroup_consistency,
    validate_qds,
)
from .spectral import decompose, eigenspace, peripheral_eigenspaces, peripheral_spectrum
from .unitize import compression_consistency, eigen_correspondence_check, unitize

REPORT_SCHEMA = 1
STATUS_OK, STATUS_INVALID, STATUS_THEORY = "ok", "validation_failed", "theory_violation"
EXIT = {STATUS_OK: 0, STATUS_INVALID: 2, STATUS_THEORY: 3}


def _phase_key(z: complex) -> float:
    return cmath.phase(z) % (2 * np.pi)


def _error(exc: PPBError) -> dict:
    return {"type": type(exc).__name__, "module": getattr(exc, "module", None), "message": str(exc)}


def _boundary_summary(B) -> dict:
    if B is None:
        return {"dim": 0, "labels": [], "classification": [], "unit": None}
    return {
        "dim": B.dim,
        "labels": list(B.labels),
        "classification": list(B.classification),
        "unit": [b for b in B.unit.blocks],
    }


def analyze_channel(
    T: Superoperator, kraus: KrausMap | None = None, seed: int = 0, run_unitize: bool = False
) -> dict:
    rng = np.random.default_rng(seed)
    v = validate_map(T)
    rep: dict = {"kind": "channel", "algebra": list(T.shape.block_dims), "validation": v.as_dict(), "warnings": []}
    S = decompose(T, contractive=v.is_cp_contraction)
    spec = peripheral_spectrum(S, with_multiplicity=True) if v.is_cp_contraction else [
        (c.value, c.multiplicity) for c in S.peripheral_clusters
    ]
    spec = sorted(spec, key=lambda p: _phase_key(p[0]))
    rep["spectrum"] = {
        "spectral_radius": v.spectral_radius,
        "peripheral": [z for z, m in spec for _ in range(m)],
        "eigenspace_dims": [[z, eigenspace(T, z).dim] for z, _ in spec],
    }
    if not v.is_cp_contraction:
        rep["status"] = STATUS_INVALID
        rep["warnings"].append("not a CP contraction: boundary, automorphy and dilation checks skipped")
        return rep
    try:
        q = q_tau(T, S)
        rep["q_tau"] = list(q.blocks)
        B = boundary_or_none(T, S)
        rep["boundary"] = _boundary_summary(B)
        if B is not None:
            rep["cstar_axioms"] = verify_cstar_axioms(B, 50, rng)
            rep["boundary"]["structure_constants"] = B.structure_constants
        spaces = peripheral_eigenspaces(S)
        worst = 0.0
        for E1 in spaces:
            for E2 in spaces:
                for x in E1.elements:
                    for y in E2.elements:
                        worst = max(worst, cross_peripheral_residual(S, x, E1.eigenvalue, y, E2.eigenvalue))
        rep["cross_peripheral_residual"] = worst
        usable_kraus = kraus if kraus is not None and T.shape.is_single_block else None
        rep["automorphy"] = automorphy_check(T, usable_kraus, B, S).as_dict()
        rep["pp_chain"] = pp_chain(T)
        rep["multiplicative_domain_dim"] = len(multiplicative_domain(T))
        rep["pf_maximality"] = pf_maximality_check(T, q, rng=rng)
        if run_unitize:
            rep["unitized"] = _unitized(T)
        rep["status"] = STATUS_OK
    except TheoryViolation as exc:
        rep["status"] = STATUS_THEORY
        rep["error"] = _error(exc)
    except (InputError, NumericalError) as exc:
        rep["status"] = STATUS_INVALID
        rep["error"] = _error(exc)
    return rep


def _unitized(T: Superoperator) -> dict:
    if validate_map(T).is_unital:
        return {"skipped": "map is already unital"}
    U = unitize(T)
    Bt = boundary_or_none(U.extended)
    return {
        "algebra": list(U.shape.block_dims),
        "validation": validate_map(U.extended).as_dict(),
        "boundary": _boundary_summary(Bt),
        "correspondence": eigen_correspondence_check(U),
        "compression": compression_consistency(U),
    }


def analyze_generator(L: Generator, seed: int = 0, times: Sequence[float] | None = None) -> dict:
    times = tuple(times) if times else DEFAULT_TIMES
    rep: dict = {"kind": "generator", "algebra": list(L.shape.block_dims), "warnings": []}
    qds = validate_qds(L, times)
    rep["validation"] = qds.as_dict()
    rep["validation"]["gkls"] = L.gkls is not None
    if not qds.passed:
        rep["status"] = STATUS_INVALID
        return rep
    try:
        S = decompose_generator(L)
        spaces = continuous_eigenspaces(L, S)
        freqs = sorted(a for E in spaces for a in [E.frequency] * E.dim)
        rep["frequencies"] = freqs
        try:
            B = build_boundary_continuous(L, times=LONG_TIMES)
        except BoundaryTrivial:
            B = None
        rep["boundary"] = _boundary_summary(B)
        pos = sorted({E.frequency for E in spaces if E.frequency > 0 and E.dim})
        rep["ideals"] = [ideal_Ia(L, a).as_dict() for a in pos]
        rep["dimension_corollary"] = [dimension_corollary_check(L, a, np.random.default_rng(seed)).as_dict() for a in pos]
        rep["automorphy"] = qms_automorphy_check(L).as_dict()
        rep["semigroup_consistency"] = semigroup_consistency(L)
        rep["status"] = STATUS_OK
    except TheoryViolation as exc:
        rep["status"] = STATUS_THEORY
        rep["error"] = _error(exc)
    except (InputError, NumericalError) as exc:
        rep["status"] = STATUS_INVALID
        rep["error"] = _error(exc)
    return rep


def analyze_system(desc: dict) -> dict:
    S, cands = io.parse_system(desc)
    verdict = cn_compatibility(S, cands)
    return {"kind": "system", "ambient_dim": S.ambient_dim, "dim": S.dim, "status": STATUS_OK, **verdict.as_dict()}


def analyze_descriptor(desc: dict, seed: int = 0, run_unitize: bool = False, semigroup: bool = False, times=None) -> dict:
    """Dispatch on descriptor contents; ``semigroup`` selects the generator part."""
    if "system" in desc:
        body = analyze_system(desc)
    elif semigroup or "map" not in desc:
        if "generator" not in desc:
            raise io.ParseError("descriptor has no 'generator' section")
        body = analyze_generator(io.parse_generator(desc), seed, times)
    else:
        T, k = io.parse_channel(desc)
        body = analyze_channel(T, k, seed, run_unitize)
    return envelope(desc, seed, body)


def envelope(desc: dict, seed: int, body: dict) -> dict:
    return {"schema_version": REPORT_SCHEMA, "input": {"name": desc.get("name")}, "seed": seed, **body}


# -- corpus ------------------------------------------------------------------


def corpus_dir() -> Path:
    env = os.environ.get("PPB_CORPUS_DIR")
    return Path(env) if env else Path(__file__).parent / "corpus"


def corpus_entries(directory: Path | None = None) -> list[dict]:
    d = directory or corpus_dir()
    return [io.load(p) for p in sorted(Path(d).glob("*.json"))]


def _lookup(obj, path: str):
    for part in path.split("."):
        if isinstance(obj, list):
            obj = obj[int(part)]
        else:
            obj = obj[part]
    return obj


def compare(expected, actual, tol: float) -> bool:
    if isinstance(expected, bool) or isinstance(actual, bool):
        return type(expected) is type(actual) and expected == actual
    if isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        return abs(expected - actual) <= tol
    if isinstance(expected, list) and isinstance(actual, list):
        return len(expected) == len(actual) and all(compare(e, a, tol) for e, a in zip(expected, actual))
    return expected == actual


def entry_parts(desc: dict) -> list[str]:
    parts = []
    if "map" in desc:
        parts.append("discrete")
    if "generator" in desc:
        parts.append("semigroup")
    if "system" in desc:
        parts.append("obstruct")
    return parts


def verify_entry(desc: dict, seed: int = 0, parts: Sequence[str] | None = None) -> list[tuple]:
    """Failures as (name, key, expected, actual)."""
    parts = parts or entry_parts(desc)
    tol = float(desc.get("tolerance", 1e-7))
    failures = []
    reports = {}
    for part in parts:
        if part == "obstruct":
            reports[part] = io.encode(analyze_system(desc))
        elif part == "semigroup":
            reports[part] = io.encode(analyze_generator(io.parse_generator(desc), seed))
        else:
            T, k = io.parse_channel(desc)
            reports[part] = io.encode(analyze_channel(T, k, seed, run_unitize=bool(desc.get("unitize"))))
    for key, want in sorted(desc.get("expected", {}).items()):
        part, _, path = key.partition(".")
        if part not in reports:
            continue
        try:
            got = _lookup(reports[part], path)
        except (KeyError, IndexError, TypeError, ValueError):
            failures.append((desc["name"], key, want, "<missing>"))
            continue
        if not compare(want, got, tol):
            failures.append((desc["name"], key, want, got))
    return failures


def corpus_verify(filter_part: str | None = None, seed: int = 0, directory: Path | None = None) -> dict:
    results, failures = [], []
    for desc in corpus_entries(directory):
        parts = entry_parts(desc)
        if filter_part:
            parts = [p for p in parts if p == filter_part]
            if not parts:
                continue
        f = verify_entry(desc, seed, parts)
        results.append({"name": desc["name"], "parts": parts, "passed": not f})
        failures.extend(f)
    summary = {"entries": results, "failures": [list(f) for f in failures], "passed": not failures}
    if failures:
        raise CorpusMismatch(failures)
    return summary


__all__ = [
    "REPORT_SCHEMA",
    "EXIT",
    "analyze_channel",
    "analyze_generator",
    "analyze_system",
    "analyze_descriptor",
    "envelope",
    "corpus_dir",
    "corpus_entries",
    "compare",
    "verify_entry",
    "corpus_verify",
]
