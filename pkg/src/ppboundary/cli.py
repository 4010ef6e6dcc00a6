"""Command-line interface: ``ppb <subcommand> FILE [options]``.

Exit codes: 0 success, 2 parse or validation failure, 3 theory violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from ._config import set_tolerance, settings
from .algebra import validate_map
from .analysis import (
    EXIT,
    STATUS_INVALID,
    STATUS_OK,
    STATUS_THEORY,
    analyze_descriptor,
    analyze_system,
    corpus_verify,
    envelope,
)
from .dilation import build_tower, lift_window, monotone_exhaustion, shift_lift_demo, tower_compression
from .errors import CorpusMismatch, InputError, PPBError, TheoryViolation
from .spectral import decompose, peripheral_eigenspaces
from .semigroup import peripheral_frequencies


def _fmt(v) -> str:
    if isinstance(v, (complex, np.complexfloating)):
        if abs(v.imag) < 5e-7:
            return f"{v.real:.6g}"
        return f"{v.real:.6g}{v.imag:+.6g}j"
    if isinstance(v, (float, np.floating)):
        return f"{v:.6g}"
    if isinstance(v, np.ndarray):
        return np.array2string(v, precision=6, suppress_small=True)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _print_report(rep: dict, indent: int = 0, out=None):
    out = out or sys.stdout
    pad = "  " * indent
    for k, v in rep.items():
        if isinstance(v, dict):
            print(f"{pad}{k}:", file=out)
            _print_report(v, indent + 1, out)
        elif k in ("structure_constants", "windows"):
            continue
        else:
            print(f"{pad}{k}: {_fmt(v)}", file=out)


def _emit(rep: dict, args) -> int:
    if args.report:
        Path(args.report).write_text(io.dumps(rep) + "\n")
    if args.json:
        print(io.dumps(rep))
    else:
        _print_report(rep)
    return EXIT.get(rep.get("status", STATUS_OK), 0)


def _load(args) -> dict:
    return io.load(args.file)


def _channel(desc):
    if "map" not in desc:
        raise io.ParseError("expected a channel descriptor with a 'map' section")
    return io.parse_channel(desc)


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> dict:
    desc = _load(args)
    if "map" in desc and not args.semigroup:
        T, _ = _channel(desc)
        v = validate_map(T, args.tol)
        body = {"kind": "channel", "validation": v.as_dict()}
        body["status"] = STATUS_OK if v.is_cp_contraction else STATUS_INVALID
    else:
        from .semigroup import validate_qds

        L = io.parse_generator(desc)
        v = validate_qds(L, args.times or (0.1, 0.5, 1.0, 2.0, 5.0))
        body = {"kind": "generator", "validation": v.as_dict(), "status": STATUS_OK if v.passed else STATUS_INVALID}
    return envelope(desc, args.seed, body)


def cmd_spectrum(args) -> dict:
    desc = _load(args)
    if "map" in desc and not args.semigroup:
        T, _ = _channel(desc)
        v = validate_map(T)
        S = decompose(T, contractive=v.is_cp_contraction)
        body = {
            "kind": "channel",
            "spectral_radius": v.spectral_radius,
            "eigenvalues": sorted(S.eigenvalues, key=lambda z: (-abs(z), np.angle(z))),
            "peripheral": [[c.value, c.multiplicity] for c in S.peripheral_clusters],
            "eigenspace_dims": [[E.eigenvalue, E.dim] for E in peripheral_eigenspaces(S)],
            "status": STATUS_OK,
        }
    else:
        L = io.parse_generator(desc)
        body = {"kind": "generator", "frequencies": peripheral_frequencies(L, with_multiplicity=True), "status": STATUS_OK}
    return envelope(desc, args.seed, body)


def _full(args) -> dict:
    desc = _load(args)
    return analyze_descriptor(desc, args.seed, args.unitize, args.semigroup, args.times)


def cmd_analyze(args) -> dict:
    return _full(args)


def cmd_boundary(args) -> dict:
    rep = _full(args)
    keep = ("schema_version", "input", "seed", "kind", "status", "boundary", "q_tau", "cstar_axioms", "error", "unitized", "frequencies")
    return {k: v for k, v in rep.items() if k in keep}


def cmd_classify(args) -> dict:
    rep = _full(args)
    b = rep.get("boundary", {})
    return {k: rep[k] for k in ("schema_version", "input", "seed", "status") if k in rep} | {
        "classification": b.get("classification", []),
        "dim": b.get("dim", 0),
        **({"error": rep["error"]} if "error" in rep else {}),
    }


def cmd_automorphy(args) -> dict:
    rep = _full(args)
    keep = ("schema_version", "input", "seed", "kind", "status", "automorphy", "multiplicative_domain_dim", "error")
    return {k: v for k, v in rep.items() if k in keep}


def cmd_semigroup(args) -> dict:
    args.semigroup = True
    return _full(args)


def cmd_dilation(args) -> dict:
    if args.shift is not None:
        r = shift_lift_demo(args.shift, args.window if args.window is not None else 4)
        body = {k: r[k] for k in ("N", "W", "deviations", "exact_for", "expected_range", "passed")}
        body["status"] = STATUS_OK if r["passed"] else STATUS_THEORY
        return envelope({"name": "shift-demo"}, args.seed, body)
    if args.file is None:
        raise io.ParseError("dilation-check needs a channel file or --shift N")
    desc = _load(args)
    T, k = _channel(desc)
    if k is None:
        from .algebra import choi_to_kraus, superop_choi_roundtrip

        if not T.shape.is_single_block:
            raise io.ParseError("dilation towers are built for single-block maps")
        k = choi_to_kraus(superop_choi_roundtrip(T))
    depth = args.depth or 4
    level = args.window if args.window is not None else 1
    tw = build_tower(k, depth)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(20):
        x = rng.standard_normal((k.d, k.d)) + 1j * rng.standard_normal((k.d, k.d))
        for n in range(depth + 1):
            out = tower_compression(tw, x, n)
            ref = T.power(n)(T.shape.element(x)).blocks[0]
            worst = max(worst, float(np.max(np.abs(out - ref))))
    lifts = []
    S = decompose(T, contractive=True)
    for E in peripheral_eigenspaces(S):
        for x in E.elements:
            lifts.append(lift_window(tw, x.blocks[0], E.eigenvalue, level).as_dict())
    body = {
        "depth": depth,
        "window_level": level,
        "kraus_rank": len(k),
        "compression_max_error": worst,
        "lifts": lifts,
        "monotone_exhaustion": monotone_exhaustion(tw),
        "status": STATUS_OK,
    }
    return envelope(desc, args.seed, body)


def cmd_obstruct(args) -> dict:
    desc = _load(args)
    return envelope(desc, args.seed, analyze_system(desc))


def cmd_corpus_verify(args) -> dict:
    d = Path(args.file) if args.file else None
    try:
        summary = corpus_verify(args.filter, args.seed, d)
        summary["status"] = STATUS_OK
    except CorpusMismatch as exc:
        summary = {"passed": False, "failures": [list(f) for f in exc.failures], "status": STATUS_THEORY}
    return {"schema_version": 1, "seed": args.seed, **summary}


COMMANDS = {
    "validate": (cmd_validate, "check CP, contractivity and unitality"),
    "spectrum": (cmd_spectrum, "peripheral spectrum and eigenspace dimensions"),
    "boundary": (cmd_boundary, "peripheral boundary and its C*-structure"),
    "classify": (cmd_classify, "Wedderburn block sizes of the boundary"),
    "automorphy": (cmd_automorphy, "is the boundary product the ambient product?"),
    "semigroup": (cmd_semigroup, "continuous-time analysis of a generator"),
    "dilation-check": (cmd_dilation, "Stinespring tower compression and lift windows"),
    "obstruct": (cmd_obstruct, "C*-compatibility refutation for an operator system"),
    "corpus-verify": (cmd_corpus_verify, "run the bundled corpus against expected values"),
    "analyze": (cmd_analyze, "full pipeline report"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ppb", description="Peripheral Poisson boundary toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="PATH", help="write the JSON report to PATH")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--unitize", action="store_true", help="also analyze the unitized map")
    common.add_argument("--semigroup", action="store_true", help="use the generator section of the file")
    common.add_argument("--times", type=lambda s: [float(t) for t in s.split(",")], default=None,
                        help="comma-separated sample times")
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--window", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True)
    for name, (fn, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        nargs = "?" if name in ("corpus-verify", "dilation-check") else None
        sp.add_argument("file", nargs=nargs, help="descriptor JSON (corpus directory for corpus-verify)")
        if name == "corpus-verify":
            sp.add_argument("--filter", choices=("discrete", "semigroup", "obstruct"), default=None)
        if name == "dilation-check":
            sp.add_argument("--shift", type=int, default=None, metavar="N", help="run the shift demo on C^(2N+1)")
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    saved = settings.tol
    if args.tol is not None:
        set_tolerance(args.tol)
    try:
        rep = args.func(args)
        return _emit(rep, args)
    except InputError as exc:
        print(f"error [{getattr(exc, 'module', '?')}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except TheoryViolation as exc:
        print(f"theory violation [{getattr(exc, 'module', '?')}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except PPBError as exc:
        print(f"error [{getattr(exc, 'module', '?')}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    finally:
        settings.tol = saved


if __name__ == "__main__":
    sys.exit(main())
