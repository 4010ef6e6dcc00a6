"""Unitization of a non-unital CP contraction.

tau~(x + c) = (tau(x) + c (1 - tau(1))) + c on A + C. The adjoined scalar
block is appended last, so the first ``original.shape.dim`` coordinates
are those of A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgElement,
    AlgebraShape,
    Superoperator,
    op_norm,
    require_cp_contraction,
    span_matrix,
)
from .boundary import build_boundary, boundary_or_none
from .errors import AlreadyUnital, CompressionMismatch, CorrespondenceViolation
from .spectral import decompose, largest_principal_angle, peripheral_eigenspaces


@dataclass(frozen=True, eq=False)
class UnitizedMap:
    original: Superoperator
    extended: Superoperator
    scalar_index: int

    @property
    def shape(self) -> AlgebraShape:
        return self.extended.shape

    def embed(self, x: AlgElement, c: complex = 0.0) -> AlgElement:
        """x + c in A + C."""
        return self.shape.element(*x.blocks, [[c]])

    def split(self, z: AlgElement) -> tuple[AlgElement, complex]:
        return self.original.shape.element(*z.blocks[:-1]), complex(z.blocks[-1][0, 0])


def unitize(T: Superoperator, tol: float = 1e-9) -> UnitizedMap:
    v = require_cp_contraction(T)
    if v.is_unital:
        raise AlreadyUnital("map is already unital; nothing to adjoin")
    D = T.shape.dim
    M = np.zeros((D + 1, D + 1), dtype=complex)
    M[:D, :D] = T.matrix
    M[:D, D] = (T.shape.identity() - T.unit_image()).vec
    M[D, D] = 1.0
    ext = Superoperator(T.shape + AlgebraShape((1,)), M)
    return UnitizedMap(T, ext, T.shape.n_blocks)


def eigen_correspondence_check(U: UnitizedMap, tol: float = 1e-7) -> dict:
    """E(tau~) = span({y + 0 : y in E(tau)} and 1 + 1), and c = 0 off the fixed points."""
    ext_spaces = peripheral_eigenspaces(decompose(U.extended, contractive=True))
    orig = {}
    S = decompose(U.original, contractive=True)
    for E in peripheral_eigenspaces(S):
        orig[E.eigenvalue] = E.elements

    expected = [U.embed(y) for els in orig.values() for y in els]
    expected.append(U.shape.identity())
    found = [e for E in ext_spaces for e in E.elements]
    angle = largest_principal_angle(found, expected) if len(found) == len(expected) else np.pi / 2
    if len(found) != len(expected) or angle > tol:
        raise CorrespondenceViolation(
            f"E(tau~) has dim {len(found)} vs expected {len(expected)}; principal angle {angle:.3e}"
        )
    scalar = 0.0
    for E in ext_spaces:
        if abs(E.eigenvalue - 1) <= 1e-7:
            continue
        for e in E.elements:
            scalar = max(scalar, abs(U.split(e)[1]))
    if scalar > tol:
        raise CorrespondenceViolation(f"eigenvector off lambda = 1 has scalar part {scalar:.3e}")
    return {
        "passed": True,
        "dim_original": len(expected) - 1,
        "dim_extended": len(found),
        "principal_angle": float(angle),
        "max_scalar_component": float(scalar),
    }


def compression_consistency(U: UnitizedMap, tol: float = 1e-7) -> dict:
    """Boundary of tau versus the A-corner of the boundary of tau~.

    For x, y in E(tau) (embedded as x + 0) the tau~ product is (x o y) + 0,
    so structure constants must agree once both live in the same basis.
    """
    Bt = build_boundary(U.extended)
    B = boundary_or_none(U.original)
    if B is None:
        return {"passed": True, "dim": 0, "residual": 0.0}
    Q = span_matrix(Bt.basis, U.shape.dim)
    worst = 0.0
    for i, x in enumerate(B.basis):
        for j, y in enumerate(B.basis):
            ex, ey = U.embed(x), U.embed(y)
            cx, *_ = np.linalg.lstsq(Q, ex.vec, rcond=None)
            cy, *_ = np.linalg.lstsq(Q, ey.vec, rcond=None)
            for c, e in ((cx, ex), (cy, ey)):
                if np.linalg.norm(Q @ c - e.vec) > tol:
                    raise CompressionMismatch("boundary of tau is not inside the boundary of tau~")
            ext = Bt.element(Bt.product(cx, cy))
            a, s = U.split(ext)
            worst = max(worst, op_norm(a - B.element(B.structure_constants[i, j])), abs(s))
    if worst > tol:
        raise CompressionMismatch(f"structure constants disagree by {worst:.3e}")
    return {"passed": True, "dim": B.dim, "residual": float(worst)}


__all__ = ["UnitizedMap", "unitize", "eigen_correspondence_check", "compression_consistency"]
