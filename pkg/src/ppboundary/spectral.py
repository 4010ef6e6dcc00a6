"""Eigen-analysis of superoperators.

Spectral projections are obtained from a reordered complex Schur form
followed by a Sylvester solve that decouples the selected cluster from the
rest of the spectrum. Only peripheral clusters get their own projection;
everything inside the unit disc is lumped into one interior projection.
Interior eigenvalues of CP maps are frequently defective (the pinching map
has Jordan chains at 0), and splitting them individually is ill-posed.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from ._config import settings
from .algebra import AlgElement, AlgebraShape, Superoperator, span_matrix
from .errors import IllConditionedSplit, SuspectSpectrum

SEP_FLOOR = 1e-12


@dataclass(frozen=True)
class Cluster:
    value: complex
    indices: tuple[int, ...]
    peripheral: bool

    @property
    def multiplicity(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues, clusters and peripheral projections of one operator.

    ``mode`` is ``"discrete"`` for a map tau (peripheral = unit modulus) or
    ``"continuous"`` for a generator L (peripheral = zero real part).
    """

    operator: Superoperator
    eigenvalues: np.ndarray
    clusters: tuple[Cluster, ...]
    projections: dict = field(repr=False)
    interior_projection: Superoperator | None = field(repr=False)
    mode: str = "discrete"
    contractive: bool = False
    tol_cluster: float = 1e-7
    tol_periph: float = 1e-7
    separations: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self) -> AlgebraShape:
        return self.operator.shape

    @property
    def peripheral_clusters(self) -> list[Cluster]:
        return [c for c in self.clusters if c.peripheral]

    def peripheral_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.clusters) if c.peripheral]

    def find_peripheral(self, value: complex, tol: float | None = None) -> int | None:
        """Index of the peripheral cluster at ``value``, if any."""
        tol = 10 * self.tol_cluster if tol is None else tol
        best, best_d = None, np.inf
        for i, c in enumerate(self.clusters):
            if c.peripheral:
                d = abs(c.value - value)
                if d < best_d:
                    best, best_d = i, d
        return best if best_d <= tol else None

    def project(self, index: int, x: AlgElement) -> AlgElement:
        P = self.projections[index]
        return self.shape.from_vec(P.matrix @ x.vec)

    def as_dict(self, verbose: bool = False) -> dict:
        out = {
            "mode": self.mode,
            "eigenvalues": [complex(z) for z in self.eigenvalues],
            "clusters": [
                {"value": complex(c.value), "multiplicity": c.multiplicity, "peripheral": c.peripheral}
                for c in self.clusters
            ],
            "peripheral": [complex(c.value) for c in self.peripheral_clusters],
        }
        if verbose:
            out["projections"] = {str(i): P.matrix for i, P in self.projections.items()}
        return out


@dataclass(frozen=True, eq=False)
class EigenspaceBasis:
    eigenvalue: complex
    elements: tuple[AlgElement, ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def dim(self) -> int:
        return len(self.elements)


def cluster_eigenvalues(eigs: np.ndarray, tol: float) -> list[list[int]]:
    """Transitive (single-linkage) clustering at distance ``tol``."""
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= tol:
                a, b = find(i), find(j)
                if a != b:
                    parent[b] = a
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (-abs(np.mean(eigs[g])), cmath.phase(np.mean(eigs[g])) % (2 * np.pi)))


def _sylvester_separation(T11: np.ndarray, T22: np.ndarray) -> float:
    k, r = T11.shape[0], T22.shape[0]
    K = np.kron(np.eye(r), T11) - np.kron(T22.T, np.eye(k))
    return float(np.linalg.svd(K, compute_uv=False)[-1])


def spectral_projection(M: np.ndarray, members: Sequence[complex], tol: float):
    """Projection onto the invariant subspace of the eigenvalues ``members``.

    Returns ``(P, sep)`` where ``sep`` is the smallest singular value of the
    Sylvester operator coupling the selected block to the rest.
    """
    members = np.asarray(members, dtype=complex)
    D = M.shape[0]

    def select(z):
        return bool(np.min(np.abs(members - z)) <= tol)

    T, Z, sdim = scipy.linalg.schur(M, output="complex", sort=select)
    if sdim != len(members):
        raise IllConditionedSplit(
            f"reordering selected {sdim} eigenvalues for a cluster of size {len(members)}"
        )
    if sdim == D:
        return np.eye(D, dtype=complex), np.inf
    k = sdim
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    sep = _sylvester_separation(T11, T22)
    if sep < SEP_FLOOR:
        return None, sep
    Y = scipy.linalg.solve_sylvester(T11, -T22, -T12)
    block = np.zeros((D, D), dtype=complex)
    block[:k, :k] = np.eye(k)
    block[:k, k:] = -Y
    return Z @ block @ Z.conj().T, sep


def _is_peripheral(z: complex, mode: str, contractive: bool, tol_periph: float) -> bool:
    if mode == "continuous":
        if contractive:
            return z.real >= -tol_periph
        return abs(z.real) <= max(tol_periph, settings.snap)
    r = abs(z)
    if contractive:
        return r >= 1 - tol_periph
    return 1 - tol_periph <= r <= 1 + max(tol_periph, settings.snap)


def _snap(z: complex, mode: str) -> complex:
    if mode == "continuous":
        return complex(0.0, z.imag)
    r = abs(z)
    return z / r if r > 0 else z


def decompose(
    T: Superoperator,
    tol_cluster: float | None = None,
    tol_periph: float | None = None,
    contractive: bool = False,
    mode: str = "discrete",
) -> SpectralData:
    tol_cluster = settings.tol_cluster if tol_cluster is None else tol_cluster
    tol_periph = settings.tol_periph if tol_periph is None else tol_periph
    if tol_cluster <= 0 or tol_periph <= 0:
        raise ValueError("tolerances must be positive")
    M = np.asarray(T.matrix)
    D = M.shape[0]
    Tschur, _ = scipy.linalg.schur(M, output="complex")
    eigs = np.diag(Tschur).copy()

    clusters = []
    for g in cluster_eigenvalues(eigs, tol_cluster):
        value = complex(np.mean(eigs[g]))
        periph = _is_peripheral(value, mode, contractive, tol_periph)
        if periph:
            value = _snap(value, mode)
        clusters.append(Cluster(value, tuple(g), periph))

    projections, seps = {}, {}
    for i, c in enumerate(clusters):
        if not c.peripheral:
            continue
        P, sep = spectral_projection(M, eigs[list(c.indices)], tol_cluster)
        seps[i] = sep
        if P is None:
            raise IllConditionedSplit(
                f"peripheral cluster at {c.value:.6g} is separated from the rest by only {sep:.2e}"
            )
        projections[i] = Superoperator(T.shape, P)

    interior = None
    if any(not c.peripheral for c in clusters):
        rest = np.eye(D, dtype=complex) - sum((P.matrix for P in projections.values()), np.zeros((D, D)))
        interior = Superoperator(T.shape, rest)
    return SpectralData(
        operator=T,
        eigenvalues=eigs,
        clusters=tuple(clusters),
        projections=projections,
        interior_projection=interior,
        mode=mode,
        contractive=contractive,
        tol_cluster=tol_cluster,
        tol_periph=tol_periph,
        separations=seps,
    )


def peripheral_spectrum(S: SpectralData, with_multiplicity: bool = False):
    """Unit-modulus cluster representatives (already snapped to the circle)."""
    if S.contractive and S.mode == "discrete":
        worst = float(np.max(np.abs(S.eigenvalues), initial=0.0))
        if worst > 1 + settings.snap:
            raise SuspectSpectrum(f"contraction has an eigenvalue of modulus {worst:.12g}")
    out = []
    for c in S.peripheral_clusters:
        out.append((c.value, c.multiplicity) if with_multiplicity else c.value)
    return out


def _null_space(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal columns spanning the numerical kernel of M."""
    if M.size == 0:
        return np.zeros((M.shape[1], 0))
    _, s, Vh = np.linalg.svd(M)
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol * scale))
    return Vh[rank:].conj().T


def eigenspace(T: Superoperator, lam: complex, tol: float | None = None) -> EigenspaceBasis:
    """Kernel of T - lam by SVD thresholding, as trace-orthonormal elements."""
    tol = settings.tol if tol is None else tol
    M = np.asarray(T.matrix) - lam * np.eye(T.shape.dim)
    N = _null_space(M, tol)
    return EigenspaceBasis(complex(lam), tuple(T.shape.from_vec(v) for v in N.T))


def peripheral_eigenspaces(S: SpectralData, tol: float | None = None) -> list[EigenspaceBasis]:
    """Eigenspaces of every peripheral cluster, ordered by argument in [0, 2pi)."""
    idx = S.peripheral_indices()
    if S.mode == "continuous":
        idx.sort(key=lambda i: S.clusters[i].value.imag)
    else:
        idx.sort(key=lambda i: cmath.phase(S.clusters[i].value) % (2 * np.pi))
    return [eigenspace(S.operator, S.clusters[i].value, tol) for i in idx]


def peripheral_span(T_or_S, tol: float | None = None) -> list[AlgElement]:
    S = T_or_S if isinstance(T_or_S, SpectralData) else decompose(T_or_S)
    out: list[AlgElement] = []
    for E in peripheral_eigenspaces(S, tol):
        out.extend(E.elements)
    return out


def check_peripheral_semisimple(S: SpectralData, tol: float = 1e-8) -> bool:
    M = np.asarray(S.operator.matrix)
    for i in S.peripheral_indices():
        P = S.projections[i].matrix
        nu = S.clusters[i].value
        if np.linalg.norm(P @ M @ P - nu * P, 2) > tol:
            return False
    return True


def resolution_residuals(S: SpectralData) -> dict:
    """Residuals of the resolution-of-identity invariants."""
    M = np.asarray(S.operator.matrix)
    D = M.shape[0]
    Ps = [P.matrix for P in S.projections.values()]
    if S.interior_projection is not None:
        Ps.append(S.interior_projection.matrix)
    total = np.linalg.norm(sum(Ps, np.zeros((D, D))) - np.eye(D), 2)
    ortho = 0.0
    commute = 0.0
    for a, Pa in enumerate(Ps):
        commute = max(commute, np.linalg.norm(M @ Pa - Pa @ M, 2))
        for b, Pb in enumerate(Ps):
            target = Pa if a == b else 0
            ortho = max(ortho, np.linalg.norm(Pa @ Pb - target, 2))
    return {"sum": float(total), "orthogonality": float(ortho), "commutation": float(commute)}


def _as_columns(A, dim: int | None = None) -> np.ndarray:
    if isinstance(A, np.ndarray):
        return A
    elems: list[AlgElement] = []
    for item in A:
        if isinstance(item, EigenspaceBasis):
            elems.extend(item.elements)
        else:
            elems.append(item)
    return span_matrix(elems, dim)


def subspace_equal(A: Iterable, B: Iterable, tol: float = 1e-7) -> bool:
    """True iff the spans agree up to largest principal angle ``tol``."""
    a, b = _as_columns(A), _as_columns(B)
    ra = np.linalg.matrix_rank(a, tol=1e-9) if a.size else 0
    rb = np.linalg.matrix_rank(b, tol=1e-9) if b.size else 0
    if ra != rb:
        return False
    if ra == 0:
        return True
    return float(np.max(scipy.linalg.subspace_angles(a, b))) <= tol


def largest_principal_angle(A: Iterable, B: Iterable) -> float:
    a, b = _as_columns(A), _as_columns(B)
    if a.size == 0 or b.size == 0:
        return 0.0 if a.size == b.size else float(np.pi / 2)
    return float(np.max(scipy.linalg.subspace_angles(a, b)))


def in_span(x: AlgElement, basis: np.ndarray, tol: float = 1e-7) -> bool:
    """Whether x lies in the column span of an orthonormal ``basis``."""
    v = x.vec
    if basis.size == 0:
        return bool(np.linalg.norm(v) <= tol)
    r = v - basis @ (basis.conj().T @ v)
    return bool(np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(v)))


__all__ = [
    "Cluster",
    "SpectralData",
    "EigenspaceBasis",
    "decompose",
    "peripheral_spectrum",
    "eigenspace",
    "peripheral_eigenspaces",
    "peripheral_span",
    "check_peripheral_semisimple",
    "resolution_residuals",
    "subspace_equal",
    "largest_principal_angle",
    "spectral_projection",
    "cluster_eigenvalues",
    "in_span",
]
