"""Operator systems: positivity, pure elements and C*-compatibility refutations.

An operator system here is a finite-dimensional subspace S of M_n, closed
under adjoints, carrying the ambient norm and order. Two conservative
tests show that S admits no C*-algebra structure compatible with them:

* pure count: a unital S of dimension m <= 3 that is not itself an
  algebra, with more than m pure unit-norm positive elements, cannot be
  order isomorphic to C^m (the only candidate C*-algebra);
* parallelogram: a two-dimensional S without unit in which no
  self-adjoint pair satisfies ||e1|| = ||e2|| = ||e1 + e2|| = ||e1 - e2|| = 1
  cannot be C^2.

Anything borderline is reported as undecided.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInterval, ShapeMismatch

INCOMPATIBLE = "INCOMPATIBLE"
UNDECIDED = "UNDECIDED"
PSD_TOL = 1e-13
RANK_TOL = 1e-7
PARALLELOGRAM_GAP = np.sqrt(2) - 1 - 1e-6


def _herm_vec(h: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix."""
    return np.concatenate([h.real.ravel(), h.imag.ravel()])


def _real_rank(vectors: Sequence[np.ndarray], tol: float) -> int:
    if not len(vectors):
        return 0
    s = np.linalg.svd(np.array(vectors), compute_uv=False)
    return int(np.sum(s > tol))


@dataclass(frozen=True, eq=False)
class OperatorSystem:
    ambient_dim: int
    basis: tuple[np.ndarray, ...]
    adjoint_closed: bool
    contains_unit: bool

    @classmethod
    def from_basis(cls, basis: Iterable, ambient_dim: int | None = None, tol: float = 1e-10) -> "OperatorSystem":
        mats = tuple(np.atleast_2d(np.asarray(b, dtype=complex)) for b in basis)
        if not mats:
            raise ShapeMismatch("an operator system needs a nonempty basis")
        n = ambient_dim or mats[0].shape[0]
        for b in mats:
            if b.shape != (n, n):
                raise ShapeMismatch(f"basis element of shape {b.shape}, ambient {n}")
        Bm = np.array([b.ravel() for b in mats]).T
        s = np.linalg.svd(Bm, compute_uv=False)
        if np.sum(s > tol * max(1.0, s[0])) < len(mats):
            raise ShapeMismatch("basis elements are linearly dependent")
        in_span = lambda m: np.linalg.norm(Bm @ np.linalg.lstsq(Bm, m.ravel(), rcond=None)[0] - m.ravel()) <= tol
        adj = all(in_span(b.conj().T) for b in mats)
        unit = in_span(np.eye(n))
        return cls(n, mats, bool(adj), bool(unit))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (self.dim,):
            raise ShapeMismatch(f"{c.shape[0] if c.ndim else 0} coefficients for a system of dimension {self.dim}")
        return np.tensordot(c, np.array(self.basis), axes=1)

    def hermitian_basis(self, tol: float = 1e-10) -> list[np.ndarray]:
        """A real basis of the self-adjoint part."""
        cands = []
        for b in self.basis:
            cands.append((b + b.conj().T) / 2)
            cands.append((b - b.conj().T) / 2j)
        out, vecs = [], []
        for h in cands:
            v = _herm_vec(h)
            if np.linalg.norm(v) <= tol:
                continue
            if _real_rank(vecs + [v], tol) > len(vecs):
                vecs.append(v)
                out.append(h)
        return out

    def is_algebra(self, tol: float = 1e-9) -> bool:
        Bm = np.array([b.ravel() for b in self.basis]).T
        for a, b in itertools.product(self.basis, repeat=2):
            p = (a @ b).ravel()
            c, *_ = np.linalg.lstsq(Bm, p, rcond=None)
            if np.linalg.norm(Bm @ c - p) > tol * max(1.0, np.linalg.norm(p)):
                return False
        return True


def _as_matrix(S: OperatorSystem, A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    return S.matrix(A) if A.ndim == 1 else A


def os_norm(S: OperatorSystem, coeffs) -> float:
    return float(np.linalg.norm(S.matrix(coeffs), 2))


def _min_eig(h: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2)[0])


def _is_psd(h: np.ndarray, tol: float) -> bool:
    if np.max(np.abs(h - h.conj().T), initial=0.0) > max(tol, 1e-12):
        return False
    return _min_eig(h) >= -tol


def os_positive(S: OperatorSystem, coeffs, tol: float = 1e-10) -> bool:
    return _is_psd(S.matrix(coeffs), tol)


def _bisect_step(ok, lo: float = 0.0, hi: float = 1.0) -> float:
    while ok(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e8:
            return lo
    while hi - lo > 1e-10:
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _max_step(A: np.ndarray, B0: np.ndarray, e: np.ndarray, P_perp: np.ndarray, tol: float, R=None) -> float:
    """Largest t with 0 <= B0 + t e <= A.

    With ``R`` an isometry onto range(A) and B0 = A/2, the step has the closed
    form 1 / (2 max eig(A_r^{-1/2} e_r A_r^{-1/2})); it is then confirmed by
    the PSD tests, and plain bisection is used if confirmation fails.
    """
    # anything below A is supported where A is
    if np.linalg.norm(P_perp @ e) > 1e-12 or np.linalg.norm(e @ P_perp) > 1e-12:
        return 0.0
    ok = lambda t: _is_psd(B0 + t * e, tol) and _is_psd(A - B0 - t * e, tol)
    if R is not None:
        w, U = np.linalg.eigh(R.conj().T @ A @ R)
        Ais = U @ np.diag(w**-0.5) @ U.conj().T
        m = np.linalg.eigvalsh(Ais @ (R.conj().T @ e @ R) @ Ais)
        top = float(np.max(np.abs(m)))
        if top <= 1e-14:
            return _bisect_step(ok)
        t = 1 / (2 * top)
        if ok(t * (1 - 1e-9)) and not ok(t * (1 + 1e-6) + 1e-9):
            return t
    return _bisect_step(ok)


def _supported_directions(H: Sequence[np.ndarray], ker: np.ndarray) -> list[np.ndarray]:
    """Real combinations of H that vanish on ker, the only feasible directions."""
    if ker.shape[1] == 0:
        return list(H)
    M = np.array([np.concatenate([(h @ ker).real.ravel(), (h @ ker).imag.ravel()]) for h in H]).T
    _, s, Vt = np.linalg.svd(M)
    r = int(np.sum(s > 1e-9 * max(1.0, s[0] if s.size else 0.0)))
    return [sum(c * h for c, h in zip(v, H)) for v in Vt[r:]]


def order_interval_dim(S: OperatorSystem, A, tol: float = PSD_TOL, n_random: int = 64, rng=None) -> int:
    """Real dimension of {B in S : 0 <= B <= A}, by directional bisection from A/2."""
    A = _as_matrix(S, A)
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    if not _is_psd(A, 1e-10 * scale):
        raise DegenerateInterval("A is not positive")
    if np.linalg.norm(A, 2) <= 1e-14:
        return 0
    rng = np.random.default_rng(0) if rng is None else rng
    w, U = np.linalg.eigh((A + A.conj().T) / 2)
    ker = U[:, w <= 1e-10 * scale]
    R = U[:, w > 1e-10 * scale]
    P_perp = ker @ ker.conj().T
    B0 = A / 2
    H = _supported_directions(S.hermitian_basis(), ker)
    if not H:
        return 0
    dirs = list(H)
    dirs += [H[i] + H[j] for i in range(len(H)) for j in range(i + 1, len(H))]
    dirs.append(A)
    for _ in range(n_random):
        c = rng.standard_normal(len(H))
        dirs.append(sum(ci * h for ci, h in zip(c, H)))
    disp = []
    for e in dirs:
        e = e / np.linalg.norm(e)
        for sgn in (1.0, -1.0):
            t = _max_step(A, B0, sgn * e, P_perp, tol * scale, R)
            if t > 0:
                disp.append(_herm_vec(t * sgn * e))
    return _real_rank(disp, RANK_TOL)


def order_interval_dim_exact(S: OperatorSystem, A) -> int:
    """Dimension of the self-adjoint part of S supported on the range of A."""
    A = _as_matrix(S, A)
    w, U = np.linalg.eigh((A + A.conj().T) / 2)
    ker = U[:, w <= 1e-10 * max(1.0, np.max(np.abs(w)))]
    H = S.hermitian_basis()
    if ker.shape[1] == 0:
        return len(H)
    # h ker = 0 as a real-linear condition on the coefficients of h
    M = np.array([np.concatenate([(h @ ker).real.ravel(), (h @ ker).imag.ravel()]) for h in H]).T
    s = np.linalg.svd(M, compute_uv=False)
    return len(H) - int(np.sum(s > 1e-9))


def is_pure(S: OperatorSystem, A, **kw) -> bool:
    return order_interval_dim(S, A, **kw) == 1


def pinching_pure_family(thetas: Iterable[float], ambient_dim: int = 6) -> list[np.ndarray]:
    """(I + e^{i t} E01 + e^{-i t} E10)/2 in M_n."""
    out = []
    for t in thetas:
        A = np.eye(ambient_dim, dtype=complex)
        A[0, 1] += np.exp(1j * t)
        A[1, 0] += np.exp(-1j * t)
        out.append(A / 2)
    return out


def default_candidates(S: OperatorSystem, n_random: int = 32, rng=None) -> list[np.ndarray]:
    """Candidate positives for the pure scan.

    Combinations with coefficients in {-1, 0, 1} over the self-adjoint basis
    (each scaled to unit norm), plus, for unital systems, random self-adjoint
    h shifted to h - lambda_min(h) 1, which lies on the boundary of the cone.
    """
    H = [h / np.linalg.norm(h, 2) for h in S.hermitian_basis()]
    out = []
    for c in itertools.product((-1.0, 0.0, 1.0), repeat=len(H)):
        if any(c):
            out.append(sum(ci * h for ci, h in zip(c, H)))
    if S.contains_unit:
        rng = np.random.default_rng(0) if rng is None else rng
        one = np.eye(S.ambient_dim)
        for _ in range(n_random):
            h = sum(ci * hi for ci, hi in zip(rng.standard_normal(len(H)), H))
            out.append(h - _min_eig(h) * one)
    return out


@dataclass(frozen=True)
class PureScan:
    elements: tuple[np.ndarray, ...]
    min_distance: float

    @property
    def count(self) -> int:
        return len(self.elements)


def enumerate_pure_unit(S: OperatorSystem, candidates: Iterable | None = None, include_default: bool = True) -> PureScan:
    """Verified pure unit-norm positives among the candidates, deduplicated."""
    cands = list(candidates or [])
    if include_default:
        cands += default_candidates(S)
    found: list[np.ndarray] = []
    for A in cands:
        A = np.asarray(A, dtype=complex)
        n = np.linalg.norm(A, 2)
        if n <= 1e-12 or not _is_psd(A, 1e-10 * n):
            continue
        A = A / n
        if any(np.linalg.norm(A - B, 2) <= 1e-9 for B in found):
            continue
        if is_pure(S, A):
            found.append(A)
    dists = [np.linalg.norm(a - b, 2) for a, b in itertools.combinations(found, 2)]
    return PureScan(tuple(found), float(min(dists)) if dists else np.inf)


def _parallelogram(S: OperatorSystem, n_grid: int = 720):
    H = S.hermitian_basis()
    if len(H) != 2:
        return None, False
    # Hilbert-Schmidt orthonormalization of the self-adjoint plane
    h1 = H[0] / np.linalg.norm(H[0])
    h2 = H[1] - np.vdot(h1, H[1]).real * h1
    h2 = h2 / np.linalg.norm(h2)
    phis = np.linspace(0, 2 * np.pi, n_grid, endpoint=False)
    units = []
    norms = []
    for p in phis:
        e = np.cos(p) * h1 + np.sin(p) * h2
        n = np.linalg.norm(e, 2)
        norms.append(n)
        units.append(e / n)
    circular = (max(norms) - min(norms)) <= 1e-9 * max(norms)
    U = np.array(units)
    best = np.inf
    for a in range(n_grid - 1):
        s = np.linalg.svd(U[a] + U[a + 1 :], compute_uv=False)[:, 0]
        d = np.linalg.svd(U[a] - U[a + 1 :], compute_uv=False)[:, 0]
        best = min(best, float(np.min(np.maximum(abs(s - 1), abs(d - 1)))))
    return float(best), circular


@dataclass(frozen=True)
class CompatibilityVerdict:
    verdict: str
    reason: str
    details: dict

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason, "details": self.details}


def cn_compatibility(S: OperatorSystem, candidates: Iterable | None = None, n_grid: int = 720) -> CompatibilityVerdict:
    m = S.dim
    details: dict = {"dim": m, "unital": S.contains_unit, "adjoint_closed": S.adjoint_closed}
    if not S.adjoint_closed:
        return CompatibilityVerdict(UNDECIDED, "not closed under adjoints", details)
    algebra = S.is_algebra()
    details["is_algebra"] = algebra
    if S.contains_unit:
        scan = enumerate_pure_unit(S, candidates)
        details["pure_count"] = scan.count
        details["pure_min_distance"] = scan.min_distance
        if scan.count > m and not algebra:
            if m <= 3:
                return CompatibilityVerdict(
                    INCOMPATIBLE, f"pure count: {scan.count} pure unit-norm positives exceed dimension {m}", details
                )
            details["note"] = f"C^{m} is refuted by pure count; other C*-structures are not excluded"
            return CompatibilityVerdict(UNDECIDED, "pure count refutes only the commutative structure", details)
        return CompatibilityVerdict(UNDECIDED, "no refutation found", details)
    if m == 2:
        best, circular = _parallelogram(S, n_grid)
        details["parallelogram_min"] = best
        details["circular"] = bool(circular)
        if best is not None and circular and best >= PARALLELOGRAM_GAP:
            return CompatibilityVerdict(
                INCOMPATIBLE, f"parallelogram: no self-adjoint pair with unit norms (gap {best:.6f})", details
            )
    return CompatibilityVerdict(UNDECIDED, "no refutation found", details)


__all__ = [
    "OperatorSystem",
    "PureScan",
    "CompatibilityVerdict",
    "INCOMPATIBLE",
    "UNDECIDED",
    "os_norm",
    "os_positive",
    "order_interval_dim",
    "order_interval_dim_exact",
    "is_pure",
    "pinching_pure_family",
    "default_candidates",
    "enumerate_pure_unit",
    "cn_compatibility",
]
