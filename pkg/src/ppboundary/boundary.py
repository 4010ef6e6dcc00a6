"""The peripheral Poisson boundary of a CP contraction.

For x in E_lam and y in E_mu the extended Choi-Effros product is the
strong limit of tau^n(xy) / (lam mu)^n. In finite dimensions that limit is
the component of xy in the spectral subspace at lam*mu, which is how
:func:`ce_product_spectral` computes it. :func:`ce_product_iterative` runs
the limit directly and serves as an independent cross-check.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    AlgElement,
    AlgebraShape,
    KrausMap,
    Superoperator,
    apply,
    is_positive,
    op_norm,
    require_cp_contraction,
    span_matrix,
    validate_map,
)
from .errors import (
    AutomorphismViolation,
    AxiomViolation,
    BoundaryTrivial,
    ClassificationInconsistent,
    ConvergenceMismatch,
    CriterionDisagreement,
    MaximalityViolation,
    NoConvergence,
    NotAnEigenvector,
    StateNotFaithful,
    TheoryViolation,
)
from .spectral import SpectralData, _null_space, decompose, eigenspace, peripheral_eigenspaces

PRODUCT_TOL = 1e-7


# -- unit -------------------------------------------------------------------


def _unit_from_spectral(S: SpectralData, fixed_value: complex) -> AlgElement:
    one = S.shape.identity()
    i = S.find_peripheral(fixed_value)
    if i is None:
        return S.shape.zero()
    return S.project(i, one)


def q_tau(T: Superoperator, spectral: SpectralData | None = None, max_power: int = 200) -> AlgElement:
    """lim tau^n(1), via the spectral projection at 1, cross-checked by powers."""
    require_cp_contraction(T)
    S = spectral or decompose(T, contractive=True)
    q = _unit_from_spectral(S, 1.0)
    z = T.shape.identity()
    gap = op_norm(z - q)
    for _ in range(max_power):
        if gap <= 1e-7:
            break
        z = apply(T, z)
        gap = op_norm(z - q)
    if gap > 1e-6:
        raise ConvergenceMismatch(
            f"spectral q_tau and tau^{max_power}(1) differ by {gap:.3e}",
        )
    return q


# -- products ----------------------------------------------------------------


def _check_eigen(T: Superoperator, x: AlgElement, lam: complex, tol=PRODUCT_TOL):
    r = op_norm(apply(T, x) - lam * x)
    if r > tol * max(1.0, op_norm(x)):
        raise NotAnEigenvector(f"element is not in E_{lam:.6g}: residual {r:.3e}")


def _graded_component(
    S: SpectralData, z: AlgElement, target: complex, tol: float = PRODUCT_TOL
) -> AlgElement:
    """Component of z at the peripheral cluster ``target``; others must vanish."""
    hit = S.find_peripheral(target)
    result = S.shape.zero()
    for i in S.peripheral_indices():
        comp = S.project(i, z)
        if i == hit:
            result = comp
        elif op_norm(comp) > tol * max(1.0, op_norm(z)):
            raise TheoryViolation(
                f"product has a component of norm {op_norm(comp):.3e} at peripheral value "
                f"{S.clusters[i].value:.6g} instead of {target:.6g}"
            )
    return result


def ce_product_spectral(S: SpectralData, x: AlgElement, lam: complex, y: AlgElement, mu: complex) -> AlgElement:
    T = S.operator
    _check_eigen(T, x, lam)
    _check_eigen(T, y, mu)
    if abs(abs(lam) - 1) > PRODUCT_TOL or abs(abs(mu) - 1) > PRODUCT_TOL:
        raise NotAnEigenvector("both factors must be peripheral eigenvectors")
    return _graded_component(S, x @ y, lam * mu)


def cross_peripheral_residual(S: SpectralData, x: AlgElement, lam: complex, y: AlgElement, mu: complex) -> float:
    """Largest norm of a component of xy at a peripheral value other than lam*mu."""
    z = x @ y
    hit = S.find_peripheral(lam * mu)
    worst = 0.0
    for i in S.peripheral_indices():
        if i != hit:
            worst = max(worst, op_norm(S.project(i, z)))
    return worst


def ce_product_iterative(
    T: Superoperator,
    x: AlgElement,
    lam: complex,
    y: AlgElement,
    mu: complex,
    max_iter: int = 10000,
    tol: float = 1e-12,
    window: int = 8,
    streak: int = 5,
) -> AlgElement:
    """Run z_{n+1} = tau(z_n) / (lam mu) from z_0 = xy until it settles.

    When the raw iterates keep oscillating at small amplitude (below 1e-4),
    convergence is judged on Cesaro means over ``window`` iterates instead.
    """
    _check_eigen(T, x, lam)
    _check_eigen(T, y, mu)
    M = np.asarray(T.matrix)
    scale = lam * mu
    z = (x @ y).vec
    hist = deque([z], maxlen=window)
    good = 0
    means = deque(maxlen=2)
    mean_good = 0
    for n in range(1, max_iter + 1):
        z_new = (M @ z) / scale
        step = float(np.max(np.abs(z_new - z), initial=0.0))
        z = z_new
        hist.append(z)
        good = good + 1 if step <= tol else 0
        if good >= streak:
            return T.shape.from_vec(z)
        if len(hist) == window:
            amp = float(np.max(np.abs(np.array(hist) - hist[-1]), initial=0.0))
            if amp < 1e-4:
                means.append(np.mean(np.array(hist), axis=0))
                if len(means) == 2:
                    d = float(np.max(np.abs(means[1] - means[0]), initial=0.0))
                    mean_good = mean_good + 1 if d <= tol else 0
                    if mean_good >= streak:
                        return T.shape.from_vec(means[-1])
    raise NoConvergence(f"iterative product did not settle within {max_iter} steps")


# -- boundary object ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PeripheralBoundary:
    """Coordinates for (P(tau), o) in a trace-orthonormal peripheral basis.

    ``structure_constants[i, j, k]`` is the coefficient of b_k in b_i o b_j
    and ``involution_matrix[i, k]`` the coefficient of b_k in b_i^*.
    """

    shape: AlgebraShape
    basis: tuple[AlgElement, ...]
    labels: tuple[complex, ...]
    structure_constants: np.ndarray
    involution_matrix: np.ndarray
    unit_coeffs: np.ndarray
    classification: tuple[int, ...] = ()
    mode: str = "discrete"
    cstar_report: dict | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def basis_matrix(self) -> np.ndarray:
        return span_matrix(self.basis, self.shape.dim)

    def element(self, coeffs) -> AlgElement:
        return self.shape.from_vec(self.basis_matrix @ np.asarray(coeffs, dtype=complex))

    def coords(self, x: AlgElement, tol: float = PRODUCT_TOL) -> np.ndarray:
        B = self.basis_matrix
        c = B.conj().T @ x.vec
        r = np.linalg.norm(B @ c - x.vec)
        if r > tol * max(1.0, np.linalg.norm(x.vec)):
            raise TheoryViolation(f"element is not in the boundary span (residual {r:.3e})")
        return c

    def product(self, a, b) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self.structure_constants)

    def star(self, a) -> np.ndarray:
        return np.conj(a) @ self.involution_matrix

    def norm(self, a) -> float:
        return op_norm(self.element(a))

    @property
    def unit(self) -> AlgElement:
        return self.element(self.unit_coeffs)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "mode": self.mode,
            "labels": [complex(z) for z in self.labels],
            "structure_constants": self.structure_constants,
            "unit": self.unit.full if self.dim else None,
            "classification": list(self.classification),
        }


def assemble_boundary(
    shape: AlgebraShape,
    groups: Sequence[tuple[complex, Sequence[AlgElement]]],
    product: Callable[[AlgElement, complex, AlgElement, complex], AlgElement],
    unit: AlgElement,
    mode: str = "discrete",
    tol: float = PRODUCT_TOL,
) -> PeripheralBoundary:
    """Structure constants from labelled eigenbases and a product routine."""
    basis, labels = [], []
    for lab, elems in groups:
        for e in elems:
            basis.append(e)
            labels.append(complex(lab))
    m = len(basis)
    if m == 0:
        raise BoundaryTrivial("no peripheral eigenvectors: the boundary is {0}")
    B = span_matrix(basis, shape.dim)

    def coords(v):
        c = B.conj().T @ v
        r = np.linalg.norm(B @ c - v)
        if r > tol * max(1.0, np.linalg.norm(v)):
            raise TheoryViolation(f"product leaves the peripheral span (residual {r:.3e})")
        return c

    C = np.zeros((m, m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            C[i, j] = coords(product(basis[i], labels[i], basis[j], labels[j]).vec)
    J = np.array([coords(b.adjoint().vec) for b in basis])
    u = coords(unit.vec)
    return PeripheralBoundary(shape, tuple(basis), tuple(labels), C, J, u, (), mode)


def build_boundary(T: Superoperator, spectral: SpectralData | None = None, classify_blocks: bool = True) -> PeripheralBoundary:
    require_cp_contraction(T)
    S = spectral or decompose(T, contractive=True)
    spaces = peripheral_eigenspaces(S)
    if not any(len(E) for E in spaces):
        raise BoundaryTrivial("no peripheral spectrum: the boundary is {0}")
    unit = q_tau(T, S)
    B = assemble_boundary(
        T.shape,
        [(E.eigenvalue, E.elements) for E in spaces],
        lambda x, l, y, m: ce_product_spectral(S, x, l, y, m),
        unit,
    )
    if classify_blocks:
        B = replace(B, classification=tuple(classify(B)))
    return B


def boundary_or_none(T: Superoperator, spectral: SpectralData | None = None):
    try:
        return build_boundary(T, spectral)
    except BoundaryTrivial:
        return None


# -- C*-structure ------------------------------------------------------------


def _random_coeffs(B: PeripheralBoundary, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal(B.dim) + 1j * rng.standard_normal(B.dim)
    n = B.norm(a)
    return a / n if n > 0 else a


def verify_cstar_axioms(
    B: PeripheralBoundary, n_samples: int = 50, rng=None, tol: float = 1e-7, raise_on_failure: bool = True
) -> dict:
    """Associativity, involution, unit law and the C*-identity on random samples."""
    rng = np.random.default_rng(0) if rng is None else rng
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    res = {"associativity": 0.0, "involution": 0.0, "unit": 0.0, "cstar_identity": 0.0}
    witness = {}
    e = B.unit_coeffs
    for _ in range(n_samples):
        x, y, z = (_random_coeffs(B, rng) for _ in range(3))
        checks = {
            "associativity": B.element(B.product(B.product(x, y), z) - B.product(x, B.product(y, z))).norm(),
            "involution": B.element(B.star(B.product(x, y)) - B.product(B.star(y), B.star(x))).norm(),
            "unit": max(B.element(B.product(e, x) - x).norm(), B.element(B.product(x, e) - x).norm()),
            "cstar_identity": abs(B.norm(B.product(B.star(x), x)) - B.norm(x) ** 2),
        }
        for k, v in checks.items():
            if v > res[k]:
                res[k] = float(v)
                witness[k] = x
    report = {"n_samples": n_samples, "tol": tol, "residuals": res, "passed": all(v <= tol for v in res.values())}
    if raise_on_failure and not report["passed"]:
        axiom = max(res, key=res.get)
        raise AxiomViolation(axiom, res[axiom], witness.get(axiom))
    return report


def _coords_in(Z: np.ndarray, v: np.ndarray) -> np.ndarray:
    c, *_ = np.linalg.lstsq(Z, v, rcond=None)
    return c


def center(B: PeripheralBoundary, tol: float = 1e-7) -> np.ndarray:
    """Columns: coordinates of a basis of the o-center."""
    C = B.structure_constants
    m = B.dim
    # z o b_i - b_i o z = sum_j z_j (C[j,i,:] - C[i,j,:])
    rows = [(C[:, i, :] - C[i, :, :]).T for i in range(m)]
    A = np.vstack(rows)
    return _null_space(A, tol)


def classify(B: PeripheralBoundary, tol: float = 1e-7, rng=None) -> list[int]:
    """Wedderburn block sizes of the boundary algebra."""
    rng = np.random.default_rng(1) if rng is None else rng
    m = B.dim
    if m == 0:
        return []
    Z = center(B, tol)
    k = Z.shape[1]
    if k == 0:
        raise ClassificationInconsistent("boundary has trivial center; it cannot be unital")
    for _ in range(8):
        a = Z @ (rng.standard_normal(k) + 1j * rng.standard_normal(k))
        h = (a + B.star(a)) / 2
        L = np.column_stack([_coords_in(Z, B.product(h, Z[:, j])) for j in range(k)])
        w, V = np.linalg.eig(L)
        gaps = [abs(w[i] - w[j]) for i in range(k) for j in range(i + 1, k)]
        if not gaps or min(gaps) > 1e-6:
            break
    else:
        raise ClassificationInconsistent("could not separate the minimal central projections")
    sizes = []
    for j in range(k):
        v = Z @ V[:, j]
        vv = B.product(v, v)
        alpha = np.vdot(v, vv) / np.vdot(v, v)
        if abs(alpha) < 1e-12:
            raise ClassificationInconsistent("central eigenvector is nilpotent")
        p = v / alpha
        if np.linalg.norm(B.product(p, p) - p) > tol * max(1.0, np.linalg.norm(p)):
            raise ClassificationInconsistent("central eigenvector does not normalize to a projection")
        corner = np.column_stack([B.product(B.product(p, np.eye(m)[i]), p) for i in range(m)])
        s = np.linalg.svd(corner, compute_uv=False)
        r = int(np.sum(s > tol * max(1.0, s[0])))
        n = int(round(np.sqrt(r)))
        if n * n != r:
            raise ClassificationInconsistent(f"corner of dimension {r} is not a full matrix block")
        sizes.append(n)
    if sum(n * n for n in sizes) != m:
        raise ClassificationInconsistent(f"blocks {sizes} do not add up to dimension {m}")
    return sorted(sizes)


# -- automorphy --------------------------------------------------------------


def kraus_commutant_eigenspace(k: KrausMap, lam: complex, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal columns (vectorized) spanning {y : y k_i = lam k_i y for all i}."""
    d = k.d
    I = np.eye(d)
    A = np.vstack([np.kron(op.T, I) - lam * np.kron(I, op) for op in k.operators])
    return _null_space(A, tol)


@dataclass(frozen=True)
class AutomorphyReport:
    is_peripherally_automorphic: bool
    max_deviation: float
    witnesses: tuple = ()
    kraus_criterion_agrees: bool | None = None
    kraus_inclusion: bool | None = None
    kraus_equality: bool | None = None
    tol: float = PRODUCT_TOL

    def as_dict(self) -> dict:
        return {
            "is_peripherally_automorphic": self.is_peripherally_automorphic,
            "max_deviation": self.max_deviation,
            "witnesses": [list(w) for w in self.witnesses],
            "kraus_criterion_agrees": self.kraus_criterion_agrees,
            "kraus_inclusion": self.kraus_inclusion,
            "kraus_equality": self.kraus_equality,
        }


def direct_automorphy(B: PeripheralBoundary | None, tol: float = PRODUCT_TOL):
    """Largest ||b_i o b_j - b_i b_j|| over basis pairs, with the worst witnesses."""
    if B is None:
        return True, 0.0, ()
    devs = []
    for i in range(B.dim):
        for j in range(B.dim):
            circ = B.element(B.structure_constants[i, j])
            devs.append((i, j, op_norm(circ - B.basis[i] @ B.basis[j])))
    devs.sort(key=lambda w: -w[2])
    worst = devs[0][2] if devs else 0.0
    return bool(worst <= tol), float(worst), tuple(devs[:3])


def automorphy_check(
    T: Superoperator,
    kraus: KrausMap | None = None,
    boundary: PeripheralBoundary | None = None,
    spectral: SpectralData | None = None,
    tol: float = PRODUCT_TOL,
) -> AutomorphyReport:
    require_cp_contraction(T)
    S = spectral or decompose(T, contractive=True)
    B = boundary if boundary is not None else boundary_or_none(T, S)
    direct, worst, wit = direct_automorphy(B, tol)
    if kraus is None:
        return AutomorphyReport(direct, worst, wit, tol=tol)
    incl = eq = True
    for E in peripheral_eigenspaces(S):
        Cl = kraus_commutant_eigenspace(kraus, E.eigenvalue)
        Ev = span_matrix(E.elements, T.shape.dim)
        if Ev.shape[1]:
            resid = Ev - Cl @ (Cl.conj().T @ Ev) if Cl.size else Ev
            sub = bool(np.linalg.norm(resid, 2) <= tol)
        else:
            sub = True
        incl = incl and sub
        eq = eq and sub and Cl.shape[1] == Ev.shape[1]
    agrees = incl == direct
    if not agrees:
        raise CriterionDisagreement(
            f"direct check says automorphic={direct} but the Kraus criterion says {incl}"
        )
    return AutomorphyReport(direct, worst, wit, agrees, incl, eq, tol)


def pf_maximality_check(
    T: Superoperator, q: AlgElement | None = None, n_samples: int = 50, rng=None, tol: float = 1e-8
) -> dict:
    """Random positive unit-norm fixed points y must satisfy y <= q."""
    v = validate_map(T)
    if abs(v.spectral_radius - 1) > 1e-9:
        return {"passed": True, "note": f"spectral radius {v.spectral_radius:.6g} != 1; vacuous", "checked": 0}
    rng = np.random.default_rng(0) if rng is None else rng
    if q is None:
        q = q_tau(T)
    E1 = eigenspace(T, 1.0).elements
    herm = []
    for b in E1:
        herm.extend([(b + b.adjoint()) / 2, (b - b.adjoint()) * 0.5j])
    candidates = [q]
    for _ in range(n_samples):
        c = rng.standard_normal(len(herm))
        h = sum((ci * hi for ci, hi in zip(c, herm)), T.shape.zero())
        nh = op_norm(h)
        if nh < 1e-12:
            continue
        h = h / nh
        for y in (h, -1 * h):
            if is_positive(y, 1e-12):
                candidates.append(y)
        s = 1.0
        while s > 1e-6:
            y = q + s * h
            if is_positive(y, 1e-12):
                candidates.append(y)
                break
            s /= 2
    worst = 0.0
    for y in candidates:
        y = y / op_norm(y)
        gap = min(np.linalg.eigvalsh((blk + blk.conj().T) / 2)[0] for blk in (q - y).blocks)
        if gap < -tol:
            raise MaximalityViolation(f"fixed point not dominated by q_tau (min eigenvalue {gap:.3e})")
        worst = min(worst, float(gap))
    return {"passed": True, "note": "", "checked": len(candidates), "min_gap": worst}


def multiplicative_domain(T: Superoperator, rho: AlgElement | None = None, tol: float = 1e-9) -> list[AlgElement]:
    """Kernel of the dissipation forms tr(rho (tau(x*x) - tau(x)*tau(x))) and its x* twin."""
    shape = T.shape
    if rho is None:
        rho = shape.identity() / shape.size
    for b in rho.blocks:
        if np.linalg.eigvalsh((b + b.conj().T) / 2)[0] <= 1e-12:
            raise StateNotFaithful("the reference state must be full rank")
    units = shape.matrix_units()
    images = [apply(T, e) for e in units]
    D = shape.dim

    def tr(x: AlgElement) -> complex:
        return sum(np.trace(r @ b) for r, b in zip(rho.blocks, x.blocks))

    G = np.zeros((D, D), dtype=complex)
    for a in range(D):
        for b in range(D):
            G[a, b] = tr(apply(T, units[a].adjoint() @ units[b]) - images[a].adjoint() @ images[b])
    # x -> x^* on coordinates is conj composed with this permutation
    Pi = np.column_stack([e.adjoint().vec for e in units]).real
    G2 = np.conj(Pi.T @ G @ Pi)
    H = (G + G.conj().T) / 2 + (G2 + G2.conj().T) / 2
    w, V = np.linalg.eigh(H)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    return [shape.from_vec(V[:, i]) for i in range(D) if w[i] <= tol * scale]


def restricted_automorphism_check(
    T: Superoperator, B: PeripheralBoundary, tol: float = PRODUCT_TOL
) -> dict:
    """tau maps the boundary onto itself and respects o."""
    m = B.dim
    try:
        R = np.column_stack([B.coords(apply(T, b), tol) for b in B.basis])
    except TheoryViolation as exc:
        raise AutomorphismViolation(str(exc)) from exc
    worst = 0.0
    eye = np.eye(m)
    for i in range(m):
        for j in range(m):
            lhs = R @ B.structure_constants[i, j]
            rhs = B.product(R @ eye[i], R @ eye[j])
            worst = max(worst, B.element(lhs - rhs).norm())
    smin = float(np.linalg.svd(R, compute_uv=False)[-1])
    if worst > tol:
        raise AutomorphismViolation(f"tau(x o y) != tau(x) o tau(y): residual {worst:.3e}")
    if smin <= tol:
        raise AutomorphismViolation(f"tau is singular on the boundary (sigma_min {smin:.3e})")
    return {"passed": True, "homomorphism_residual": worst, "sigma_min": smin, "matrix": R}


def pp_chain(T: Superoperator) -> dict:
    """The four booleans of the Perron-Frobenius equivalence."""
    S = decompose(T, contractive=True)
    q = q_tau(T, S)
    E1 = eigenspace(T, 1.0)
    B = boundary_or_none(T, S)
    unital_ok = False
    if B is not None:
        try:
            verify_cstar_axioms(B, n_samples=10)
            unital_ok = True
        except AxiomViolation:
            unital_ok = False
    flags = {
        "q_nonzero": bool(op_norm(q) > 1e-9),
        "fixed_point": E1.dim > 0,
        "boundary_nontrivial": B is not None,
        "boundary_unital": unital_ok,
    }
    flags["consistent"] = len(set(flags.values())) == 1
    return flags


__all__ = [
    "PeripheralBoundary",
    "AutomorphyReport",
    "q_tau",
    "ce_product_spectral",
    "ce_product_iterative",
    "cross_peripheral_residual",
    "assemble_boundary",
    "build_boundary",
    "boundary_or_none",
    "verify_cstar_axioms",
    "center",
    "classify",
    "kraus_commutant_eigenspace",
    "direct_automorphy",
    "automorphy_check",
    "pf_maximality_check",
    "multiplicative_domain",
    "restricted_automorphism_check",
    "pp_chain",
]
