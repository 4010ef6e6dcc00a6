"""Continuous-time dynamics: GKLS generators and their peripheral boundary.

A quantum dynamical semigroup tau_t = exp(tL) is stored through its
generator L, a superoperator in the same column-stacking coordinates as
:mod:`ppboundary.algebra`. Peripheral eigenvalues of tau_t correspond to
purely imaginary eigenvalues ia of L, and the continuous Choi-Effros
product x o y (x in E_a, y in E_b) is the component of xy at i(a+b).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import (
    AlgElement,
    AlgebraShape,
    Superoperator,
    apply,
    op_norm,
    span_matrix,
    validate_map,
)
from .boundary import (
    PRODUCT_TOL,
    PeripheralBoundary,
    _check_eigen,
    _graded_component,
    assemble_boundary,
    classify,
    direct_automorphy,
)
from .errors import (
    AlreadyMarkov,
    BoundaryTrivial,
    DimensionViolation,
    EquivalenceViolation,
    IdealViolation,
    NonHermitianHamiltonian,
    NotCPContraction,
    ShapeMismatch,
    SuspectSpectrum,
    TheoryViolation,
)
from .spectral import SpectralData, decompose, eigenspace, subspace_equal

DEFAULT_TIMES = (0.1, 0.5, 1.0, 2.0, 5.0)
LONG_TIMES = (10.0, 20.0, 40.0)
FREQ_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class Generator:
    """Generator L of tau_t = exp(tL) on a multi-matrix algebra.

    ``gkls`` holds ``(H, jumps)`` when the generator was assembled from a
    Hamiltonian and jump operators, in which case complete positivity of
    every tau_t is guaranteed. Raw superoperators are only checked on
    sampled times.
    """

    shape: AlgebraShape
    matrix: np.ndarray
    gkls: tuple | None = None

    def __post_init__(self):
        M = np.array(self.matrix, dtype=complex)
        if M.shape != (self.shape.dim, self.shape.dim):
            raise ShapeMismatch(f"generator of shape {M.shape} for algebra dimension {self.shape.dim}")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def superop(self) -> Superoperator:
        return Superoperator(self.shape, self.matrix)

    def __call__(self, x: AlgElement) -> AlgElement:
        return apply(self.superop, x)

    def unit_image(self) -> AlgElement:
        return self(self.shape.identity())

    @property
    def is_markov(self) -> bool:
        return op_norm(self.unit_image()) <= 1e-10

    @property
    def guaranteed_cp(self) -> bool:
        return self.gkls is not None


def _check_hermitian(H: np.ndarray, tol: float = 1e-10):
    if np.max(np.abs(H - H.conj().T), initial=0.0) > tol:
        raise NonHermitianHamiltonian("Hamiltonian is not Hermitian")


def gkls_superop(H, jumps: Sequence = ()) -> np.ndarray:
    """Superoperator of x -> i[H,x] + sum V^* x V - (V^*V x + x V^*V)/2."""
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    I = np.eye(d)
    L = 1j * (np.kron(I, H) - np.kron(H.T, I))
    for V in jumps:
        V = np.asarray(V, dtype=complex)
        VV = V.conj().T @ V
        L = L + np.kron(V.T, V.conj().T) - 0.5 * np.kron(I, VV) - 0.5 * np.kron(VV.T, I)
    return L


def gkls_assemble(H, jumps: Sequence = (), shape: AlgebraShape | None = None) -> Generator:
    """GKLS generator on M_d (``shape`` defaults to a single block)."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    _check_hermitian(H)
    jumps = tuple(np.atleast_2d(np.asarray(V, dtype=complex)) for V in jumps)
    for V in jumps:
        if V.shape != H.shape:
            raise ShapeMismatch(f"jump operator of shape {V.shape}, Hamiltonian {H.shape}")
    shape = shape or AlgebraShape((H.shape[0],))
    if shape.n_blocks != 1 or shape.block_dims[0] != H.shape[0]:
        raise ShapeMismatch("GKLS assembly is only defined on a single matrix block")
    return Generator(shape, gkls_superop(H, jumps), (H, jumps))


def evolve(L: Generator, t: float) -> Superoperator:
    """tau_t = exp(tL) (scipy's scaling-and-squaring Pade exponential)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return Superoperator(L.shape, scipy.linalg.expm(t * np.asarray(L.matrix)))


@dataclass(frozen=True)
class QDSVerdict:
    passed: bool
    failures: tuple = ()
    sampled: bool = True
    markov: bool = False
    times: tuple = ()

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failures": [list(f) for f in self.failures],
            "sampled": self.sampled,
            "markov": self.markov,
            "times": list(self.times),
        }


def validate_qds(L: Generator, sample_ts: Sequence[float] = DEFAULT_TIMES, tol: float = 1e-9) -> QDSVerdict:
    """CP and contractivity of tau_t at each sampled time; failures are returned, not raised."""
    ts = tuple(float(t) for t in sample_ts)
    if not ts or any(t <= 0 for t in ts):
        raise ValueError("sample times must be positive")
    failures = []
    markov = L.is_markov
    for t in ts:
        v = validate_map(evolve(L, t), tol)
        if not v.is_cp:
            failures.append((t, "cp", v.min_choi_eigenvalue))
        if not v.is_contractive:
            failures.append((t, "contractive", None))
        if v.is_unital != markov:
            failures.append((t, "unital", v.is_unital))
    return QDSVerdict(not failures, tuple(failures), not L.guaranteed_cp, markov, ts)


def require_qds(L: Generator):
    if L.guaranteed_cp:
        return
    v = validate_qds(L)
    if not v.passed:
        raise NotCPContraction(f"generator does not produce a CP contraction semigroup: {v.failures}")


# -- spectrum ----------------------------------------------------------------


def decompose_generator(L: Generator, tol: float | None = None, validated: bool = True) -> SpectralData:
    S = decompose(L.superop, tol_periph=tol, contractive=validated, mode="continuous")
    if validated:
        worst = float(np.max(S.eigenvalues.real, initial=-np.inf))
        if worst > 1e-6:
            raise SuspectSpectrum(f"contraction generator has an eigenvalue with real part {worst:.3e}")
    return S


def peripheral_frequencies(L: Generator, tol: float | None = None, with_multiplicity: bool = False):
    """Imaginary parts of the purely imaginary eigenvalues of L."""
    S = decompose_generator(L, tol)
    out = []
    for c in sorted(S.peripheral_clusters, key=lambda c: c.value.imag):
        a = float(c.value.imag)
        out.append((a, c.multiplicity) if with_multiplicity else a)
    return out


@dataclass(frozen=True)
class ContinuousEigenspace:
    frequency: float
    elements: tuple[AlgElement, ...]

    @property
    def dim(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def continuous_eigenspace(L: Generator, a: float, tol: float | None = None) -> ContinuousEigenspace:
    E = eigenspace(L.superop, 1j * a, tol)
    return ContinuousEigenspace(float(a), E.elements)


def continuous_eigenspaces(L: Generator, S: SpectralData | None = None) -> list[ContinuousEigenspace]:
    S = S or decompose_generator(L)
    freqs = sorted(float(c.value.imag) for c in S.peripheral_clusters)
    return [continuous_eigenspace(L, a) for a in freqs]


def fixed_points(L: Generator) -> ContinuousEigenspace:
    return continuous_eigenspace(L, 0.0)


# -- product -----------------------------------------------------------------


def _long_time_limit(L: Generator, z: AlgElement, freq: float, times: Sequence[float]) -> tuple[AlgElement, float]:
    """e^{-i freq t} tau_t(z) at each time; returns the last value and last successive difference."""
    vals = [np.exp(-1j * freq * t) * evolve(L, t)(z) for t in times]
    diff = op_norm(vals[-1] - vals[-2]) if len(vals) > 1 else 0.0
    return vals[-1], diff


def ce_product_continuous(
    L: Generator,
    x: AlgElement,
    a: float,
    y: AlgElement,
    b: float,
    spectral: SpectralData | None = None,
    times: Sequence[float] | None = LONG_TIMES,
    tol: float = PRODUCT_TOL,
) -> AlgElement:
    """x o y for x in E_a and y in E_b.

    The result is the spectral component of xy at i(a+b). When ``times`` is
    given, it is cross-checked against e^{-i(a+b)t} tau_t(xy) for large t;
    pass ``times=None`` to skip the cross-check.
    """
    S = spectral or decompose_generator(L)
    _check_eigen(L.superop, x, 1j * a, tol)
    _check_eigen(L.superop, y, 1j * b, tol)
    z = _graded_component(S, x @ y, 1j * (a + b), tol)
    r = op_norm(L(z) - 1j * (a + b) * z)
    if r > tol * max(1.0, op_norm(z)):
        raise TheoryViolation(f"product is not in E_{a + b:g} (residual {r:.3e})")
    if times:
        lim, diff = _long_time_limit(L, x @ y, a + b, times)
        if diff > 1e-6:
            raise TheoryViolation(f"e^(-i(a+b)t) tau_t(xy) has not settled: last difference {diff:.3e}")
        gap = op_norm(lim - z)
        if gap > 1e-6:
            raise TheoryViolation(f"long-time limit and spectral product differ by {gap:.3e}")
    return z


def build_boundary_continuous(L: Generator, times: Sequence[float] | None = None) -> PeripheralBoundary:
    """Boundary of the semigroup, with basis labels a (frequencies)."""
    require_qds(L)
    S = decompose_generator(L)
    spaces = continuous_eigenspaces(L, S)
    if not any(len(E) for E in spaces):
        raise BoundaryTrivial("no peripheral spectrum: the boundary is {0}")
    one = L.shape.identity()
    i0 = S.find_peripheral(0.0)
    unit = S.project(i0, one) if i0 is not None else L.shape.zero()
    B = assemble_boundary(
        L.shape,
        [(E.frequency, E.elements) for E in spaces],
        lambda x, p, y, q: ce_product_continuous(L, x, p.real, y, q.real, S, times),
        unit,
        mode="continuous",
    )
    return replace(B, classification=tuple(classify(B)))


def semigroup_consistency(L: Generator, t0: float = 1.0, tol: float = 1e-6) -> bool:
    """Peripheral span of the discrete map tau_{t0} equals the continuous one."""
    from .spectral import peripheral_span

    cont = [e for E in continuous_eigenspaces(L) for e in E.elements]
    disc = peripheral_span(decompose(evolve(L, t0), contractive=True))
    return subspace_equal(cont, disc, tol)


# -- ideals and dimension ----------------------------------------------------


@dataclass(frozen=True)
class IdealReport:
    frequency: float
    basis: tuple[AlgElement, ...]
    ideal_residual: float
    antiiso_residual: float
    passed: bool

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_dict(self) -> dict:
        return {
            "frequency": self.frequency,
            "dim": self.dim,
            "ideal_residual": self.ideal_residual,
            "antiiso_residual": self.antiiso_residual,
            "passed": self.passed,
        }


def _span_basis(elements: Sequence[AlgElement], shape: AlgebraShape, tol: float = 1e-9) -> list[AlgElement]:
    if not elements:
        return []
    A = span_matrix(elements, shape.dim)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return [shape.from_vec(U[:, i]) for i in range(r)]


def _residual_out_of(x: AlgElement, basis: Sequence[AlgElement]) -> float:
    if not basis:
        return float(np.linalg.norm(x.vec))
    Q = span_matrix(basis)
    v = x.vec
    return float(np.linalg.norm(v - Q @ (Q.conj().T @ v)))


def ideal_Ia(L: Generator, a: float, tol: float = PRODUCT_TOL) -> IdealReport:
    """I_a = span{x^* o y : x, y in E_a}, with its ideal and adjoint properties checked."""
    S = decompose_generator(L)
    Ea = continuous_eigenspace(L, a).elements
    if not Ea:
        return IdealReport(float(a), (), 0.0, 0.0, True)
    prod = lambda x, p, y, q: ce_product_continuous(L, x, p, y, q, S, times=None)
    gens = [prod(x.adjoint(), -a, y, a) for x in Ea for y in Ea]
    I = _span_basis(gens, L.shape)
    F = fixed_points(L).elements
    worst = 0.0
    for f in F:
        for g in I:
            worst = max(worst, _residual_out_of(prod(f, 0.0, g, 0.0), I))
            worst = max(worst, _residual_out_of(prod(g, 0.0, f, 0.0), I))
    # x -> x^* is an anti-isomorphism E_a -> E_{-a}
    anti = 0.0
    for x in Ea:
        r = op_norm(L(x.adjoint()) + 1j * a * x.adjoint())
        anti = max(anti, r)
    Em = continuous_eigenspace(L, -a).elements
    if len(Em) != len(Ea):
        anti = max(anti, 1.0)
    for x in Ea:
        for y in Ea:
            lhs = prod(x, a, y.adjoint(), -a).adjoint()
            rhs = prod(y, a, x.adjoint(), -a)
            anti = max(anti, op_norm(lhs - rhs))
    passed = worst <= tol and anti <= tol
    if not passed:
        raise IdealViolation(f"I_{a:g} fails: ideal residual {worst:.3e}, adjoint residual {anti:.3e}")
    return IdealReport(float(a), tuple(I), worst, anti, passed)


@dataclass(frozen=True)
class DimensionReport:
    frequency: float
    hypothesis_met: bool
    dim_Ea: int
    dim_F: int
    residual: float
    witness: tuple | None = None

    def as_dict(self) -> dict:
        return {
            "frequency": self.frequency,
            "hypothesis_met": self.hypothesis_met,
            "dim_Ea": self.dim_Ea,
            "dim_F": self.dim_F,
            "residual": self.residual,
        }


def _alternating_search(G: np.ndarray, target: np.ndarray, rng: np.random.Generator, starts: int = 12, sweeps: int = 200):
    """min over (u, w) of || sum_ij conj(u_i) w_j G[i, j] - target ||."""
    n = G.shape[0]
    best = (np.inf, None, None)
    for _ in range(starts):
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        r = np.inf
        for _ in range(sweeps):
            Aw = np.einsum("i,ijk->kj", np.conj(u), G)
            w, *_ = np.linalg.lstsq(Aw, target, rcond=None)
            Au = np.einsum("j,ijk->ki", w, G)
            uc, *_ = np.linalg.lstsq(Au, target, rcond=None)
            u = np.conj(uc)
            r_new = float(np.linalg.norm(Au @ uc - target))
            if abs(r - r_new) < 1e-14:
                r = r_new
                break
            r = r_new
        if r < best[0]:
            best = (r, u, w)
        if r <= 1e-10:
            break
    return best


def dimension_check(
    spaces_a: Sequence[AlgElement],
    fixed: Sequence[AlgElement],
    product,
    unit: AlgElement,
    label: float,
    rng=None,
    tol: float = PRODUCT_TOL,
) -> DimensionReport:
    """Look for v1, v2 in E with v1^* o v2 = unit; if found, dim E must equal dim F."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = len(spaces_a)
    if n == 0:
        return DimensionReport(label, False, 0, len(fixed), np.inf)
    G = np.array([[product(x.adjoint(), y).vec for y in spaces_a] for x in spaces_a])
    r, u, w = _alternating_search(G, unit.vec, rng)
    met = r <= tol
    report = DimensionReport(label, bool(met), n, len(fixed), float(r), (u, w) if met else None)
    if met and n != len(fixed):
        raise DimensionViolation(f"v1^* o v2 = 1 is solvable but dim E = {n} != dim F = {len(fixed)}")
    return report


def dimension_corollary_check(L: Generator, a: float, rng=None, tol: float = PRODUCT_TOL) -> DimensionReport:
    S = decompose_generator(L)
    Ea = continuous_eigenspace(L, a).elements
    F = fixed_points(L).elements
    i0 = S.find_peripheral(0.0)
    unit = S.project(i0, L.shape.identity()) if i0 is not None else L.shape.zero()
    prod = lambda x, y: ce_product_continuous(L, x, -a, y, a, S, times=None)
    return dimension_check(Ea, F, prod, unit, float(a), rng, tol)


def dimension_corollary_check_discrete(T: Superoperator, lam: complex, rng=None, tol: float = PRODUCT_TOL) -> DimensionReport:
    """Discrete analogue: v1, v2 in E_lam with v1^* o v2 = q_tau forces dim E_lam = dim F."""
    from .boundary import ce_product_spectral, q_tau

    S = decompose(T, contractive=True)
    El = eigenspace(T, lam).elements
    F = eigenspace(T, 1.0).elements
    unit = q_tau(T, S)
    prod = lambda x, y: ce_product_spectral(S, x, np.conj(lam), y, lam)
    return dimension_check(El, F, prod, unit, complex(lam), rng, tol)


# -- automorphy --------------------------------------------------------------


@dataclass(frozen=True)
class QMSAutomorphyReport:
    in_multiplicative_domain: bool
    peripherally_automorphic: bool
    squares_fixed: bool
    residuals: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.in_multiplicative_domain == self.peripherally_automorphic == self.squares_fixed

    def as_dict(self) -> dict:
        return {
            "in_multiplicative_domain": self.in_multiplicative_domain,
            "peripherally_automorphic": self.peripherally_automorphic,
            "squares_fixed": self.squares_fixed,
            "consistent": self.consistent,
            "residuals": self.residuals,
        }


def qms_automorphy_check(
    L: Generator, sample_ts: Sequence[float] = (0.5, 1.0, 2.0), tol: float = PRODUCT_TOL
) -> QMSAutomorphyReport:
    """Evaluate three equivalent conditions and require them to agree."""
    from .boundary import multiplicative_domain

    require_qds(L)
    S = decompose_generator(L)
    spaces = continuous_eigenspaces(L, S)
    periph = [e for E in spaces for e in E.elements]
    # (i) peripheral span inside the multiplicative domain of every sampled tau_t
    md_res = 0.0
    for t in sample_ts:
        md = multiplicative_domain(evolve(L, t))
        for x in periph:
            md_res = max(md_res, _residual_out_of(x, md))
    # (ii) x o y = xy on the peripheral basis
    try:
        B = build_boundary_continuous(L, times=None)
    except BoundaryTrivial:
        B = None
    auto, dev, _ = direct_automorphy(B, tol)
    # (iii) x^* x fixed for peripheral eigenvectors
    sq = 0.0
    for E in spaces:
        for x in E.elements:
            sq = max(sq, op_norm(L(x.adjoint() @ x)))
    rep = QMSAutomorphyReport(
        bool(md_res <= 1e-6), bool(auto), bool(sq <= tol),
        {"multiplicative_domain": md_res, "product": dev, "squares": sq},
    )
    if not rep.consistent:
        raise EquivalenceViolation(f"automorphy conditions disagree: {rep.as_dict()}")
    return rep


def unitize_generator(L: Generator) -> Generator:
    """L~(x + c) = (L(x) - c L(1)) + 0 on A + C; the adjoined block is last."""
    if L.is_markov:
        raise AlreadyMarkov("generator already annihilates the unit")
    D = L.shape.dim
    M = np.zeros((D + 1, D + 1), dtype=complex)
    M[:D, :D] = L.matrix
    M[:D, D] = -L.unit_image().vec
    return Generator(L.shape + AlgebraShape((1,)), M)


__all__ = [
    "Generator",
    "QDSVerdict",
    "ContinuousEigenspace",
    "IdealReport",
    "DimensionReport",
    "QMSAutomorphyReport",
    "gkls_superop",
    "gkls_assemble",
    "evolve",
    "validate_qds",
    "require_qds",
    "decompose_generator",
    "peripheral_frequencies",
    "continuous_eigenspace",
    "continuous_eigenspaces",
    "fixed_points",
    "ce_product_continuous",
    "build_boundary_continuous",
    "semigroup_consistency",
    "ideal_Ia",
    "dimension_check",
    "dimension_corollary_check",
    "dimension_corollary_check_discrete",
    "qms_automorphy_check",
    "unitize_generator",
]
