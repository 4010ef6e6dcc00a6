"""Multi-matrix algebras, their elements, and linear maps on them.

An algebra ``M_{d_1} + ... + M_{d_b}`` is described by :class:`AlgebraShape`.
Elements are tuples of square blocks. Linear maps are stored as
:class:`Superoperator` matrices acting on vectorized elements, where each
block is vectorized by column stacking and the block vectors are
concatenated in shape order. With this convention

    vec(a @ x @ b) == kron(b.T, a) @ vec(x)

for a single block, which is what every conversion below relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._config import resolve_tol
from .errors import NotCompletelyPositive, ShapeMismatch


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AlgebraShape:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims or any(d < 1 for d in dims):
            raise ShapeMismatch(f"invalid block dimensions {self.block_dims!r}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def of(cls, *dims: int) -> "AlgebraShape":
        return cls(tuple(dims))

    @property
    def dim(self) -> int:
        """Complex dimension D = sum of d_i**2."""
        return sum(d * d for d in self.block_dims)

    @property
    def size(self) -> int:
        """Size of the full matrix algebra the blocks embed into."""
        return sum(self.block_dims)

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def is_single_block(self) -> bool:
        return len(self.block_dims) == 1

    @property
    def is_commutative(self) -> bool:
        return all(d == 1 for d in self.block_dims)

    def vec_slices(self) -> list[slice]:
        out, start = [], 0
        for d in self.block_dims:
            out.append(slice(start, start + d * d))
            start += d * d
        return out

    def block_offsets(self) -> list[int]:
        return list(np.cumsum((0,) + self.block_dims[:-1]))

    def __add__(self, other: "AlgebraShape") -> "AlgebraShape":
        return AlgebraShape(self.block_dims + other.block_dims)

    # constructors for elements

    def identity(self) -> "AlgElement":
        return AlgElement(self, tuple(np.eye(d) for d in self.block_dims))

    def zero(self) -> "AlgElement":
        return AlgElement(self, tuple(np.zeros((d, d)) for d in self.block_dims))

    def from_vec(self, v) -> "AlgElement":
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.size != self.dim:
            raise ShapeMismatch(f"vector of length {v.size} for algebra of dim {self.dim}")
        blocks = tuple(
            v[s].reshape(d, d, order="F") for s, d in zip(self.vec_slices(), self.block_dims)
        )
        return AlgElement(self, blocks)

    def matrix_units(self) -> list["AlgElement"]:
        """Orthonormal basis (trace inner product), in vectorization order."""
        return [self.from_vec(e) for e in np.eye(self.dim)]

    def from_full(self, m) -> "AlgElement":
        """Compress an ambient ``size x size`` matrix onto the diagonal blocks."""
        m = np.asarray(m, dtype=complex)
        blocks = []
        for off, d in zip(self.block_offsets(), self.block_dims):
            blocks.append(m[off : off + d, off : off + d])
        return AlgElement(self, tuple(blocks))

    def random_element(self, rng: np.random.Generator) -> "AlgElement":
        v = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return self.from_vec(v)

    def element(self, *blocks) -> "AlgElement":
        return AlgElement(self, tuple(np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks))


@dataclass(frozen=True, eq=False)
class AlgElement:
    shape: AlgebraShape
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(_frozen(b) for b in self.blocks)
        if len(blocks) != self.shape.n_blocks:
            raise ShapeMismatch(f"{len(blocks)} blocks given for shape {self.shape.block_dims}")
        for b, d in zip(blocks, self.shape.block_dims):
            if b.shape != (d, d):
                raise ShapeMismatch(f"block of shape {b.shape}, expected {(d, d)}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def vec(self) -> np.ndarray:
        return np.concatenate([b.reshape(-1, order="F") for b in self.blocks])

    @property
    def full(self) -> np.ndarray:
        """Block-diagonal embedding into the ambient matrix algebra."""
        out = np.zeros((self.shape.size, self.shape.size), dtype=complex)
        for off, b in zip(self.shape.block_offsets(), self.blocks):
            out[off : off + b.shape[0], off : off + b.shape[0]] = b
        return out

    @property
    def H(self) -> "AlgElement":
        return self.adjoint()

    def adjoint(self) -> "AlgElement":
        return AlgElement(self.shape, tuple(b.conj().T for b in self.blocks))

    def norm(self) -> float:
        return op_norm(self)

    def _check(self, other):
        if not isinstance(other, AlgElement) or other.shape != self.shape:
            raise ShapeMismatch("elements live in different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgElement(self.shape, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._check(other)
        return AlgElement(self.shape, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return AlgElement(self.shape, tuple(-b for b in self.blocks))

    def __mul__(self, c):
        if isinstance(c, AlgElement):
            return NotImplemented
        return AlgElement(self.shape, tuple(c * b for b in self.blocks))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        self._check(other)
        return AlgElement(self.shape, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def allclose(self, other, atol=1e-10) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.vec - other.vec), initial=0.0) <= atol)

    def __repr__(self):
        inner = ", ".join(np.array2string(b, precision=4, suppress_small=True) for b in self.blocks)
        return f"AlgElement({self.shape.block_dims}, [{inner}])"


def op_norm(x: AlgElement) -> float:
    """Operator norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) for b in x.blocks)


def is_positive(x: AlgElement, tol=None) -> bool:
    tol = resolve_tol(tol)
    for b in x.blocks:
        if np.max(np.abs(b - b.conj().T), initial=0.0) > tol:
            return False
        if np.linalg.eigvalsh((b + b.conj().T) / 2)[0] < -tol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class Superoperator:
    shape: AlgebraShape
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        D = self.shape.dim
        if m.shape != (D, D):
            raise ShapeMismatch(f"superoperator of shape {m.shape}, expected {(D, D)}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "Superoperator":
        return cls(shape, np.eye(shape.dim))

    @classmethod
    def from_function(cls, shape: AlgebraShape, fn) -> "Superoperator":
        cols = [fn(e).vec for e in shape.matrix_units()]
        return cls(shape, np.column_stack(cols))

    def __call__(self, x: AlgElement) -> AlgElement:
        return apply(self, x)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if other.shape != self.shape:
            raise ShapeMismatch("composing maps on different algebras")
        return Superoperator(self.shape, self.matrix @ other.matrix)

    def __add__(self, other):
        return Superoperator(self.shape, self.matrix + other.matrix)

    def __sub__(self, other):
        return Superoperator(self.shape, self.matrix - other.matrix)

    def __mul__(self, c):
        return Superoperator(self.shape, c * self.matrix)

    __rmul__ = __mul__

    def power(self, n: int) -> "Superoperator":
        return Superoperator(self.shape, np.linalg.matrix_power(self.matrix, n))

    def unit_image(self) -> AlgElement:
        return apply(self, self.shape.identity())


def apply(T: Superoperator, x: AlgElement) -> AlgElement:
    if x.shape != T.shape:
        raise ShapeMismatch("map and element live on different algebras")
    return T.shape.from_vec(T.matrix @ x.vec)


def power_apply(T: Superoperator, x: AlgElement, n: int) -> AlgElement:
    if n < 0:
        raise ValueError("n must be nonnegative")
    v = x.vec
    for _ in range(n):
        v = T.matrix @ v
    return T.shape.from_vec(v)


@dataclass(frozen=True, eq=False)
class KrausMap:
    """tau(x) = sum_i k_i^* x k_i on a single matrix block."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(_frozen(k) for k in self.operators)
        if not ops:
            raise ShapeMismatch("a Kraus map needs at least one operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise ShapeMismatch(f"Kraus operators of mixed shapes {k.shape} vs {(d, d)}")
        object.__setattr__(self, "operators", ops)

    @property
    def d(self) -> int:
        return self.operators[0].shape[0]

    @property
    def shape(self) -> AlgebraShape:
        return AlgebraShape((self.d,))

    def __len__(self):
        return len(self.operators)

    def unit_image(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.operators)

    def is_contractive(self, tol=None) -> bool:
        tol = resolve_tol(tol)
        return bool(np.linalg.eigvalsh(np.eye(self.d) - self.unit_image())[0] >= -tol)

    def is_unital(self, tol=None) -> bool:
        tol = resolve_tol(tol)
        return bool(np.linalg.norm(self.unit_image() - np.eye(self.d), 2) <= tol)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """C = sum_ij E_ij (x) tau(E_ij) for a map on M_d."""

    d: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def shape(self) -> AlgebraShape:
        return AlgebraShape((self.d,))


def kraus_to_superop(k: KrausMap) -> Superoperator:
    m = sum(np.kron(op.T, op.conj().T) for op in k.operators)
    return Superoperator(k.shape, m)


def _choi_of_callable(n: int, fn) -> np.ndarray:
    C = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1.0
            C[i * n : (i + 1) * n, j * n : (j + 1) * n] = fn(E)
    return C


def superop_choi_roundtrip(T: Superoperator) -> ChoiMatrix:
    """Choi matrix of a map on a single block."""
    if not T.shape.is_single_block:
        raise ShapeMismatch("Choi matrices are defined here for single-block algebras")
    d = T.shape.block_dims[0]
    return ChoiMatrix(d, _choi_of_callable(d, lambda E: apply(T, T.shape.element(E)).blocks[0]))


to_choi = superop_choi_roundtrip


def extended_choi(T: Superoperator) -> np.ndarray:
    """Choi matrix of T extended by zero to the ambient full matrix algebra.

    The extension compresses onto the diagonal blocks, applies T and embeds
    back; it is CP exactly when T is.
    """
    shape = T.shape
    return _choi_of_callable(shape.size, lambda E: apply(T, shape.from_full(E)).full)


def choi_to_kraus(C: ChoiMatrix, tol=1e-9, threshold=1e-10) -> KrausMap:
    """Kraus operators from the eigenfactorization of a PSD Choi matrix."""
    d = C.d
    H = (C.matrix + C.matrix.conj().T) / 2
    if np.max(np.abs(H - C.matrix), initial=0.0) > tol:
        raise NotCompletelyPositive("Choi matrix is not Hermitian")
    w, V = np.linalg.eigh(H)
    if w[0] < -tol:
        raise NotCompletelyPositive(f"Choi matrix has eigenvalue {w[0]:.3e}")
    ops = []
    for mu, v in zip(w[::-1], V[:, ::-1].T):
        if mu <= threshold:
            break
        A = (np.sqrt(mu) * v).reshape(d, d).T
        ops.append(A.conj().T)
    if not ops:
        ops = [np.zeros((d, d))]
    return KrausMap(tuple(ops))


def schur_superop(m) -> Superoperator:
    """x -> m * x (entrywise) on M_d."""
    m = np.asarray(m, dtype=complex)
    return Superoperator(AlgebraShape((m.shape[0],)), np.diag(m.reshape(-1, order="F")))


def conjugation_superop(u) -> Superoperator:
    """x -> u^* x u."""
    return kraus_to_superop(KrausMap((np.asarray(u, dtype=complex),)))


@dataclass(frozen=True)
class MapValidation:
    is_adjoint_preserving: bool
    is_cp: bool
    is_contractive: bool
    is_unital: bool
    spectral_radius: float
    min_choi_eigenvalue: float

    @property
    def is_cp_contraction(self) -> bool:
        return self.is_cp and self.is_contractive

    def as_dict(self) -> dict:
        return {
            "is_adjoint_preserving": self.is_adjoint_preserving,
            "is_cp": self.is_cp,
            "is_contractive": self.is_contractive,
            "is_unital": self.is_unital,
            "spectral_radius": self.spectral_radius,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
        }


def validate_map(T: Superoperator, tol=None) -> MapValidation:
    tol = resolve_tol(tol)
    C = extended_choi(T)
    herm = bool(np.max(np.abs(C - C.conj().T), initial=0.0) <= tol)
    min_eig = float(np.linalg.eigvalsh((C + C.conj().T) / 2)[0])
    is_cp = herm and min_eig >= -tol
    one = T.shape.identity()
    t1 = apply(T, one)
    contractive = is_positive(one - t1, tol)
    unital = op_norm(t1 - one) <= tol
    radius = float(np.max(np.abs(np.linalg.eigvals(T.matrix)), initial=0.0))
    return MapValidation(herm, is_cp, contractive, unital, radius, min_eig)


def require_cp_contraction(T: Superoperator, tol=None) -> MapValidation:
    from .errors import NotCPContraction

    v = validate_map(T, tol)
    if not v.is_cp:
        raise NotCPContraction(f"map is not completely positive (min Choi eigenvalue {v.min_choi_eigenvalue:.3e})")
    if not v.is_contractive:
        raise NotCPContraction("map is not contractive: tau(1) is not dominated by 1")
    return v


def hs_orthonormalize(vectors: Sequence[np.ndarray], tol=1e-10) -> np.ndarray:
    """Orthonormal columns spanning the given vectors (rank-revealing SVD)."""
    if len(vectors) == 0:
        return np.zeros((0, 0), dtype=complex)
    A = np.column_stack(vectors)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return U[:, :r]


def span_matrix(elements: Sequence[AlgElement], dim: int | None = None) -> np.ndarray:
    if len(elements) == 0:
        return np.zeros((dim or 0, 0), dtype=complex)
    return np.column_stack([e.vec for e in elements])


__all__ = [
    "AlgebraShape",
    "AlgElement",
    "Superoperator",
    "KrausMap",
    "ChoiMatrix",
    "MapValidation",
    "op_norm",
    "is_positive",
    "kraus_to_superop",
    "superop_choi_roundtrip",
    "to_choi",
    "extended_choi",
    "choi_to_kraus",
    "schur_superop",
    "conjugation_superop",
    "validate_map",
    "require_cp_contraction",
    "apply",
    "power_apply",
    "hs_orthonormalize",
    "span_matrix",
]
