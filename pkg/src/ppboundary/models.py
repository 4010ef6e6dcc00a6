"""Factories for the standard example maps and systems used in tests and the corpus."""

from __future__ import annotations

import numpy as np

from .algebra import (
    AlgebraShape,
    KrausMap,
    Superoperator,
    conjugation_superop,
    kraus_to_superop,
    schur_superop,
)
from .obstruct import OperatorSystem
from .semigroup import Generator, gkls_assemble


def unit(d: int, i: int, j: int) -> np.ndarray:
    """Matrix unit E_ij in M_d (zero-based)."""
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def schur_matrix(c: complex) -> np.ndarray:
    return np.array([[1.0, np.exp(c)], [np.exp(np.conj(c)), 1.0]], dtype=complex)


def schur_map(c: complex) -> Superoperator:
    """Entrywise product with [[1, e^c], [e^conj(c), 1]]; CP iff Re c <= 0."""
    return schur_superop(schur_matrix(c))


def schur_generator(c: complex) -> Generator:
    """d/dt of the Schur semigroup x12 -> e^{ct} x12, x21 -> e^{conj(c) t} x21."""
    m = np.array([[0.0, c], [np.conj(c), 0.0]], dtype=complex)
    return Generator(AlgebraShape((2,)), np.diag(m.reshape(-1, order="F")))


def qtau_kraus() -> KrausMap:
    """tau(x) = x11 diag(1, 1/2)."""
    return KrausMap((unit(2, 0, 0), unit(2, 0, 1) / np.sqrt(2)))


def mixture_kraus(lam: float = 0.5, q=(1.0, 0.5)) -> KrausMap:
    """tau(x) = lam x + (1 - lam) x11 q with q = diag(q)."""
    d = len(q)
    ops = [np.sqrt(lam) * np.eye(d, dtype=complex)]
    ops += [np.sqrt((1 - lam) * qj) * unit(d, 0, j) for j, qj in enumerate(q) if qj > 0]
    return KrausMap(tuple(ops))


def pinching_kraus() -> KrausMap:
    """Finite pinching model on M_6: x -> P x P + sum_j x_{j-2,j-2} E_jj, P = E00 + E11.

    Fixed points are span{E01, E10, P_even, P_odd}; the diagonal is pushed
    two steps down each chain, so boundary products move into both chains.
    """
    P = unit(6, 0, 0) + unit(6, 1, 1)
    return KrausMap((P,) + tuple(unit(6, j - 2, j) for j in range(2, 6)))


def positive_not_cp_map() -> Superoperator:
    """Unital positive map x -> [[(x11+x22)/2, x21], [x12, (x11+x22)/2]]."""
    shape = AlgebraShape((2,))

    def f(x):
        b = x.blocks[0]
        m = (b[0, 0] + b[1, 1]) / 2
        return shape.element([[m, b[1, 0]], [b[0, 1], m]])

    return Superoperator.from_function(shape, f)


def noncontractive_map() -> Superoperator:
    """x -> [[2 x11, -x12], [-x21, 2 x22]]: CP with spectral radius 2."""
    return schur_superop(np.array([[2.0, -1.0], [-1.0, 2.0]]))


def cyclic_shift(d: int = 3) -> np.ndarray:
    u = np.zeros((d, d), dtype=complex)
    for j in range(d):
        u[(j + 1) % d, j] = 1.0
    return u


def cyclic_shift_kraus(d: int = 3) -> KrausMap:
    return KrausMap((cyclic_shift(d),))


def cyclic_shift_diagonal(N: int = 3) -> Superoperator:
    """f -> f o shift on C^N, the finite analog of a rotation."""
    shape = AlgebraShape((1,) * N)
    M = np.zeros((N, N), dtype=complex)
    for j in range(N):
        M[j, (j + 1) % N] = 1.0
    return Superoperator(shape, M)


def zero_map(d: int = 2) -> Superoperator:
    return Superoperator(AlgebraShape((d,)), np.zeros((d * d, d * d)))


def unitary_conjugation(u) -> Superoperator:
    return conjugation_superop(u)


def compression_kraus(d: int = 3, k: int = 2) -> KrausMap:
    """x -> p x p with p the projection onto the first k basis vectors."""
    p = np.diag([1.0] * k + [0.0] * (d - k)).astype(complex)
    return KrausMap((p,))


def hamiltonian_flow(N: int = 3) -> Generator:
    return gkls_assemble(np.diag(np.arange(N, dtype=float)), ())


def decay_generator(a: float = 1.0, q=(1.0, 0.5)) -> Generator:
    """L(x) = a (x11 q - x), i.e. tau_t(x) = e^{-at} x + (1 - e^{-at}) x11 q."""
    d = len(q)
    shape = AlgebraShape((d,))
    Q = np.diag(np.asarray(q, dtype=complex))
    phi = np.zeros(d * d, dtype=complex)
    phi[0] = 1.0
    L = a * (np.outer(Q.reshape(-1, order="F"), phi) - np.eye(d * d))
    return Generator(shape, L)


def dephasing_generator(gamma: float = 1.0, H=None) -> Generator:
    """GKLS with a single Hermitian jump sqrt(gamma) Z on M_2."""
    Z = np.diag([1.0, -1.0])
    H = np.zeros((2, 2)) if H is None else H
    return gkls_assemble(H, [np.sqrt(gamma) * Z])


def kraus_superop(k: KrausMap) -> Superoperator:
    return kraus_to_superop(k)


# -- operator systems --


def pinching_system() -> OperatorSystem:
    return OperatorSystem.from_basis([np.eye(6), unit(6, 0, 1), unit(6, 1, 0)])


def offdiagonal_system() -> OperatorSystem:
    return OperatorSystem.from_basis([unit(2, 0, 1), unit(2, 1, 0)])


def positive_map_boundary_system() -> OperatorSystem:
    return OperatorSystem.from_basis([np.eye(2), [[0, 1], [1, 0]], [[0, -1], [1, 0]]])


def diagonal_system(m: int) -> OperatorSystem:
    return OperatorSystem.from_basis([unit(m, i, i) for i in range(m)])


def full_matrix_system(d: int = 2) -> OperatorSystem:
    return OperatorSystem.from_basis([unit(d, i, j) for i in range(d) for j in range(d)])
