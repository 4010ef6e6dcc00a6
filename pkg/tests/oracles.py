"""Brute-force reference computations, written without the library's code paths.

Everything here works on plain numpy arrays for a single matrix block and
uses the most literal formula available (sums over matrix units, explicit
matrix powers, dense eigensolves).
"""

import numpy as np
import scipy.linalg


def units(d):
    out = []
    for j in range(d):
        for i in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            out.append(e)
    return out


def kraus_apply(ops, x):
    return sum(k.conj().T @ x @ k for k in ops)


def matrix_of(fn, d):
    """Matrix of x -> fn(x) in the basis of matrix units E_ij ordered column by column."""
    cols = [fn(e).reshape(-1, order="F") for e in units(d)]
    return np.column_stack(cols)


def choi_of(fn, d):
    C = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d))
            e[i, j] = 1
            C += np.kron(e, fn(e))
    return C


def power_limit(M, z, lam, n=2000):
    """M^n z / lam^n for a large n."""
    P = np.linalg.matrix_power(M / lam, n)
    return P @ z


def cesaro_projection(M, lam, n=4000):
    """(1/n) sum_k (M/lam)^k: the eigenprojection at lam for power-bounded M."""
    A = M / lam
    acc = np.zeros_like(A)
    P = np.eye(M.shape[0], dtype=complex)
    for _ in range(n):
        acc += P
        P = A @ P
    return acc / n


def null_space(A, tol=1e-9):
    return scipy.linalg.null_space(A, rcond=tol)


def eigvecs_at(M, lam, tol=1e-8):
    return null_space(M - lam * np.eye(M.shape[0]), tol)


def kraus_commutant(ops, lam):
    """{y : y k = lam k y for all k}, one linear equation per matrix entry."""
    d = ops[0].shape[0]
    rows = []
    for k in ops:
        # coefficient of y_{ab} in (y k - lam k y)_{ij}
        A = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                r = i + d * j
                for a in range(d):
                    for b in range(d):
                        c = a + d * b
                        v = 0
                        if a == i:
                            v += k[b, j]
                        if b == j:
                            v -= lam * k[i, a]
                        A[r, c] = v
        rows.append(A)
    return null_space(np.vstack(rows))


def real_dim(mats, tol=1e-9):
    if not mats:
        return 0
    V = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats])
    return int(np.sum(np.linalg.svd(V, compute_uv=False) > tol))


def complex_dim(mats, tol=1e-9):
    if not mats:
        return 0
    V = np.array([m.ravel() for m in mats])
    return int(np.sum(np.linalg.svd(V, compute_uv=False) > tol))


def gkls_apply(H, jumps, x):
    out = 1j * (H @ x - x @ H)
    for V in jumps:
        VV = V.conj().T @ V
        out = out + V.conj().T @ x @ V - 0.5 * (VV @ x + x @ VV)
    return out
