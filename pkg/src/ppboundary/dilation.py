"""Finite Stinespring towers for discrete CP maps.

For tau(x) = sum_i k_i^* x k_i on M_d, the map V h = sum_i k_i h (x) e_i
satisfies V^*(x (x) 1)V = tau(x). Level j of the tower is
H (x) (C^n)^{(x) j} and the step from level j to j + 1 is W_j = V (x) 1.
In the dilation theta, the level-j space is the range of theta^j(p) and
theta^j(y) acts there as y (x) 1, so every quantity we need reduces to
products of the W_j. Those products are applied through reshapes and
never formed as large dense operators unless a report asks for one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import KrausMap, Superoperator, kraus_to_superop, power_apply
from .errors import CompressionMismatch, NotAnEigenvector, TowerTooLarge

MAX_TOWER = 4096


@dataclass(frozen=True, eq=False)
class StinespringTower:
    kraus: KrausMap
    levels: int
    ops: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.kraus.d

    @property
    def n(self) -> int:
        return len(self.kraus)

    def level_dim(self, j: int) -> int:
        return self.d * self.n**j

    @property
    def V(self) -> np.ndarray:
        """The d*n x d matrix with rows indexed by (a, i)."""
        return np.transpose(self.ops, (1, 0, 2)).reshape(self.d * self.n, self.d)

    @cached_property
    def is_unital(self) -> bool:
        return self.kraus.is_unital(1e-10)

    @cached_property
    def superop(self) -> Superoperator:
        return kraus_to_superop(self.kraus)

    @cached_property
    def unital_extension(self) -> "StinespringTower":
        """Tower of a unital map on M_{d+1} whose corner at H is tau."""
        if self.is_unital:
            return self
        return build_tower(unital_kraus_extension(self.kraus), self.levels)

    # -- isometries between levels --

    def step(self, M: np.ndarray, j: int) -> np.ndarray:
        """W_j M for M with d n^j rows."""
        d, n = self.d, self.n
        c = M.shape[1]
        A = M.reshape(d, n**j, c)
        return np.einsum("iab,brc->airc", self.ops, A).reshape(d * n ** (j + 1), c)

    def step_adjoint(self, M: np.ndarray, j: int) -> np.ndarray:
        """W_j^* M for M with d n^(j+1) rows."""
        d, n = self.d, self.n
        c = M.shape[1]
        A = M.reshape(d, n, n**j, c)
        return np.einsum("iab,airc->brc", self.ops.conj(), A).reshape(d * n**j, c)

    def embed(self, M: np.ndarray, lo: int, hi: int) -> np.ndarray:
        """W_{hi-1} ... W_{lo} M."""
        for j in range(lo, hi):
            M = self.step(M, j)
        return M

    def embedding(self, lo: int, hi: int) -> np.ndarray:
        return self.embed(np.eye(self.level_dim(lo), dtype=complex), lo, hi)

    def amplify(self, x: np.ndarray, j: int, M: np.ndarray) -> np.ndarray:
        """(x (x) 1) M at level j."""
        d, c = self.d, M.shape[1]
        return (x @ M.reshape(d, -1)).reshape(d * self.n**j, c)


def unital_kraus_extension(k: KrausMap, tol: float = 1e-10) -> KrausMap:
    """Kraus operators {k_i + 0, e r_j^*, E} on M_{d+1}, with sum r_j r_j^* = 1 - tau(1)."""
    d = k.d
    defect = np.eye(d) - k.unit_image()
    w, U = np.linalg.eigh((defect + defect.conj().T) / 2)
    ops = []
    for kk in k.operators:
        K = np.zeros((d + 1, d + 1), dtype=complex)
        K[:d, :d] = kk
        ops.append(K)
    for lam, u in zip(w, U.T):
        if lam > tol:
            R = np.zeros((d + 1, d + 1), dtype=complex)
            R[d, :d] = np.sqrt(lam) * u.conj()
            ops.append(R)
    E = np.zeros((d + 1, d + 1), dtype=complex)
    E[d, d] = 1.0
    ops.append(E)
    return KrausMap(tuple(ops))


def build_tower(k: KrausMap, N: int = 4) -> StinespringTower:
    if N < 1:
        raise ValueError("a tower needs at least one level")
    size = k.d * len(k) ** N
    if size > MAX_TOWER:
        raise TowerTooLarge(f"top level has dimension {size} > {MAX_TOWER}")
    ops = np.array(k.operators)
    tw = StinespringTower(k, N, ops)
    V = tw.V
    tau1 = V.conj().T @ V
    if np.linalg.norm(tau1 - k.unit_image(), 2) > 1e-12:
        raise CompressionMismatch("V^*V differs from sum k^*k")
    return tw


def tower_compression(tw: StinespringTower, x, n: int, check: bool = True) -> np.ndarray:
    """p theta^n(x) p = W^*(x (x) 1)W along the tower, checked against tau^n(x)."""
    x = np.asarray(x, dtype=complex)
    if n < 0 or n > tw.levels:
        raise ValueError(f"n must lie in [0, {tw.levels}]")
    W = tw.embedding(0, n)
    out = W.conj().T @ tw.amplify(x, n, W)
    if check:
        shape = tw.superop.shape
        ref = power_apply(tw.superop, shape.element(x), n).blocks[0]
        err = float(np.max(np.abs(out - ref), initial=0.0))
        if err > 1e-12 * max(1.0, float(np.max(np.abs(ref), initial=0.0))):
            raise CompressionMismatch(f"tower compression differs from tau^{n}(x) by {err:.3e}")
    return out


def level_compression(tw: StinespringTower, x, n: int, j: int) -> np.ndarray:
    """Compression of theta^n(x) to the level-j subspace, as a d n^j square matrix."""
    x = np.asarray(x, dtype=complex)
    if n >= j:
        W = tw.embedding(j, n)
        return W.conj().T @ tw.amplify(x, n, W)
    W = tw.embedding(n, j)
    return W @ tw.amplify(x, n, W.conj().T.copy())


@dataclass(frozen=True)
class LiftReport:
    eigenvalue: complex
    level: int
    n_range: tuple[int, ...]
    differences: tuple[float, ...]
    corner_errors: tuple[float, ...]
    stabilized_at: int | None
    used_extension: bool = False

    @property
    def stable(self) -> bool:
        return self.stabilized_at is not None

    def as_dict(self) -> dict:
        return {
            "eigenvalue": self.eigenvalue,
            "level": self.level,
            "n_range": list(self.n_range),
            "differences": list(self.differences),
            "corner_errors": list(self.corner_errors),
            "stabilized_at": self.stabilized_at,
            "used_extension": self.used_extension,
        }


def lift_window(tw: StinespringTower, x, lam: complex, j: int = 1, n_range=None, tol: float = 1e-10) -> LiftReport:
    """Matrix elements of theta^n(x)/lam^n on the level-j subspace as n grows."""
    x = np.asarray(x, dtype=complex)
    n_range = tuple(n_range) if n_range is not None else tuple(range(1, tw.levels + 1))
    if not n_range or not (j < max(n_range) <= tw.levels):
        raise ValueError("need j < max(n_range) <= levels")
    shape = tw.superop.shape
    tx = tw.superop(shape.element(x)).blocks[0]
    if np.max(np.abs(tx - lam * x), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(x))):
        raise NotAnEigenvector(f"x is not an eigenvector at {lam}")
    ext = not tw.is_unital
    T = tw.unital_extension
    d = tw.d
    if ext:
        xx = np.zeros((d + 1, d + 1), dtype=complex)
        xx[:d, :d] = x
    else:
        xx = x
    mats, corners = [], []
    W0 = T.embedding(0, j)
    for n in n_range:
        M = level_compression(T, xx, n, j) / lam**n
        mats.append(M)
        c = (W0.conj().T @ M @ W0)[:d, :d]
        corners.append(float(np.max(np.abs(c - x), initial=0.0)))
    diffs = tuple(float(np.max(np.abs(b - a), initial=0.0)) for a, b in zip(mats, mats[1:]))
    stab = None
    for idx in range(len(diffs)):
        if all(v <= tol for v in diffs[idx:]):
            stab = n_range[idx]
            break
    return LiftReport(complex(lam), j, n_range, diffs, tuple(corners), stab, ext)


def lift_product(tw: StinespringTower, x, lam, y, mu, N: int | None = None) -> np.ndarray:
    """p (theta^N(x)/lam^N)(theta^N(y)/mu^N) p computed on the level-N space."""
    N = tw.levels if N is None else N
    T = tw.unital_extension
    d = tw.d
    pad = lambda a: np.pad(np.asarray(a, dtype=complex), ((0, T.d - d), (0, T.d - d)))
    W = T.embedding(0, N)
    Y = T.amplify(pad(y), N, W)
    XY = T.amplify(pad(x), N, Y)
    return (W.conj().T @ XY)[:d, :d] / (lam * mu) ** N


def monotone_exhaustion(tw: StinespringTower, tol: float = 1e-10) -> dict:
    """theta^n(p) >= theta^(n-1)(p) for n <= N; meaningful for unital maps only.

    On the range of theta^n(p), identified with level n, the difference is
    1 - W W^* with W = W_(n-1), so its smallest eigenvalue is 1 - ||W||^2.
    """
    if not tw.is_unital:
        return {"checked": False, "note": "non-unital map: monotonicity is not expected", "min_eigenvalues": []}
    mins = []
    for n in range(1, tw.levels + 1):
        W = tw.embedding(n - 1, n)
        s = np.linalg.svd(W, compute_uv=False)
        mins.append(float(1 - s[0] ** 2))
    return {"checked": True, "passed": all(m >= -tol for m in mins), "min_eigenvalues": mins}


# -- shift example -----------------------------------------------------------


def _shifts(N: int):
    m = 2 * N + 1
    U = np.zeros((m, m))
    Sp = np.zeros((m, m))
    for k in range(-N, N):
        U[k + 1 + N, k + N] = 1.0
        if k >= 0:
            Sp[k + 1 + N, k + N] = 1.0
    return U, Sp


def shift_lift_demo(N: int = 16, W: int = 4, n_values=None) -> dict:
    """theta^n(S+) = U^{*n} S+ U^n on C^(2N+1), restricted to the window -W..W."""
    if not 0 <= W < N:
        raise ValueError("need 0 <= W < N")
    U, Sp = _shifts(N)
    sl = slice(N - W, N + W + 1)
    target = U[sl, sl]
    n_values = range(0, N + 1) if n_values is None else n_values
    rows, windows = [], {}
    Un = np.eye(2 * N + 1)
    powers = {}
    for n in range(max(n_values) + 1):
        powers[n] = Un
        Un = U @ Un
    for n in n_values:
        P = powers[n]
        win = (P.T @ Sp @ P)[sl, sl]
        windows[n] = win
        rows.append((n, float(np.max(np.abs(win - target), initial=0.0))))
    exact = [n for n, dev in rows if dev <= 1e-12]
    claim = [n for n in n_values if W <= n <= N - W]
    return {
        "N": N,
        "W": W,
        "deviations": rows,
        "exact_for": exact,
        "expected_range": [W, N - W],
        "passed": all(n in exact for n in claim),
        "windows": windows,
        "target": target,
    }


__all__ = [
    "StinespringTower",
    "LiftReport",
    "build_tower",
    "unital_kraus_extension",
    "tower_compression",
    "level_compression",
    "lift_window",
    "lift_product",
    "monotone_exhaustion",
    "shift_lift_demo",
]
