import numpy as np
import pytest

from corpus_maps import ids, kraus_channels
from ppboundary import models
from ppboundary.algebra import KrausMap, kraus_to_superop, power_apply, validate_map
from ppboundary.boundary import ce_product_spectral
from ppboundary.dilation import (
    build_tower,
    level_compression,
    lift_product,
    lift_window,
    monotone_exhaustion,
    shift_lift_demo,
    tower_compression,
    unital_kraus_extension,
)
from ppboundary.errors import NotAnEigenvector, TowerTooLarge
from ppboundary.spectral import decompose, peripheral_eigenspaces

E = models.unit
KC = kraus_channels()


def dense_V(ops):
    """V = sum_i k_i (x) e_i as an explicit (d n) x d matrix."""
    n = len(ops)
    e = np.eye(n)
    return sum(np.kron(k, e[:, [i]]) for i, k in enumerate(ops))


def dense_compression(ops, x, n):
    d, r = ops[0].shape[0], len(ops)
    V = dense_V(ops)
    W = np.eye(d)
    for j in range(n):
        W = np.kron(V, np.eye(r**j)) @ W
    return W.conj().T @ np.kron(x, np.eye(r**n)) @ W


class TestTower:
    def test_unitary_collapses(self):
        u = models.cyclic_shift(3)
        tw = build_tower(KrausMap((u,)), 5)
        assert tw.n == 1 and all(tw.level_dim(j) == 3 for j in range(6))
        assert np.allclose(tw.V.conj().T @ tw.V, np.eye(3))

    def test_qtau_V(self):
        tw = build_tower(models.qtau_kraus(), 3)
        assert tw.V.shape == (4, 2)
        assert np.allclose(tw.V.conj().T @ tw.V, np.diag([1, 0.5]), atol=1e-12)
        assert np.allclose(tw.V, dense_V(models.qtau_kraus().operators))

    def test_pinching_well_formed(self, pinching):
        tw = build_tower(pinching[1], 2)
        assert tw.level_dim(2) == 6 * 25
        assert np.allclose(tw.V.conj().T @ tw.V, np.eye(6), atol=1e-12)

    def test_too_large(self, pinching):
        with pytest.raises(TowerTooLarge):
            build_tower(pinching[1], 5)


class TestCompression:
    def test_n0(self, rng):
        tw = build_tower(models.qtau_kraus(), 2)
        x = rng.standard_normal((2, 2))
        assert np.allclose(tower_compression(tw, x, 0), x)

    def test_qtau_unit(self):
        tw = build_tower(models.qtau_kraus(), 3)
        assert np.allclose(tower_compression(tw, np.eye(2), 3), np.diag([1, 0.5]), atol=1e-14)

    def test_pinching(self, pinching):
        tw = build_tower(pinching[1], 2)
        want = E(6, 0, 0) + E(6, 2, 2) + E(6, 4, 4)
        assert np.allclose(tower_compression(tw, E(6, 0, 0), 2), want, atol=1e-14)

    @pytest.mark.parametrize("name,T,k", KC, ids=ids(KC))
    def test_corpus_against_power(self, name, T, k, rng):
        depth = 4 if k.d * len(k) ** 4 <= 4096 else 2
        tw = build_tower(k, depth)
        for _ in range(20):
            x = rng.standard_normal((k.d, k.d)) + 1j * rng.standard_normal((k.d, k.d))
            for n in range(depth + 1):
                ref = power_apply(T, T.shape.element(x), n).blocks[0]
                assert np.max(np.abs(tower_compression(tw, x, n) - ref)) <= 1e-12

    def test_against_dense_oracle(self, rng):
        k = models.mixture_kraus()
        tw = build_tower(k, 3)
        x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        for n in range(4):
            assert np.allclose(tower_compression(tw, x, n), dense_compression(k.operators, x, n), atol=1e-13)

    def test_level_compression_dense(self, rng):
        k = models.qtau_kraus()
        tw = build_tower(k, 3)
        x = rng.standard_normal((2, 2))
        V = dense_V(k.operators)
        W1 = np.kron(V, np.eye(2))  # level 1 -> level 2
        W0 = V
        full = np.kron(x, np.eye(4))
        want = W1.conj().T @ full @ W1
        assert np.allclose(level_compression(tw, x, 2, 1), want)
        assert np.allclose(level_compression(tw, x, 0, 1), W0 @ x @ W0.conj().T)


class TestExtension:
    def test_unital_extension(self, qtau_map):
        ext = unital_kraus_extension(qtau_map[1])
        T = kraus_to_superop(ext)
        v = validate_map(T)
        assert v.is_cp and v.is_unital
        x = np.zeros((3, 3), dtype=complex)
        x[:2, :2] = [[1, 2], [3, 4]]
        y = T(T.shape.element(x)).blocks[0][:2, :2]
        assert np.allclose(y, 1 * np.diag([1, 0.5]))


class TestLift:
    def test_unitary_stable_at_once(self):
        u = models.cyclic_shift(3)
        tw = build_tower(KrausMap((u,)), 4)
        w = np.exp(2j * np.pi / 3)
        T = kraus_to_superop(KrausMap((u,)))
        for Eb in peripheral_eigenspaces(decompose(T, contractive=True)):
            for x in Eb.elements:
                r = lift_window(tw, x.blocks[0], Eb.eigenvalue, 1)
                assert r.stabilized_at == 1
        assert abs(w**3 - 1) < 1e-12

    def test_pinching(self, pinching):
        tw = build_tower(pinching[1], 2)
        r = lift_window(tw, E(6, 0, 1), 1, j=1, n_range=(1, 2))
        assert max(r.corner_errors) <= 1e-12
        assert r.stable

    def test_pinching_depth4(self, pinching):
        tw = build_tower(pinching[1], 4)
        r = lift_window(tw, E(6, 0, 1), 1, j=1, n_range=range(1, 5))
        assert r.stabilized_at is not None and r.stabilized_at <= 2
        assert all(v <= 1e-10 for v in r.differences[1:])

    def test_compression_only_nonunital(self):
        # x -> P x P needs the unital extension on M_7 for the lift window
        tw = build_tower(KrausMap(models.pinching_kraus().operators[:1]), 3)
        r = lift_window(tw, E(6, 0, 1), 1, j=1)
        assert r.used_extension and r.stable

    def test_qtau(self):
        tw = build_tower(models.qtau_kraus(), 4)
        r = lift_window(tw, np.diag([1, 0.5]), 1, j=1)
        assert r.used_extension and r.stable
        assert max(r.corner_errors) <= 1e-12

    def test_not_eigenvector(self):
        tw = build_tower(models.qtau_kraus(), 2)
        with pytest.raises(NotAnEigenvector):
            lift_window(tw, np.eye(2), 1)

    def test_bad_range(self):
        tw = build_tower(models.qtau_kraus(), 2)
        with pytest.raises(ValueError):
            lift_window(tw, np.diag([1, 0.5]), 1, j=2, n_range=(1, 2))

    @staticmethod
    def _settled_by(T, z, nu, n=3, tol=1e-10):
        """Whether tau^m(z)/nu^m has stopped moving by m = n."""
        a = power_apply(T, z, n) * (1 / nu**n)
        b = power_apply(T, z, n + 1) * (1 / nu ** (n + 1))
        return (a - b).norm() <= tol

    @pytest.mark.parametrize("name,T,k", KC, ids=ids(KC))
    def test_lift_product(self, name, T, k):
        N = 4
        while N > 1:
            try:
                build_tower(k, N).unital_extension
                break
            except TowerTooLarge:
                N -= 1
        tw, tw_lo = build_tower(k, N), build_tower(k, N - 1)
        S = decompose(T, contractive=True)
        spaces = peripheral_eigenspaces(S)
        for E1 in spaces:
            for E2 in spaces:
                for x in E1.elements:
                    for y in E2.elements:
                        lam, mu = E1.eigenvalue, E2.eigenvalue
                        want = ce_product_spectral(S, x, lam, y, mu).blocks[0]
                        got = lift_product(tw, x.blocks[0], lam, y.blocks[0], mu, N)
                        err = np.max(np.abs(got - want))
                        if self._settled_by(T, x @ y, lam * mu):
                            assert err <= 1e-6
                        else:
                            lo = lift_product(tw_lo, x.blocks[0], lam, y.blocks[0], mu, N - 1)
                            assert err < np.max(np.abs(lo - want))


class TestMonotone:
    def test_unital(self):
        tw = build_tower(KrausMap(models.pinching_kraus().operators[:1]), 4)
        assert not tw.is_unital and not monotone_exhaustion(tw)["checked"]
        k = models.mixture_kraus(0.5, (1.0, 1.0))
        r = monotone_exhaustion(build_tower(k, 4))
        assert r["checked"] and r["passed"]

    def test_shift_unital(self):
        r = monotone_exhaustion(build_tower(models.cyclic_shift_kraus(3), 4))
        assert r["passed"] and all(abs(m) < 1e-12 for m in r["min_eigenvalues"])


class TestShiftDemo:
    def test_default(self):
        r = shift_lift_demo(16, 4)
        assert r["passed"]
        assert set(range(4, 13)) <= set(r["exact_for"])
        assert 0 not in r["exact_for"]

    def test_window_zero(self):
        r = shift_lift_demo(16, 0, n_values=[0, 3])
        assert r["windows"][0].shape == (1, 1) and r["windows"][0][0, 0] == 0

    def test_cutoff_moves_left(self):
        r = shift_lift_demo(16, 4, n_values=[0, 1, 2, 3])
        tgt = r["target"]
        for n in range(4):
            missing = [tuple(p) for p in np.argwhere(r["windows"][n] != tgt)]
            # window index i corresponds to site i - 4; S+ misses e_k -> e_(k+1) for k < -n
            want = [(k + 5, k + 4) for k in range(-4, -n)]
            assert missing == want

    def test_bad_window(self):
        with pytest.raises(ValueError):
            shift_lift_demo(4, 4)
