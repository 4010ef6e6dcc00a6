import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import choi_of, kraus_apply, matrix_of
from ppboundary import models
from ppboundary.algebra import (
    AlgebraShape,
    ChoiMatrix,
    KrausMap,
    Superoperator,
    apply,
    choi_to_kraus,
    extended_choi,
    is_positive,
    kraus_to_superop,
    op_norm,
    power_apply,
    schur_superop,
    superop_choi_roundtrip,
    validate_map,
)
from ppboundary.errors import NotCompletelyPositive, ShapeMismatch

M2 = AlgebraShape((2,))
M6 = AlgebraShape((6,))
E = models.unit


def _random_kraus(rng, d, n, contractive=True):
    ops = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(n)]
    if contractive:
        s = np.linalg.norm(sum(k.conj().T @ k for k in ops), 2)
        ops = [k / np.sqrt(s) for k in ops]
    return KrausMap(tuple(ops))


class TestShape:
    def test_dims(self):
        s = AlgebraShape((2, 1, 3))
        assert s.dim == 4 + 1 + 9
        assert s.size == 6
        assert not s.is_single_block
        assert AlgebraShape((1, 1)).is_commutative

    def test_vec_roundtrip(self, rng):
        s = AlgebraShape((2, 3))
        x = s.random_element(rng)
        assert s.from_vec(x.vec).allclose(x)

    def test_column_stacking(self):
        x = M2.element([[1, 2], [3, 4]])
        assert np.allclose(x.vec, [1, 3, 2, 4])

    def test_matrix_units_order(self):
        units = M2.matrix_units()
        assert np.allclose(units[1].blocks[0], E(2, 1, 0))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            M2.identity() + M6.identity()


class TestNormAndPositivity:
    def test_op_norm_identity(self):
        assert op_norm(M2.identity()) == pytest.approx(1.0)

    def test_op_norm_q(self):
        assert op_norm(M2.element(np.diag([1, 0.5]))) == pytest.approx(1.0)

    @pytest.mark.parametrize("a,b,c", [(1, 2, 0), (0.5, 1j, -1), (0, 1, 1)])
    def test_op_norm_embedded_2x2(self, a, b, c):
        x = M6.element(a * np.eye(6) + b * E(6, 0, 1) + c * E(6, 1, 0))
        small = np.array([[a, b], [c, a]])
        assert op_norm(x) == pytest.approx(max(np.linalg.norm(small, 2), abs(a)))

    def test_positive_examples(self):
        assert is_positive(M2.zero())
        assert is_positive(M6.element((np.eye(6) + E(6, 0, 1) + E(6, 1, 0)) / 2))
        assert not is_positive(M6.element(E(6, 0, 1)))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_cstar_identity(self, seed):
        r = np.random.default_rng(seed)
        x = AlgebraShape((2, 3)).random_element(r)
        assert abs(op_norm(x.H @ x) - op_norm(x) ** 2) <= 1e-10 * max(1, op_norm(x) ** 2)


class TestKraus:
    def test_identity(self):
        T = kraus_to_superop(KrausMap((np.eye(3),)))
        assert np.allclose(T.matrix, np.eye(9))

    def test_qtau_map_against_direct(self):
        k = models.qtau_kraus()
        T = kraus_to_superop(k)
        ref = matrix_of(lambda x: x[0, 0] * np.diag([1, 0.5]), 2)
        assert np.allclose(T.matrix, ref, atol=1e-14)

    def test_conjugation(self, rng):
        u, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        T = models.unitary_conjugation(u)
        assert np.allclose(T.matrix, matrix_of(lambda x: u.conj().T @ x @ u, 3))

    def test_mixed_shapes_rejected(self):
        with pytest.raises(ShapeMismatch):
            KrausMap((np.eye(2), np.eye(3)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
    def test_superop_matches_oracle(self, seed, d, n):
        k = _random_kraus(np.random.default_rng(seed), d, n)
        T = kraus_to_superop(k)
        assert np.allclose(T.matrix, matrix_of(lambda x: kraus_apply(k.operators, x), d), atol=1e-12)


class TestChoi:
    def test_identity_choi_rank_one(self):
        C = superop_choi_roundtrip(Superoperator.identity(M2))
        w = np.linalg.eigvalsh(C.matrix)
        assert np.sum(w > 1e-10) == 1
        assert w[-1] == pytest.approx(2.0)

    def test_matches_oracle(self, pinching):
        T, k = pinching
        ref = choi_of(lambda x: kraus_apply(k.operators, x), 6)
        assert np.allclose(superop_choi_roundtrip(T).matrix, ref)

    def test_positive_not_cp(self):
        T = models.positive_not_cp_map()
        C = superop_choi_roundtrip(T)
        assert np.linalg.eigvalsh(C.matrix)[0] == pytest.approx(-0.5)
        with pytest.raises(NotCompletelyPositive):
            choi_to_kraus(C)

    def test_all_ones_schur_is_cp(self):
        assert validate_map(schur_superop(np.ones((2, 2)))).is_cp

    @pytest.mark.parametrize(
        "T",
        [
            models.kraus_superop(models.pinching_kraus()),
            models.kraus_superop(models.qtau_kraus()),
            models.kraus_superop(models.mixture_kraus()),
            models.schur_map(-1),
            models.schur_map(1j),
            models.unitary_conjugation(models.cyclic_shift(3)),
        ],
    )
    def test_roundtrip(self, T):
        back = kraus_to_superop(choi_to_kraus(superop_choi_roundtrip(T)))
        assert np.allclose(back.matrix, T.matrix, atol=1e-10)

    def test_extended_choi_multiblock(self):
        T = models.cyclic_shift_diagonal(3)
        C = extended_choi(T)
        assert C.shape == (9, 9)
        assert np.linalg.eigvalsh(C)[0] > -1e-12


class TestValidate:
    def test_schur_negative_real_part(self):
        v = validate_map(models.schur_map(-0.3 + 2j))
        assert v.is_cp and v.is_unital

    def test_qtau_map(self, qtau_map):
        v = validate_map(qtau_map[0])
        assert v.is_cp and v.is_contractive and not v.is_unital

    def test_noncontractive(self):
        v = validate_map(models.noncontractive_map())
        assert v.is_cp and not v.is_contractive
        assert v.spectral_radius == pytest.approx(2.0)

    def test_positive_not_cp_flags(self):
        v = validate_map(models.positive_not_cp_map())
        assert v.is_adjoint_preserving and v.is_unital and not v.is_cp
        assert v.min_choi_eigenvalue == pytest.approx(-0.5)


class TestApply:
    def test_power_zero(self, pinching, rng):
        x = M6.random_element(rng)
        assert power_apply(pinching[0], x, 0).allclose(x)

    def test_pinching_diagonal_chain(self, pinching):
        out = power_apply(pinching[0], M6.element(E(6, 0, 0)), 2)
        assert out.allclose(M6.element(E(6, 0, 0) + E(6, 2, 2) + E(6, 4, 4)), 1e-14)

    def test_schur_power(self):
        out = power_apply(models.schur_map(-1), M2.element(E(2, 0, 1)), 3)
        assert out.allclose(M2.element(np.exp(-3) * E(2, 0, 1)), 1e-14)

    def test_schur_multiplier_c_i(self):
        T = schur_superop([[1, np.exp(1j)], [np.exp(-1j), 1]])
        assert np.allclose(T.matrix, models.schur_map(1j).matrix)

    def test_schur_identity_pinching(self):
        T = schur_superop(np.eye(2))
        x = M2.element([[1, 2], [3, 4]])
        assert apply(T, x).allclose(M2.element(np.diag([1, 4])))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_contraction_and_adjoint(self, seed):
        r = np.random.default_rng(seed)
        k = _random_kraus(r, 3, 2)
        T = kraus_to_superop(k)
        shape = k.shape
        for _ in range(4):
            x = shape.random_element(r)
            assert op_norm(apply(T, x)) <= op_norm(x) + 1e-10
            assert apply(T, x.H).allclose(apply(T, x).H, 1e-12)

    def test_choi_oracle_object(self):
        C = ChoiMatrix(2, choi_of(lambda x: x, 2))
        assert C.shape == M2
