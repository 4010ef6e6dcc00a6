import numpy as np
import pytest

from corpus_maps import generators, ids
from oracles import complex_dim, gkls_apply, matrix_of
from ppboundary import models
from ppboundary.algebra import AlgebraShape, op_norm, validate_map
from ppboundary.errors import AlreadyMarkov, NonHermitianHamiltonian
from ppboundary.semigroup import (
    build_boundary_continuous,
    ce_product_continuous,
    continuous_eigenspace,
    continuous_eigenspaces,
    decompose_generator,
    dimension_corollary_check,
    dimension_corollary_check_discrete,
    evolve,
    gkls_assemble,
    ideal_Ia,
    peripheral_frequencies,
    qms_automorphy_check,
    semigroup_consistency,
    unitize_generator,
    validate_qds,
)
from ppboundary.spectral import subspace_equal

E = models.unit
M2 = AlgebraShape((2,))
GENS = generators()


class TestAssemble:
    def test_zero(self):
        L = gkls_assemble(np.zeros((2, 2)))
        assert np.allclose(L.matrix, 0) and L.is_markov
        assert np.allclose(evolve(L, 3.0).matrix, np.eye(4))

    def test_hamiltonian_spectrum(self):
        L = gkls_assemble(np.diag([0.0, 1.0]))
        ev = np.sort_complex(np.linalg.eigvals(L.matrix))
        assert np.allclose(ev, np.sort_complex([0, 0, -1j, 1j]))

    def test_against_oracle(self, rng):
        H = rng.standard_normal((3, 3))
        H = H + H.T
        V = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(2)]
        L = gkls_assemble(H, V)
        assert np.allclose(L.matrix, matrix_of(lambda x: gkls_apply(H, V, x), 3), atol=1e-12)
        assert L.is_markov and validate_qds(L).passed

    def test_non_hermitian(self):
        with pytest.raises(NonHermitianHamiltonian):
            gkls_assemble(np.array([[0, 1], [0, 0]]))

    def test_schur_generator_diagonal(self):
        L = models.schur_generator(1j)
        assert np.allclose(np.diag(L.matrix), [0, -1j, 1j, 0])
        # derivative of the Schur multiplier at t = 0
        h = 1e-6
        fd = (models.schur_map(h * 1j).matrix - np.eye(4)) / h
        assert np.allclose(fd, L.matrix, atol=1e-5)


class TestEvolve:
    def test_zero_time(self):
        assert np.allclose(evolve(models.schur_generator(-1), 0).matrix, np.eye(4))

    def test_schur_unit_time(self):
        assert np.allclose(evolve(models.schur_generator(-1), 1).matrix, models.schur_map(-1).matrix)

    def test_decay_ln2(self, rng):
        L = models.decay_generator(1.0, (1, 0.5))
        T = evolve(L, np.log(2))
        x = M2.random_element(rng).blocks[0]
        want = x / 2 + 0.5 * x[0, 0] * np.diag([1, 0.5])
        assert np.allclose(T(M2.element(x)).blocks[0], want, atol=1e-12)

    @pytest.mark.parametrize("name,L", GENS, ids=ids(GENS))
    def test_semigroup_property(self, name, L):
        for s, t in ((0.3, 0.7), (1.0, 2.5)):
            lhs = evolve(L, s).matrix @ evolve(L, t).matrix
            assert np.linalg.norm(lhs - evolve(L, s + t).matrix, 2) <= 1e-9


class TestValidate:
    def test_gkls_passes(self):
        assert validate_qds(models.dephasing_generator()).passed

    def test_schur_positive_real_part_fails(self):
        L = models.schur_generator(1.0)
        v = validate_qds(L)
        assert not v.passed
        # tau_t(1) = 1, so the failure shows up in the Choi test; the norm still grows
        assert all(f[1] == "cp" for f in v.failures)
        assert op_norm(evolve(L, 1.0)(M2.element(E(2, 0, 1)))) == pytest.approx(np.e)

    def test_decay_contractive_not_markov(self):
        L = models.decay_generator()
        v = validate_qds(L)
        assert v.passed and not v.markov
        assert np.allclose(L.unit_image().blocks[0], np.diag([0, -0.5]))


class TestFrequencies:
    def test_schur_i(self):
        got = peripheral_frequencies(models.schur_generator(1j), with_multiplicity=True)
        assert sorted((round(a, 9), m) for a, m in got) == [(-1, 1), (0, 2), (1, 1)]
        assert np.allclose(sorted(peripheral_frequencies(models.schur_generator(1j))), [-1, 0, 1])

    def test_schur_damped(self):
        assert peripheral_frequencies(models.schur_generator(-1 + 1j), with_multiplicity=True) == [(0.0, 2)]

    def test_decay(self):
        assert peripheral_frequencies(models.decay_generator(), with_multiplicity=True) == [(0.0, 1)]

    def test_eigenspace_membership(self):
        L = models.schur_generator(1j)
        Ea = continuous_eigenspace(L, 1)
        assert subspace_equal(Ea, [M2.element(E(2, 0, 1))])
        for v in Ea:
            for t in (0.5, 2.0):
                assert (evolve(L, t)(v) - v * np.exp(1j * t)).norm() < 1e-10


class TestProducts:
    def test_schur_i_ambient(self):
        L = models.schur_generator(1j)
        x, y = M2.element(E(2, 0, 1)), M2.element(E(2, 1, 0))
        z = ce_product_continuous(L, x, 1, y, -1)
        assert z.allclose(M2.element(E(2, 0, 0)), 1e-9)

    def test_decay_q_square(self):
        L = models.decay_generator()
        q = M2.element(np.diag([1, 0.5]))
        assert ce_product_continuous(L, q, 0, q, 0).allclose(q, 1e-9)

    def test_schur_neg1_projections(self):
        L = models.schur_generator(-1)
        z = ce_product_continuous(L, M2.element(E(2, 0, 0)), 0, M2.element(E(2, 1, 1)), 0)
        assert z.norm() < 1e-12

    @pytest.mark.parametrize("name,L", GENS, ids=ids(GENS))
    def test_frequency_additivity(self, name, L):
        S = decompose_generator(L)
        spaces = continuous_eigenspaces(L, S)
        for Ea in spaces:
            for Eb in spaces:
                for x in Ea:
                    for y in Eb:
                        z = ce_product_continuous(L, x, Ea.frequency, y, Eb.frequency, S)
                        assert op_norm(L(z) - 1j * (Ea.frequency + Eb.frequency) * z) <= 1e-7

    @pytest.mark.parametrize("name,L", GENS, ids=ids(GENS))
    def test_adjoint_pairs(self, name, L):
        for Ea in continuous_eigenspaces(L):
            assert continuous_eigenspace(L, -Ea.frequency).dim == Ea.dim

    @pytest.mark.parametrize("name,L", GENS, ids=ids(GENS))
    def test_automorphism_property(self, name, L):
        B = build_boundary_continuous(L)
        for t in (0.3, 1.0, 2.7):
            T = evolve(L, t)
            R = np.column_stack([B.coords(T(b)) for b in B.basis])
            assert np.linalg.svd(R, compute_uv=False)[-1] > 1e-7
            eye = np.eye(B.dim)
            for i in range(B.dim):
                for j in range(B.dim):
                    lhs = R @ B.structure_constants[i, j]
                    rhs = B.product(R @ eye[i], R @ eye[j])
                    assert B.element(lhs - rhs).norm() <= 1e-7

    def test_commutative_shape_gives_abelian_boundary(self):
        L = models.decay_generator(1.0, (1.0, 1.0))
        B = build_boundary_continuous(L)
        C = B.structure_constants
        assert np.allclose(C, C.transpose(1, 0, 2), atol=1e-9)


class TestBoundary:
    def test_schur_i_full(self):
        B = build_boundary_continuous(models.schur_generator(1j))
        assert B.dim == 4 and list(B.classification) == [2]

    def test_decay_one_dim(self):
        B = build_boundary_continuous(models.decay_generator())
        assert B.dim == 1
        assert B.unit.allclose(M2.element(np.diag([1, 0.5])), 1e-9)

    @pytest.mark.parametrize("name,L", GENS, ids=ids(GENS))
    def test_semigroup_consistency(self, name, L):
        assert semigroup_consistency(L)


class TestIdeals:
    def test_schur_i(self):
        r = ideal_Ia(models.schur_generator(1j), 1)
        assert r.dim == 1 and subspace_equal(r.basis, [M2.element(E(2, 1, 1))])

    def test_empty(self):
        r = ideal_Ia(models.schur_generator(1j), 5.0)
        assert r.dim == 0 and r.passed

    def test_hamiltonian_flow_brute_force(self):
        N = 3
        L = models.hamiltonian_flow(N)
        shape = AlgebraShape((N,))
        for a in (1, 2):
            r = ideal_Ia(L, a)
            # E_a is spanned by E_{k+a, k}; x^* y = E_{k, k+a} E_{l+a, l} = delta_kl E_kk
            target = [shape.element(E(N, j, j)) for j in range(N - a)]
            assert complex_dim([b.blocks[0] for b in r.basis]) == N - a
            assert subspace_equal(r.basis, target)
            assert r.passed

    def test_dimension_hypothesis_not_met(self):
        r = dimension_corollary_check(models.schur_generator(1j), 1, np.random.default_rng(0))
        assert not r.hypothesis_met

    def test_dimension_trivial_at_zero(self):
        L = models.hamiltonian_flow(3)
        r = dimension_corollary_check(L, 0, np.random.default_rng(0))
        assert r.hypothesis_met and r.dim_Ea == r.dim_F

    def test_dimension_discrete_shift(self):
        w = np.exp(2j * np.pi / 3)
        T = models.unitary_conjugation(models.cyclic_shift(3))
        r = dimension_corollary_check_discrete(T, w, np.random.default_rng(0))
        assert r.hypothesis_met and r.dim_Ea == r.dim_F == 3
        Tc = models.cyclic_shift_diagonal(3)
        r = dimension_corollary_check_discrete(Tc, w, np.random.default_rng(0))
        assert r.hypothesis_met and r.dim_Ea == r.dim_F == 1


class TestAutomorphy:
    def test_schur_i(self):
        r = qms_automorphy_check(models.schur_generator(1j))
        assert r.in_multiplicative_domain and r.peripherally_automorphic and r.squares_fixed

    def test_decay(self):
        r = qms_automorphy_check(models.decay_generator())
        assert not (r.in_multiplicative_domain or r.peripherally_automorphic or r.squares_fixed)

    def test_hamiltonian(self):
        r = qms_automorphy_check(gkls_assemble(np.diag([0.0, 1.0])))
        assert r.consistent and r.peripherally_automorphic

    @pytest.mark.parametrize("name,L", GENS, ids=ids(GENS))
    def test_consistent(self, name, L):
        assert qms_automorphy_check(L).consistent


class TestUnitizeGenerator:
    def test_decay(self, rng):
        L = models.decay_generator()
        Lt = unitize_generator(L)
        assert Lt.is_markov
        x = M2.random_element(rng).blocks[0]
        c = 0.7 - 0.2j
        z = Lt(Lt.shape.element(x, [[c]]))
        q = np.diag([1, 0.5])
        assert np.allclose(z.blocks[0], x[0, 0] * q - x + c * (np.eye(2) - q))
        assert abs(z.blocks[1][0, 0]) < 1e-15

    def test_markov_refused(self):
        with pytest.raises(AlreadyMarkov):
            unitize_generator(models.hamiltonian_flow(2))

    def test_formula_in_time(self, rng):
        L = models.decay_generator()
        Lt = unitize_generator(L)
        x = M2.random_element(rng)
        c = 1.3
        for t in (0.5, 1.0, 2.0):
            Tt = evolve(L, t)
            z = evolve(Lt, t)(Lt.shape.element(*x.blocks, [[c]]))
            want = Tt(x).blocks[0] + c * (np.eye(2) - Tt.unit_image().blocks[0])
            assert np.allclose(z.blocks[0], want, atol=1e-9)
            z0 = evolve(Lt, t)(Lt.shape.element(*x.blocks, [[0]]))
            assert np.allclose(z0.blocks[0], Tt(x).blocks[0], atol=1e-12)
        assert validate_map(evolve(Lt, 1.0)).is_unital
