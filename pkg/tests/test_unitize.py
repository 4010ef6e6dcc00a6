import numpy as np
import pytest

from corpus_maps import cp_contractions, ids
from ppboundary import models
from ppboundary.algebra import AlgebraShape, Superoperator, kraus_to_superop, power_apply, validate_map
from ppboundary.boundary import q_tau
from ppboundary.errors import AlreadyUnital
from ppboundary.spectral import peripheral_span
from ppboundary.unitize import compression_consistency, eigen_correspondence_check, unitize

M2 = AlgebraShape((2,))
NONUNITAL = [(n, T, k) for n, T, k in cp_contractions() if not validate_map(T).is_unital]


def test_qtau_formula(qtau_map, rng):
    U = unitize(qtau_map[0])
    assert U.shape.block_dims == (2, 1)
    for _ in range(5):
        x = M2.random_element(rng)
        c = complex(rng.standard_normal(), rng.standard_normal())
        got = U.extended(U.embed(x, c))
        want = x.blocks[0][0, 0] * np.diag([1, 0.5]) + c * np.diag([0, 0.5])
        assert np.allclose(got.blocks[0], want)
        assert np.isclose(got.blocks[1][0, 0], c)


def test_scalar_case():
    T = Superoperator(AlgebraShape((1,)), np.array([[0.5]]))
    U = unitize(T)
    z = U.extended(U.embed(AlgebraShape((1,)).element([[3.0]]), 2.0))
    assert np.isclose(z.blocks[0][0, 0], 2.5) and np.isclose(z.blocks[1][0, 0], 2.0)


def test_extended_is_ucp(qtau_map):
    v = validate_map(unitize(qtau_map[0]).extended)
    assert v.is_cp and v.is_unital


def test_powers_on_corner(qtau_map, rng):
    T = kraus_to_superop(models.mixture_kraus())
    U = unitize(T)
    x = M2.random_element(rng)
    for n in range(11):
        a, c = U.split(power_apply(U.extended, U.embed(x), n))
        assert a.allclose(power_apply(T, x, n), 1e-12) and abs(c) < 1e-14


def test_already_unital(pinching):
    with pytest.raises(AlreadyUnital):
        unitize(pinching[0])


def test_qtau_correspondence(qtau_map):
    r = eigen_correspondence_check(unitize(qtau_map[0]))
    assert r["dim_original"] == 1 and r["dim_extended"] == 2


def test_zero_map_correspondence():
    r = eigen_correspondence_check(unitize(models.zero_map()))
    assert r["dim_original"] == 0 and r["dim_extended"] == 1


@pytest.mark.parametrize("name,T,k", NONUNITAL, ids=ids(NONUNITAL))
def test_corpus_invariants(name, T, k):
    U = unitize(T)
    r = eigen_correspondence_check(U)
    assert r["dim_extended"] == len(peripheral_span(T)) + 1
    assert q_tau(U.extended).allclose(U.shape.identity(), 1e-9)
    assert compression_consistency(U)["residual"] <= 1e-7
