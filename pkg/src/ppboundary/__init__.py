"""Peripheral Poisson boundaries of CP maps and quantum dynamical semigroups
on finite-dimensional multi-matrix algebras."""

from ._config import set_tolerance, settings
from .algebra import (
    AlgebraShape,
    AlgElement,
    ChoiMatrix,
    KrausMap,
    Superoperator,
    choi_to_kraus,
    kraus_to_superop,
    validate_map,
)
from .boundary import PeripheralBoundary, automorphy_check, build_boundary, classify, q_tau, verify_cstar_axioms
from .spectral import decompose, eigenspace, peripheral_spectrum
from .semigroup import Generator, evolve, gkls_assemble

__version__ = "0.1.0"

__all__ = [
    "AlgebraShape",
    "AlgElement",
    "ChoiMatrix",
    "KrausMap",
    "Superoperator",
    "Generator",
    "PeripheralBoundary",
    "automorphy_check",
    "build_boundary",
    "choi_to_kraus",
    "classify",
    "decompose",
    "eigenspace",
    "evolve",
    "gkls_assemble",
    "kraus_to_superop",
    "peripheral_spectrum",
    "q_tau",
    "set_tolerance",
    "settings",
    "validate_map",
    "verify_cstar_axioms",
]
