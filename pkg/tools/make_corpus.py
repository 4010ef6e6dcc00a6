"""Write the example corpus with hand-derived expected values.

Expected values here are worked out by hand (see comments), not computed
by the library, so the corpus check is an independent test.

    python3 tools/make_corpus.py [outdir]
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src/ppboundary/corpus"


def c(z):
    z = complex(z)
    return [z.real, z.imag]


def mat(a):
    a = np.asarray(a, dtype=complex)
    return [[c(v) for v in row] for row in a]


def E(d, i, j):
    m = np.zeros((d, d))
    m[i, j] = 1
    return m


def write(name, desc):
    desc = {"schema": 1, "name": name, **desc}
    (OUT / f"{name}.json").write_text(json.dumps(desc, indent=1, sort_keys=True) + "\n")


ALL_TRUE = {k: True for k in ("q_nonzero", "fixed_point", "boundary_nontrivial", "boundary_unital", "consistent")}


def chain(flag):
    d = {f"discrete.pp_chain.{k}": flag for k in ("q_nonzero", "fixed_point", "boundary_nontrivial", "boundary_unital")}
    d["discrete.pp_chain.consistent"] = True
    return d


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    w = complex(math.cos(1), math.sin(1))

    # Schur multiplier with [[1, e^i], [e^-i, 1]]: every entry has modulus one,
    # so the map is conjugation by diag(1, e^-i): spectrum {1, 1, e^i, e^-i}.
    write("schur_c_i", {
        "tags": ["discrete", "semigroup"],
        "algebra": {"blocks": [2]},
        "map": {"kind": "schur", "c": c(1j)},
        "generator": {"kind": "schur", "c": c(1j)},
        "expected": {
            "discrete.validation.is_cp": True,
            "discrete.validation.is_unital": True,
            "discrete.spectrum.peripheral": [c(1), c(1), c(w), c(w.conjugate())],
            "discrete.boundary.dim": 4,
            "discrete.boundary.classification": [2],
            "discrete.automorphy.is_peripherally_automorphic": True,
            **chain(True),
            "semigroup.frequencies": [-1.0, 0.0, 0.0, 1.0],
            "semigroup.boundary.dim": 4,
            "semigroup.boundary.classification": [2],
            "semigroup.ideals.0.dim": 1,
            "semigroup.automorphy.in_multiplicative_domain": True,
            "semigroup.automorphy.peripherally_automorphic": True,
            "semigroup.automorphy.squares_fixed": True,
        },
    })

    # c = -1: off-diagonal entries decay by e^-1, fixed points are the diagonal.
    write("schur_c_neg1", {
        "tags": ["discrete", "semigroup"],
        "algebra": {"blocks": [2]},
        "map": {"kind": "schur", "c": c(-1)},
        "generator": {"kind": "schur", "c": c(-1)},
        "expected": {
            "discrete.spectrum.peripheral": [c(1), c(1)],
            "discrete.spectrum.spectral_radius": 1.0,
            "discrete.boundary.dim": 2,
            "discrete.boundary.classification": [1, 1],
            "discrete.automorphy.is_peripherally_automorphic": True,
            "discrete.multiplicative_domain_dim": 2,
            **chain(True),
            "semigroup.frequencies": [0.0, 0.0],
            "semigroup.boundary.classification": [1, 1],
            "semigroup.validation.markov": True,
        },
    })

    # tau(x) = x11 diag(1, 1/2): tau(1) = diag(1, 1/2) is already fixed.
    write("qtau_halfdiag", {
        "tags": ["discrete"],
        "unitize": True,
        "algebra": {"blocks": [2]},
        "map": {"kind": "kraus", "operators": [mat(E(2, 0, 0)), mat(E(2, 0, 1) / math.sqrt(2))]},
        "expected": {
            "discrete.q_tau": [mat(np.diag([1, 0.5]))],
            "discrete.boundary.dim": 1,
            "discrete.boundary.unit": [mat(np.diag([1, 0.5]))],
            "discrete.automorphy.is_peripherally_automorphic": False,
            "discrete.spectrum.peripheral": [c(1)],
            **chain(True),
            "discrete.unitized.correspondence.dim_extended": 2,
            "discrete.unitized.compression.passed": True,
        },
    })

    # tau(x) = x/2 + x11 q/2 with q = diag(1, 1/2): q is fixed, anything with
    # x11 = 0 is scaled by 1/2, so the fixed-point projection is x -> x11 q.
    q = [1.0, 0.5]
    ops = [math.sqrt(0.5) * np.eye(2)] + [math.sqrt(0.5 * qj) * E(2, 0, j) for j, qj in enumerate(q)]
    write("exampleC_lambda_half", {
        "tags": ["discrete"],
        "unitize": True,
        "algebra": {"blocks": [2]},
        "map": {"kind": "kraus", "operators": [mat(k) for k in ops]},
        "expected": {
            "discrete.q_tau": [mat(np.diag(q))],
            "discrete.boundary.dim": 1,
            "discrete.boundary.unit": [mat(np.diag(q))],
            "discrete.spectrum.peripheral": [c(1)],
            "discrete.automorphy.is_peripherally_automorphic": False,
            **chain(True),
            "discrete.unitized.correspondence.dim_extended": 2,
        },
    })

    # Pinching model: x -> PxP + sum_j x_{j-2,j-2} E_jj with P = E00 + E11.
    P = E(6, 0, 0) + E(6, 1, 1)
    ops = [P] + [E(6, j - 2, j) for j in range(2, 6)]
    write("pinching_m6", {
        "tags": ["discrete"],
        "algebra": {"blocks": [6]},
        "map": {"kind": "kraus", "operators": [mat(k) for k in ops]},
        "expected": {
            "discrete.validation.is_unital": True,
            "discrete.spectrum.peripheral": [c(1)] * 4,
            "discrete.boundary.dim": 4,
            "discrete.boundary.classification": [2],
            "discrete.automorphy.is_peripherally_automorphic": False,
            "discrete.q_tau": [mat(np.eye(6))],
            **chain(True),
        },
    })

    # Unital positive map with E_1 = span{I, X} and E_-1 = span{[[0,-1],[1,0]]};
    # transposes the off-diagonal part, so it is not CP.
    basis = [E(2, i, j) for j in range(2) for i in range(2)]

    def pos(x):
        m = (x[0, 0] + x[1, 1]) / 2
        return np.array([[m, x[1, 0]], [x[0, 1], m]])

    S = np.column_stack([pos(b).reshape(-1, order="F") for b in basis])
    write("positive_not_cp", {
        "tags": ["discrete"],
        "algebra": {"blocks": [2]},
        "map": {"kind": "superop", "matrix": mat(S)},
        "expected": {
            "discrete.validation.is_cp": False,
            "discrete.validation.is_unital": True,
            "discrete.status": "validation_failed",
            "discrete.spectrum.peripheral": [c(1), c(1), c(-1)],
            "discrete.spectrum.eigenspace_dims": [[c(1), 2], [c(-1), 1]],
        },
    })

    # x -> [[2 x11, -x12], [-x21, 2 x22]]: superop diag(2, -1, -1, 2).
    write("noncontractive_m2", {
        "tags": ["discrete"],
        "algebra": {"blocks": [2]},
        "map": {"kind": "schur", "matrix": mat([[2, -1], [-1, 2]])},
        "expected": {
            "discrete.validation.is_cp": True,
            "discrete.validation.is_contractive": False,
            "discrete.spectrum.spectral_radius": 2.0,
            "discrete.spectrum.peripheral": [c(-1), c(-1)],
        },
    })

    # Conjugation by the cyclic shift on C^3: an automorphism of M_3 with
    # eigenvalues 1, w, w^2 (w = e^{2 pi i/3}) each of multiplicity 3.
    u = np.zeros((3, 3))
    for j in range(3):
        u[(j + 1) % 3, j] = 1
    om = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    write("cyclic_shift_m3", {
        "tags": ["discrete"],
        "algebra": {"blocks": [3]},
        "map": {"kind": "kraus", "operators": [mat(u)]},
        "expected": {
            "discrete.spectrum.peripheral": [c(1)] * 3 + [c(om)] * 3 + [c(om.conjugate())] * 3,
            "discrete.boundary.dim": 9,
            "discrete.boundary.classification": [3],
            "discrete.automorphy.is_peripherally_automorphic": True,
            "discrete.automorphy.kraus_equality": True,
            **chain(True),
        },
    })

    # f -> f o shift on the diagonal algebra C^3.
    Sh = np.zeros((3, 3))
    for j in range(3):
        Sh[j, (j + 1) % 3] = 1
    write("cyclic_shift_c3", {
        "tags": ["discrete"],
        "algebra": {"blocks": [1, 1, 1]},
        "map": {"kind": "superop", "matrix": mat(Sh)},
        "expected": {
            "discrete.spectrum.peripheral": [c(1), c(om), c(om.conjugate())],
            "discrete.boundary.dim": 3,
            "discrete.boundary.classification": [1, 1, 1],
            "discrete.automorphy.is_peripherally_automorphic": True,
            **chain(True),
        },
    })

    write("zero_m2", {
        "tags": ["discrete"],
        "unitize": True,
        "algebra": {"blocks": [2]},
        "map": {"kind": "superop", "matrix": mat(np.zeros((4, 4)))},
        "expected": {
            "discrete.spectrum.peripheral": [],
            "discrete.boundary.dim": 0,
            **chain(False),
            "discrete.unitized.correspondence.dim_extended": 1,
        },
    })

    # H = diag(0, 1, 2): L(E_jk) = i (k - j) E_jk.
    write("hamiltonian_flow_m3", {
        "tags": ["semigroup"],
        "generator": {"kind": "gkls", "H": mat(np.diag([0, 1, 2])), "jumps": []},
        "expected": {
            "semigroup.frequencies": [-2.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0],
            "semigroup.boundary.dim": 9,
            "semigroup.boundary.classification": [3],
            # I_1 = span{E10 E01, E21 E12} = span{E11, E22}; I_2 = span{E22}
            "semigroup.ideals.0.dim": 2,
            "semigroup.ideals.1.dim": 1,
            "semigroup.automorphy.peripherally_automorphic": True,
            "semigroup.automorphy.in_multiplicative_domain": True,
            "semigroup.automorphy.squares_fixed": True,
            "semigroup.validation.markov": True,
        },
    })

    # L(x) = x11 q - x: spectrum {0, -1}; boundary C q.
    write("decay_generator", {
        "tags": ["semigroup"],
        "generator": {"kind": "decay", "a": 1.0, "q": q},
        "expected": {
            "semigroup.frequencies": [0.0],
            "semigroup.boundary.dim": 1,
            "semigroup.boundary.unit": [mat(np.diag(q))],
            "semigroup.validation.markov": False,
            "semigroup.automorphy.peripherally_automorphic": False,
            "semigroup.automorphy.squares_fixed": False,
            "semigroup.automorphy.in_multiplicative_domain": False,
        },
    })

    write("opsys_span_I_E01_E10", {
        "tags": ["obstruct"],
        "system": {
            "ambient_dim": 6,
            "basis": [mat(np.eye(6)), mat(E(6, 0, 1)), mat(E(6, 1, 0))],
            "candidates": {"family": "pinching", "grid": 8},
        },
        "expected": {"obstruct.verdict": "INCOMPATIBLE", "obstruct.details.is_algebra": False},
    })

    # |a| = |b| = 1 forces max(|a + b|, |a - b|) >= sqrt 2.
    write("opsys_span_E12_E21", {
        "tags": ["obstruct"],
        "tolerance": 1e-6,
        "system": {"ambient_dim": 2, "basis": [mat(E(2, 0, 1)), mat(E(2, 1, 0))]},
        "expected": {
            "obstruct.verdict": "INCOMPATIBLE",
            "obstruct.details.parallelogram_min": math.sqrt(2) - 1,
        },
    })

    write("opsys_diag_c3", {
        "tags": ["obstruct"],
        "system": {"ambient_dim": 3, "basis": [mat(E(3, i, i)) for i in range(3)]},
        "expected": {"obstruct.verdict": "UNDECIDED", "obstruct.details.pure_count": 3},
    })


if __name__ == "__main__":
    main()
