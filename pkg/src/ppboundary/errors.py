"""Exception hierarchy.

Errors split into two families: :class:`InputError` for things that are
wrong with what the caller handed in, and :class:`TheoryViolation` for
numerical outcomes that contradict the structure theory of CP contractions
(these indicate either a bad scenario or a bug and map to CLI exit code 3).
"""


class PPBError(Exception):
    """Base class for all package errors."""

    module = "core"


class InputError(PPBError):
    pass


class ShapeMismatch(InputError, ValueError):
    pass


class ParseError(InputError, ValueError):
    module = "cli"


class NotCompletelyPositive(InputError):
    pass


class NotCPContraction(InputError):
    """Raised when an operation needs a CP contraction and gets something else."""

    module = "boundary"


class NonHermitianHamiltonian(InputError):
    module = "semigroup"


class StateNotFaithful(InputError):
    module = "boundary"


class AlreadyUnital(InputError):
    module = "unitize"


class AlreadyMarkov(InputError):
    module = "semigroup"


class TowerTooLarge(InputError):
    module = "dilation"


class DegenerateInterval(InputError):
    module = "obstruct"


class NotAnEigenvector(InputError):
    module = "boundary"


class BoundaryTrivial(PPBError):
    """Informational: the map has no peripheral spectrum."""

    module = "boundary"


class NumericalError(PPBError):
    pass


class IllConditionedSplit(NumericalError):
    module = "spectral"


class NoConvergence(NumericalError):
    module = "boundary"


class TheoryViolation(PPBError):
    module = "boundary"


class SuspectSpectrum(TheoryViolation):
    module = "spectral"


class ConvergenceMismatch(TheoryViolation):
    pass


class AxiomViolation(TheoryViolation):
    def __init__(self, axiom, residual, witness=None):
        self.axiom = axiom
        self.residual = residual
        self.witness = witness
        super().__init__(f"C*-axiom '{axiom}' violated: residual {residual:.3e}")


class ClassificationInconsistent(TheoryViolation):
    pass


class CriterionDisagreement(TheoryViolation):
    pass


class MaximalityViolation(TheoryViolation):
    pass


class AutomorphismViolation(TheoryViolation):
    pass


class CorrespondenceViolation(TheoryViolation):
    module = "unitize"


class IdealViolation(TheoryViolation):
    module = "semigroup"


class DimensionViolation(TheoryViolation):
    module = "semigroup"


class EquivalenceViolation(TheoryViolation):
    module = "semigroup"


class CompressionMismatch(TheoryViolation):
    module = "dilation"


class CorpusMismatch(PPBError):
    module = "cli"

    def __init__(self, failures):
        self.failures = failures
        names = ", ".join(sorted({f[0] for f in failures}))
        super().__init__(f"corpus mismatch in: {names}")
