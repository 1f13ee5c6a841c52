"""Exception hierarchy.

Every error raised by a validator names the identity that failed and the
residual that was measured, so reports can be produced from the exception
alone.
"""


class QGaloisError(Exception):
    def __init__(self, identity, residual=None, detail=None):
        self.identity = identity
        self.residual = residual
        self.detail = detail
        msg = identity
        if residual is not None:
            msg += f" (residual {residual:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


# algebras
class AlgebraError(QGaloisError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class NotAssociative(AlgebraError):
    pass


class NotInvolutive(AlgebraError):
    pass


class NoUnit(AlgebraError):
    pass


class NotSemisimple(AlgebraError):
    pass


class SingularPairing(AlgebraError):
    pass


class NotFaithful(AlgebraError):
    pass


class NotSubalgebra(AlgebraError):
    pass


# quantum groups
class HopfError(QGaloisError):
    pass


class NotAGroup(HopfError):
    pass


class ComultiplicationError(HopfError):
    pass


class CoassociativityError(HopfError):
    pass


class CounitError(HopfError):
    pass


class AntipodeError(HopfError):
    pass


class HaarError(HopfError):
    pass


class NonUniqueInvariantState(HopfError):
    pass


class RhoNotPositive(HopfError):
    pass


class RhoInconsistent(HopfError):
    pass


# coactions
class CoactionError(QGaloisError):
    pass


class CoactionNotHomomorphism(CoactionError):
    pass


class CoactionLawError(CoactionError):
    pass


class CoactionCounitError(CoactionError):
    pass


class NotInjective(CoactionError):
    pass


class NotInvariant(CoactionError):
    pass


class QScalarFailed(CoactionError):
    pass


# bi-actions
class MoritaError(QGaloisError):
    pass


class NotCommuting(MoritaError):
    pass


class InverseMismatch(MoritaError):
    pass


class KernelNotSubalgebra(MoritaError, NotSubalgebra):
    pass


class NonUniqueJointInvariantState(MoritaError):
    pass


class IsomorphismNotFound(MoritaError):
    pass


class CocycleInvalid(QGaloisError):
    pass


# input files
class InputError(QGaloisError):
    pass


class ParseError(InputError):
    pass


class SchemaError(InputError):
    pass
