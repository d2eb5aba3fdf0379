"""Exception hierarchy shared by every inference and coding routine."""


class BcodeError(Exception):
    pass


class CycleDetected(BcodeError):
    pass


class TableSizeMismatch(BcodeError):
    pass


class NegativeProbability(BcodeError):
    pass


class CardinalityMismatch(BcodeError):
    pass


class VariableNotInScope(BcodeError):
    pass


class OrderingMismatch(BcodeError):
    pass


class EvidenceContradiction(BcodeError):
    pass


class TooLargeForBruteForce(BcodeError):
    pass


class ZeroEvidenceProbability(BcodeError):
    pass


class OutOfMemoryBudget(BcodeError):
    pass


class OrderingViolatesHypothesisPrefix(BcodeError):
    pass


class NumericalCollapse(BcodeError):
    pass


class NotSystematic(BcodeError):
    pass


class EmptyParityColumn(BcodeError):
    pass


class InvalidParams(BcodeError):
    pass


class LengthMismatch(BcodeError):
    pass


class ConfigError(BcodeError):
    pass


class CPTNotNormalized(BcodeError):
    pass
