"""Domain exception hierarchy. Every error the library raises derives from LepskiiError."""


class LepskiiError(Exception):
    """Base class for all domain errors; the CLI maps these to exit code 1."""


class NonSymmetricError(LepskiiError):
    pass


class NonFiniteError(LepskiiError):
    pass


class NotPositiveSemiDefiniteError(LepskiiError):
    pass


class DomainViolationError(LepskiiError):
    pass


class InvalidLambdaError(LepskiiError):
    pass


class InvalidEtaError(LepskiiError):
    pass


class InvalidRatioError(LepskiiError):
    pass


class InvalidLambda0Error(LepskiiError):
    pass


class DimensionMismatchError(LepskiiError):
    pass


class EmptySpectrumError(LepskiiError):
    pass


class NoRootError(LepskiiError):
    pass


class NotReachedError(LepskiiError):
    pass


class IncompleteFamilyError(LepskiiError):
    pass


class DegenerateFitError(LepskiiError):
    pass


class NoCrossingError(LepskiiError):
    pass


class EmptyJError(LepskiiError):
    pass


class FullJError(LepskiiError):
    pass


class InsufficientDataError(LepskiiError):
    pass


class DegenerateSplitError(LepskiiError):
    pass
