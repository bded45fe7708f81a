class MinorSepError(Exception):
    """
    Base class for every error raised by minorsep.
    """


class InputError(MinorSepError, ValueError):
    """
    Malformed input: a bad file line or a vertex id out of range.
    """


class ParameterError(MinorSepError, ValueError):
    """
    A numeric parameter is outside its admissible range.
    """


class DomainError(MinorSepError, ValueError):
    """
    A structural precondition of an operation does not hold.
    """


class ContractError(MinorSepError, ValueError):
    pass


class ScaleError(MinorSepError, ValueError):
    pass


class ProfileError(MinorSepError, ValueError):
    pass


class ConversionError(MinorSepError, ValueError):
    """
    An almost-embedding could not be turned into a minor model.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DecompositionError(MinorSepError, ValueError):
    """
    A KPR decomposition violates one of its defining properties.
    """

    def __init__(self, message, prop=None):
        super().__init__(message)
        self.prop = prop


class WeightOverflowError(MinorSepError, OverflowError):
    """
    A weight or distance no longer fits in a signed 64-bit integer.
    """

    def __init__(self, message, iteration=None, total_weight=None):
        super().__init__(message)
        self.iteration = iteration
        self.total_weight = total_weight


class InternalError(MinorSepError, RuntimeError):
    pass
