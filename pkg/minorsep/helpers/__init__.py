from .choices import (
    CollisionMethod,
    GraphFamily,
    InvariantStatus,
    MinorPattern,
    OutcomeKind,
    PatternRole,
    SearchEngine,
    SepKind,
)
from .exceptions import (
    ContractError,
    ConversionError,
    DecompositionError,
    DomainError,
    InputError,
    InternalError,
    MinorSepError,
    ParameterError,
    ProfileError,
    ScaleError,
    WeightOverflowError,
)
