"""Resource-metered simulator for MapReduce-style (MRC) and BSP computation."""

from .core import (
    ACCEPT,
    REJECT,
    VIOLATION,
    BehaviorError,
    Bound,
    Context,
    InputEncoding,
    MrcError,
    MrcProgram,
    Pair,
    ProgramError,
    ResourceLimits,
    ResourceReport,
    ResourceViolation,
    RoundBehavior,
    RoundState,
    decode_input,
    encode_input,
    run,
    run_round,
    shuffle_and_sort,
)

__version__ = "0.1.0"
