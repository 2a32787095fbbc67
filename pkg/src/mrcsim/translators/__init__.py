"""Compilers from classical machines to MRC programs, and back to sequential time."""

from .blocks import (
    BlockPlan,
    InfeasibleSpace,
    collector_bytes,
    compile_dfa_to_mrc,
    compile_sublog_tm_to_mrc,
)
from .padding import (
    MalformedPadding,
    make_padded_decider,
    pad_string,
    padded_length,
    unpad_string,
    unpadded_length,
)
from .sequential import (
    AccountingError,
    SequentialAccounting,
    envelope,
    simulate_mrc_sequential,
)
from .tisp import compile_tisp_to_mrc
from .unary import build_unary_nonuniform
from .wordcount import direct_counts, encode_words, format_counts, wordcount_program

__all__ = [
    "AccountingError",
    "BlockPlan",
    "InfeasibleSpace",
    "MalformedPadding",
    "SequentialAccounting",
    "build_unary_nonuniform",
    "collector_bytes",
    "compile_dfa_to_mrc",
    "compile_sublog_tm_to_mrc",
    "compile_tisp_to_mrc",
    "direct_counts",
    "encode_words",
    "envelope",
    "format_counts",
    "make_padded_decider",
    "pad_string",
    "padded_length",
    "simulate_mrc_sequential",
    "unpad_string",
    "unpadded_length",
    "wordcount_program",
]
