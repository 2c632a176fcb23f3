"""
Exception hierarchy shared by every hierarchynet module.

Each family carries the process exit code the CLI reports for it.
"""
from typing import Optional, Tuple

Span = Tuple[int, int]


class HierarchyNetError(Exception):
    exit_code = 1


# ---------------------------------------------------------------------------------------
# Configuration / usage

class ConfigError(HierarchyNetError):
    exit_code = 1


# ---------------------------------------------------------------------------------------
# Data problems (bad input source, corpus, tokenizer, metrics input)

class DataError(HierarchyNetError):
    exit_code = 2


class JavaSyntaxError(DataError):
    def __init__(self, span: Span, message: str):
        self.span = span
        self.message = message
        super().__init__(f"{message} at {span[0]}..{span[1]}")


class UnsupportedConstruct(DataError):
    def __init__(self, span: Span, construct_name: str):
        self.span = span
        self.construct_name = construct_name
        super().__init__(f"unsupported construct '{construct_name}' at {span[0]}..{span[1]}")


class UnterminatedString(DataError):
    def __init__(self, offset: int):
        self.offset = offset
        super().__init__(f"unterminated string literal starting at {offset}")


class EmptyAfterPreprocess(DataError):
    pass


class VocabTooSmall(DataError):
    def __init__(self, vocab_size: int, minimum: int):
        super().__init__(f"vocab size {vocab_size} must exceed {minimum}")


class LengthMismatch(DataError):
    def __init__(self, n_refs: int, n_hyps: int):
        super().__init__(f"{n_refs} references but {n_hyps} hypotheses")


class UnknownType(DataError):
    def __init__(self, node_type: str):
        self.node_type = node_type
        super().__init__(f"node type '{node_type}' is not in the grammar vocabulary")


class MissingCheckpoint(DataError):
    def __init__(self, path: Optional[str]):
        super().__init__(f"checkpoint not found: {path}")


class CorpusFormatError(DataError):
    pass


# ---------------------------------------------------------------------------------------
# Numeric failures

class NumericError(HierarchyNetError):
    exit_code = 3


class ShapeMismatch(NumericError):
    def __init__(self, op: str, got, expected):
        self.op = op
        self.got = got
        self.expected = expected
        super().__init__(f"{op}: got shape {got}, expected {expected}")


class NotScalar(NumericError):
    def __init__(self, shape):
        super().__init__(f"backward() needs a scalar, got shape {shape}")


class SequenceTooLong(NumericError):
    def __init__(self, length: int, limit: int):
        super().__init__(f"sequence of length {length} exceeds max source length {limit}")


class PrefixTooLong(NumericError):
    def __init__(self, length: int, limit: int):
        super().__init__(f"target prefix of length {length} exceeds max target length {limit}")


class NonTermination(NumericError):
    pass


class NanLossError(NumericError):
    pass
