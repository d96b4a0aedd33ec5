"""
Exception hierarchy for the divergence library.

Library code raises these; only the command-line front end turns them into
diagnostics and exit codes.
"""


class DivergenceError(Exception):
    """Root of every error raised by this package."""


class InvalidAlgebra(DivergenceError):
    pass


class ShapeMismatch(DivergenceError):
    pass


class BlockError(DivergenceError):
    """An error tied to one matrix block of an element."""

    def __init__(self, message, block=None):
        self.block = block
        if block is not None:
            message = f"block {block}: {message}"
        super().__init__(message)


class NotHermitian(BlockError):
    pass


class NotPositive(BlockError):
    pass


class NotUnitary(BlockError):
    pass


class NonFiniteValue(BlockError):
    pass


class SolverFailure(BlockError):
    pass


class NotNormalized(DivergenceError):
    pass


class ZeroTrace(DivergenceError):
    pass


class InvalidDistribution(DivergenceError):
    pass


class UnknownDivergence(DivergenceError):
    pass


class ParameterOutOfRange(DivergenceError):
    pass


class ProblemParseError(DivergenceError):
    """Malformed problem file; `path` names the offending JSON location."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
