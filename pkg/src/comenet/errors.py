"""Exception hierarchy shared across the package."""


class ComenetError(Exception):
    """Base class for all package-specific errors."""


class EmptyGraph(ComenetError):
    pass


class DuplicatePositions(ComenetError):
    pass


class InvalidRotation(ComenetError):
    pass


class ZeroVector(ComenetError):
    pass


class CollinearReference(ComenetError):
    pass


class DegenerateFrame(ComenetError):
    pass


class DegenerateChain(ComenetError):
    pass


class DisconnectedGraph(ComenetError):
    pass


class InconsistentTuples(ComenetError):
    pass


class LengthMismatch(ComenetError):
    pass


class TopologyMismatch(ComenetError):
    pass


class UnknownSpecies(ComenetError):
    pass


class ShapeMismatch(ComenetError):
    pass


class OutOfCutoff(ComenetError):
    pass


class InvalidDegree(ComenetError):
    pass


class ConvergenceFailure(ComenetError):
    pass


class CalibrationFailure(ComenetError):
    pass


class XYZParseError(ComenetError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
