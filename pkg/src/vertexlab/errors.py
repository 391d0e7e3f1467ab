"""Exception hierarchy shared by every module."""


class VertexLabError(Exception):
    """Base class for all library errors."""


class ShapeError(VertexLabError, ValueError):
    pass


class SamplingError(VertexLabError, RuntimeError):
    pass


class SizeError(VertexLabError, ValueError):
    pass


class InternalInconsistency(VertexLabError, RuntimeError):
    """Two independent evaluation strategies disagreed."""


class DegenerateNormalization(VertexLabError, ZeroDivisionError):
    pass


class GeometryError(VertexLabError, ValueError):
    pass


class SingularHeight(VertexLabError, ZeroDivisionError):
    pass


class DegenerateCoupling(VertexLabError, ZeroDivisionError):
    pass


class ArgError(VertexLabError, ValueError):
    pass


class TruncationError(VertexLabError, ArithmeticError):
    pass


class ProbeInconclusive(VertexLabError, RuntimeError):
    pass


class UsageError(VertexLabError, ValueError):
    pass
