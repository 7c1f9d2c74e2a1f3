"""Exception hierarchy shared by all geoord modules."""


class GeoordError(Exception):
    """Base class for every error raised by geoord."""


class AntipodalRotation(GeoordError, ValueError):
    """Relative rotation angle reached pi, where the rotation log is not unique.

    ``pair`` holds the offending sample indices when raised while building a
    distance matrix, otherwise ``None``.
    """

    def __init__(self, message="rotation trace is -1: log is not unique", pair=None):
        if pair is not None:
            message = f"{message} (samples {pair[0]} and {pair[1]})"
        super().__init__(message)
        self.pair = pair


class RadiusMismatch(GeoordError, ValueError):
    pass


class NoConvergence(GeoordError, RuntimeError):
    """Newton iteration did not reach the residual tolerance.

    ``solution`` carries the best iterate found.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class EmptySample(GeoordError, ValueError):
    pass


class DuplicatePoints(GeoordError, ValueError):
    pass


class BranchingTree(GeoordError):
    """The spanning tree has vertices of degree >= 3, so no path can be read off."""

    def __init__(self, vertices, max_degree):
        self.vertices = list(vertices)
        self.max_degree = max_degree
        super().__init__(
            f"spanning tree branches at vertices {self.vertices} "
            f"(max degree {max_degree}); sample is not dense enough"
        )


class NonManifoldOutput(GeoordError):
    pass


class TooFewNodes(GeoordError, ValueError):
    pass


class MissingMask(GeoordError, ValueError):
    pass


class AreaOutOfRange(GeoordError, ValueError):
    pass


class StartRequired(GeoordError, ValueError):
    pass


class DegeneratePolygon(GeoordError, ValueError):
    pass
