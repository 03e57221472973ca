"""Exception types raised by the simulator and analysis helpers."""


class DumbbellError(Exception):
    """Base class for every error raised by this package."""


class InadmissibleState(DumbbellError, ValueError):
    """A mass sits below the floor."""


class CornerBranch(DumbbellError):
    """Contact at phi = 0 or pi, where both masses touch the floor at once.

    No reflection law is defined there, so the impact is reported, not resolved.
    """


class StationaryState(DumbbellError):
    """Both the vertical and the angular velocity vanish below the escape height."""


class ZeroNormal(DumbbellError, ValueError):
    pass


class NotInContact(DumbbellError, ValueError):
    pass


class OutgoingState(DumbbellError, ValueError):
    """The contact point already moves away from the floor."""


class OutOfRange(DumbbellError, ValueError):
    pass


class NearVertical(DumbbellError, ValueError):
    """The rod is too close to vertical for the leading-order bounce map."""


class DegenerateWedge(DumbbellError, ValueError):
    pass


class OnVertex(DumbbellError):
    """A wedge trajectory runs into the apex."""


class ConfigError(DumbbellError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
