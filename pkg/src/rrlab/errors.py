"""Exception types raised by rrlab."""


class RRLabError(Exception):
    """Base class for all rrlab errors."""


class TurningPoint(RRLabError, ValueError):
    """The particle cannot climb the potential: p**2 <= 2 m sup V."""


class GridTooCoarse(RRLabError):
    pass


class OutOfGrid(RRLabError, ValueError):
    pass


class SupportNotCompact(RRLabError, ValueError):
    """Acceleration samples do not vanish at the ends of the time grid."""


class AccelerationAfterMeasurement(RRLabError, ValueError):
    """Acceleration is nonzero for t > 0, where the position is measured."""


class NonpositiveCutoff(RRLabError, ValueError):
    pass


class PhaseStationary(RRLabError, ValueError):
    """The WKB phase derivative K(z) vanishes somewhere on the ramp."""


class OmegaOutOfRange(RRLabError, ValueError):
    pass


class WindowTooNarrow(RRLabError, ValueError):
    pass


class WidthTooLarge(RRLabError, ValueError):
    pass


class GridTooSmall(RRLabError, ValueError):
    pass


class QuadratureError(RRLabError):
    """An adaptive quadrature exhausted its node budget."""


class ConfigError(RRLabError, ValueError):
    pass


class ToleranceError(RRLabError):
    """A numerical cross-check failed its stated tolerance."""

    def __init__(self, invariant, value, tol):
        self.invariant = invariant
        self.value = value
        self.tol = tol
        super().__init__(f"{invariant}: {value:.3e} exceeds tolerance {tol:.1e}")
