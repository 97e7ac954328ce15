"""Exception types shared across the package."""


class FpCavityError(Exception):
    """Base class for all package-specific errors."""


class RangeError(FpCavityError, ValueError):
    """A physical parameter is outside its admissible range."""


class DegenerateCavity(FpCavityError, ValueError):
    """Both mirrors are perfect (Gamma = 0); the cavity has no decay time scale."""


class NotSingleEnded(FpCavityError, ValueError):
    """Operation requires a perfectly reflecting back mirror (r2 = 1)."""


class WindowOverflow(FpCavityError, ValueError):
    """The pulse support does not fit inside the sampling window."""


class NoClosedForm(FpCavityError, ValueError):
    """The requested pulse family has no closed-form spectrum."""


class GridTooCoarse(FpCavityError, ValueError):
    """Sampling rate below the required multiple of the free spectral range."""


class WindowTooShort(FpCavityError, ValueError):
    """Time window too short for the cavity lifetime or its wraparound guard."""


class GridMismatch(FpCavityError, ValueError):
    """The round-trip time does not land on an even number of samples."""


class ZeroIncidentEnergy(FpCavityError, ValueError):
    """Energy trace requested for a field with no incident energy."""


class BudgetExhausted(FpCavityError, RuntimeError):
    """Optimizer evaluation cap reached before meeting the convergence tolerance."""


class ParseError(FpCavityError, ValueError):
    """Configuration text is not well-formed."""


class SchemaError(FpCavityError, ValueError):
    """Configuration violates the schema; collects every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
