"""Exception types shared across the package."""


class InvalidSpec(ValueError):
    """Chain family parameters outside their documented ranges."""


class NotReversible(ValueError):
    """Detailed balance fails beyond tolerance for the supplied matrix."""


class NotIrreducible(ValueError):
    """Support graph of the transition matrix is not strongly connected."""


class NumericalFailure(RuntimeError):
    """A numerical accuracy contract could not be met."""


class SingularSystem(RuntimeError):
    """The hitting-time linear system is numerically singular."""


class BadEps(ValueError):
    """Mixing thresholds must be strictly positive."""


class BadRange(ValueError):
    """Eigenvalue interval for the optimization certificate is empty."""


class AllCensored(RuntimeError):
    """Every Monte Carlo replicate hit a cap; no estimate is available."""


class CertificateMismatch(RuntimeError):
    """Numeric optimum disagrees with the closed-form extremal value."""
