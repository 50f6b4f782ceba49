"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """A configuration is malformed: bad JSON, unknown key, or an
    invariant violation.  The message names the offending field path."""


class RegimeError(ValueError):
    """Inputs are valid but lie outside the validity regime of the
    underlying circuit model (diverging inductance, missing root,
    pole proximity, unreachable target, ...)."""


class LabelingError(RuntimeError):
    """Dressed eigenstates cannot be assigned bare labels unambiguously
    (maximum overlap below threshold, typically near an anticrossing)."""


class RegimeWarning(UserWarning):
    """Soft guard tripped: the model still runs but an assumption is
    getting marginal (weak transmon hierarchy, dispersive ratio, ...)."""
