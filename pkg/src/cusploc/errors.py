"""Error taxonomy shared across the package.

SpecError covers structural problems that are decidable before any data is
touched (bad parameter ranges, malformed configs, unsupported combinations).
NumericalError covers failures that surface only at run time (non-positive
intensity, escaping diffusion paths, windows too small for the mass of the
limit variable). The CLI maps SpecError to exit code 2 and NumericalError
to exit code 3.
"""


class SpecError(ValueError):
    """Invalid model specification or configuration."""


class NumericalError(RuntimeError):
    """Numerical or model failure during simulation or estimation."""
