"""Exception hierarchy shared by all modules.

Numeric errors (bad physics inputs, singular evaluations) derive from
``NumericError``; configuration problems derive from ``ConfigError``.
The CLI maps them to exit codes 3 and 2 respectively.
"""


class OptiserfError(Exception):
    """Base class for all package errors."""


class InvalidInputError(OptiserfError, ValueError):
    """Non-finite or otherwise invalid numeric input."""


class NumericError(OptiserfError):
    """A numerically singular or unreachable evaluation."""


class SingularDetuningError(NumericError):
    """Optical frequency requested exactly at a transition line center."""


class NoResonanceError(NumericError):
    """Differential light-shift cross-section vanishes; no resonance exists."""


class UnreachableResonanceError(NumericError):
    """Resonance would require negative power for the given handedness."""


class DegenerateInputError(NumericError):
    """Input carries no usable information (e.g. an all-zero trace)."""


class ConfigError(OptiserfError):
    """Invalid or inconsistent run configuration."""
