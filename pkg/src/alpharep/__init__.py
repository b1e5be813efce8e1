"""Displaced number states, their expansions, and heralded gates built on them.

Submodules:

* :mod:`alpharep.fock` - truncated Fock-space states, operators, measurements
* :mod:`alpharep.alpha` - closed-form expansions over displaced number states
* :mod:`alpharep.gates` - the four-mode interferometer and its gates
* :mod:`alpharep.cli` - command-line front end
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlphaRepError,
    InvalidConfigError,
    InvalidDimensionError,
    InvalidLevelError,
    InvalidSplitterError,
    InvalidSqueezingError,
    TruncationRiskError,
    ZeroProbabilityBranch,
)

__all__ = [
    "AlphaRepError",
    "InvalidConfigError",
    "InvalidDimensionError",
    "InvalidLevelError",
    "InvalidSplitterError",
    "InvalidSqueezingError",
    "TruncationRiskError",
    "ZeroProbabilityBranch",
    "__version__",
]
