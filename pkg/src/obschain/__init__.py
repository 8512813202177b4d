"""Estimation fidelities for chains of independent observers of a quantum state.

The package computes, in closed form, how well each member of a sequence of
mutually ignorant observers can estimate an unknown pure state they measure
one after another (greedy, egalitarian and privileged-observer strategies),
and independently verifies those numbers by simulating the actual measurement
chains. A FastAPI service exposes the calculators; the CLI is a thin client
of that service.
"""

__version__ = "0.1.0"

from . import channels, core, montecarlo, strategies
from .errors import DomainError, NumericError, UnsupportedEncodingError

__all__ = [
    "DomainError",
    "NumericError",
    "UnsupportedEncodingError",
    "__version__",
    "channels",
    "core",
    "montecarlo",
    "strategies",
]
