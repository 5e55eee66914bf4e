"""quantclock: quantile-clock time changes of subordinators.

Simulation of clock paths and time-changed prices, exact sampling of
GGC marginals by perfect simulation, inverse design of driving laws for
prescribed marginals (variance-gamma, CGMY, NIG among them), European
option pricing, and the statistical battery that verifies the
distributional identities the whole construction rests on.
"""

from . import battery, bdlp, cli, clock, ggc, laws, levy, pricing, quantiles, rng, skeleton, verify
from .errors import QuantclockError

__version__ = "0.1.0"

__all__ = [
    "battery",
    "bdlp",
    "cli",
    "clock",
    "ggc",
    "laws",
    "levy",
    "pricing",
    "quantiles",
    "rng",
    "skeleton",
    "verify",
    "QuantclockError",
    "__version__",
]
