"""Multi-bubble approximate solutions of the critical Lane-Emden system.

The package builds the radial ground state of the limit system, the
polygonal bubble ansatz, the reduced energy and the Lyapunov-Schmidt
correction, and checks the local Pohozaev identities numerically.
"""

__version__ = "0.1.0"

from bubblekit.config import (  # noqa: F401
    ConfigError,
    PotentialSpec,
    SystemConfig,
    check_assumption_P,
    eval_potential,
    partner_exponent,
    scaling_parameter,
    validate_hyperbola,
)
