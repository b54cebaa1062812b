"""Physical constants used throughout the package.

Values are CODATA-2018. ``e`` and ``h`` are exact by the 2019 SI
redefinition; the electron mass is the 2018 recommended value. They are
module-level floats (not configurable) so that every computation in the
package is pinned bit-exactly to the same constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: Elementary charge, C (exact).
ELEMENTARY_CHARGE = 1.602176634e-19

#: Planck constant, J s (exact).
PLANCK_CONSTANT = 6.62607015e-34

#: Electron mass, kg (CODATA-2018).
ELECTRON_MASS = 9.1093837015e-31

#: Exponential decay coefficient of the rectangular-barrier tunneling
#: formula, per (m * sqrt(V)):  4 pi sqrt(2 m_e e) / h.
#: Multiplying by a thickness in metres gives the dimensionless-per-sqrt(volt)
#: decay constant of the current formula.
BARRIER_DECAY_PER_M = (
    4.0 * math.pi * math.sqrt(2.0 * ELECTRON_MASS * ELEMENTARY_CHARGE) / PLANCK_CONSTANT
)

#: Same coefficient per (nm * sqrt(V)); handy because the public API uses nm.
BARRIER_DECAY_PER_NM = BARRIER_DECAY_PER_M * 1e-9


@dataclass(frozen=True)
class PhysicalConstants:
    """Bundle of the constants above, exposed so tests can pin them."""

    e: float = ELEMENTARY_CHARGE
    h: float = PLANCK_CONSTANT
    m_e: float = ELECTRON_MASS


CODATA2018 = PhysicalConstants()
