"""Exact action of each optical element on an LG mode label.

Conventions
-----------
* Beamsplitter: symmetric 50/50, ``(c, d) = ((a + i b)/sqrt2, (i a + b)/sqrt2)``.
* Rotation by a positive angle is counterclockwise looking along the beam and
  multiplies an OAM-l mode by ``exp(+i l angle)``.
* An FRFT of order phase ``beta`` multiplies a mode of order N by
  ``exp(i N beta)``; the constant Gouy offset is left to the stage's phase shifter.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .modes import ModeIndex, mode_order

SQRT1_2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class RotatorSpec:
    angle: float
    error: float = 0.0

    @property
    def effective_angle(self) -> float:
        return self.angle + self.error


@dataclass(frozen=True)
class PhaseShifterSpec:
    phase: float
    error: float = 0.0

    @property
    def effective_phase(self) -> float:
        return self.phase + self.error


@dataclass(frozen=True)
class FrftSpec:
    """FRFT element; ``order_phase`` is the phase picked up per unit of mode order."""

    order_phase: float
    error: float = 0.0

    @property
    def effective_order_phase(self) -> float:
        return self.order_phase + self.error


def rotator_phase(m: ModeIndex, r: RotatorSpec) -> complex:
    return cmath.exp(1j * m.l * r.effective_angle)


def phase_shifter_phase(m: ModeIndex, s: PhaseShifterSpec) -> complex:
    # the mode is accepted only to share the element signature; the phase is mode independent
    return cmath.exp(1j * s.effective_phase)


def frft_phase(m: ModeIndex, f: FrftSpec) -> complex:
    return cmath.exp(1j * mode_order(m) * f.effective_order_phase)


def beamsplitter(in_a: complex, in_b: complex) -> tuple[complex, complex]:
    return (in_a + 1j * in_b) * SQRT1_2, (1j * in_a + in_b) * SQRT1_2
