"""The modified Mach-Zehnder stage: a beam rotator in one arm and a tunable
phase shifter in the other, between two 50/50 beamsplitters.

A stage with modulus exponent ``n`` and residue ``k`` receives modes with
``l = k (mod 2**n)`` and sends ``l = k (mod 2**(n+1))`` to the *keep* port and
``l = 2**n + k (mod 2**(n+1))`` to the *offset* port. With the beamsplitter
convention in :mod:`oamsort.elements` the keep port is the cross port.

An FRFT stage has the same layout with the rotator replaced by an FRFT
element, and sorts on mode order ``2p + |l|`` instead of ``l``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from .elements import (
    FrftSpec,
    PhaseShifterSpec,
    RotatorSpec,
    beamsplitter,
    frft_phase,
    phase_shifter_phase,
    rotator_phase,
)
from .modes import ModeIndex, mode_order


class InvalidStageError(ValueError):
    pass


class RoutingError(ValueError):
    """A mode was presented to a stage outside the stage's residue class."""


class Port(str, enum.Enum):
    KEEP = "keep"
    OFFSET = "offset"


class StageKind(str, enum.Enum):
    OAM = "oam"
    FRFT = "frft"


@dataclass(frozen=True)
class StageSpec:
    """One modified MZ interferometer.

    ``arm`` defaults to a rotator of angle pi/2**n (or an FRFT with order phase
    pi/2**n for FRFT stages) and ``shifter`` to a phase k*pi/2**n.
    """

    n: int
    k: int
    arm: Union[RotatorSpec, FrftSpec, None] = None
    shifter: PhaseShifterSpec | None = None
    kind: StageKind = StageKind.OAM

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise InvalidStageError(f"modulus exponent n must be a non-negative integer, got {self.n}")
        if not 0 <= self.k < 2**self.n or int(self.k) != self.k:
            raise InvalidStageError(f"k out of range for n: need 0 <= k < 2**{self.n}, got k={self.k}")
        kind = StageKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.arm is None:
            arm_cls = FrftSpec if kind is StageKind.FRFT else RotatorSpec
            object.__setattr__(self, "arm", arm_cls(self.alpha))
        elif kind is StageKind.FRFT and not isinstance(self.arm, FrftSpec):
            raise InvalidStageError("FRFT stage needs an FrftSpec arm")
        elif kind is StageKind.OAM and not isinstance(self.arm, RotatorSpec):
            raise InvalidStageError("OAM stage needs a RotatorSpec arm")
        if self.shifter is None:
            object.__setattr__(self, "shifter", PhaseShifterSpec(self.k * self.alpha))

    @classmethod
    def with_errors(cls, n: int, k: int, arm_error: float = 0.0, phase_error: float = 0.0,
                    kind: StageKind | str = StageKind.OAM) -> "StageSpec":
        alpha = math.pi / 2**n
        kind = StageKind(kind)
        arm_cls = FrftSpec if kind is StageKind.FRFT else RotatorSpec
        return cls(n, k, arm_cls(alpha, arm_error), PhaseShifterSpec(k * alpha, phase_error), kind)

    @property
    def alpha(self) -> float:
        return math.pi / 2**self.n

    @property
    def arm_error(self) -> float:
        return self.arm.error

    @property
    def phase_error(self) -> float:
        return self.shifter.error

    def sort_index(self, m: ModeIndex) -> int:
        """The integer this stage sorts on: l for OAM stages, mode order for FRFT stages."""
        return mode_order(m) if self.kind is StageKind.FRFT else m.l


@dataclass(frozen=True)
class StageOutput:
    keep_amp: complex
    offset_amp: complex

    @property
    def keep_power(self) -> float:
        return abs(self.keep_amp) ** 2

    @property
    def offset_power(self) -> float:
        return abs(self.offset_amp) ** 2

    def __getitem__(self, port: Port) -> complex:
        return self.keep_amp if Port(port) is Port.KEEP else self.offset_amp


def arm_phases(m: ModeIndex, s: StageSpec) -> tuple[complex, complex]:
    """Phase factors of (rotator/FRFT arm, phase-shifter arm) for mode ``m``."""
    if s.kind is StageKind.FRFT:
        upper = frft_phase(m, s.arm)
    else:
        upper = rotator_phase(m, s.arm)
    return upper, phase_shifter_phase(m, s.shifter)


def stage_transfer(m: ModeIndex, s: StageSpec, input_amp: complex = 1.0) -> StageOutput:
    """Send ``input_amp`` of mode ``m`` through stage ``s`` (second input port dark)."""
    a, b = beamsplitter(complex(input_amp), 0j)
    upper, lower = arm_phases(m, s)
    c, d = beamsplitter(a * upper, b * lower)
    return StageOutput(keep_amp=d, offset_amp=c)


def branch_predicate(value: int, s: StageSpec) -> Port:
    """Residue-rule port for ``value`` (l, or mode order for FRFT stages)."""
    if (value - s.k) % 2**s.n:
        raise RoutingError(f"{value} is not congruent to k={s.k} mod 2**{s.n}; stage never receives it")
    return Port.KEEP if (value - s.k) % 2 ** (s.n + 1) == 0 else Port.OFFSET
