"""Binary trees of modified MZ stages forming a complete OAM sorter.

Stage ``(n, k)`` sits at level ``n``; its keep output feeds stage ``(n+1, k)``
and its offset output feeds stage ``(n+1, k + 2**n)``. After ``depth`` levels
the port reached by OAM ``l`` is ``l mod 2**depth``.

An optional FRFT tree of depth ``frft_depth`` hangs off every OAM port and
sorts on mode order, so final ports are ``(l mod 2**depth, N mod 2**frft_depth)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Hashable, Iterator, Mapping, Tuple

import numpy as np

from .modes import ModeIndex, mode_order
from .stage import StageKind, StageSpec, stage_transfer

MAX_DEPTH = 8

StageKey = Tuple[int, int]


class TreeError(ValueError):
    pass


def _check_depth(depth, name="depth"):
    if int(depth) != depth or not 1 <= depth <= MAX_DEPTH:
        raise TreeError(f"{name} must be an integer in [1, {MAX_DEPTH}], got {depth}")


def stage_keys(depth: int) -> Iterator[StageKey]:
    for n in range(depth):
        for k in range(2**n):
            yield n, k


def children(key: StageKey, depth: int) -> tuple[tuple[str, int], tuple[str, int]]:
    """Return ((kind, target) for keep, (kind, target) for offset); kind is 'stage' or 'port'.

    For 'stage' targets the integer is the child's residue at level n+1.
    """
    n, k = key
    keep, off = k, k + 2**n
    kind = "stage" if n + 1 < depth else "port"
    return (kind, keep), (kind, off)


@dataclass(frozen=True)
class SorterTree:
    depth: int
    stages: Mapping[StageKey, StageSpec]
    frft_depth: int | None = None
    frft_stages: Mapping[StageKey, StageSpec] = field(default_factory=dict)

    def __post_init__(self):
        _check_depth(self.depth)
        _check_stage_map(self.stages, self.depth, StageKind.OAM)
        if self.frft_depth is not None:
            _check_depth(self.frft_depth, "frft_depth")
            _check_stage_map(self.frft_stages, self.frft_depth, StageKind.FRFT)
        elif self.frft_stages:
            raise TreeError("FRFT stages given without an frft_depth")

    @property
    def n_ports(self) -> int:
        return 2**self.depth

    @property
    def port_labels(self) -> list:
        oam = list(range(2**self.depth))
        if self.frft_depth is None:
            return oam
        return [(a, b) for a in oam for b in range(2**self.frft_depth)]

    @property
    def stage_count(self) -> int:
        return len(self.stages)

    def with_stage(self, stage: StageSpec) -> "SorterTree":
        """Copy of the tree with one stage replaced (e.g. to inject errors)."""
        if stage.kind is StageKind.FRFT:
            frft = dict(self.frft_stages)
            frft[(stage.n, stage.k)] = stage
            return replace(self, frft_stages=frft)
        stages = dict(self.stages)
        stages[(stage.n, stage.k)] = stage
        return replace(self, stages=stages)


def _check_stage_map(stages, depth, kind):
    expected = set(stage_keys(depth))
    if set(stages) != expected:
        missing = sorted(expected - set(stages))
        extra = sorted(set(stages) - expected)
        raise TreeError(f"{kind.value} stages do not form a depth-{depth} tree "
                        f"(missing {missing}, unexpected {extra})")
    for key, s in stages.items():
        if (s.n, s.k) != key or s.kind is not kind:
            raise TreeError(f"stage at {key} is {s.kind.value} ({s.n}, {s.k})")


def default_stages(depth: int, kind=StageKind.OAM) -> dict[StageKey, StageSpec]:
    return {(n, k): StageSpec(n, k, kind=kind) for n, k in stage_keys(depth)}


def build_tree(depth: int) -> SorterTree:
    _check_depth(depth)
    return SorterTree(depth, default_stages(depth))


def append_frft_sorter(tree: SorterTree, frft_depth: int) -> SorterTree:
    """Attach an FRFT mode-order sorter of depth ``frft_depth`` behind every OAM port."""
    _check_depth(frft_depth, "frft_depth")
    return replace(tree, frft_depth=frft_depth,
                   frft_stages=default_stages(frft_depth, StageKind.FRFT))


def route(l: int, tree: SorterTree) -> int:
    return l % 2**tree.depth


def route_mode(m: ModeIndex, tree: SorterTree) -> Hashable:
    """Ideal final port for mode ``m``, including the mode-order index when FRFT stages exist."""
    oam = route(m.l, tree)
    if tree.frft_depth is None:
        return oam
    return oam, mode_order(m) % 2**tree.frft_depth


@dataclass(frozen=True)
class PortDistribution:
    """Complex output amplitude per port label."""

    entries: Dict[Hashable, complex]

    @property
    def powers(self) -> dict:
        return {port: abs(a) ** 2 for port, a in self.entries.items()}

    def power(self, port) -> float:
        return abs(self.entries[port]) ** 2

    @property
    def total_power(self) -> float:
        return math.fsum(self.powers.values())

    @property
    def bright_port(self):
        return max(self.entries, key=lambda p: abs(self.entries[p]))

    def power_outside(self, port) -> float:
        return math.fsum(v for p, v in self.powers.items() if p != port)

    def as_array(self) -> np.ndarray:
        return np.array([self.power(p) for p in sorted(self.entries)])


def _cascade(m: ModeIndex, stages, depth: int, amp: complex) -> dict[int, complex]:
    """Propagate ``amp`` through a full stage tree carrying both children at every stage."""
    out = {p: 0j for p in range(2**depth)}
    frontier = [((0, 0), complex(amp))]
    while frontier:
        key, a = frontier.pop()
        res = stage_transfer(m, stages[key], a)
        (kind, keep), (_, off) = children(key, depth)
        if kind == "port":
            out[keep] += res.keep_amp
            out[off] += res.offset_amp
        else:
            frontier.append(((key[0] + 1, keep), res.keep_amp))
            frontier.append(((key[0] + 1, off), res.offset_amp))
    return out


def simulate_tree(m: ModeIndex, tree: SorterTree, input_amp: complex = 1.0) -> PortDistribution:
    """Exact output amplitudes of mode ``m`` at every port of ``tree``.

    Amplitudes that meet at one port add coherently.
    """
    oam = _cascade(m, tree.stages, tree.depth, input_amp)
    if tree.frft_depth is None:
        return PortDistribution(oam)
    entries = {}
    for port, a in oam.items():
        for sub, b in _cascade(m, tree.frft_stages, tree.frft_depth, a).items():
            entries[(port, sub)] = b
    return PortDistribution(entries)
