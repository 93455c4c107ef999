"""Simulation of converter-free OAM mode sorters built from Mach-Zehnder
interferometers with a beam rotator and a tunable phase shifter."""

from .elements import (
    FrftSpec,
    PhaseShifterSpec,
    RotatorSpec,
    beamsplitter,
    frft_phase,
    phase_shifter_phase,
    rotator_phase,
)
from .field import (
    apply_phase,
    decompose,
    rotate_field,
    simulate_stage_field,
    simulate_tree_field,
    split_combine,
)
from .modes import BeamGeometry, Field, ModeIndex, mode_order, overlap, sample_lg
from .netlist import Netlist, format_netlist, parse_netlist
from .stage import Port, StageKind, StageOutput, StageSpec, branch_predicate, stage_transfer
from .tree import (
    PortDistribution,
    SorterTree,
    append_frft_sorter,
    build_tree,
    route,
    route_mode,
    simulate_tree,
)

__version__ = "0.1.0"
