"""Run sorter simulations over a set of input modes and serialize the results."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .field import simulate_tree_field
from .modes import BeamGeometry, ModeIndex, sample_lg
from .netlist import Netlist, StageDecl
from .tree import route_mode, simulate_tree

ENGINES = ("analytic", "field")
POWER_TOL = {"analytic": 1e-12, "field": 1e-2}
# modes the field engine is trusted with at the default grid
FIELD_MAX_L = 3
FIELD_MAX_P = 2


class NumericalGuardError(RuntimeError):
    pass


@dataclass
class ReportRow:
    mode: ModeIndex
    ideal_port: object
    powers: dict

    @property
    def total_power(self) -> float:
        return math.fsum(self.powers.values())

    @property
    def bright_port(self):
        return max(self.powers, key=self.powers.get)


@dataclass
class RunReport:
    engine: str
    netlist: Netlist
    rows: list[ReportRow]
    tolerance: float
    geometry: BeamGeometry | None = None
    elapsed_s: float = field(default=0.0, compare=False)

    @property
    def ports(self) -> list:
        return list(self.rows[0].powers) if self.rows else []

    @property
    def power_check_passed(self) -> bool:
        return all(abs(r.total_power - 1.0) <= self.tolerance for r in self.rows)


def port_name(port) -> str:
    if isinstance(port, tuple):
        return "/".join(str(p) for p in port)
    return str(port)


def perturb(netlist: Netlist, sigma: float, seed: int) -> Netlist:
    """Add seeded Gaussian errors of width ``sigma`` to every stage's arm and shifter."""
    rng = np.random.default_rng(seed)
    out = []
    for d in netlist.stages:
        dr, dp = rng.normal(0.0, sigma, size=2)
        out.append(StageDecl(d.kind, d.n, d.k, d.rot_err + float(dr), d.phase_err + float(dp)))
    return Netlist(netlist.depth, netlist.frft_depth, tuple(out))


def run_simulation(netlist: Netlist, modes: list[ModeIndex], engine: str = "analytic",
                   geometry: BeamGeometry | None = None, force: bool = False) -> RunReport:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    tree = netlist.to_tree()
    t0 = time.perf_counter()
    rows = []
    if engine == "analytic":
        for m in modes:
            dist = simulate_tree(m, tree)
            rows.append(ReportRow(m, route_mode(m, tree), dict(sorted(dist.powers.items()))))
    else:
        if tree.frft_depth is not None:
            raise NotImplementedError("the field engine has no FRFT stages; use --engine analytic")
        geometry = geometry or BeamGeometry()
        for m in modes:
            if not force and (abs(m.l) > FIELD_MAX_L or m.p > FIELD_MAX_P):
                raise NumericalGuardError(
                    f"field engine limited to |l|<={FIELD_MAX_L}, p<={FIELD_MAX_P} "
                    f"(got l={m.l}, p={m.p}); pass --force to override")
            outs = simulate_tree_field(sample_lg(m, geometry), tree)
            rows.append(ReportRow(m, route_mode(m, tree), {p: f.power() for p, f in outs.items()}))
    report = RunReport(engine, netlist, rows, POWER_TOL[engine],
                       geometry if engine == "field" else None)
    report.elapsed_s = time.perf_counter() - t0
    return report


def _num(x: float) -> float:
    # 12 significant digits keeps output stable across platforms
    return float(f"{x:.12g}")


def report_to_dict(report: RunReport) -> dict:
    nl = report.netlist
    out = {
        "engine": report.engine,
        "depth": nl.depth,
        "frft_depth": nl.frft_depth,
        "ports": [port_name(p) for p in report.ports],
        "stage_errors": [
            {"kind": d.kind.value, "n": d.n, "k": d.k,
             "rot_err": _num(d.rot_err), "phase_err": _num(d.phase_err)}
            for d in nl.stages if d.rot_err or d.phase_err
        ],
        "rows": [
            {"l": r.mode.l, "p": r.mode.p,
             "ideal_port": port_name(r.ideal_port),
             "bright_port": port_name(r.bright_port),
             "powers": [_num(v) for v in r.powers.values()],
             "total_power": _num(r.total_power)}
            for r in report.rows
        ],
        "power_check": {"tolerance": report.tolerance, "passed": report.power_check_passed},
    }
    if report.geometry is not None:
        g = report.geometry
        out["geometry"] = {"waist": g.waist, "grid": g.grid_size, "extent": g.extent}
    return out


def report_to_json(report: RunReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def report_to_csv(report: RunReport) -> str:
    """Crosstalk matrix: one row per input mode, one column per port (residue order)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "p"] + [f"port_{port_name(p)}" for p in report.ports])
    for r in report.rows:
        w.writerow([r.mode.l, r.mode.p] + [f"{v:.12g}" for v in r.powers.values()])
    return buf.getvalue()
