"""Command-line interface: ``oamsort route|simulate|check|dump-field``.

Exit codes: 0 success, 1 usage error, 2 netlist parse/semantic error,
3 numerical guard tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from .field import simulate_tree_field, write_field_dump
from .modes import BeamGeometry, ModeIndex, ModeTruncatedError, sample_lg
from .netlist import NetlistError, format_netlist, parse_netlist
from .report import (
    NumericalGuardError,
    perturb,
    port_name,
    report_to_csv,
    report_to_json,
    run_simulation,
)
from .tree import TreeError, append_frft_sorter, build_tree, route_mode, simulate_tree

log = logging.getLogger("oamsort")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def int_range(text: str) -> list[int]:
    """Parse ``3``, ``0..3`` (inclusive) or ``-1,2,5`` (items may be ranges)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    return out


def _geometry(args) -> BeamGeometry:
    try:
        return BeamGeometry(waist=args.waist, grid_size=args.grid, extent=args.extent)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_route(args) -> int:
    try:
        tree = build_tree(args.depth)
        if args.frft_depth:
            tree = append_frft_sorter(tree, args.frft_depth)
    except TreeError as e:
        raise UsageError(str(e)) from None
    m = ModeIndex(args.l, args.p)
    port = route_mode(m, tree)
    dist = simulate_tree(m, tree)
    powers = dict(sorted(dist.powers.items()))
    if args.format == "json":
        doc = {"l": m.l, "p": m.p, "depth": args.depth, "frft_depth": args.frft_depth,
               "port": port_name(port), "power": float(f"{powers[port]:.12g}"),
               "powers": {port_name(k): float(f"{v:.12g}") for k, v in powers.items()}}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "p", "port", "power"])
        for k, v in powers.items():
            w.writerow([m.l, m.p, port_name(k), f"{v:.12g}"])
        text = buf.getvalue()
    else:
        lines = [f"l={m.l} p={m.p} depth={args.depth}: port {port_name(port)}, "
                 f"power {powers[port]:.12f}", "port  power"]
        lines += [f"{port_name(k):>4}  {v:.12f}" for k, v in powers.items()]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _read_netlist(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read netlist: {e}") from None
    return parse_netlist(text)


def cmd_check(args) -> int:
    netlist = _read_netlist(args.netlist)
    _emit(format_netlist(netlist), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    netlist = _read_netlist(args.netlist)
    if args.error_sigma:
        netlist = perturb(netlist, args.error_sigma, args.seed)
    ls = args.l if args.l is not None else list(range(2**netlist.depth))
    modes = [ModeIndex(l, p) for l in ls for p in args.p]
    geometry = _geometry(args) if args.engine == "field" else None
    try:
        report = run_simulation(netlist, modes, args.engine, geometry, force=args.force)
    except NotImplementedError as e:
        raise UsageError(str(e)) from None
    log.info("simulated %d modes with the %s engine in %.3f s",
             len(modes), args.engine, report.elapsed_s)
    text = report_to_csv(report) if args.format == "csv" else report_to_json(report)
    _emit(text, args.out)
    if not report.power_check_passed:
        raise NumericalGuardError(f"output power deviates from input by more than {report.tolerance}")
    return EXIT_OK


def cmd_dump_field(args) -> int:
    g = _geometry(args)
    f = sample_lg(ModeIndex(args.l, args.p), g)
    if args.depth:
        try:
            tree = build_tree(args.depth)
        except TreeError as e:
            raise UsageError(str(e)) from None
        port = args.port if args.port is not None else args.l % 2**args.depth
        if not 0 <= port < 2**args.depth:
            raise UsageError(f"port {port} does not exist at depth {args.depth}")
        f = simulate_tree_field(f, tree)[port]
    buf = io.StringIO()
    write_field_dump(f, buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress and timing")
    p = _Parser(prog="oamsort", description="Converter-free OAM mode sorter simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grid_opts(sp):
        sp.add_argument("--grid", type=int, default=256)
        sp.add_argument("--waist", type=float, default=1.0)
        sp.add_argument("--extent", type=float, default=8.0)

    r = sub.add_parser("route", parents=[common], help="ideal output port and port powers for one mode")
    r.add_argument("--l", type=int, required=True)
    r.add_argument("--p", type=int, default=0)
    r.add_argument("--depth", type=int, required=True)
    r.add_argument("--frft-depth", type=int, default=None)
    r.add_argument("--format", choices=["text", "json", "csv"], default="text")
    r.add_argument("--out")
    r.set_defaults(func=cmd_route)

    s = sub.add_parser("simulate", parents=[common], help="simulate a netlist over a set of input modes")
    s.add_argument("netlist")
    s.add_argument("--l", type=int_range, default=None, help="e.g. 0..3, or --l=-2..2 for negative starts (default: all residues)")
    s.add_argument("--p", type=int_range, default=[0])
    s.add_argument("--engine", choices=["analytic", "field"], default="analytic")
    grid_opts(s)
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--out")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--error-sigma", type=float, default=0.0,
                   help="add seeded Gaussian errors (rad) to every stage")
    s.add_argument("--force", action="store_true", help="skip the field-engine mode-range guard")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("check", parents=[common], help="validate a netlist and print its canonical form")
    c.add_argument("netlist")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("dump-field", parents=[common], help="write a sampled field grid")
    d.add_argument("--l", type=int, required=True)
    d.add_argument("--p", type=int, default=0)
    d.add_argument("--depth", type=int, default=None, help="dump a sorter output port instead")
    d.add_argument("--port", type=int, default=None)
    grid_opts(d)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dump_field)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"oamsort: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NetlistError as e:
        print(f"oamsort: {args.netlist}: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericalGuardError, ModeTruncatedError) as e:
        print(f"oamsort: numerical guard: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"oamsort: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
