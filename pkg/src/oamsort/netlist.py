"""Line-oriented netlist format for sorter networks.

Grammar (one declaration per line, ``#`` starts a comment)::

    tree depth=<D> [frft_depth=<F>]
    stage kind=<oam|frft> n=<n> k=<k> [rot_err=<rad>] [phase_err=<rad>]

Exactly one ``tree`` line is required. Stages not declared explicitly are
filled in with error-free defaults, so ``tree depth=2`` alone describes a
complete ideal sorter. For ``kind=frft`` stages ``rot_err`` perturbs the FRFT
order phase, and the declaration applies to the FRFT tree behind every OAM port.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .stage import StageKind, StageSpec
from .tree import MAX_DEPTH, SorterTree, stage_keys


class NetlistError(ValueError):
    """Parse or semantic error with a 1-based source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}, col {self.column}: {self.message}"


class NetlistSyntaxError(NetlistError):
    pass


class NetlistSemanticError(NetlistError):
    pass


@dataclass(frozen=True, order=True)
class StageDecl:
    kind: StageKind
    n: int
    k: int
    rot_err: float = 0.0
    phase_err: float = 0.0

    def to_stage(self) -> StageSpec:
        return StageSpec.with_errors(self.n, self.k, self.rot_err, self.phase_err, self.kind)


@dataclass(frozen=True)
class Netlist:
    depth: int
    frft_depth: int | None
    stages: tuple[StageDecl, ...]

    def to_tree(self) -> SorterTree:
        oam = {(d.n, d.k): d.to_stage() for d in self.stages if d.kind is StageKind.OAM}
        frft = {(d.n, d.k): d.to_stage() for d in self.stages if d.kind is StageKind.FRFT}
        return SorterTree(self.depth, oam, self.frft_depth, frft)


_TREE_KEYS = {"depth": True, "frft_depth": False}
_STAGE_KEYS = {"kind": True, "n": True, "k": True, "rot_err": False, "phase_err": False}


def _tokens(line: str):
    """Yield (column, token) for whitespace-separated tokens of a comment-stripped line."""
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        yield i + 1, line[i:j]
        i = j


def _int_value(raw, key, lineno, col):
    try:
        return int(raw, 10)
    except ValueError:
        raise NetlistSyntaxError(f"{key} expects an integer, got {raw!r}", lineno, col) from None


def _float_value(raw, key, lineno, col):
    try:
        v = float(raw)
    except ValueError:
        raise NetlistSyntaxError(f"{key} expects a number, got {raw!r}", lineno, col) from None
    if not math.isfinite(v):
        raise NetlistSemanticError(f"{key} must be finite, got {raw!r}", lineno, col)
    return v


def _parse_fields(toks, allowed, lineno, keyword):
    fields = {}
    for col, tok in toks:
        key, eq, raw = tok.partition("=")
        if not eq or not key:
            raise NetlistSyntaxError(f"expected key=value, got {tok!r}", lineno, col)
        if not raw:
            raise NetlistSyntaxError(f"missing value for {key!r}", lineno, col)
        if key not in allowed:
            raise NetlistSemanticError(f"unknown key {key!r} for {keyword}", lineno, col)
        if key in fields:
            raise NetlistSemanticError(f"duplicate key {key!r}", lineno, col)
        fields[key] = (raw, col + len(key) + 1)
    for key, required in allowed.items():
        if required and key not in fields:
            raise NetlistSemanticError(f"{keyword} is missing required key {key!r}", lineno, 1)
    return fields


def _parse_tree(toks, lineno):
    fields = _parse_fields(toks, _TREE_KEYS, lineno, "tree")
    out = {}
    for key, (raw, col) in fields.items():
        v = _int_value(raw, key, lineno, col)
        if not 1 <= v <= MAX_DEPTH:
            raise NetlistSemanticError(f"{key} must be in [1, {MAX_DEPTH}], got {v}", lineno, col)
        out[key] = v
    return out["depth"], out.get("frft_depth")


def _parse_stage(toks, lineno):
    fields = _parse_fields(toks, _STAGE_KEYS, lineno, "stage")
    raw, col = fields["kind"]
    try:
        kind = StageKind(raw)
    except ValueError:
        raise NetlistSemanticError(f"unknown stage kind {raw!r} (expected oam or frft)",
                                   lineno, col) from None
    n = _int_value(fields["n"][0], "n", lineno, fields["n"][1])
    k = _int_value(fields["k"][0], "k", lineno, fields["k"][1])
    if not 0 <= n < MAX_DEPTH:
        raise NetlistSemanticError(f"n must be in [0, {MAX_DEPTH - 1}], got {n}", lineno, fields["n"][1])
    if not 0 <= k < 2**n:
        raise NetlistSemanticError(f"k out of range for n: need 0 <= k < {2**n}, got k={k}",
                                   lineno, fields["k"][1])
    errs = {key: _float_value(fields[key][0], key, lineno, fields[key][1])
            for key in ("rot_err", "phase_err") if key in fields}
    return StageDecl(kind, n, k, **errs)


def parse_netlist(text: str) -> Netlist:
    tree = None
    tree_line = None
    explicit: dict[tuple, tuple[StageDecl, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = list(_tokens(line.split("#", 1)[0]))
        if not toks:
            continue
        (col, keyword), rest = toks[0], toks[1:]
        if keyword == "tree":
            if tree is not None:
                raise NetlistSemanticError(f"second tree declaration (first on line {tree_line})",
                                           lineno, col)
            tree, tree_line = _parse_tree(rest, lineno), lineno
        elif keyword == "stage":
            decl = _parse_stage(rest, lineno)
            key = (decl.kind, decl.n, decl.k)
            if key in explicit:
                raise NetlistSemanticError(
                    f"duplicate stage {decl.kind.value} n={decl.n} k={decl.k} "
                    f"(first on line {explicit[key][1]})", lineno, col)
            explicit[key] = (decl, lineno)
        else:
            raise NetlistSyntaxError(f"unknown declaration {keyword!r} (expected tree or stage)",
                                     lineno, col)
    if tree is None:
        raise NetlistSemanticError("missing tree declaration")
    depth, frft_depth = tree
    for (kind, n, k), (decl, lineno) in explicit.items():
        limit = depth if kind is StageKind.OAM else frft_depth
        if limit is None:
            raise NetlistSemanticError("frft stage declared but tree has no frft_depth", lineno, 1)
        if n >= limit:
            name = "depth" if kind is StageKind.OAM else "frft_depth"
            raise NetlistSemanticError(
                f"{kind.value} stage n={n} is inconsistent with tree {name}={limit}", lineno, 1)

    stages = []
    levels = [(StageKind.OAM, depth)] + ([(StageKind.FRFT, frft_depth)] if frft_depth else [])
    for kind, d in levels:
        for n, k in stage_keys(d):
            found = explicit.get((kind, n, k))
            stages.append(found[0] if found else StageDecl(kind, n, k))
    return Netlist(depth, frft_depth, tuple(stages))


def _fmt_float(x: float) -> str:
    return repr(float(x))


def format_netlist(netlist: Netlist) -> str:
    """Canonical text: tree line, then every stage in (kind, n, k) order; zero errors omitted."""
    head = f"tree depth={netlist.depth}"
    if netlist.frft_depth is not None:
        head += f" frft_depth={netlist.frft_depth}"
    lines = [head]
    order = {StageKind.OAM: 0, StageKind.FRFT: 1}
    for d in sorted(netlist.stages, key=lambda d: (order[d.kind], d.n, d.k)):
        s = f"stage kind={d.kind.value} n={d.n} k={d.k}"
        if d.rot_err:
            s += f" rot_err={_fmt_float(d.rot_err)}"
        if d.phase_err:
            s += f" phase_err={_fmt_float(d.phase_err)}"
        lines.append(s)
    return "\n".join(lines) + "\n"


def netlist_from_tree(tree: SorterTree) -> Netlist:
    decls = [StageDecl(s.kind, s.n, s.k, s.arm_error, s.phase_error)
             for s in list(tree.stages.values()) + list(tree.frft_stages.values())]
    return Netlist(tree.depth, tree.frft_depth, tuple(decls))


__all__ = [
    "Netlist", "NetlistError", "NetlistSemanticError",
    "NetlistSyntaxError", "StageDecl", "format_netlist", "netlist_from_tree", "parse_netlist",
]
