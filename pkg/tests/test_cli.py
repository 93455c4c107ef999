import csv
import io
import json
import math
import subprocess
import sys

import pytest

from oamsort.cli import main
from oamsort.field import read_field_dump
from oamsort.modes import ModeIndex, sample_lg


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def netlist(tmp_path):
    def make(text, name="n.net"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


@pytest.mark.parametrize("l,depth,port", [(5, 3, 5), (0, 4, 0), (-1, 2, 3)])
def test_route(capsys, l, depth, port):
    code, out, _ = run(capsys, "route", "--l", str(l), "--depth", str(depth))
    assert code == 0
    assert f"port {port}, power 1.000000000000" in out.splitlines()[0]


def test_route_json_and_csv(capsys):
    code, out, _ = run(capsys, "route", "--l", "5", "--depth", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["port"] == "5" and doc["power"] == 1.0
    assert sum(doc["powers"].values()) == pytest.approx(1.0, abs=1e-12)
    code, out, _ = run(capsys, "route", "--l", "5", "--depth", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8 and rows[5]["power"] == "1"


def test_route_with_frft(capsys):
    code, out, _ = run(capsys, "route", "--l", "1", "--p", "1", "--depth", "1", "--frft-depth", "2")
    assert code == 0
    assert "port 1/3, power 1.000000000000" in out


@pytest.mark.parametrize("argv", [
    ["route", "--depth", "2"],
    ["route", "--l", "1", "--depth", "0"],
    ["route", "--l", "1", "--depth", "9"],
    ["route", "--l", "1", "--p", "-1", "--depth", "2"],
    ["bogus"],
    ["simulate", "missing-file.net"],
    ["dump-field", "--l", "0", "--grid", "255"],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_check(capsys, netlist):
    code, out, _ = run(capsys, "check", netlist("tree depth=2\n"))
    assert code == 0
    assert out.splitlines()[0] == "tree depth=2"
    code, _, err = run(capsys, "check", netlist("stage kind=oam n=1 k=2\n"))
    assert code == 2
    assert "k out of range for n" in err


def test_simulate_identity_matrix(capsys, netlist):
    path = netlist("tree depth=2\n")
    code, out, _ = run(capsys, "simulate", path, "--l", "0..3", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["l", "p", "port_0", "port_1", "port_2", "port_3"]
    for i, row in enumerate(rows[1:]):
        powers = [float(x) for x in row[2:]]
        assert powers[i] == pytest.approx(1.0, abs=1e-12)
        assert sum(powers) - powers[i] < 1e-12


def test_simulate_rotator_error(capsys, netlist):
    path = netlist("tree depth=2\nstage kind=oam n=0 k=0 rot_err=0.1\n")
    code, out, _ = run(capsys, "simulate", path, "--l", "0..3")
    assert code == 0
    doc = json.loads(out)
    assert doc["stage_errors"] == [{"kind": "oam", "n": 0, "k": 0, "rot_err": 0.1, "phase_err": 0.0}]
    for row in doc["rows"]:
        l = row["l"]
        assert sum(row["powers"]) == pytest.approx(1.0, abs=1e-11)
        leaked = 1.0 - row["powers"][l % 4]
        assert leaked == pytest.approx(math.sin(l * 0.05) ** 2, abs=1e-11)
    assert doc["power_check"]["passed"]


def test_simulate_field_engine(capsys, netlist):
    path = netlist("tree depth=1\n")
    code, out, _ = run(capsys, "simulate", path, "--l", "1", "--engine", "field")
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"][0]["powers"][1] >= 0.99
    assert doc["geometry"] == {"waist": 1.0, "grid": 256, "extent": 8.0}


def test_field_engine_guard(capsys, netlist):
    path = netlist("tree depth=1\n")
    code, _, err = run(capsys, "simulate", path, "--l", "4", "--engine", "field")
    assert code == 3
    assert "--force" in err
    code, out, _ = run(capsys, "simulate", path, "--l", "4", "--engine", "field", "--force")
    assert code == 0
    # a mode that does not fit the grid trips the truncation guard even when forced
    code, _, err = run(capsys, "simulate", path, "--l", "9", "--p", "3", "--engine", "field", "--force")
    assert code == 3
    assert "mode truncated" in err


def test_field_engine_rejects_frft(capsys, netlist):
    code, _, err = run(capsys, "simulate", netlist("tree depth=1 frft_depth=1\n"), "--engine", "field")
    assert code == 1


def test_simulate_frft_netlist(capsys, netlist):
    path = netlist("tree depth=1 frft_depth=2\n")
    code, out, _ = run(capsys, "simulate", path, "--l", "1", "--p", "0..1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["port_1/1"]) == pytest.approx(1, abs=1e-12)
    assert float(rows[1]["port_1/3"]) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_outputs_byte_stable(capsys, netlist, tmp_path, fmt):
    path = netlist("tree depth=3\nstage kind=oam n=1 k=1 rot_err=0.07 phase_err=-0.01\n")
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.{fmt}"
        code, _, _ = run(capsys, "simulate", path, "--l=-4..4", "--format", fmt,
                         "--error-sigma", "0.05", "--seed", "11", "--out", str(out))
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_seed_changes_errors(capsys, netlist):
    path = netlist("tree depth=2\n")
    docs = []
    for seed in ("1", "2"):
        _, out, _ = run(capsys, "simulate", path, "--error-sigma", "0.1", "--seed", seed)
        docs.append(json.loads(out))
    assert docs[0]["stage_errors"] != docs[1]["stage_errors"]
    for d in docs:
        assert all(abs(r["total_power"] - 1) < 1e-12 for r in d["rows"])


def test_dump_field(capsys, tmp_path):
    out = tmp_path / "f.txt"
    code, _, _ = run(capsys, "dump-field", "--l", "1", "--grid", "64", "--out", str(out))
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == "grid 64 extent 8.0"
    f = read_field_dump(text)
    ref = sample_lg(ModeIndex(1), f.geometry)
    assert (f.samples == ref.samples).all()


def test_dump_field_port(capsys, tmp_path):
    out = tmp_path / "f.txt"
    code, _, _ = run(capsys, "dump-field", "--l", "2", "--depth", "2", "--grid", "64", "--out", str(out))
    assert code == 0
    assert read_field_dump(out.read_text()).power() == pytest.approx(1.0, abs=1e-12)
    code, _, _ = run(capsys, "dump-field", "--l", "2", "--depth", "2", "--port", "0",
                     "--grid", "64", "--out", str(out))
    assert read_field_dump(out.read_text()).power() < 1e-20


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oamsort.cli", "route", "--l", "-1", "--depth", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "port 3, power 1.000000000000" in proc.stdout
