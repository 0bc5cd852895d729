import json

import pytest

from ipsim.cli import main
from ipsim.core import LEFT, TafaSpec, parse_machine, validate
from ipsim.transforms.tafa import enumerate_maj

BROKEN = """\
kind verifier
states: q0 q1
input: 0 1
pri: q0
initial: q0
q0 < _ _ pri=0 -> rej _ 0 0
q0 < _ _ pri=1 -> q1 _ +1 0
"""


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_fair_coin(capsys):
    code, out, _ = _run(capsys, "run", "--machine", "coin.vm", "--input", "01", "--trials", "100000",
                        "--seed", "7", "--cutoff", "1000", "--format", "json")
    assert code == 0
    stats = json.loads(out)
    assert abs(stats["accept_rate"] - 0.5) < 0.01
    assert stats["trials"] == 100000


def test_run_is_reproducible(capsys):
    argv = ("run", "--machine", "walk3", "--input", "0101", "--trials", "300", "--seed", "3")
    assert _run(capsys, *argv)[1] == _run(capsys, *argv)[1]


def test_run_clock_runtime(capsys):
    # bundled clock_t1 has c = 1 and n0 = 4
    code, out, _ = _run(capsys, "run", "--machine", "clock_t1.vm", "--input", "0000", "--trials", "1",
                        "--seed", "0")
    assert code == 0 and json.loads(out)["runtime_mean"] == 2 * 4 + 4 * 1 + 2


def test_run_csv_sweep(capsys):
    code, out, _ = _run(capsys, "run", "--machine", "coin", "--lengths", "0:2", "--trials", "10",
                        "--seed", "1", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4 and lines[0].startswith("label,trials")


def test_run_invalid_machine_fails(tmp_path, capsys):
    path = tmp_path / "broken.vm"
    path.write_text(BROKEN)
    code, out, err = _run(capsys, "run", "--machine", str(path), "--input", "0", "--seed", "1")
    assert code != 0 and out == ""
    assert "missing transition" in err


def test_run_missing_file(capsys):
    code, _, err = _run(capsys, "run", "--machine", "nope.vm", "--seed", "1")
    assert code != 0 and "no such machine" in err


def test_run_requires_seed():
    with pytest.raises(SystemExit):
        main(["run", "--machine", "coin"])


def test_knfa_machines_report_membership(capsys):
    code, out, _ = _run(capsys, "run", "--machine", "anbn_2head", "--input", "0011", "--seed", "0")
    assert code == 0 and json.loads(out) == {"input": "0011", "accepts": True}


def test_transform_privatize(capsys):
    code, out, _ = _run(capsys, "transform", "privatize", "--machine", "pub.vm")
    assert code == 0
    assert "pub:" in [line.strip() for line in out.splitlines()] and not parse_machine(out).pub


def test_transform_to_2afa(capsys):
    code, out, _ = _run(capsys, "transform", "to-2afa", "--machine", "last_symbol", "--r", "1")
    assert code == 0
    afa = parse_machine(out)
    assert isinstance(afa, TafaSpec)
    assert len(afa.delta[(afa.initial, LEFT)]) == len(enumerate_maj(1)) == 2


def test_transform_clock_round_trips(tmp_path, capsys):
    target = tmp_path / "clock.vm"
    code, _, _ = _run(capsys, "transform", "clock", "--t", "1", "--c", "2", "--n0", "8", "--out", str(target))
    assert code == 0
    spec = parse_machine(target.read_text())
    # with t = 1 the clock is a deterministic sweep
    assert validate(spec) == [] and not spec.pri and spec.initial == "C0"


def test_transform_precondition_error(capsys):
    code, _, err = _run(capsys, "transform", "to-2afa", "--machine", "coin", "--r", "1")
    assert code != 0 and "to-2afa: precondition violated" in err


@pytest.mark.parametrize("argv, key", [
    (("transform", "v2", "--machine", "guess", "--r", "2"), "sims"),
    (("transform", "v3", "--machine", "anbn_2head", "--r", "2", "--t", "1", "--c", "2", "--n0", "4"), "p_timer"),
    (("transform", "hartmanis", "--machine", "parity_tm", "--c", "1"), "heads"),
])
def test_transform_descriptors(capsys, argv, key):
    code, out, _ = _run(capsys, *argv)
    assert code == 0 and key in json.loads(out)


def test_analyze(capsys):
    assert "unbounded" in _run(capsys, "analyze", "--machine", "selfloop", "--n", "2")[1]
    assert _run(capsys, "analyze", "--machine", "onepass", "--n", "5")[1].strip() == "bounded <= 7"
    code, _, err = _run(capsys, "analyze", "--machine", "anbn_tm", "--n", "2")
    assert code != 0 and "constant-space" in err


def test_examples_list(capsys):
    code, out, _ = _run(capsys, "examples", "list")
    assert code == 0 and "coin.vm" in out.split()
