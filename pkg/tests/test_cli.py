import json

import numpy as np
import pytest

from chancoh import (dephasing_channel, identity_channel, rotation_unitary,
                     unitary_channel)
from chancoh.channel import channel_to_json_dict
from chancoh.cli import DIAGNOSTICS_FILE, main


def write_channel(path, chan):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_json_dict(chan), fh)
    return str(path)


@pytest.fixture
def rot_file(tmp_path):
    return write_channel(tmp_path / "rot.json", rotation_unitary(np.pi / 10))


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_stdout_format(capsys, rot_file):
    code, out, err = run(capsys, ["analyze", rot_file, "--ancilla-dim", "2",
                                  "--restarts", "32"])
    assert code == 0 and err == ""
    lines = out.strip().splitlines()
    keys = [line.split(":")[0] for line in lines]
    assert keys == ["c_r_i", "c_r_b_lower", "c_max", "dilute_interval",
                    "distill_parallel", "distill_iterative_lower",
                    "irreversibility_gap_lower", "ancilla_dim"]
    vals = dict(line.split(": ", 1) for line in lines)
    assert vals["c_r_i"] == "0.454539"
    assert vals["c_r_b_lower"] == "0.568417"
    assert vals["c_max"] == "0.667016"
    assert vals["dilute_interval"] == "[0.568417, 0.667016]"
    assert vals["irreversibility_gap_lower"] == "0.113878"
    assert vals["distill_parallel"] == vals["c_r_i"]
    assert vals["ancilla_dim"] == "2"


def test_analyze_deterministic(capsys, rot_file, tmp_path):
    argv = ["analyze", rot_file, "--ancilla-dim", "2", "--restarts", "16",
            "--seed", "7"]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, argv + ["--out", str(out_a)])
    run(capsys, argv + ["--out", str(out_b)])
    assert out_a.read_bytes() == out_b.read_bytes()


def test_analyze_json_report(capsys, rot_file, tmp_path):
    out_path = tmp_path / "report.json"
    code, _, _ = run(capsys, ["analyze", rot_file, "--ancilla-dim", "2",
                              "--restarts", "32", "--out", str(out_path)])
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["channel_file"] == rot_file
    assert doc["search_config"]["ancilla_dim"] == 2
    assert doc["search_config"]["restarts"] == 32
    rep = doc["report"]
    assert abs(rep["c_r_i"] - 0.4545388514715072) < 1e-10
    assert abs(rep["c_r_b_lower"] - 0.5684169683491732) < 1e-6
    assert rep["dilute_interval"] == [rep["c_r_b_lower"], rep["c_max"]]
    witness = np.array([[complex(re, im) for re, im in row]
                        for row in rep["c_r_b_witness"]])
    assert witness.shape == (4, 4)
    assert abs(np.trace(witness) - 1.0) < 1e-9
    assert out_path.read_text().endswith("\n")


def test_analyze_free_channel_prints_zeros(capsys, tmp_path):
    path = write_channel(tmp_path / "deph.json", dephasing_channel(2))
    code, out, _ = run(capsys, ["analyze", path, "--restarts", "8"])
    assert code == 0
    vals = dict(line.split(": ", 1) for line in out.strip().splitlines())
    assert vals["c_r_i"] == "0.000000"
    assert vals["c_max"] == "0.000000"
    assert vals["irreversibility_gap_lower"] == "0.000000"
    assert "-0.000000" not in out


def test_analyze_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, ["analyze", str(tmp_path / "missing.json")])
    assert code == 2 and "error" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim_in": 2}')
    code, _, err = run(capsys, ["analyze", str(bad)])
    assert code == 2 and "dim_out" in err
    bad.write_text('{"dim_in": 2, "dim_out": 2, "kraus": "nope"}')
    code, _, err = run(capsys, ["analyze", str(bad)])
    assert code == 2 and "kraus" in err


def test_analyze_numerical_failure_exit_code(capsys, rot_file, monkeypatch):
    import chancoh.cli as cli

    def boom(chan, cfg):
        raise RuntimeError("solver fell over")

    monkeypatch.setattr(cli.monotones, "analyze", boom)
    code, _, err = run(capsys, ["analyze", rot_file])
    assert code == 3 and "solver fell over" in err


def test_sweep_rotation_csv(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    argv = ["sweep-rotation", "--theta-min", "0", "--theta-max",
            str(np.pi / 4), "--steps", "5", "--restarts", "8",
            "--out", str(out_path)]
    code, _, _ = run(capsys, argv)
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "theta,c_r_i,c_r_b_lower,gap"
    assert len(lines) == 6
    rows = [line.split(",") for line in lines[1:]]
    assert all(len(r) == 4 for r in rows)
    # fixed-point rendering with eight decimals throughout
    for r in rows:
        for cell in r:
            whole, frac = cell.lstrip("-").split(".")
            assert len(frac) == 8
    thetas = [float(r[0]) for r in rows]
    assert thetas == sorted(thetas)
    assert abs(thetas[0] - 0.0) < 1e-8
    assert abs(thetas[-1] - np.pi / 4) < 1e-8
    # the zero-angle rotation is the identity: everything vanishes
    assert rows[0][1] == "0.00000000"
    assert rows[0][3] == "0.00000000"
    # the quarter-turn reaches a full coherence bit on basis inputs
    assert rows[-1][1] == "1.00000000"
    # gap column is consistent with the other two
    for r in rows:
        assert abs(float(r[3]) - (float(r[2]) - float(r[1]))) < 2e-8
    # deterministic byte for byte
    first = out_path.read_bytes()
    run(capsys, argv)
    assert out_path.read_bytes() == first


def test_sweep_rotation_rejects_bad_grid(capsys, tmp_path):
    out_path = str(tmp_path / "x.csv")
    code, _, err = run(capsys, ["sweep-rotation", "--steps", "1",
                                "--out", out_path])
    assert code == 2 and "steps" in err
    code, _, err = run(capsys, ["sweep-rotation", "--theta-min", "1.0",
                                "--theta-max", "0.5", "--out", out_path])
    assert code == 2


def test_diamond_same_and_known_channels(capsys, tmp_path):
    ident = write_channel(tmp_path / "id.json", identity_channel(2))
    code, out, _ = run(capsys, ["diamond", ident, ident])
    assert code == 0
    assert out.strip() == "0.00000000"
    flip = write_channel(tmp_path / "x.json",
                         unitary_channel(np.array([[0., 1.], [1., 0.]])))
    code, out, _ = run(capsys, ["diamond", ident, flip])
    assert code == 0
    assert abs(float(out) - 2.0) < 1e-7
    deph = write_channel(tmp_path / "deph.json", dephasing_channel(2))
    code, out, _ = run(capsys, ["diamond", ident, deph])
    assert code == 0
    assert abs(float(out) - 1.0) < 1e-7


def test_diamond_input_errors(capsys, tmp_path):
    ident = write_channel(tmp_path / "id2.json", identity_channel(2))
    other = write_channel(tmp_path / "id3.json", identity_channel(3))
    code, _, err = run(capsys, ["diamond", ident, other])
    assert code == 2 and "mismatch" in err
    code, _, err = run(capsys, ["diamond", ident, str(tmp_path / "nope.json")])
    assert code == 2


def test_verify_passes(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, err = run(capsys, ["verify", "--trials", "2", "--seed", "1"])
    assert code == 0, err
    lines = out.strip().splitlines()
    suites = [line.split(":")[0] for line in lines]
    assert suites == ["linalg", "channel", "coherence", "sdp", "monotones"]
    for line in lines:
        counts = line.split(": ")[1]
        ok, total = counts.split(" ")[0].split("/")
        assert ok == total
    assert not (tmp_path / DIAGNOSTICS_FILE).exists()


def test_verify_corrupted_tolerance_fails(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, err = run(capsys, ["verify", "--trials", "2", "--seed", "1",
                                  "--corrupt-tolerance", "-1"])
    assert code == 1
    assert "violation" in err
    diag = json.loads((tmp_path / DIAGNOSTICS_FILE).read_text())
    assert set(diag) == {"suite", "check", "margin"}
    assert diag["margin"] > 0


def test_verify_numerical_failure_exit_code(capsys, monkeypatch):
    import chancoh.cli as cli

    def boom(*args, **kwargs):
        raise RuntimeError("sdp diverged")

    monkeypatch.setattr(cli.sdp, "solve", boom)
    code, _, err = run(capsys, ["verify", "--trials", "1"])
    assert code == 3 and "sdp diverged" in err
