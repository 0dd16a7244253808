"""CLI: subcommands, exit codes, formats, and determinism."""

import json
import math

import pytest

from dualquermass.cli import main

PI = math.pi


@pytest.fixture
def files(tmp_path):
    def dump(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return {
        "K": dump("K.json", {"dim": 2, "kind": "ball", "radius": 1.0}),
        "K2": dump("K2.json", {"dim": 2, "kind": "ball", "radius": 2.0}),
        "K3": dump("K3.json", {"dim": 3, "kind": "ball", "radius": 1.0}),
        "L": dump("L.json", {"dim": 2, "kind": "trig", "c0": 2.0,
                             "cos": [1.0]}),
        "tuple": dump("t.json", {"dim": 2, "indices": [0, 1, 2],
                                 "values": [PI, 2 * PI, 4.5 * PI]}),
        "bad": dump("bad.json", {"dim": 2, "indices": [0, 1, 2],
                                 "values": [1.0, 2.0, 3.0]}),
        "dir": tmp_path,
    }


def test_compute_ball_pair(files, capsys):
    code = main(["compute", "--body", files["K"], "--body", files["K2"],
                 "--indices", "0,1,2"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    want = [PI, 2 * PI, 4 * PI]
    for got, expect in zip(doc["values"], want):
        assert abs(got / expect - 1.0) <= 1e-10


def test_compute_accepts_real_indices(files, capsys):
    code = main(["compute", "--body", files["K"], "--body", files["K2"],
                 "--indices=-1,0.5"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["indices"] == [-1.0, 0.5]


def test_check_infeasible_exits_4(files, capsys):
    code = main(["check", "--tuple", files["bad"]])
    assert code == 4
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "OUTSIDE"


def test_check_interior_exits_0(files, capsys):
    code = main(["check", "--tuple", files["tuple"]])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "INTERIOR"


def test_realize_roundtrip(files, capsys, tmp_path):
    out_dir = tmp_path / "witness"
    code = main(["realize", "--tuple", files["tuple"], "--out", str(out_dir)])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["max_rel_deviation"] <= 1e-6
    for path in doc["bodies"]:
        json.loads(open(path).read())


def test_realize_refusal_exits_4(files, capsys):
    code = main(["realize", "--tuple", files["bad"]])
    assert code == 4
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "OUTSIDE"


def test_roots_from_tuple(files, capsys):
    code = main(["roots", "--tuple", files["tuple"]])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    got = sorted((complex(re, im) for re, im in doc["roots"]),
                 key=lambda z: z.imag)
    want = complex(-4, math.sqrt(2)) / 9
    assert abs(got[1] - want) <= 1e-10


def test_roots_needs_exactly_one_input(files, capsys):
    assert main(["roots"]) == 2
    assert main(["roots", "--tuple", files["tuple"], "--body", files["K"],
                 "--body", files["L"]]) == 2


def test_cone_csv_exact_law(files, capsys):
    code = main(["cone", "--dim", "2", "--samples", "8"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "theta,status,witness_id"
    statuses = [line.split(",")[1] for line in lines[1:]]
    assert statuses == ["OUT"] * 4 + ["IN"] * 4


def test_verify_report(files, capsys):
    code = main(["verify", "--body", files["K"], "--body", files["L"]])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"]
    assert doc["vieta"]
    assert all(r["holds"] for r in doc["dual_af"])


def test_exit_2_on_malformed_input(tmp_path, capsys):
    bad = tmp_path / "garbled.json"
    bad.write_text("{not json")
    assert main(["check", "--tuple", str(bad)]) == 2


def test_exit_3_on_dimension_mismatch(files, capsys):
    code = main(["compute", "--body", files["K"], "--body", files["K3"],
                 "--indices", "0,1"])
    assert code == 3


def test_determinism_byte_identical(files, capsys):
    main(["compute", "--body", files["K"], "--body", files["L"],
          "--indices", "0,1,2"])
    first = capsys.readouterr().out
    main(["compute", "--body", files["K"], "--body", files["L"],
          "--indices", "0,1,2"])
    second = capsys.readouterr().out
    assert first == second


def test_config_file_with_flag_override(files, capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("res = 64\nseed = 3\n")
    code = main(["compute", "--body", files["K"], "--body", files["K2"],
                 "--indices", "0,1", "--config", str(cfg)])
    assert code == 0
    low = json.loads(capsys.readouterr().out)
    code = main(["compute", "--body", files["K"], "--body", files["K2"],
                 "--indices", "0,1", "--config", str(cfg), "--res", "2048"])
    assert code == 0
    high = json.loads(capsys.readouterr().out)
    # constants integrate exactly at any resolution; values agree
    assert low["values"] == pytest.approx(high["values"], rel=1e-12)


def test_unknown_config_key_is_input_error(files, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mystery = 1\n")
    assert main(["check", "--tuple", files["tuple"], "--config",
                 str(cfg)]) == 2


def test_outputs_use_15_significant_digits(files, capsys):
    main(["compute", "--body", files["K"], "--body", files["K"],
          "--indices", "0"])
    doc = json.loads(capsys.readouterr().out)
    assert doc["values"][0] == float(f"{PI:.15g}")
