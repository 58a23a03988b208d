import json

import pytest

from clut.cli import main

from conftest import OR_TABLE


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_or_table(capsys):
    assert run(capsys, "eval", "--table", OR_TABLE, "--inputs", "000000")[:2] == (0, "0\n")
    assert run(capsys, "eval", "--table", OR_TABLE, "--inputs", "111111")[:2] == (0, "1\n")


def test_eval_dual5(capsys):
    code, out, _ = run(capsys, "eval", "--mode", "dual5", "--table", "0000000F,FFFFFFFE", "--inputs", "000010",
                       "--flavor", "she")
    assert code == 0 and out.strip() == "OUT0=1 OUT2=1"


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--table", OR_TABLE, "--inputs", "000000", "--colour", "red"])
    assert exc.value.code == 2
    assert run(capsys, "eval", "--table", "XYZ", "--inputs", "000000")[0] == 2


def test_config_error_names_key(capsys, tmp_path, device):
    from clut.params import device_params_to_dict

    bad = device_params_to_dict(device) | {"gilbert_damping": 2.0}
    path = tmp_path / "d.json"
    path.write_text(json.dumps(bad))
    code, _, err = run(capsys, "eval", "--table", OR_TABLE, "--inputs", "000000", "--device-params", str(path))
    assert code == 1 and "gilbert_damping" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "compare", "--tech-params", str(tmp_path / "nope.json"))
    assert code == 1 and "nope.json" in err


def test_uncalibrated_tech_file(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text("{}")
    code, _, err = run(capsys, "compare", "--tech-params", str(path))
    assert code == 1 and "calibrate" in err


def test_write_and_read_dump(capsys):
    code, out, _ = run(capsys, "write", "--cell", "3", "--bit", "1")
    res = json.loads(out)
    assert code == 0 and res["switched"] == [True, True]
    code, out, _ = run(capsys, "read", "--cell", "3", "--table", OR_TABLE)
    res = json.loads(out)
    assert res["sensed_bit"] == 1 and res["read_margin"] > 0


def test_trace_csv(capsys, tmp_path):
    path = tmp_path / "trace.csv"
    assert run(capsys, "trace", "--table", OR_TABLE, "--inputs", "111111", "--out", str(path))[0] == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "time_s,signal,value"
    assert any(line.endswith(",OUT1,1.0") for line in lines)


def test_mc_summaries_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "mc", "--trials", "150", "--seed", "7", "--out", str(a))[0] == 0
    assert run(capsys, "mc", "--trials", "150", "--seed", "7", "--out", str(b), "--workers", "2")[0] == 0
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
    assert len(list(a.glob("hist_*.csv"))) == 6


def test_mc_spec_file(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"mtj_dimension_variation": 0.0, "transistor_vth_variation": 0.0,
                                "transistor_dimension_variation": 0.0}))
    code, out, _ = run(capsys, "mc", "--trials", "5", "--spec", str(spec), "--out", str(tmp_path / "o"))
    assert code == 0
    s = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert s["stats"]["r_p"]["std"] == 0.0
    spec.write_text(json.dumps({"mtj_size": 0.1}))
    code, _, err = run(capsys, "mc", "--trials", "5", "--spec", str(spec), "--out", str(tmp_path / "o"))
    assert code == 1 and "mtj_size" in err


def test_mc_rejects_zero_trials():
    with pytest.raises(SystemExit) as exc:
        main(["mc", "--trials", "0"])
    assert exc.value.code == 2


def test_compare(capsys, tmp_path):
    code, out, _ = run(capsys, "compare", "--out", str(tmp_path))
    assert code == 0 and "standby_reduction" in out
    data = json.loads((tmp_path / "comparison.json").read_text())
    assert data["ratios"]["transistor_savings_vs_stt"] == 768


def test_calibrate_writes_loadable_files(capsys, tmp_path, device, tech):
    from clut.params import load_device_params, load_tech_params

    code, out, _ = run(capsys, "calibrate", "--out", str(tmp_path))
    assert code == 0
    assert load_device_params(tmp_path / "device.json") == device
    assert load_tech_params(tmp_path / "tech.json") == tech
