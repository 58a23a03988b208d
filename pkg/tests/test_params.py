import json

import pytest

from clut.params import (
    MissingCalibration,
    ParamError,
    TechParams,
    device_params_from_dict,
    device_params_to_dict,
    load_device_params,
    load_tech_params,
    save_device_params,
    save_tech_params,
    tech_params_from_dict,
)


def test_device_round_trip(device, tmp_path):
    path = tmp_path / "device.json"
    save_device_params(device, path)
    assert load_device_params(path) == device


def test_tech_round_trip(tech, tmp_path):
    path = tmp_path / "tech.json"
    save_tech_params(tech, path)
    assert load_tech_params(path) == tech


def test_unknown_device_key_is_named(device):
    data = device_params_to_dict(device) | {"mtj_colour": 3}
    with pytest.raises(ParamError) as err:
        device_params_from_dict(data)
    assert err.value.key == "mtj_colour"


def test_missing_device_key_is_named(device):
    data = device_params_to_dict(device)
    del data["tmr_ratio"]
    with pytest.raises(ParamError) as err:
        device_params_from_dict(data)
    assert err.value.key == "tmr_ratio"


@pytest.mark.parametrize(
    "key, value",
    [("gilbert_damping", 1.5), ("mtj_width_nm", -1.0), ("spin_polarization", 0.0), ("initial_cant_deg", 95.0),
     ("ra_product", "big")],
)
def test_out_of_range_device_value_is_named(device, key, value):
    data = device_params_to_dict(device) | {key: value}
    with pytest.raises(ParamError) as err:
        device_params_from_dict(data)
    assert err.value.key == key


@pytest.mark.parametrize("key, value", [("vdd", 0.0), ("sense_fraction", 1.0), ("nmos_vth", 2.0), ("bogus", 1)])
def test_bad_tech_value_is_named(key, value):
    with pytest.raises(ParamError) as err:
        tech_params_from_dict({key: value})
    assert err.value.key == key


def test_uncalibrated_tech_demands_calibration():
    with pytest.raises(MissingCalibration, match="calibrate"):
        TechParams().require_calibrated()


def test_shipped_files_are_calibrated(tech):
    assert tech.require_calibrated() is tech


def test_malformed_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("[1, 2]")
    with pytest.raises(ParamError):
        load_tech_params(p)
    p.write_text("{not json")
    with pytest.raises(ParamError):
        load_device_params(p)


def test_files_are_flat(tmp_path, device, tech):
    save_device_params(device, tmp_path / "d.json")
    save_tech_params(tech, tmp_path / "t.json")
    for name in ("d.json", "t.json"):
        data = json.loads((tmp_path / name).read_text())
        assert all(not isinstance(v, (dict, list)) for v in data.values())
