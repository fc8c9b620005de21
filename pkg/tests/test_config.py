import json

import pytest

from fujita_lab.config import ConfigError, parse_config, parse_range


def write(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=1))
    return str(path)


def test_parse_range_inclusive():
    vals = parse_range("1.2:3.0:0.2")
    assert len(vals) == 10
    assert vals[0] == 1.2 and vals[-1] == 3.0
    assert vals[2] == 1.6  # no 1.6000000000000003


def test_parse_range_forms():
    assert parse_range("1,2.5, 4") == [1.0, 2.5, 4.0]
    assert parse_range(3) == [3.0]
    assert parse_range("0:0:1") == [0.0]
    for bad in ("1:2", "1:0:0.5", "1:2:0", "a,b", "1:x:1"):
        with pytest.raises(ConfigError):
            parse_range(bad)


def test_defaults_and_required(clean_env):
    cfg = parse_config(overrides={"mode": "exponent"})
    assert cfg.params == {"n": 3.0, "omega": 0.0, "m": 0.0}
    assert cfg.format == "csv" and cfg.parallelism == 1
    with pytest.raises(ConfigError, match="'p'"):
        parse_config(overrides={"mode": "classify"})


def test_unknown_key_reports_line(tmp_path, clean_env):
    path = write(tmp_path, '{\n  "mode": "exponent",\n  "n": 3,\n  "colour": 1\n}\n')
    with pytest.raises(ConfigError, match=r":4: unknown key 'colour'"):
        parse_config(path)


def test_malformed_json_reports_position(tmp_path, clean_env):
    path = write(tmp_path, '{\n  "mode": "exponent",\n  "n": 3,,\n}\n')
    with pytest.raises(ConfigError, match=r":3:\d+: malformed JSON"):
        parse_config(path)


def test_wrong_type(tmp_path, clean_env):
    path = write(tmp_path, {"mode": "eigen", "grid_points": "many"})
    with pytest.raises(ConfigError, match="wrong type"):
        parse_config(path)


def test_flag_overrides_file_with_warning(tmp_path, clean_env):
    path = write(tmp_path, {"mode": "classify", "p": 2.0, "n": 4})
    with pytest.warns(UserWarning, match="overrides"):
        cfg = parse_config(path, {"n": 5.0})
    assert cfg.params["n"] == 5.0 and cfg.params["p"] == 2.0
    assert len(cfg.warnings) == 1


def test_mode_mismatch_is_not_a_conflict(tmp_path, clean_env):
    path = write(tmp_path, {"mode": "exponent"})
    cfg = parse_config(path, {"mode": "exponent"})
    assert cfg.warnings == []


def test_env_parallelism(monkeypatch, clean_env):
    monkeypatch.setenv("FUJITA_LAB_THREADS", "3")
    assert parse_config(overrides={"mode": "exponent", "parallelism": 1}).parallelism == 3
    monkeypatch.setenv("FUJITA_LAB_THREADS", "x")
    with pytest.raises(ConfigError):
        parse_config(overrides={"mode": "exponent"})


def test_validation(tmp_path, clean_env):
    with pytest.raises(ConfigError):
        parse_config(overrides={"mode": "fly"})
    with pytest.raises(ConfigError):
        parse_config()
    with pytest.raises(ConfigError):
        parse_config(overrides={"mode": "exponent", "format": "xml"})
    with pytest.raises(ConfigError):
        parse_config(overrides={"mode": "exponent", "parallelism": 0})
    with pytest.raises(ConfigError, match="not writable"):
        parse_config(overrides={"mode": "exponent", "output_path": str(tmp_path / "no" / "such" / "f.csv")})
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(str(tmp_path / "missing.json"))


def test_sweep_ranges(tmp_path, clean_env):
    path = write(tmp_path, {"mode": "sweep", "n": 3, "omega": "-0.25,0,3", "p": "1.2:3.0:0.6"})
    cfg = parse_config(path)
    assert cfg.params["omega"] == [-0.25, 0.0, 3.0]
    assert cfg.params["p"] == [1.2, 1.8, 2.4, 3.0]
    assert cfg.params["n"] == [3.0]
