import math

import pytest
from hypothesis import given, strategies as st

from linksim.config import ConfigError, load_config, parse_config, parse_range
from linksim.modem import Scheme
from linksim.receiver import CsiMode

MINIMAL = {"scheme": "qpsk", "channel": "awgn", "ebn0_db": "0:4:1"}


def _err(**kw):
    data = dict(MINIMAL)
    data.update(kw)
    with pytest.raises(ConfigError) as exc:
        parse_config(data)
    return exc.value


def test_minimal_defaults():
    cfg = parse_config("scheme: qpsk\nchannel: awgn\nebn0_db: [0, 1, 2, 3, 4]\n")
    assert cfg.schemes == (Scheme.QPSK,)
    assert cfg.spreading_factor == 1 and cfg.num_users == (1,) and cfg.seed == 0
    assert cfg.ebn0_db == (0.0, 1.0, 2.0, 3.0, 4.0)
    assert cfg.csi == CsiMode() and cfg.despread == "soft"
    assert cfg.stopping.min_errors == 100 and cfg.stopping.max_bits == 10_000_000
    assert str(cfg.code_polynomial) == "x^3+x+1"


def test_parse_range():
    assert parse_range("0:4:1") == (0, 1, 2, 3, 4)
    assert parse_range("0:1:0.25") == (0, 0.25, 0.5, 0.75, 1.0)
    for bad in ("4:0:1", "0:4:0", "abc", "1"):
        with pytest.raises(ValueError):
            parse_range(bad)


@given(st.lists(st.integers(-10, 30), min_size=1, max_size=8, unique=True))
def test_sweep_sorted(values):
    cfg = parse_config({**MINIMAL, "ebn0_db": values})
    assert list(cfg.ebn0_db) == sorted(values)


@pytest.mark.parametrize("kw, key", [
    ({"bogus": 1}, "bogus"),
    ({"spreading_factor": "seven"}, "spreading_factor"),
    ({"spreading_factor": 8}, "spreading_factor"),
    ({"num_users": 8}, "num_users"),
    ({"ebn0_db": []}, "ebn0_db"),
    ({"ebn0_db": [1, 1]}, "ebn0_db"),
    ({"scheme": "bpsk"}, "scheme"),
    ({"channel": "rician"}, "channel"),
    ({"code_polynomial": "x^3+1"}, "code_polynomial"),
    ({"csi": "block:0"}, "csi"),
    ({"despread": "fuzzy"}, "despread"),
    ({"min_errors": 0}, "min_errors"),
    ({"frame_bits": 1001, "scheme": "psk8"}, "frame_bits"),
    ({"doppler_hz": 10}, "doppler_hz"),
    ({"theory": "yes"}, "theory"),
])
def test_rejections_name_the_key(kw, key):
    err = _err(**kw)
    assert err.key == key
    assert key in str(err)


def test_required_keys():
    for key in MINIMAL:
        data = {k: v for k, v in MINIMAL.items() if k != key}
        with pytest.raises(ConfigError) as exc:
            parse_config(data)
        assert exc.value.key == key


def test_speed_and_doppler_exclusive():
    assert _err(channel="rayleigh", speed_kmph=60, doppler_hz=100).key == "speed_kmph"


def test_speed_converted():
    cfg = parse_config({**MINIMAL, "channel": "rayleigh", "speed_kmph": [120, 60]})
    assert [round(d, 1) for d in cfg.doppler_hz] == [111.2, 222.4]


def test_doppler_nyquist():
    assert _err(channel="rayleigh", doppler_hz=192_001).key == "doppler_hz"


def test_bad_yaml():
    with pytest.raises(ConfigError):
        parse_config("scheme: [qpsk\n")
    with pytest.raises(ConfigError):
        parse_config("- a\n- b\n")


def test_grid_order():
    cfg = parse_config({**MINIMAL, "scheme": ["qpsk", "psk8"], "ebn0_db": [0, 1],
                        "spreading_factor": 7, "num_users": [1, 4]})
    grid = cfg.grid()
    assert len(grid) == 8
    assert grid[0] == (Scheme.QPSK, 0, 0.0, 1, 0.0)
    assert grid[-1] == (Scheme.PSK8, 1, 1.0, 4, 0.0)


def test_output_relative_to_config(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("scheme: qpsk\nchannel: awgn\nebn0_db: 0\noutput: out/r.csv\n")
    assert load_config(path).output == tmp_path / "out" / "r.csv"


def test_symbol_rate():
    cfg = parse_config({**MINIMAL, "spreading_factor": 4})
    assert math.isclose(cfg.symbol_rate(), 384_000 * 4 / 2)
