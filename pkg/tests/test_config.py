import pytest

from afcsim.afc import ChirpedCombSegment, CombSegment, DoubleCombSegment
from afcsim.config import deep_merge, load_config, parse_config
from afcsim.errors import ConfigError
from afcsim.modulator import ChirpSpec, SerrodyneSpec
from afcsim.scenarios import CATALOG_IDS, catalog_config

BASE = """\
name = "demo"
seed = 10

[input]
mean_photons = 2.0

[[input.pulse]]
t0_ns = 0.0
fwhm_ns = 12.0

[processor]
[[processor.segment]]
kind = "comb"
f_lo_mhz = -300.0
f_hi_mhz = 300.0
storage_ns = 25.0
"""


def test_minimal_config():
    cfg = parse_config(BASE)
    assert cfg.name == "demo" and cfg.seed == 10
    (run,) = cfg.runs
    assert run.name == "main"
    seg = run.chain.program.segments[0]
    assert isinstance(seg, CombSegment) and seg.delta == pytest.approx(40.0)
    assert run.input.mean_photons == 2.0
    assert run.detection.rng_seed == 10


def test_variants_merge_and_seed_offsets():
    text = BASE + """
[[variant]]
name = "a"

[[variant]]
name = "b"
[[variant.input_controller.action]]
kind = "serrodyne"
shift_mhz = 100.0

[[variant]]
name = "c"
[[variant.input_controller.action]]
kind = "chirp"
rate_mhz_per_ns = 5.0
"""
    runs = parse_config(text).runs
    assert [r.name for r in runs] == ["a", "b", "c"]
    assert [r.detection.rng_seed for r in runs] == [10, 11, 12]
    assert runs[0].chain.input_actions == ()
    assert isinstance(runs[1].chain.input_actions[0], SerrodyneSpec)
    assert isinstance(runs[2].chain.input_actions[0], ChirpSpec)


def test_segment_kinds():
    text = BASE.replace('storage_ns = 25.0', 'storage_ns = 25.0\neta = 0.01') + """
[[processor.segment]]
kind = "chirped"
f_lo_mhz = 300.0
f_hi_mhz = 500.0
spacing_lo_mhz = 30.0
spacing_hi_mhz = 10.0

[[processor.segment]]
kind = "double"
f_lo_mhz = 500.0
f_hi_mhz = 700.0
storage_ns = [40.0, 65.0]
phase_rad = [0.0, 1.0]
"""
    segs = parse_config(text).runs[0].chain.program.segments
    assert segs[0].eta == 0.01
    assert isinstance(segs[1], ChirpedCombSegment)
    assert isinstance(segs[2], DoubleCombSegment) and segs[2].storage_times == pytest.approx((40.0, 65.0))


def test_deep_merge_replaces_arrays():
    base = {"a": {"b": 1, "c": [1, 2]}, "d": 0}
    out = deep_merge(base, {"a": {"c": [3]}})
    assert out == {"a": {"b": 1, "c": [3]}, "d": 0}
    assert base["a"]["c"] == [1, 2]


def _error(text):
    with pytest.raises(ConfigError) as err:
        parse_config(text, "demo.toml")
    return err.value


def test_unknown_key_names_field_and_line():
    err = _error(BASE.replace("fwhm_ns = 12.0", "fwhm_ns = 12.0\nwidth = 3"))
    assert err.field == "input.pulse[0].width"
    assert err.line == 10
    assert str(err).startswith("demo.toml:10: input.pulse[0].width")


def test_missing_key():
    err = _error(BASE.replace("storage_ns = 25.0\n", ""))
    assert "storage_ns" in err.field
    assert err.line > 0


def test_bad_type():
    err = _error(BASE.replace("fwhm_ns = 12.0", 'fwhm_ns = "twelve"'))
    assert err.field == "input.pulse[0].fwhm_ns" and err.line == 9


def test_bad_value_and_choice():
    assert _error(BASE.replace("fwhm_ns = 12.0", "fwhm_ns = -1.0")).field == "input.pulse[0].fwhm_ns"
    assert _error(BASE.replace('kind = "comb"', 'kind = "ramp"')).field == "processor.segment[0].kind"


def test_missing_sections():
    assert _error(BASE.split("[processor]")[0]).field == "processor"
    assert _error("name = 'x'\n[processor]\n").field == "input"


def test_passivity_violation_reported_as_config_error():
    err = _error(BASE.replace("storage_ns = 25.0", "storage_ns = 25.0\neta = 0.9\nt_bg = 0.9"))
    assert "processor.segment[0]" in err.field


def test_variant_errors():
    err = _error(BASE + '[[variant]]\nname = "bad name"\n')
    assert err.field == "variant[0].name"
    err = _error(BASE + '[[variant]]\nname = "a"\n[[variant]]\nname = "a"\n')
    assert "duplicate" in str(err)


def test_syntax_error_reports_line():
    err = _error(BASE + "oops = \n")
    assert err.line == BASE.count("\n") + 1


def test_load_config(tmp_path):
    p = tmp_path / "x.toml"
    p.write_text(BASE)
    assert load_config(p).name == "demo"


@pytest.mark.parametrize("sid", CATALOG_IDS)
def test_catalog_parses(sid):
    cfg = catalog_config(sid)
    assert cfg.name == sid and cfg.description and cfg.runs
