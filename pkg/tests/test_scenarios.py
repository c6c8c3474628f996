import csv
import io

import numpy as np
import pytest

from afcsim.errors import ConfigError
from afcsim.scenarios import (
    catalog_config,
    find_intensity_peaks,
    resolve,
    run_scenario,
    segment_resolved_intensity,
    simulate,
    with_overrides,
)


def test_run_scenario_writes_outputs(tmp_path):
    summary = run_scenario(catalog_config("fig10b"), str(tmp_path))
    names = ["f1_m100", "f1_0", "f1_p100"]
    assert list(summary["runs"]) == names
    for n in names:
        rows = list(csv.reader(io.StringIO((tmp_path / f"traces_{n}.csv").read_text())))
        assert rows[0] == ["time_ns", "input", "transmitted", "echo"]
        assert (tmp_path / f"histogram_{n}.csv").exists()
        assert summary["runs"][n]["compression"]["kappa"] > 1
    # all variants share one program
    assert (tmp_path / "comb_profile.csv").exists()
    assert [summary["runs"][n]["histogram"]["seed"] for n in names] == [1002, 1003, 1004]


def test_variants_with_different_programs_get_separate_profiles(tmp_path):
    cfg = catalog_config("fig7c")
    run_scenario(cfg, str(tmp_path))
    profiles = sorted(p.name for p in tmp_path.glob("comb_profile*.csv"))
    assert profiles and (len(profiles) == 1) == (len({r.chain.program for r in cfg.runs}) == 1)


def test_fig3b_leaves_in_reverse_order():
    (run,) = catalog_config("fig3b").runs
    _, result = simulate(run)
    env = result.echo.with_samples(np.sqrt(segment_resolved_intensity(result.echo, run.chain.program)))
    peaks = find_intensity_peaks(env)
    assert [p.time for p in peaks] == pytest.approx([75.0, 100.0, 125.0], abs=0.6)
    # inputs had falling amplitudes 1, 0.75, 0.5, so the echoes rise
    heights = [p.height for p in peaks]
    assert heights == sorted(heights)


def test_overrides_and_resolve():
    cfg = with_overrides(catalog_config("fig10b"), seed=40, grid_dt=0.1)
    assert [r.detection.rng_seed for r in cfg.runs] == [40, 41, 42]
    assert all(r.grid.dt == pytest.approx(0.1) for r in cfg.runs)
    with pytest.raises(ConfigError):
        with_overrides(cfg, grid_dt=0.0)
    with pytest.raises(ConfigError):
        resolve("no/such/file.toml")
