"""Run scenario configs and the built-in scenario catalog.

Each run writes, under its output directory:

``comb_profile.csv``
    f_mhz, abs_transmitted, abs_echo, delay_ns, delay2_ns of the program.
``traces_<run>.csv``
    Deterministic intensity traces (input, transmitted, echo).
``histogram_<run>.csv``
    Simulated photon counts of the total output.
``summary.json``
    Peak times, FWHMs, energies, bin energies and compression factors.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .afc import ChirpedCombSegment, analytic_echo, mu_r_regime, profile_table
from .chain import ChainResult, run_chain
from .config import RunSpec, ScenarioConfig, load_config, parse_config
from .detection import simulate_counts
from .errors import ConfigError, EmptyFieldError
from .modulator import ChirpSpec
from .pulses import pulse_train, set_mean_photons, time_bin_state
from .signal import ComplexField, TimeGrid, filter_field, measure, parabolic_peak, window_energy

CATALOG_IDS = (
    "fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5", "fig6b", "fig6c",
    "fig7a", "fig7b", "fig7c", "fig8b", "fig8c", "fig9", "fig10a", "fig10b",
    "figA2a", "figA2b",
)

PEAK_FRACTION = 0.05  # peaks below this fraction of the maximum are ignored


# ---------------------------------------------------------------- catalog


def catalog_text(scenario_id: str) -> str:
    if scenario_id not in CATALOG_IDS:
        raise KeyError(f"unknown catalog id {scenario_id!r}; see `afcsim catalog`")
    return resources.files("afcsim").joinpath("catalog", f"{scenario_id}.toml").read_text("utf-8")


def catalog_config(scenario_id: str) -> ScenarioConfig:
    return parse_config(catalog_text(scenario_id), f"catalog:{scenario_id}")


def list_catalog() -> list:
    """(id, description) for every built-in scenario."""
    return [(sid, catalog_config(sid).description) for sid in CATALOG_IDS]


def resolve(config_or_id: str) -> ScenarioConfig:
    """A catalog id or a path to a TOML file."""
    if config_or_id in CATALOG_IDS:
        return catalog_config(config_or_id)
    if not os.path.exists(config_or_id):
        raise ConfigError(f"no such file or catalog id: {config_or_id!r}")
    return load_config(config_or_id)


def with_overrides(config: ScenarioConfig, seed: Optional[int] = None,
                   grid_dt: Optional[float] = None) -> ScenarioConfig:
    """Replace the base seed (variant i gets seed + i) and/or the grid step."""
    runs = []
    for i, run in enumerate(config.runs):
        if seed is not None:
            run = replace(run, detection=replace(run.detection, rng_seed=seed + i))
        if grid_dt is not None:
            if not grid_dt > 0:
                raise ConfigError("grid dt must be positive", "--grid-dt")
            g = run.grid
            run = replace(run, grid=TimeGrid.covering(g.t_start, g.t_start + g.span, grid_dt))
        runs.append(run)
    return replace(config, seed=config.seed if seed is None else seed, runs=tuple(runs))


# ---------------------------------------------------------------- simulation


def input_field(run: RunSpec) -> ComplexField:
    if run.input.time_bin is not None:
        field = time_bin_state(run.input.time_bin, run.grid)
    else:
        field = pulse_train(run.input.pulses, run.grid)
    if run.input.mean_photons is not None:
        field = set_mean_photons(field, run.input.mean_photons)
    return field


def simulate(run: RunSpec) -> tuple:
    """Deterministic part of a run: (input field, chain result)."""
    field = input_field(run)
    return field, run_chain(field, run.chain)


@dataclass(frozen=True)
class Peak:
    time: float
    height: float
    fwhm: float


def find_intensity_peaks(field: ComplexField, fraction: float = PEAK_FRACTION,
                         min_separation: float = 2.0) -> list:
    """Local maxima above ``fraction`` of the global maximum, in time order."""
    y = field.intensity
    top = y.max()
    if top == 0:
        return []
    dt = field.grid.dt
    idx, _ = find_peaks(y, height=fraction * top, prominence=fraction * top,
                        distance=max(1, int(round(min_separation / dt))))
    if len(idx) == 0:
        return []
    widths = peak_widths(y, idx, rel_height=0.5)[0] * dt
    t = field.times
    return [Peak(parabolic_peak(t, y, int(k)), float(y[k]), float(w)) for k, w in zip(idx, widths)]


def segment_resolved_intensity(field: ComplexField, program) -> np.ndarray:
    """Sum over program segments (plus the rest of the spectrum) of the
    band-filtered intensities. Drops beat notes between different segments,
    as a frequency-resolving detector would."""
    edges = [(s.f_lo, s.f_hi) for s in program.segments]
    total = np.zeros(field.grid.n)
    covered = np.zeros(field.grid.n, dtype=bool)
    f = field.grid.frequencies
    for lo, hi in edges:
        mask = (f >= lo) & (f < hi)
        covered |= mask
        total += filter_field(field, mask.astype(float)).intensity
    total += filter_field(field, (~covered).astype(float)).intensity
    return total


def _peak_list(peaks) -> list:
    return [{"time_ns": p.time, "height": p.height, "fwhm_ns": p.fwhm} for p in peaks]


def _measurement(field: ComplexField, program=None) -> Optional[dict]:
    try:
        m = measure(field)
    except EmptyFieldError:
        return None
    out = {
        "peak_time_ns": m.peak_time,
        "fwhm_ns": m.fwhm,
        "energy": m.energy,
        "centroid_mhz": m.centroid_frequency,
        "multi_lobe": m.multi_lobe,
        "peaks": _peak_list(find_intensity_peaks(field)),
    }
    if program is not None and program.segments:
        env = field.with_samples(np.sqrt(segment_resolved_intensity(field, program)))
        out["envelope_peaks"] = _peak_list(find_intensity_peaks(env))
    return out


def compression_prediction(run: RunSpec) -> Optional[dict]:
    """Closed-form echo for the first chirp action and the chirped segment it lands on."""
    chirps = [a for a in run.chain.input_actions if isinstance(a, ChirpSpec)]
    if not chirps:
        return None
    ch = chirps[0]
    ref = run.input.reference
    f_center = ref.detuning + ch.f1 - ch.rate * (ref.t0 - ch.t_ref)
    seg = run.chain.program.segment_at(f_center)
    if not isinstance(seg, ChirpedCombSegment):
        return None
    pred = analytic_echo(ref.tau, seg.mu, ch.rate, seg.f0, ref.detuning + ch.f1, seg.t_offset,
                         ref.t0, ch.t_ref)
    return {
        "mu_ns_per_mhz": seg.mu,
        "mu_r": seg.mu * ch.rate,
        "regime": mu_r_regime(seg.mu, ch.rate).value,
        "t_center_ns": pred.t_center,
        "fwhm_ns": pred.fwhm,
        "kappa": pred.kappa,
    }


def summarize(run: RunSpec, field: ComplexField, result: ChainResult) -> dict:
    out = {
        "input": _measurement(field),
        "transmitted": _measurement(result.transmitted, run.chain.program),
        "echo": _measurement(result.echo, run.chain.program),
        "input_energy": result.input_energy,
        "output_energy": result.output_energy,
        "warnings": list(result.warnings),
    }
    if run.analysis.bins:
        out["echo_bins"] = [
            {"start_ns": a, "stop_ns": b, "energy": window_energy(result.echo, a, b)}
            for a, b in run.analysis.bins
        ]
    if run.analysis.bands:
        out["echo_bands"] = []
        for lo, hi in run.analysis.bands:
            part = filter_field(result.echo, lambda f, lo=lo, hi=hi: ((f >= lo) & (f < hi)).astype(float))
            out["echo_bands"].append({"lo_mhz": lo, "hi_mhz": hi, "echo": _measurement(part)})
    if run.analysis.compression and out["echo"] is not None:
        fin = out["input"]["fwhm_ns"]
        fout = out["echo"]["fwhm_ns"]
        out["compression"] = {
            "input_fwhm_ns": fin,
            "echo_fwhm_ns": fout,
            "kappa": fin / fout,
            "prediction": compression_prediction(run),
        }
    return out


# ---------------------------------------------------------------- output


def _fmt(x: float) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else f"{x:.9g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def profile_csv(run: RunSpec, step: float = 1.0) -> str:
    segs = run.chain.program.segments
    if segs:
        lo = min(s.f_lo for s in segs) - 100.0
        hi = max(s.f_hi for s in segs) + 100.0
    else:
        lo, hi = -500.0, 500.0
    freqs = np.arange(lo, hi + step / 2, step)
    rows = profile_table(run.chain.program, freqs)
    return _csv(["f_mhz", "abs_transmitted", "abs_echo", "delay_ns", "delay2_ns"], rows)


def traces_csv(field: ComplexField, result: ChainResult) -> str:
    rows = zip(field.times.tolist(), field.intensity.tolist(),
               result.transmitted.intensity.tolist(), result.echo.intensity.tolist())
    return _csv(["time_ns", "input", "transmitted", "echo"], rows)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run_scenario(config: ScenarioConfig, out_dir: Optional[str] = None) -> dict:
    """Run every variant, write the output files and return the summary."""
    out_dir = out_dir or config.output_dir or os.path.join("out", config.name)
    os.makedirs(out_dir, exist_ok=True)
    summary = {"scenario": config.name, "description": config.description, "seed": config.seed, "runs": {}}
    profiles = {}
    for run in config.runs:
        field, result = simulate(run)
        hist = simulate_counts(result.total, run.detection)
        _write(os.path.join(out_dir, f"traces_{run.name}.csv"), traces_csv(field, result))
        _write(os.path.join(out_dir, f"histogram_{run.name}.csv"), hist.to_csv())
        profiles.setdefault(profile_csv(run), []).append(run.name)
        entry = summarize(run, field, result)
        entry["grid"] = {"t_start_ns": run.grid.t_start, "dt_ns": run.grid.dt, "n": run.grid.n}
        entry["histogram"] = {"total_counts": hist.total, "expected_counts": float(hist.expectation.sum()),
                              "cycles": hist.cycles, "seed": run.detection.rng_seed}
        summary["runs"][run.name] = entry
    # one profile file when all runs share the program, else one per program
    if len(profiles) == 1:
        _write(os.path.join(out_dir, "comb_profile.csv"), next(iter(profiles)))
    else:
        for text, names in profiles.items():
            _write(os.path.join(out_dir, f"comb_profile_{names[0]}.csv"), text)
    _write(os.path.join(out_dir, "summary.json"), json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
