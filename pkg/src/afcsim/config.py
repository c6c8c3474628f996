"""Scenario configuration: TOML text -> validated dataclasses.

Keys carry their units (``fwhm_ns``, ``shift_mhz``). Every validation error
names the offending key path and, when it can be located, the source line.

A document describes one base run; optional ``[[variant]]`` tables hold
partial overrides that are deep-merged onto the base (arrays are replaced
wholesale), one run per variant.
"""
from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import tomli

from . import afc
from .afc import (
    ChirpedCombSegment,
    CombSegment,
    DoubleCombSegment,
    ProcessorProgram,
    SubComb,
    tooth_spacing,
)
from .chain import ChainSpec, FPFilterSpec, Targeted
from .detection import DetectionSpec
from .errors import AfcSimError, ConfigError
from .modulator import ChirpSpec, GatedShift, GatedShiftProgram, SerrodyneSpec
from .pulses import GaussianPulseSpec, TimeBinSpec
from .signal import TimeGrid

DEFAULT_GRID = {"t_start_ns": -60.0, "t_stop_ns": 340.0, "dt_ns": 0.05}


# ---------------------------------------------------------------- presets


def fig2_program(eta: float = afc.DEFAULT_ETA, t_bg: float = afc.DEFAULT_T_BG) -> ProcessorProgram:
    """Six 200 MHz segments: 25..125 ns delays plus a 40/65 ns double comb.

    Centres -400, -200, +200, +400, +600 MHz (25, 50, 75, 100, 125 ns) and
    +800 MHz (double comb). The band around 0 MHz is left empty so an
    unshifted pulse is simply transmitted.
    """
    delays = {-400.0: 25.0, -200.0: 50.0, 200.0: 75.0, 400.0: 100.0, 600.0: 125.0}
    segs = [CombSegment(c - 100.0, c + 100.0, tooth_spacing(d), eta, t_bg) for c, d in delays.items()]
    segs.append(DoubleCombSegment.equal(700.0, 900.0, 40.0, 65.0, eta=eta, t_bg=t_bg))
    return ProcessorProgram(tuple(segs))


PRESETS = {"fig2": fig2_program}


# ---------------------------------------------------------------- line lookup

_ARRAY_TABLE = re.compile(r"^\[\[\s*([^\]]+?)\s*\]\]$")
_TABLE = re.compile(r"^\[\s*([^\]]+?)\s*\]$")
_KEY = re.compile(r"^([A-Za-z0-9_\-\.\"]+)\s*=")


def _indexed(name: str, counters: dict) -> str:
    """Rewrite ``variant.input`` as ``variant[2].input`` inside array tables."""
    parts = name.split(".")
    out = []
    for i, part in enumerate(parts):
        out.append(part)
        prefix = ".".join(parts[: i + 1])
        if prefix in counters and i < len(parts) - 1:
            out[-1] = f"{part}[{counters[prefix]}]"
    return ".".join(out)


def key_lines(text: str) -> dict:
    """Best-effort map from dotted key path to 1-based source line."""
    lines: dict = {}
    table = ""
    counters: dict = {}
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        m = _ARRAY_TABLE.match(s)
        if m:
            name = m.group(1)
            counters[name] = counters.get(name, -1) + 1
            # nested arrays restart when their parent array advances
            for other in list(counters):
                if other.startswith(name + "."):
                    del counters[other]
            table = f"{_indexed(name, counters)}[{counters[name]}]"
            lines.setdefault(table, no)
            continue
        m = _TABLE.match(s)
        if m:
            table = _indexed(m.group(1), counters)
            lines.setdefault(table, no)
            continue
        m = _KEY.match(s)
        if m:
            key = m.group(1).strip('"')
            lines.setdefault(f"{table}.{key}" if table else key, no)
    return lines


def _ancestors(path: str) -> list:
    out = [path]
    p = path
    while True:
        stripped = re.sub(r"\[\d+\]$", "", p)
        if stripped != p:
            p = stripped
        elif "." in p:
            p = p.rsplit(".", 1)[0]
        else:
            break
        out.append(p)
    return out


class _Locator:
    def __init__(self, text: str, source: str):
        self.lines = key_lines(text)
        self.source = source

    def line(self, path: str) -> int:
        # keys inherited by a variant live in the base document
        base = re.sub(r"^variant\[\d+\]\.?", "", path)
        for c in [path, base] + _ancestors(path)[1:] + _ancestors(base)[1:]:
            if c in self.lines:
                return self.lines[c]
        return 0

    def error(self, path: str, message: str) -> ConfigError:
        return ConfigError(message, path, self.line(path), self.source)


# ---------------------------------------------------------------- typed access


class _Table:
    """Typed reader over one TOML table that rejects unknown keys."""

    def __init__(self, data: Any, path: str, loc: _Locator):
        if not isinstance(data, dict):
            raise loc.error(path, f"expected a table, got {type(data).__name__}")
        self.data = data
        self.path = path
        self.loc = loc
        self.seen: set = set()

    def _p(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def error(self, key: str, message: str) -> ConfigError:
        return self.loc.error(self._p(key), message)

    def has(self, key: str) -> bool:
        return key in self.data

    def raw(self, key: str, default=None):
        self.seen.add(key)
        return self.data.get(key, default)

    def num(self, key: str, default: Any = ..., *, positive=False, nonneg=False,
            lo: Optional[float] = None, hi: Optional[float] = None) -> float:
        self.seen.add(key)
        if key not in self.data:
            if default is ...:
                raise self.error(key, "required key is missing")
            return default
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise self.error(key, f"expected a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            raise self.error(key, "must be finite")
        if positive and not v > 0:
            raise self.error(key, f"must be > 0, got {v}")
        if nonneg and v < 0:
            raise self.error(key, f"must be >= 0, got {v}")
        if lo is not None and v < lo or hi is not None and v > hi:
            raise self.error(key, f"must lie in [{lo}, {hi}], got {v}")
        return v

    def integer(self, key: str, default: Any = ...) -> int:
        self.seen.add(key)
        if key not in self.data:
            if default is ...:
                raise self.error(key, "required key is missing")
            return default
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.error(key, f"expected an integer, got {v!r}")
        return v

    def text(self, key: str, default: Any = ..., choices=None) -> str:
        self.seen.add(key)
        if key not in self.data:
            if default is ...:
                raise self.error(key, "required key is missing")
            return default
        v = self.data[key]
        if not isinstance(v, str):
            raise self.error(key, f"expected a string, got {v!r}")
        if choices is not None and v not in choices:
            raise self.error(key, f"must be one of {', '.join(choices)}; got {v!r}")
        return v

    def flag(self, key: str, default: bool = False) -> bool:
        self.seen.add(key)
        v = self.data.get(key, default)
        if not isinstance(v, bool):
            raise self.error(key, f"expected true/false, got {v!r}")
        return v

    def pair(self, key: str, default: Any = ...) -> Optional[tuple]:
        """Two numbers ``[a, b]`` with ``a < b``."""
        self.seen.add(key)
        if key not in self.data:
            if default is ...:
                raise self.error(key, "required key is missing")
            return default
        v = self.data[key]
        if (not isinstance(v, list) or len(v) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)):
            raise self.error(key, f"expected [start, stop], got {v!r}")
        if not v[0] < v[1]:
            raise self.error(key, f"start must be < stop, got {v!r}")
        return (float(v[0]), float(v[1]))

    def complex_(self, key: str, default: Any = ...) -> complex:
        """A real number or ``[re, im]``."""
        self.seen.add(key)
        if key not in self.data:
            if default is ...:
                raise self.error(key, "required key is missing")
            return default
        v = self.data[key]
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(v)
        if isinstance(v, list) and len(v) == 2 and all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            return complex(v[0], v[1])
        raise self.error(key, f"expected a number or [re, im], got {v!r}")

    def table(self, key: str) -> Optional["_Table"]:
        self.seen.add(key)
        if key not in self.data:
            return None
        return _Table(self.data[key], self._p(key), self.loc)

    def tables(self, key: str) -> list:
        self.seen.add(key)
        v = self.data.get(key, [])
        if not isinstance(v, list):
            raise self.error(key, "expected an array of tables")
        return [_Table(x, f"{self._p(key)}[{i}]", self.loc) for i, x in enumerate(v)]

    def done(self):
        extra = sorted(set(self.data) - self.seen)
        if extra:
            raise self.error(extra[0], "unknown key")


# ---------------------------------------------------------------- dataclasses


@dataclass(frozen=True)
class InputSpec:
    pulses: tuple = ()
    time_bin: Optional[TimeBinSpec] = None
    mean_photons: Optional[float] = None

    @property
    def reference(self) -> GaussianPulseSpec:
        return self.time_bin.base if self.time_bin is not None else self.pulses[0]


@dataclass(frozen=True)
class AnalysisSpec:
    """Extra observables: echo energy per time window, echo measured per
    frequency band (spectrally resolved detection), compression factor."""

    bins: tuple = ()
    compression: bool = False
    bands: tuple = ()


@dataclass(frozen=True)
class RunSpec:
    name: str
    grid: TimeGrid
    input: InputSpec
    chain: ChainSpec
    detection: DetectionSpec
    analysis: AnalysisSpec = AnalysisSpec()


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    description: str
    seed: int
    runs: tuple
    output_dir: Optional[str] = None
    source_text: str = field(default="", repr=False, compare=False)


# ---------------------------------------------------------------- sections


def _grid(t: Optional[_Table]) -> TimeGrid:
    if t is None:
        return TimeGrid.covering(DEFAULT_GRID["t_start_ns"], DEFAULT_GRID["t_stop_ns"], DEFAULT_GRID["dt_ns"])
    start = t.num("t_start_ns", DEFAULT_GRID["t_start_ns"])
    stop = t.num("t_stop_ns", DEFAULT_GRID["t_stop_ns"])
    dt = t.num("dt_ns", DEFAULT_GRID["dt_ns"], positive=True)
    t.done()
    if not stop > start:
        raise t.error("t_stop_ns", "must exceed t_start_ns")
    try:
        return TimeGrid.covering(start, stop, dt)
    except AfcSimError as exc:
        raise t.error("dt_ns", str(exc)) from None


def _pulse(t: _Table) -> GaussianPulseSpec:
    amp = t.complex_("amplitude", 1.0) * complex(math.cos(p := t.num("phase_rad", 0.0)), math.sin(p))
    spec = GaussianPulseSpec.from_fwhm(
        t.num("t0_ns", 0.0), t.num("fwhm_ns", positive=True), t.num("detuning_mhz", 0.0), amp
    )
    t.done()
    return spec


def _input(t: Optional[_Table], loc: _Locator) -> InputSpec:
    if t is None:
        raise loc.error("input", "missing [input] table")
    photons = t.num("mean_photons", None, nonneg=True)
    pulses = tuple(_pulse(p) for p in t.tables("pulse"))
    tb = t.table("time_bin")
    time_bin = None
    if tb is not None:
        base = GaussianPulseSpec.from_fwhm(
            tb.num("t0_ns", 0.0), tb.num("fwhm_ns", positive=True), tb.num("detuning_mhz", 0.0)
        )
        try:
            time_bin = TimeBinSpec(tb.complex_("early"), tb.complex_("late"),
                                   tb.num("separation_ns", positive=True), base)
        except AfcSimError as exc:
            raise tb.error("early", str(exc)) from None
        tb.done()
    t.done()
    if bool(pulses) == (time_bin is not None):
        raise t.error("pulse", "give either [[input.pulse]] entries or one [input.time_bin], not both or neither")
    return InputSpec(pulses, time_bin, photons)


def _action(t: _Table, targeted: bool):
    kind = t.text("kind", choices=("serrodyne", "chirp", "gated"))
    try:
        if kind == "serrodyne":
            rise = t.num("rise_time_ns", None, nonneg=True)
            action = SerrodyneSpec(
                t.num("shift_mhz"), t.num("amplitude_fraction", 1.0, lo=0.0, hi=1.0),
                t.num("dac_rate_gsps", 0.0, nonneg=True), t.pair("gate_ns", None), rise,
            )
        elif kind == "chirp":
            action = ChirpSpec(t.num("rate_mhz_per_ns"), t.num("f1_mhz", 0.0), t.pair("gate_ns", None),
                               t.num("t_ref_ns", 0.0))
        else:
            windows = []
            for w in t.tables("window"):
                windows.append(GatedShift(w.pair("gate_ns"), w.num("shift_mhz"),
                                          w.num("amplitude_fraction", 1.0, lo=0.0, hi=1.0)))
                w.done()
            action = GatedShiftProgram(tuple(windows), t.num("dac_rate_gsps", 0.0, nonneg=True))
    except ConfigError:
        raise
    except AfcSimError as exc:
        raise t.error("kind", str(exc)) from None
    if targeted:
        action = Targeted(action, t.text("component", "both", choices=("both", "transmitted", "echo")))
    t.done()
    return action


def _controller(t: Optional[_Table], targeted: bool) -> tuple:
    if t is None:
        return (), 0.0
    loss = t.num("loss_db", 0.0, nonneg=True)
    actions = tuple(_action(a, targeted) for a in t.tables("action"))
    t.done()
    return actions, loss


def _storage_or_spacing(t: _Table, storage_key: str, spacing_key: str) -> float:
    """Tooth spacing (MHz) from either a storage time or a spacing key."""
    if t.has(storage_key) == t.has(spacing_key):
        raise t.error(storage_key, f"give exactly one of {storage_key} or {spacing_key}")
    if t.has(storage_key):
        return tooth_spacing(t.num(storage_key, positive=True))
    return t.num(spacing_key, positive=True)


def _segment(t: _Table, eta: float, t_bg: float):
    kind = t.text("kind", choices=("comb", "chirped", "double"))
    f_lo, f_hi = t.num("f_lo_mhz"), t.num("f_hi_mhz")
    seg_eta = t.num("eta", eta, lo=0.0, hi=1.0)
    seg_bg = t.num("t_bg", t_bg, lo=0.0, hi=1.0)
    try:
        if kind == "comb":
            seg = CombSegment(f_lo, f_hi, _storage_or_spacing(t, "storage_ns", "spacing_mhz"),
                              seg_eta, seg_bg, t.num("f_ref_mhz", None))
        elif kind == "chirped":
            seg = ChirpedCombSegment(
                f_lo, f_hi,
                _storage_or_spacing(t, "storage_lo_ns", "spacing_lo_mhz"),
                _storage_or_spacing(t, "storage_hi_ns", "spacing_hi_mhz"),
                seg_eta, seg_bg, t.num("f0_mhz", None),
            )
        else:
            storages = t.raw("storage_ns")
            if not (isinstance(storages, list) and len(storages) == 2):
                raise t.error("storage_ns", "a double comb needs storage_ns = [t1, t2]")
            phases = t.raw("phase_rad", [0.0, 0.0])
            weights = t.raw("weights", [0.5, 0.5])
            for key, v in (("phase_rad", phases), ("weights", weights)):
                if not (isinstance(v, list) and len(v) == 2):
                    raise t.error(key, "expected two numbers")
            combs = tuple(SubComb(tooth_spacing(float(s)), seg_eta * float(w), float(p))
                          for s, w, p in zip(storages, weights, phases))
            seg = DoubleCombSegment(f_lo, f_hi, combs, seg_bg, t.num("f_ref_mhz", None))
    except ConfigError:
        raise
    except AfcSimError as exc:
        raise t.error("kind", str(exc)) from None
    t.done()
    return seg


def _processor(t: Optional[_Table], loc: _Locator) -> ProcessorProgram:
    if t is None:
        raise loc.error("processor", "missing [processor] table")
    eta = t.num("eta", afc.DEFAULT_ETA, lo=0.0, hi=1.0)
    t_bg = t.num("t_bg", afc.DEFAULT_T_BG, lo=0.0, hi=1.0)
    preset = t.text("preset", None, choices=tuple(PRESETS))
    segments = [_segment(s, eta, t_bg) for s in t.tables("segment")]
    if preset is not None:
        segments = list(PRESETS[preset](eta, t_bg).segments) + segments
    try:
        program = ProcessorProgram(tuple(segments), t.num("out_of_band", 1.0, lo=0.0, hi=1.0))
    except AfcSimError as exc:
        raise t.error("segment", str(exc)) from None
    if t.flag("equalize"):
        program = program.equalized()
    t.done()
    return program


def _fp(t: Optional[_Table]) -> Optional[FPFilterSpec]:
    if t is None:
        return None
    try:
        spec = FPFilterSpec(t.num("center_mhz"), t.num("linewidth_mhz", 80.0, positive=True),
                            t.num("fsr_mhz", 23000.0, positive=True))
    except ValueError as exc:
        raise t.error("linewidth_mhz", str(exc)) from None
    t.done()
    return spec


def _detection(t: Optional[_Table], seed: int) -> DetectionSpec:
    if t is None:
        return DetectionSpec(rng_seed=seed)
    spec = DetectionSpec(
        det_efficiency=t.num("efficiency", 0.70, lo=0.0, hi=1.0),
        dark_rate=t.num("dark_rate_hz", 100.0, nonneg=True),
        bin_width=t.num("bin_width_ns", 1.0, positive=True),
        pulse_rate=t.num("pulse_rate_mhz", 2.7, nonneg=True),
        duration_s=t.num("duration_s", 60.0, nonneg=True),
        rng_seed=seed,
        duty_cycle=t.num("duty_cycle", 1.0, positive=True, hi=1.0),
        window=t.pair("window_ns", None),
    )
    t.done()
    return spec


def _analysis(t: Optional[_Table]) -> AnalysisSpec:
    if t is None:
        return AnalysisSpec()
    windows = {}
    for key in ("bins_ns", "bands_mhz"):
        v = t.raw(key, [])
        if not isinstance(v, list) or any(
                not (isinstance(b, list) and len(b) == 2 and b[0] < b[1]) for b in v):
            raise t.error(key, "expected a list of [start, stop] pairs")
        windows[key] = tuple((float(a), float(b)) for a, b in v)
    spec = AnalysisSpec(windows["bins_ns"], t.flag("compression"), windows["bands_mhz"])
    t.done()
    return spec


def _run(name: str, doc: dict, path: str, loc: _Locator, seed: int) -> RunSpec:
    root = _Table(doc, path, loc)
    for key in ("name", "description", "seed", "variant", "output"):
        root.seen.add(key)
    grid = _grid(root.table("grid"))
    inp = _input(root.table("input"), loc)
    in_actions, in_loss = _controller(root.table("input_controller"), targeted=False)
    program = _processor(root.table("processor"), loc)
    out_actions, out_loss = _controller(root.table("output_controller"), targeted=True)
    fp = _fp(root.table("fp_filter"))
    coupling = root.num("coupling_efficiency", 1.0, lo=0.0, hi=1.0)
    detection = _detection(root.table("detection"), seed)
    analysis = _analysis(root.table("analysis"))
    root.done()
    chain = ChainSpec(program, in_actions, out_actions, fp, in_loss, out_loss, coupling)
    return RunSpec(name, grid, inp, chain, detection, analysis)


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"syntax error: {exc}", "", int(m.group(1)) if m else 0, source) from None
    loc = _Locator(text, source)
    root = _Table(doc, "", loc)
    name = root.text("name", "scenario")
    description = root.text("description", "")
    seed = root.integer("seed", 0)
    output = root.table("output")
    out_dir = None
    if output is not None:
        out_dir = output.text("dir", None)
        output.done()

    variants = doc.get("variant", [])
    if not isinstance(variants, list):
        raise loc.error("variant", "use [[variant]] array tables")
    base = {k: v for k, v in doc.items() if k != "variant"}
    runs = []
    if not variants:
        runs.append(_run("main", base, "", loc, seed))
    names = set()
    for i, v in enumerate(variants):
        vt = _Table(v, f"variant[{i}]", loc)
        vname = vt.text("name")
        if not re.fullmatch(r"[A-Za-z0-9_\-]+", vname):
            raise vt.error("name", "variant names may only use letters, digits, '_' and '-'")
        if vname in names:
            raise vt.error("name", f"duplicate variant name {vname!r}")
        names.add(vname)
        override = {k: val for k, val in v.items() if k != "name"}
        runs.append(_run(vname, deep_merge(base, override), f"variant[{i}]", loc, seed + i))
    return ScenarioConfig(name, description, seed, tuple(runs), out_dir, text)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, str(path))
