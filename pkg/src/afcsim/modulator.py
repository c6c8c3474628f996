"""Electro-optic phase-modulator actions: serrodyne shifts, linear chirps and
time-gated shift programs.

All actions are phase-only (energy is conserved exactly) apart from an
optional insertion loss, which the optics chain applies once per controller.

The imperfect serrodyne drive is a sawtooth sampled by a DAC (zero-order
hold at ``dac_rate``) and then smoothed by a single-pole response with time
constant ``rise_time``. The pole mostly costs power during the flyback; its
value is calibrated so that a 1 GHz shift at 20 GS/s puts 80% of the power
in the shifted line (see :func:`calibrate_rise_time`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq
from scipy.signal import lfilter

from .errors import ModulatorRangeError, NyquistError
from .signal import CYCLES_PER_NS_MHZ, TWO_PI_C, ComplexField, nyquist_warnings

MAX_SHIFT_MHZ = 5000.0

# From calibrate_rise_time(1000.0, 20.0, 0.80); see tests/test_modulator.py.
CALIBRATED_RISE_TIME_NS = 0.044251074

Gate = Optional[tuple]


def _frac(x: np.ndarray) -> np.ndarray:
    # guard against k*ratio landing a hair below an integer
    return x - np.floor(x + 1e-9)


def _gate_mask(t: np.ndarray, gate: Gate) -> np.ndarray:
    if gate is None:
        return np.ones(t.shape, dtype=bool)
    lo, hi = gate
    if not lo < hi:
        raise ValueError(f"gate {gate} must satisfy start < stop")
    return (t >= lo) & (t < hi)


@dataclass(frozen=True)
class SerrodyneSpec:
    """Sawtooth phase drive.

    ``amplitude_fraction`` is the drive depth as a fraction of the 2*pi
    voltage. ``dac_rate`` in samples/ns; 0 selects the ideal continuous
    sawtooth. ``rise_time`` (ns) defaults to the calibrated value whenever a
    finite DAC rate is used.
    """

    shift: float
    amplitude_fraction: float = 1.0
    dac_rate: float = 0.0
    gate: Gate = None
    rise_time: Optional[float] = None

    def __post_init__(self):
        if abs(self.shift) > MAX_SHIFT_MHZ:
            raise ModulatorRangeError(
                f"shift {self.shift} MHz outside the +/-{MAX_SHIFT_MHZ:.0f} MHz modulator range"
            )
        if not 0.0 <= self.amplitude_fraction <= 1.0:
            raise ValueError("amplitude_fraction must lie in [0, 1]")
        if self.dac_rate < 0:
            raise ValueError("dac_rate must be >= 0")
        if self.rise_time is not None and self.rise_time < 0:
            raise ValueError("rise_time must be >= 0")
        if self.dac_rate == 0 and self.rise_time:
            raise ValueError("rise_time needs a finite dac_rate")

    @property
    def is_ideal(self) -> bool:
        return self.dac_rate == 0

    @property
    def effective_rise_time(self) -> float:
        if self.is_ideal:
            return 0.0
        return CALIBRATED_RISE_TIME_NS if self.rise_time is None else self.rise_time


def serrodyne_phase(spec: SerrodyneSpec, t: np.ndarray) -> np.ndarray:
    """Optical phase (rad) imposed by the sawtooth drive at times ``t`` (sorted)."""
    t = np.asarray(t, dtype=float)
    depth = 2.0 * np.pi * spec.amplitude_fraction
    sign = 1.0 if spec.shift >= 0 else -1.0
    rate = abs(spec.shift) * CYCLES_PER_NS_MHZ  # sawtooth periods per ns
    if spec.shift == 0 or t.size == 0:
        return np.zeros_like(t)
    if spec.is_ideal:
        return sign * depth * _frac(rate * t)

    step = 1.0 / spec.dac_rate
    ratio = rate * step
    tau = spec.effective_rise_time
    warm = 40.0 * tau + 2.0 / rate
    k = np.arange(int(np.floor((t[0] - warm) / step)), int(np.floor(t[-1] / step)) + 2)
    held = depth * _frac(k * ratio)
    if tau == 0:
        idx = np.floor(t / step).astype(int) - k[0]
        return sign * held[idx]
    a = np.exp(-step / tau)
    # y[j] is the filter output at the start of DAC step j
    y, _ = lfilter([0.0, 1.0 - a], [1.0, -a], held, zi=[held[0]])
    idx = np.floor(t / step).astype(int) - k[0]
    since = t - k[idx] * step
    return sign * (held[idx] + (y[idx] - held[idx]) * np.exp(-since / tau))


def serrodyne(field: ComplexField, spec: SerrodyneSpec) -> ComplexField:
    t = field.times
    mask = _gate_mask(t, spec.gate)
    out = field.samples.copy()
    if spec.is_ideal and spec.amplitude_fraction == 1.0:
        out[mask] *= np.exp(1j * TWO_PI_C * spec.shift * t[mask])
    else:
        out[mask] *= np.exp(1j * serrodyne_phase(spec, t[mask]))
    result = field.with_samples(out)
    return result.with_samples(out, nyquist_warnings(result))


def harmonic_shares(
    spec: SerrodyneSpec, orders: Sequence[int] = range(-4, 5), periods: int = 40, oversample: int = 64
) -> dict:
    """Power fraction carried by each harmonic ``n * shift`` of the drive.

    Evaluated in continuous time (``oversample`` points per DAC step or per
    1/64 period) over an integer number of sawtooth periods.
    """
    if spec.shift == 0:
        return {n: float(n == 0) for n in orders}
    period = 1.0 / (abs(spec.shift) * CYCLES_PER_NS_MHZ)
    res = period / 64 if spec.is_ideal else min(period / 64, 1.0 / (spec.dac_rate * oversample))
    n_pts = int(round(periods * period / res))
    t = (np.arange(n_pts) + 0.5) * (periods * period / n_pts)
    m = np.exp(1j * serrodyne_phase(spec, t))
    out = {}
    for n in orders:
        c = np.mean(m * np.exp(-1j * TWO_PI_C * n * spec.shift * t))
        out[n] = float(abs(c) ** 2)
    return out


def calibrate_rise_time(shift: float = 1000.0, dac_rate: float = 20.0, target: float = 0.80) -> float:
    """Rise time (ns) at which the first harmonic carries ``target`` of the power."""

    def excess(tau):
        spec = SerrodyneSpec(shift, 1.0, dac_rate, rise_time=tau)
        return harmonic_shares(spec, orders=(1,))[1] - target

    return brentq(excess, 1e-4, 2.0, xtol=1e-9)


@dataclass(frozen=True)
class ChirpSpec:
    """Linear frequency sweep ``exp(2i pi (f1 t' - rate t'^2 / 2))``, ``t' = t - t_ref``.

    Positive ``rate`` sweeps from high to low instantaneous frequency.
    """

    rate: float
    f1: float = 0.0
    gate: Gate = None
    t_ref: float = 0.0


def chirp(field: ComplexField, spec: ChirpSpec) -> ComplexField:
    t = field.times
    mask = _gate_mask(t, spec.gate)
    tp = t - spec.t_ref
    inten = field.intensity
    support = mask & (inten > 1e-12 * inten.max()) if inten.max() > 0 else mask
    if support.any():
        # input carrier estimated from the local phase slope
        own = np.angle(field.samples[1:] * np.conj(field.samples[:-1])) / (TWO_PI_C * field.grid.dt)
        own = np.append(own, own[-1])
        reach = float(np.max(np.abs(spec.f1 - spec.rate * tp[support] + own[support])))
        if reach >= field.grid.nyquist:
            raise NyquistError(
                f"chirp sweeps to {reach:.0f} MHz, beyond the {field.grid.nyquist:.0f} MHz Nyquist limit"
            )
    out = field.samples.copy()
    out[mask] *= np.exp(1j * TWO_PI_C * (spec.f1 * tp[mask] - 0.5 * spec.rate * tp[mask] ** 2))
    result = field.with_samples(out)
    return result.with_samples(out, nyquist_warnings(result))


@dataclass(frozen=True)
class GatedShift:
    window: tuple
    shift: float
    amplitude_fraction: float = 1.0


@dataclass(frozen=True)
class GatedShiftProgram:
    shifts: tuple = field(default_factory=tuple)
    dac_rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "shifts", tuple(self.shifts))
        windows = sorted(s.window for s in self.shifts)
        for (a0, a1), (b0, b1) in zip(windows, windows[1:]):
            if b0 < a1:
                from .errors import ProgramError

                raise ProgramError(f"gate windows {(a0, a1)} and {(b0, b1)} overlap")


def gated_shifts(field: ComplexField, program: GatedShiftProgram) -> ComplexField:
    g = field.grid
    out = field
    for s in program.shifts:
        lo, hi = s.window
        if lo < g.t_start or hi > g.t_end:
            raise ValueError(f"gate window {s.window} outside grid [{g.t_start}, {g.t_end})")
        out = serrodyne(out, SerrodyneSpec(s.shift, s.amplitude_fraction, program.dac_rate, gate=s.window))
    return out


ModulatorAction = Union[SerrodyneSpec, ChirpSpec, GatedShiftProgram]


def apply_action(field: ComplexField, action: ModulatorAction) -> ComplexField:
    if isinstance(action, SerrodyneSpec):
        return serrodyne(field, action)
    if isinstance(action, ChirpSpec):
        return chirp(field, action)
    if isinstance(action, GatedShiftProgram):
        return gated_shifts(field, action)
    raise TypeError(f"unknown modulator action {action!r}")


def insertion_loss(field: ComplexField, loss_db: float) -> ComplexField:
    if loss_db < 0:
        raise ValueError("insertion loss must be >= 0 dB")
    if loss_db == 0:
        return field
    return field.scaled(10.0 ** (-loss_db / 20.0))
