"""Input field constructors: Gaussian pulses, trains, time-bin states."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import EmptyFieldError, NormalizationError, PulseOutsideGridError
from .signal import TWO_PI_C, ComplexField, TimeGrid

FWHM_PER_TAU = 2.0 * math.sqrt(math.log(2.0))
MAX_TRUNCATED_ENERGY = 1e-6


def tau_from_fwhm(fwhm: float) -> float:
    """Gaussian amplitude parameter for an intensity FWHM."""
    return fwhm / FWHM_PER_TAU


def fwhm_from_tau(tau: float) -> float:
    return tau * FWHM_PER_TAU


@dataclass(frozen=True)
class GaussianPulseSpec:
    """``amplitude * exp(-(t-t0)**2 / (2 tau**2)) * exp(2i pi detuning t)``.

    The carrier phase is referenced to absolute time, so pulses at different
    ``t0`` on the same detuning are mutually coherent.
    """

    t0: float
    tau: float
    detuning: float = 0.0
    amplitude: complex = 1.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @classmethod
    def from_fwhm(cls, t0: float, fwhm: float, detuning: float = 0.0, amplitude: complex = 1.0):
        return cls(t0, tau_from_fwhm(fwhm), detuning, amplitude)

    @property
    def fwhm(self) -> float:
        return fwhm_from_tau(self.tau)


@dataclass(frozen=True)
class TimeBinSpec:
    a_early: complex
    a_late: complex
    separation: float
    base: GaussianPulseSpec

    def __post_init__(self):
        norm = abs(self.a_early) ** 2 + abs(self.a_late) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise NormalizationError(f"|a_early|^2 + |a_late|^2 = {norm:.12g}, expected 1")
        if not self.separation > 0:
            raise ValueError("time-bin separation must be positive")


def _check_inside(spec: GaussianPulseSpec, grid: TimeGrid) -> None:
    # |e(t)|^2 is a normal density with std tau/sqrt(2)
    left = 0.5 * math.erfc((spec.t0 - grid.t_start) / spec.tau)
    right = 0.5 * math.erfc((grid.t_start + (grid.n - 1) * grid.dt - spec.t0) / spec.tau)
    if left + right > MAX_TRUNCATED_ENERGY:
        raise PulseOutsideGridError(
            f"pulse at t0={spec.t0} ns (fwhm {spec.fwhm:.3g} ns) loses {left + right:.2e} "
            f"of its energy outside [{grid.t_start}, {grid.t_end}) ns"
        )


def gaussian_pulse(spec: GaussianPulseSpec, grid: TimeGrid) -> ComplexField:
    _check_inside(spec, grid)
    t = grid.times
    env = np.exp(-((t - spec.t0) ** 2) / (2.0 * spec.tau**2))
    return ComplexField(grid, spec.amplitude * env * np.exp(1j * TWO_PI_C * spec.detuning * t))


def pulse_train(specs: Sequence[GaussianPulseSpec], grid: TimeGrid) -> ComplexField:
    """Coherent sum of Gaussian pulses (overlap is allowed)."""
    if len(specs) == 0:
        raise ValueError("pulse_train needs at least one pulse")
    total = np.zeros(grid.n, dtype=complex)
    for spec in specs:
        total += gaussian_pulse(spec, grid).samples
    return ComplexField(grid, total)


def time_bin_state(spec: TimeBinSpec, grid: TimeGrid) -> ComplexField:
    if spec.separation <= spec.base.fwhm / 2:
        raise ValueError(
            f"bins {spec.separation} ns apart are not resolvable for fwhm {spec.base.fwhm:.3g} ns"
        )
    early = replace(spec.base, amplitude=spec.base.amplitude * spec.a_early)
    late = replace(
        spec.base, t0=spec.base.t0 + spec.separation, amplitude=spec.base.amplitude * spec.a_late
    )
    return pulse_train([early, late], grid)


def set_mean_photons(field: ComplexField, mean_photons: float) -> ComplexField:
    """Rescale so the field energy equals ``mean_photons``."""
    if mean_photons < 0:
        raise ValueError("mean photon number must be non-negative")
    if mean_photons == 0:
        return field.with_samples(np.zeros_like(field.samples))
    energy = field.energy
    if energy == 0:
        raise EmptyFieldError("cannot normalise an all-zero field")
    return field.scaled(math.sqrt(mean_photons / energy))
