"""Uniform time/frequency grids, complex envelopes and their transforms.

Units are fixed throughout the package: time in ns, frequency in MHz
(ordinary frequency, detuning from the optical carrier). A product of the
two is therefore in units of 1e-3 cycles, hence :data:`CYCLES_PER_NS_MHZ`.

A positive detuning ``f`` corresponds to an envelope ``exp(+2i*pi*f*t)``,
and the transform pair is::

    S(f) = sum_k s(t_k) exp(-2i*pi*f*t_k) dt
    s(t) = sum_n S(f_n) exp(+2i*pi*f_n*t) df

evaluated with one FFT plus the grid-origin phase factors, so absolute
times survive the round trip (a pure delay ``T`` is ``exp(-2i*pi*f*T)``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import EmptyFieldError, GridError, InvalidFieldError, PassivityError

CYCLES_PER_NS_MHZ = 1e-3
TWO_PI_C = 2.0 * np.pi * CYCLES_PER_NS_MHZ

PASSIVITY_TOL = 1e-9
NYQUIST_GUARD = 0.05


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling ``t_k = t_start + k*dt`` for ``k = 0..n-1``."""

    t_start: float
    dt: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.t_start) or not np.isfinite(self.dt):
            raise GridError("grid start and step must be finite")
        if self.dt <= 0:
            raise GridError(f"dt must be positive, got {self.dt}")
        if int(self.n) != self.n or self.n < 2:
            raise GridError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def covering(cls, t_start: float, t_stop: float, dt: float = 0.05) -> "TimeGrid":
        """Smallest even-length grid starting at ``t_start`` reaching ``t_stop``."""
        n = int(np.ceil((t_stop - t_start) / dt))
        n += n % 2
        return cls(t_start, dt, max(n, 2))

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n)

    @property
    def span(self) -> float:
        return self.n * self.dt

    @property
    def t_end(self) -> float:
        return self.t_start + self.span

    @property
    def df(self) -> float:
        return 1.0 / (self.span * CYCLES_PER_NS_MHZ)

    @property
    def f_start(self) -> float:
        return -(self.n // 2) * self.df

    @property
    def frequencies(self) -> np.ndarray:
        return self.f_start + self.df * np.arange(self.n)

    @property
    def nyquist(self) -> float:
        return 0.5 / (self.dt * CYCLES_PER_NS_MHZ)

    def refined(self, factor: int) -> "TimeGrid":
        """Same time window sampled ``factor`` times more finely."""
        return TimeGrid(self.t_start, self.dt / factor, self.n * factor)


def _frozen_array(values, n: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.shape != (n,):
        raise InvalidFieldError(f"{what} has shape {arr.shape}, expected ({n},)")
    if not np.all(np.isfinite(arr)):
        raise InvalidFieldError(f"{what} contains non-finite samples")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ComplexField:
    """Complex envelope on a :class:`TimeGrid`.

    ``sum(|samples|**2) * dt`` is the pulse energy in photon-number units.
    ``warnings`` carries flags raised by operations that produced the field
    (for instance the aliasing guard).
    """

    grid: TimeGrid
    samples: np.ndarray
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_array(self.samples, self.grid.n, "field"))

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "ComplexField":
        return cls(grid, np.zeros(grid.n, dtype=complex))

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def energy(self) -> float:
        return float(np.sum(self.intensity) * self.grid.dt)

    def with_samples(self, samples, extra_warnings=()) -> "ComplexField":
        return ComplexField(self.grid, samples, _merge(self.warnings, extra_warnings))

    def scaled(self, factor: complex) -> "ComplexField":
        return self.with_samples(self.samples * factor)

    def __add__(self, other: "ComplexField") -> "ComplexField":
        if other.grid != self.grid:
            raise GridError("cannot add fields on different grids")
        return self.with_samples(self.samples + other.samples, other.warnings)


@dataclass(frozen=True)
class Spectrum:
    """Frequency-domain envelope conjugate to ``grid`` (ascending detunings)."""

    grid: TimeGrid
    samples: np.ndarray
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_array(self.samples, self.grid.n, "spectrum"))

    @property
    def f_start(self) -> float:
        return self.grid.f_start

    @property
    def df(self) -> float:
        return self.grid.df

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.df * CYCLES_PER_NS_MHZ)


def _merge(a: tuple, b) -> tuple:
    out = list(a)
    for w in b:
        if w not in out:
            out.append(w)
    return tuple(out)


def to_spectrum(field: ComplexField) -> Spectrum:
    g = field.grid
    k = np.arange(g.n)
    pre = np.exp(-1j * TWO_PI_C * g.f_start * k * g.dt)
    post = np.exp(-1j * TWO_PI_C * g.frequencies * g.t_start)
    samples = g.dt * post * np.fft.fft(field.samples * pre)
    return Spectrum(g, samples, field.warnings)


def to_time(spectrum: Spectrum) -> ComplexField:
    g = spectrum.grid
    k = np.arange(g.n)
    pre = np.exp(1j * TWO_PI_C * g.frequencies * g.t_start)
    post = np.exp(1j * TWO_PI_C * g.f_start * k * g.dt)
    samples = g.df * CYCLES_PER_NS_MHZ * g.n * post * np.fft.ifft(spectrum.samples * pre)
    return ComplexField(g, samples, spectrum.warnings)


Transfer = Union[np.ndarray, Callable[[np.ndarray], np.ndarray], complex, float]


def apply_transfer(spectrum: Spectrum, transfer: Transfer, passive: bool = True) -> Spectrum:
    """Multiply ``spectrum`` pointwise by ``transfer``.

    ``transfer`` may be an array on the spectrum's frequency grid, a callable
    of the detuning array, or a scalar. Passive elements may not exceed unit
    magnitude anywhere.
    """
    f = spectrum.frequencies
    if callable(transfer):
        h = np.asarray(transfer(f), dtype=complex)
    else:
        h = np.asarray(transfer, dtype=complex)
    h = np.broadcast_to(h, f.shape)
    if not np.all(np.isfinite(h)):
        raise InvalidFieldError("transfer function contains non-finite values")
    if passive:
        worst = float(np.max(np.abs(h)))
        if worst > 1.0 + PASSIVITY_TOL:
            raise PassivityError(f"|transfer| reaches {worst:.6g} > 1 for a passive element")
    return Spectrum(spectrum.grid, spectrum.samples * h, spectrum.warnings)


def filter_field(field: ComplexField, transfer: Transfer, passive: bool = True) -> ComplexField:
    """Time-domain convenience wrapper around :func:`apply_transfer`."""
    return to_time(apply_transfer(to_spectrum(field), transfer, passive))


def nyquist_warnings(field: ComplexField, threshold: float = 1e-9) -> tuple:
    """Flag spectral energy in the outer 5% of the band next to Nyquist."""
    spec = to_spectrum(field)
    p = np.abs(spec.samples) ** 2
    total = p.sum()
    if total == 0:
        return ()
    edge = np.abs(spec.frequencies) > (1.0 - NYQUIST_GUARD) * field.grid.nyquist
    frac = p[edge].sum() / total
    if frac > threshold:
        return (f"aliasing: {frac:.2e} of spectral energy within 5% of Nyquist",)
    return ()


@dataclass(frozen=True)
class Measurement:
    peak_time: float
    fwhm: float
    energy: float
    centroid_frequency: float
    peak_phase: float
    multi_lobe: bool


def parabolic_peak(t: np.ndarray, y: np.ndarray, k: int) -> float:
    if k == 0 or k == len(y) - 1:
        return float(t[k])
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(t[k])
    return float(t[k] + 0.5 * (y0 - y2) / denom * (t[1] - t[0]))


def fwhm_of(t: np.ndarray, intensity: np.ndarray) -> tuple[float, bool]:
    """FWHM of the global-peak lobe by linear interpolation, plus multi-lobe flag."""
    k = int(np.argmax(intensity))
    half = intensity[k] / 2.0
    n = len(intensity)
    lo = k
    while lo > 0 and intensity[lo - 1] >= half:
        lo -= 1
    hi = k
    while hi < n - 1 and intensity[hi + 1] >= half:
        hi += 1
    if lo > 0:
        a, b = intensity[lo - 1], intensity[lo]
        t_left = t[lo - 1] + (half - a) / (b - a) * (t[lo] - t[lo - 1])
    else:
        t_left = t[0]
    if hi < n - 1:
        a, b = intensity[hi], intensity[hi + 1]
        t_right = t[hi] + (a - half) / (a - b) * (t[hi + 1] - t[hi])
    else:
        t_right = t[-1]
    above = intensity >= half
    above[lo:hi + 1] = False
    return float(t_right - t_left), bool(above.any())


def measure(field: ComplexField) -> Measurement:
    intensity = field.intensity
    if not np.any(intensity > 0):
        raise EmptyFieldError("cannot measure an all-zero field")
    t = field.times
    k = int(np.argmax(intensity))
    width, multi = fwhm_of(t, intensity)
    spec = to_spectrum(field)
    p = np.abs(spec.samples) ** 2
    centroid = float(np.sum(spec.frequencies * p) / np.sum(p))
    return Measurement(
        peak_time=parabolic_peak(t, intensity, k),
        fwhm=width,
        energy=field.energy,
        centroid_frequency=centroid,
        peak_phase=float(np.angle(field.samples[k])),
        multi_lobe=multi,
    )


def window_energy(field: ComplexField, t_lo: float, t_hi: float) -> float:
    t = field.times
    mask = (t >= t_lo) & (t < t_hi)
    return float(np.sum(field.intensity[mask]) * field.grid.dt)


def overlap(a: ComplexField, b: ComplexField) -> complex:
    """Inner product ``sum(conj(a) * b) dt``."""
    return complex(np.sum(np.conj(a.samples) * b.samples) * a.grid.dt)


def delay(field: ComplexField, t_delay: float) -> ComplexField:
    """Circular delay by ``t_delay`` ns via the shift theorem."""
    return filter_field(field, lambda f: np.exp(-1j * TWO_PI_C * f * t_delay))
