"""Programmable atomic-frequency-comb processor.

A program is a set of disjoint frequency segments. Each segment is reduced
to a complex spectral transfer with two labelled parts: the directly
transmitted background and the first echo. Only the first echo is modelled,
and tooth lineshape, optical depth and finesse are folded into a per-segment
efficiency ``eta``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .errors import GridError, InfeasibleDesignError, ProgramError
from .signal import CYCLES_PER_NS_MHZ, PASSIVITY_TOL, TWO_PI_C, TimeGrid

DEFAULT_ETA = 0.01
DEFAULT_T_BG = 0.3

MHZ_NS = 1.0 / CYCLES_PER_NS_MHZ  # 1/Delta[MHz] -> ns


def storage_time(delta: float) -> float:
    """Echo delay (ns) for tooth spacing ``delta`` (MHz)."""
    return MHZ_NS / delta


def tooth_spacing(delay: float) -> float:
    return MHZ_NS / delay


def _check_band(f_lo, f_hi):
    if not f_lo < f_hi:
        raise ProgramError(f"segment band [{f_lo}, {f_hi}) must have f_lo < f_hi")


def _check_amplitudes(eta_amplitude_sum: float, t_bg: float, what: str):
    if t_bg < 0 or t_bg > 1:
        raise ProgramError(f"{what}: t_bg={t_bg} outside [0, 1]")
    if eta_amplitude_sum**2 + t_bg**2 > 1.0 + PASSIVITY_TOL:
        raise ProgramError(
            f"{what} is not passive: peak echo intensity {eta_amplitude_sum**2:.4g} "
            f"+ background {t_bg**2:.4g} > 1"
        )


@dataclass(frozen=True)
class CombSegment:
    """Constant tooth spacing ``delta``: a pure delay of ``1/delta``.

    The echo phase is referenced to the tooth at ``f_ref`` (band centre by
    default) so an input detuned by ``d0`` from a tooth is retarded by
    ``2*pi*d0/delta``.
    """

    f_lo: float
    f_hi: float
    delta: float
    eta: float = DEFAULT_ETA
    t_bg: float = DEFAULT_T_BG
    f_ref: Optional[float] = None

    def __post_init__(self):
        _check_band(self.f_lo, self.f_hi)
        if not self.delta > 0:
            raise ProgramError(f"tooth spacing must be positive, got {self.delta}")
        if not 0 <= self.eta <= 1:
            raise ProgramError(f"eta={self.eta} outside [0, 1]")
        _check_amplitudes(math.sqrt(self.eta), self.t_bg, "comb segment")
        if self.f_ref is None:
            object.__setattr__(self, "f_ref", 0.5 * (self.f_lo + self.f_hi))

    @property
    def storage_time(self) -> float:
        return storage_time(self.delta)

    @property
    def max_delay(self) -> float:
        return self.storage_time

    @property
    def min_eta(self) -> float:
        return self.eta

    def with_eta(self, eta: float) -> "CombSegment":
        return replace(self, eta=eta)

    def echo(self, f: np.ndarray) -> np.ndarray:
        return math.sqrt(self.eta) * np.exp(-1j * TWO_PI_C * (f - self.f_ref) * self.storage_time)


@dataclass(frozen=True)
class ChirpedCombSegment:
    """Tooth spacing falling (or rising) across the band, giving a storage
    time that varies linearly from ``1/delta_lo`` at ``f_lo`` to
    ``1/delta_hi`` at ``f_hi``. The echo carries the quadratic spectral phase
    ``-pi*mu*(f-f0)**2`` on top of the storage time at ``f0``."""

    f_lo: float
    f_hi: float
    delta_lo: float
    delta_hi: float
    eta: float = DEFAULT_ETA
    t_bg: float = DEFAULT_T_BG
    f0: Optional[float] = None

    def __post_init__(self):
        _check_band(self.f_lo, self.f_hi)
        if not (self.delta_lo > 0 and self.delta_hi > 0):
            raise ProgramError("tooth spacings must be positive")
        if not 0 <= self.eta <= 1:
            raise ProgramError(f"eta={self.eta} outside [0, 1]")
        _check_amplitudes(math.sqrt(self.eta), self.t_bg, "chirped comb segment")
        if self.f0 is None:
            object.__setattr__(self, "f0", self.f_lo)

    @classmethod
    def from_storage(cls, f_lo, f_hi, t_lo, t_hi, **kw) -> "ChirpedCombSegment":
        """Build from the storage times (ns) at the two band edges."""
        return cls(f_lo, f_hi, tooth_spacing(t_lo), tooth_spacing(t_hi), **kw)

    @property
    def t_lo(self) -> float:
        return storage_time(self.delta_lo)

    @property
    def t_hi(self) -> float:
        return storage_time(self.delta_hi)

    @property
    def mu(self) -> float:
        return (self.t_hi - self.t_lo) / (self.f_hi - self.f_lo)

    @property
    def t_offset(self) -> float:
        """Programmed storage time at the phase reference ``f0``."""
        return self.t_lo + self.mu * (self.f0 - self.f_lo)

    @property
    def max_delay(self) -> float:
        return max(self.t_lo, self.t_hi)

    @property
    def min_eta(self) -> float:
        return self.eta

    def with_eta(self, eta: float) -> "ChirpedCombSegment":
        return replace(self, eta=eta)

    def group_delay(self, f: np.ndarray) -> np.ndarray:
        return self.mu * (np.asarray(f) - self.f0) + self.t_offset

    def echo(self, f: np.ndarray) -> np.ndarray:
        phase = np.pi * CYCLES_PER_NS_MHZ * self.mu * (f - self.f0) ** 2 + TWO_PI_C * f * self.t_offset
        return math.sqrt(self.eta) * np.exp(-1j * phase)


@dataclass(frozen=True)
class SubComb:
    delta: float
    eta: float
    phase: float = 0.0


@dataclass(frozen=True)
class DoubleCombSegment:
    """Two superimposed combs sharing a band: one input pulse produces two
    echoes, ``sqrt(eta_k) * exp(i*phase_k)`` each.

    Passivity is checked against the worst-case coherent sum
    ``(sum sqrt(eta_k))**2 + t_bg**2 <= 1``.
    """

    f_lo: float
    f_hi: float
    combs: tuple
    t_bg: float = DEFAULT_T_BG
    f_ref: Optional[float] = None

    def __post_init__(self):
        _check_band(self.f_lo, self.f_hi)
        combs = tuple(c if isinstance(c, SubComb) else SubComb(*c) for c in self.combs)
        object.__setattr__(self, "combs", combs)
        if len(combs) != 2:
            raise ProgramError("a double comb needs exactly two sub-combs")
        if any(not c.delta > 0 for c in combs):
            raise ProgramError("tooth spacings must be positive")
        if math.isclose(combs[0].delta, combs[1].delta):
            raise ProgramError("the two sub-combs need distinct storage times")
        if any(not 0 <= c.eta <= 1 for c in combs):
            raise ProgramError("sub-comb efficiencies must lie in [0, 1]")
        _check_amplitudes(sum(math.sqrt(c.eta) for c in combs), self.t_bg, "double comb segment")
        if self.f_ref is None:
            object.__setattr__(self, "f_ref", 0.5 * (self.f_lo + self.f_hi))

    @classmethod
    def equal(cls, f_lo, f_hi, delay_1, delay_2, eta=DEFAULT_ETA, t_bg=DEFAULT_T_BG,
              phase_1=0.0, phase_2=0.0, f_ref=None) -> "DoubleCombSegment":
        """Equal split: each sub-comb gets ``eta/2`` (``sqrt(eta/2)`` amplitude)."""
        return cls(
            f_lo, f_hi,
            (SubComb(tooth_spacing(delay_1), eta / 2, phase_1), SubComb(tooth_spacing(delay_2), eta / 2, phase_2)),
            t_bg, f_ref,
        )

    @property
    def eta(self) -> float:
        return sum(c.eta for c in self.combs)

    @property
    def storage_times(self) -> tuple:
        return tuple(storage_time(c.delta) for c in self.combs)

    @property
    def max_delay(self) -> float:
        return max(self.storage_times)

    @property
    def min_eta(self) -> float:
        return self.eta

    def with_eta(self, eta: float) -> "DoubleCombSegment":
        scale = eta / self.eta if self.eta > 0 else 0.0
        return replace(self, combs=tuple(replace(c, eta=c.eta * scale) for c in self.combs))

    def echo(self, f: np.ndarray) -> np.ndarray:
        out = np.zeros(np.shape(f), dtype=complex)
        for c in self.combs:
            t = storage_time(c.delta)
            out += math.sqrt(c.eta) * np.exp(-1j * TWO_PI_C * (f - self.f_ref) * t + 1j * c.phase)
        return out


Segment = Union[CombSegment, ChirpedCombSegment, DoubleCombSegment]


@dataclass(frozen=True)
class ProcessorProgram:
    segments: tuple = field(default_factory=tuple)
    out_of_band: float = 1.0

    def __post_init__(self):
        segs = tuple(sorted(self.segments, key=lambda s: s.f_lo))
        object.__setattr__(self, "segments", segs)
        for a, b in zip(segs, segs[1:]):
            if b.f_lo < a.f_hi:
                raise ProgramError(f"segments [{a.f_lo}, {a.f_hi}) and [{b.f_lo}, {b.f_hi}) overlap")
        if not 0 <= self.out_of_band <= 1:
            raise ProgramError("out-of-band transmission must lie in [0, 1]")

    @property
    def max_delay(self) -> float:
        return max((s.max_delay for s in self.segments), default=0.0)

    def equalized(self) -> "ProcessorProgram":
        """All segments set to the smallest segment efficiency."""
        if not self.segments:
            return self
        floor = min(s.min_eta for s in self.segments)
        return replace(self, segments=tuple(s.with_eta(floor) for s in self.segments))

    def segment_at(self, f: float) -> Optional[Segment]:
        for s in self.segments:
            if s.f_lo <= f < s.f_hi:
                return s
        return None


@dataclass(frozen=True)
class TransferFunction:
    frequencies: np.ndarray
    transmitted: np.ndarray
    echo: np.ndarray


def transfer_function(program: ProcessorProgram, grid: Union[TimeGrid, np.ndarray]) -> TransferFunction:
    """Compile ``program`` on a frequency grid (a :class:`TimeGrid`'s
    conjugate grid, or an explicit detuning array)."""
    if isinstance(grid, TimeGrid):
        if program.max_delay >= grid.span:
            raise GridError(
                f"program delay {program.max_delay:.4g} ns does not fit the {grid.span:.4g} ns grid span"
            )
        f = grid.frequencies
    else:
        f = np.asarray(grid, dtype=float)
    trans = np.full(f.shape, program.out_of_band, dtype=complex)
    echo = np.zeros(f.shape, dtype=complex)
    for seg in program.segments:
        inside = (f >= seg.f_lo) & (f < seg.f_hi)
        trans[inside] = seg.t_bg
        echo[inside] = seg.echo(f[inside])
    total = np.abs(trans) ** 2 + np.abs(echo) ** 2
    if np.any(total > 1.0 + PASSIVITY_TOL):
        raise ProgramError(f"program is not passive: |t|^2 + |e|^2 reaches {total.max():.6g}")
    return TransferFunction(f, trans, echo)


def storage_gradient(segment: Segment) -> float:
    """Storage-time gradient (ns/MHz); zero for constant spacing."""
    if isinstance(segment, ChirpedCombSegment):
        return segment.mu
    return 0.0


def profile_table(program: ProcessorProgram, frequencies: np.ndarray) -> list:
    """Rows of (f_mhz, abs_transmitted, abs_echo, delay_ns, delay2_ns) for plotting."""
    tf = transfer_function(program, frequencies)
    rows = []
    for f, t, e in zip(tf.frequencies, tf.transmitted, tf.echo):
        seg = program.segment_at(f)
        d1 = d2 = float("nan")
        if isinstance(seg, CombSegment):
            d1 = seg.storage_time
        elif isinstance(seg, ChirpedCombSegment):
            d1 = float(seg.group_delay(f))
        elif isinstance(seg, DoubleCombSegment):
            d1, d2 = seg.storage_times
        rows.append((float(f), float(abs(t)), float(abs(e)), d1, d2))
    return rows


# ---------------------------------------------------------------- closed forms


@dataclass(frozen=True)
class EchoPrediction:
    t_center: float
    tau_out: float
    kappa: float

    @property
    def fwhm(self) -> float:
        return 2.0 * math.sqrt(math.log(2.0)) * self.tau_out


def analytic_echo(tau_in: float, mu: float, r: float, f0: float, f1: float,
                  t_offset: float = 0.0, t0: float = 0.0, t_ref: float = 0.0) -> EchoPrediction:
    """Gaussian echo from a chirped comb for a chirped Gaussian input.

    ``tau_in`` is the amplitude parameter of ``exp(-t**2/(2 tau**2))`` (ns),
    ``mu`` the storage gradient (ns/MHz), ``r`` the chirp rate (MHz/ns) with
    instantaneous frequency ``f1 - r*(t - t_ref)``, ``f0`` the comb's phase
    reference where the storage time is ``t_offset``. In ordinary-frequency
    units the dispersive term is ``mu/(2 pi)``, not ``mu``.
    """
    if not (tau_in > 0 and mu > 0):
        raise ValueError("tau_in and mu must be positive")
    mr = mu * r
    disp = mu / (2.0 * math.pi * CYCLES_PER_NS_MHZ)  # ns^2
    tau_out = tau_in * math.sqrt(disp**2 / tau_in**4 + (mr - 1.0) ** 2)
    f_center = f1 - r * (t0 - t_ref)
    t_center = t0 + mu * (f_center - f0) + t_offset
    return EchoPrediction(t_center, tau_out, tau_in / tau_out)


def time_bandwidth_kappa(duration: float, mu: float, r: float) -> float:
    """Compression estimate ``mu * B**2`` with ``B = duration * r``."""
    bandwidth = duration * r
    return mu * bandwidth**2 * CYCLES_PER_NS_MHZ


class Regime(str, enum.Enum):
    COMPRESS_FORWARD = "compress-forward"
    COMPRESS_REVERSED = "compress-reversed"
    PURE_REVERSAL = "pure-reversal"
    STRETCH_REVERSED = "stretch-reversed"
    STRETCH_FORWARD = "stretch-forward"


def mu_r_regime(mu: float, r: float, tol: float = 1e-9) -> Regime:
    if not mu > 0:
        raise ValueError("mu must be positive")
    x = mu * r
    if x <= 0:
        return Regime.STRETCH_FORWARD
    if abs(x - 2.0) <= tol:
        return Regime.PURE_REVERSAL
    if x <= 1.0:
        return Regime.COMPRESS_FORWARD
    if x < 2.0:
        return Regime.COMPRESS_REVERSED
    return Regime.STRETCH_REVERSED


# ---------------------------------------------------------------- inverse design


@dataclass(frozen=True)
class BandDelay:
    f_lo: float
    f_hi: float
    delay: float


@dataclass(frozen=True)
class BandDoubleDelay:
    f_lo: float
    f_hi: float
    delay_1: float
    delay_2: float
    phase: float = 0.0


@dataclass(frozen=True)
class DelayMapTarget:
    bands: tuple
    eta: float = DEFAULT_ETA
    t_bg: float = DEFAULT_T_BG


@dataclass(frozen=True)
class CompressionTarget:
    kappa: float
    duration: float  # input duration (ns)
    f_center: float = 0.0
    min_storage: float = 10.0
    max_delay_span: float = 100.0
    max_bandwidth: float = 10000.0
    eta: float = DEFAULT_ETA
    t_bg: float = DEFAULT_T_BG


@dataclass(frozen=True)
class ProjectorTarget:
    f_lo: float
    f_hi: float
    delay_early: float
    separation: float
    phase: float = 0.0
    eta: float = 0.5
    t_bg: float = 0.0


@dataclass(frozen=True)
class CompressionPlan:
    mu: float
    rate: float
    bandwidth: float
    storage_span: float
    kappa: float


def plan_compression(target: CompressionTarget) -> CompressionPlan:
    """Invert ``kappa = mu*B**2`` at ``mu*r = 1`` and check the hardware limits."""
    if not (target.kappa > 0 and target.duration > 0):
        raise ValueError("kappa and duration must be positive")
    mu = target.duration**2 / target.kappa * CYCLES_PER_NS_MHZ  # ns^2 -> ns/MHz
    rate = 1.0 / mu
    bandwidth = target.duration * rate
    span = mu * bandwidth
    slack = 1.0 + 1e-9
    if bandwidth > target.max_bandwidth * slack:
        raise InfeasibleDesignError(
            f"kappa={target.kappa:g} at {target.duration:g} ns needs {bandwidth:.4g} MHz "
            f"> {target.max_bandwidth:g} MHz bandwidth limit",
            "bandwidth",
        )
    if span > target.max_delay_span * slack:
        raise InfeasibleDesignError(
            f"kappa={target.kappa:g} needs a {span:.4g} ns storage-time span "
            f"> {target.max_delay_span:g} ns limit",
            "storage-time span",
        )
    return CompressionPlan(mu, rate, bandwidth, span, target.kappa)


def design_comb(target) -> ProcessorProgram:
    """Build a program from a delay map, a compression goal or a time-bin projector."""
    if isinstance(target, DelayMapTarget):
        segs = []
        for band in target.bands:
            if isinstance(band, BandDoubleDelay):
                segs.append(DoubleCombSegment.equal(
                    band.f_lo, band.f_hi, band.delay_1, band.delay_2,
                    eta=target.eta, t_bg=target.t_bg, phase_1=band.phase,
                ))
            else:
                segs.append(CombSegment(band.f_lo, band.f_hi, tooth_spacing(band.delay),
                                        target.eta, target.t_bg))
        return ProcessorProgram(tuple(segs))
    if isinstance(target, CompressionTarget):
        plan = plan_compression(target)
        half = plan.bandwidth / 2
        seg = ChirpedCombSegment.from_storage(
            target.f_center - half, target.f_center + half,
            target.min_storage, target.min_storage + plan.storage_span,
            eta=target.eta, t_bg=target.t_bg,
        )
        return ProcessorProgram((seg,))
    if isinstance(target, ProjectorTarget):
        # the late input bin rides the short comb; its phase sets the projection
        seg = DoubleCombSegment.equal(
            target.f_lo, target.f_hi, target.delay_early, target.delay_early + target.separation,
            eta=target.eta, t_bg=target.t_bg, phase_1=-target.phase,
        )
        return ProcessorProgram((seg,))
    raise TypeError(f"unsupported design target {target!r}")
