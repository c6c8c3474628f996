"""Independent reference calculations for the acceptance suite.

Nothing here goes through :mod:`afcsim.signal`'s transforms or
:mod:`afcsim.afc`'s transfer compilation:

* :func:`gaussian_oracle` propagates a chirped Gaussian through a quadratic
  spectral phase with complex-Gaussian algebra (closed form).
* :func:`quadrature_propagate` evaluates the Fourier integrals as explicit
  sums at chosen frequency and time points.
* :func:`instantaneous_frequency` reads the local carrier of a field from
  short-time spectra.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

K = 2.0 * math.pi * 1e-3  # rad per (MHz * ns)


# ---------------------------------------------------------------- closed form


def _gaussian_params(tau, r, f1, t0, t_ref):
    """exp(-A t^2 + B t + C) form of a chirped Gaussian envelope."""
    a = 1.0 / (2.0 * tau**2) + 0.5j * K * r
    b = t0 / tau**2 + 1j * K * (f1 + r * t_ref)
    c = -(t0**2) / (2.0 * tau**2) + 1j * K * (-f1 * t_ref - 0.5 * r * t_ref**2)
    return a, b, c


def gaussian_echo_field(t, tau_in, mu, r, f0, f1, t_offset=0.0, t0=0.0, t_ref=0.0):
    """Echo amplitude of a chirped Gaussian after the phase
    ``-pi*mu*(f-f0)**2*1e-3 - 2*pi*f*t_offset*1e-3`` (unbounded band, unit efficiency)."""
    t = np.asarray(t, dtype=float)
    a, b, c = _gaussian_params(tau_in, r, f1, t0, t_ref)
    # spectrum  S(f) = sqrt(pi/a) exp((b - iKf)^2 / 4a + c) = exp(-al f^2 + be f + ga)
    al = K**2 / (4 * a)
    be = -1j * K * b / (2 * a)
    ga = b**2 / (4 * a) + c + 0.5 * np.log(np.pi / a)
    # comb phase
    q = math.pi * 1e-3 * mu
    al = al + 1j * q
    be = be + 2j * q * f0 - 1j * K * t_offset
    ga = ga - 1j * q * f0**2
    # E(t) = 1e-3 * int S(f) exp(iKft) df
    lin = be[None] if np.ndim(be) else be
    expo = (lin + 1j * K * t) ** 2 / (4 * al) + ga
    return 1e-3 * np.sqrt(np.pi / al) * np.exp(expo)


def gaussian_oracle(t, tau_in, mu, r, f0, f1, t_offset=0.0, t0=0.0, t_ref=0.0) -> np.ndarray:
    """Echo intensity ``|E(L, t)|**2`` for a unit-peak chirped Gaussian input."""
    return np.abs(gaussian_echo_field(t, tau_in, mu, r, f0, f1, t_offset, t0, t_ref)) ** 2


def gaussian_oracle_moments(tau_in, mu, r, f0, f1, t_offset=0.0, t0=0.0, t_ref=0.0) -> tuple:
    """(centre, FWHM) of the oracle intensity, read off its log-quadratic form."""
    probe = np.array([-1.0, 0.0, 1.0])
    center_guess = t0 + t_offset + mu * (f1 - r * (t0 - t_ref) - f0)
    ln = np.log(gaussian_oracle(center_guess + probe, tau_in, mu, r, f0, f1, t_offset, t0, t_ref))
    curv = 0.5 * (ln[0] + ln[2] - 2 * ln[1])  # ln I = -(t-tc)^2/w^2 + const
    slope = 0.5 * (ln[2] - ln[0])
    tc = center_guess - slope / (2 * curv)
    w = math.sqrt(-1.0 / curv)
    return tc, 2.0 * math.sqrt(math.log(2.0)) * w


# ---------------------------------------------------------------- quadrature


def _weights(x: np.ndarray) -> np.ndarray:
    """Trapezoid weights for a uniform abscissa."""
    w = np.full(x.shape, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def fourier_quadrature(t: np.ndarray, samples: np.ndarray, f: np.ndarray, chunk: int = 512) -> np.ndarray:
    """``S(f) = sum_t e(t) exp(-iKft) dt`` by explicit summation."""
    out = np.empty(f.shape, dtype=complex)
    w = samples * _weights(t)
    for i in range(0, len(f), chunk):
        fs = f[i:i + chunk]
        out[i:i + chunk] = np.exp(-1j * K * np.outer(fs, t)) @ w
    return out


def inverse_quadrature(f: np.ndarray, spectrum: np.ndarray, t: np.ndarray, chunk: int = 512) -> np.ndarray:
    """``e(t) = 1e-3 * sum_f S(f) exp(iKft) df``."""
    out = np.empty(t.shape, dtype=complex)
    w = spectrum * _weights(f) * 1e-3
    for i in range(0, len(t), chunk):
        ts = t[i:i + chunk]
        out[i:i + chunk] = np.exp(1j * K * np.outer(ts, f)) @ w
    return out


def quadrature_propagate(t_in, e_in, transfer: Callable, band: tuple, t_out, df: float = 0.5) -> np.ndarray:
    """Output field at ``t_out`` of the filter ``transfer`` restricted to ``band`` (MHz)."""
    lo, hi = band
    n = int(round((hi - lo) / df)) + 1
    f = np.linspace(lo, hi, n)
    spec = fourier_quadrature(np.asarray(t_in, float), np.asarray(e_in, complex), f)
    return inverse_quadrature(f, spec * transfer(f), np.asarray(t_out, float))


def comb_echo(delay: float, f_ref: float, eta: float = 1.0) -> Callable:
    """Constant-spacing echo: a pure delay referenced to tooth ``f_ref``."""
    return lambda f: math.sqrt(eta) * np.exp(-1j * K * (f - f_ref) * delay)


def chirped_echo(mu: float, f0: float, t_offset: float, eta: float = 1.0) -> Callable:
    return lambda f: math.sqrt(eta) * np.exp(-1j * (0.5 * K * mu * (f - f0) ** 2 + K * f * t_offset))


def segment_echo(segment) -> Callable:
    """Echo law of a program segment, rebuilt from its parameters."""
    if hasattr(segment, "combs"):
        parts = [(1e3 / c.delta, c.eta, c.phase) for c in segment.combs]
        return lambda f: sum(comb_echo(d, segment.f_ref, eta)(f) * np.exp(1j * ph) for d, eta, ph in parts)
    if hasattr(segment, "delta_lo"):
        t_lo, t_hi = 1e3 / segment.delta_lo, 1e3 / segment.delta_hi
        mu = (t_hi - t_lo) / (segment.f_hi - segment.f_lo)
        return chirped_echo(mu, segment.f0, t_lo + mu * (segment.f0 - segment.f_lo), segment.eta)
    return comb_echo(1e3 / segment.delta, segment.f_ref, segment.eta)


def resolved_echo_intensity(t_in, e_in, program, t_out, df: float = 0.25) -> np.ndarray:
    """Sum over segments of the band-limited echo intensities at ``t_out``."""
    total = np.zeros(np.shape(t_out))
    for seg in program.segments:
        total += np.abs(quadrature_propagate(t_in, e_in, segment_echo(seg), (seg.f_lo, seg.f_hi), t_out, df)) ** 2
    return total


# ---------------------------------------------------------------- short-time spectra


def instantaneous_frequency(t: np.ndarray, samples: np.ndarray, centers: Sequence[float],
                            window: float = 4.0, pad: int = 16) -> np.ndarray:
    """Peak frequency (MHz) of the Gaussian-windowed spectrum around each centre.

    ``window`` is the intensity FWHM (ns) of the analysis window.
    """
    t = np.asarray(t, float)
    dt = t[1] - t[0]
    sigma = window / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    half = int(math.ceil(4 * sigma / dt))
    nfft = pad * (2 * half + 1)
    freqs = np.fft.fftfreq(nfft, dt * 1e-3)
    out = []
    for c in centers:
        k = int(round((c - t[0]) / dt))
        lo, hi = max(0, k - half), min(len(t), k + half + 1)
        seg = samples[lo:hi] * np.exp(-((t[lo:hi] - c) ** 2) / (2 * sigma**2))
        p = np.abs(np.fft.fft(seg, nfft)) ** 2
        j = int(np.argmax(p))
        y0, y1, y2 = p[j - 1], p[j], p[(j + 1) % nfft]
        delta = 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2) if (y0 - 2 * y1 + y2) != 0 else 0.0
        out.append(freqs[j] + delta * (freqs[1] - freqs[0]))
    return np.array(out)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class OracleReport:
    scenario: str
    quantity: str
    oracle: float
    simulator: float
    tolerance: float
    mode: str = "rel"  # "rel" or "abs"

    @property
    def error(self) -> float:
        diff = abs(self.simulator - self.oracle)
        if self.mode == "abs":
            return diff
        return diff / abs(self.oracle) if self.oracle != 0 else (0.0 if diff == 0 else math.inf)

    @property
    def relative_error(self) -> float:
        diff = abs(self.simulator - self.oracle)
        return diff / abs(self.oracle) if self.oracle != 0 else (0.0 if diff == 0 else math.inf)

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance

    def row(self) -> list:
        return [self.scenario, self.quantity, f"{self.oracle:.9g}", f"{self.simulator:.9g}",
                f"{self.error:.3e}", self.mode, f"{self.tolerance:.3g}",
                "pass" if self.passed else "fail"]


# ``error`` is absolute or relative according to ``mode``
REPORT_HEADER = ["scenario", "quantity", "oracle", "simulator", "error", "mode", "tolerance", "result"]


def reports_to_text(reports: Sequence[OracleReport], delimiter: str = "\t") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


# ---------------------------------------------------------------- grid convergence


def _bin_ratio(bins: list) -> Optional[float]:
    if len(bins) != 3:
        return None
    side = max(bins[0]["energy"], bins[2]["energy"])
    return bins[1]["energy"] / side if side > 0 else None


def fine_grid_cross_check(scenario, refinement: int = 4, fwhm_tol: float = 0.02,
                          ratio_tol: float = 1e-3, energy_tol: float = 1e-3) -> list:
    """Re-run a scenario at ``dt / refinement`` and compare its observables.

    ``scenario`` is a catalog id or a :class:`~afcsim.config.ScenarioConfig`.
    Peak times must agree within the coarse ``dt``.
    """
    from .scenarios import catalog_config, simulate, summarize, with_overrides

    if refinement < 2:
        raise ValueError("refinement must be >= 2")
    config = catalog_config(scenario) if isinstance(scenario, str) else scenario
    reports = []
    for run in config.runs:
        fine_dt = run.grid.dt / refinement
        fine_cfg = with_overrides(config.__class__(config.name, config.description, config.seed, (run,)),
                                  grid_dt=fine_dt)
        fine_run = fine_cfg.runs[0]
        coarse = summarize(run, *simulate(run))
        fine = summarize(fine_run, *simulate(fine_run))
        label = f"{config.name}/{run.name}"
        ce, fe = coarse["echo"], fine["echo"]
        if ce is None or fe is None:
            continue
        reports.append(OracleReport(label, "echo_fwhm_ns", fe["fwhm_ns"], ce["fwhm_ns"], fwhm_tol))
        reports.append(OracleReport(label, "echo_energy", fe["energy"], ce["energy"], energy_tol))
        c_peaks = ce.get("envelope_peaks", ce["peaks"])
        f_peaks = fe.get("envelope_peaks", fe["peaks"])
        if len(c_peaks) == len(f_peaks):
            for i, (a, b) in enumerate(zip(f_peaks, c_peaks)):
                reports.append(OracleReport(label, f"echo_peak{i}_ns", a["time_ns"], b["time_ns"],
                                            run.grid.dt, "abs"))
        else:
            reports.append(OracleReport(label, "echo_peak_count", len(f_peaks), len(c_peaks), 0.0, "abs"))
        if "echo_bins" in coarse:
            rc, rf = _bin_ratio(coarse["echo_bins"]), _bin_ratio(fine["echo_bins"])
            if rc is not None and rf is not None:
                # absolute for suppressed (destructive) ratios, relative once the ratio is O(1) or more
                reports.append(OracleReport(label, "central_bin_ratio", rf, rc, ratio_tol,
                                            "abs" if rf <= 1 else "rel"))
    return reports
