"""Simulator for a programmable atomic-frequency-comb spectro-temporal pulse processor."""
from .afc import (
    ChirpedCombSegment,
    CombSegment,
    DoubleCombSegment,
    ProcessorProgram,
    analytic_echo,
    design_comb,
    mu_r_regime,
    storage_gradient,
    transfer_function,
)
from .chain import ChainResult, ChainSpec, FPFilterSpec, fp_transmission, restore_frequency, run_chain
from .detection import DetectionSpec, Histogram, expected_histogram, simulate_counts
from .modulator import ChirpSpec, GatedShift, GatedShiftProgram, SerrodyneSpec, chirp, gated_shifts, serrodyne
from .pulses import GaussianPulseSpec, TimeBinSpec, gaussian_pulse, pulse_train, set_mean_photons, time_bin_state
from .signal import ComplexField, Spectrum, TimeGrid, apply_transfer, measure, to_spectrum, to_time

__version__ = "0.1.0"

__all__ = [
    "ChainResult",
    "ChainSpec",
    "ChirpSpec",
    "ChirpedCombSegment",
    "CombSegment",
    "ComplexField",
    "DetectionSpec",
    "DoubleCombSegment",
    "FPFilterSpec",
    "GatedShift",
    "GatedShiftProgram",
    "GaussianPulseSpec",
    "Histogram",
    "ProcessorProgram",
    "SerrodyneSpec",
    "Spectrum",
    "TimeBinSpec",
    "TimeGrid",
    "analytic_echo",
    "apply_transfer",
    "chirp",
    "design_comb",
    "expected_histogram",
    "fp_transmission",
    "gated_shifts",
    "gaussian_pulse",
    "measure",
    "mu_r_regime",
    "pulse_train",
    "restore_frequency",
    "run_chain",
    "serrodyne",
    "set_mean_photons",
    "simulate_counts",
    "storage_gradient",
    "time_bin_state",
    "to_spectrum",
    "to_time",
    "transfer_function",
]
