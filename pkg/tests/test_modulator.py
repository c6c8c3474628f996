import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from afcsim.errors import ModulatorRangeError, NyquistError, ProgramError
from afcsim.modulator import (
    CALIBRATED_RISE_TIME_NS,
    ChirpSpec,
    GatedShift,
    GatedShiftProgram,
    SerrodyneSpec,
    apply_action,
    calibrate_rise_time,
    chirp,
    gated_shifts,
    harmonic_shares,
    insertion_loss,
    serrodyne,
    serrodyne_phase,
)
from afcsim.pulses import GaussianPulseSpec, gaussian_pulse
from afcsim.signal import TWO_PI_C, TimeGrid

GRID = TimeGrid.covering(-60.0, 60.0, 0.05)
PULSE = gaussian_pulse(GaussianPulseSpec.from_fwhm(0.0, 12.0), GRID)


@given(st.floats(-3000.0, 3000.0))
def test_ideal_serrodyne_is_exact_shift(shift):
    out = serrodyne(PULSE, SerrodyneSpec(shift))
    assert np.allclose(out.samples, PULSE.samples * np.exp(1j * TWO_PI_C * shift * GRID.times))
    assert out.energy == pytest.approx(PULSE.energy, rel=1e-12)


@given(st.floats(-3000.0, 3000.0), st.floats(0.0, 1.0))
def test_serrodyne_inverse(shift, depth):
    there = serrodyne(PULSE, SerrodyneSpec(shift, depth))
    back = serrodyne(there, SerrodyneSpec(-shift, depth))
    if depth == 1.0 or shift == 0.0:
        assert np.allclose(back.samples, PULSE.samples, atol=1e-9)
    assert back.energy == pytest.approx(PULSE.energy, rel=1e-12)


def test_partial_depth_sawtooth_phase_inverts():
    spec = SerrodyneSpec(500.0, 0.6)
    t = GRID.times
    assert np.allclose(serrodyne_phase(spec, t) + serrodyne_phase(SerrodyneSpec(-500.0, 0.6), t), 0.0)


@given(st.floats(-50.0, 50.0), st.floats(-500.0, 500.0), st.floats(-10.0, 10.0))
def test_chirp_undo(rate, f1, t_ref):
    there = chirp(PULSE, ChirpSpec(rate, f1, t_ref=t_ref))
    back = chirp(there, ChirpSpec(-rate, -f1, t_ref=t_ref))
    assert np.allclose(back.samples, PULSE.samples, atol=1e-9)


def test_chirp_sweeps_down_for_positive_rate():
    out = chirp(PULSE, ChirpSpec(10.0, 100.0))
    phase = np.unwrap(np.angle(out.samples))
    inst = np.gradient(phase, GRID.times) / TWO_PI_C
    k0 = np.searchsorted(GRID.times, 0.0)
    k5 = np.searchsorted(GRID.times, 5.0)
    assert inst[k0] == pytest.approx(100.0, abs=0.5)
    assert inst[k5] == pytest.approx(50.0, abs=0.5)


def test_chirp_beyond_nyquist_rejected():
    with pytest.raises(NyquistError):
        chirp(PULSE, ChirpSpec(1000.0))


def test_harmonic_shares_ideal_and_partial():
    assert harmonic_shares(SerrodyneSpec(1000.0))[1] == pytest.approx(1.0, abs=1e-12)
    for a in (0.25, 0.5, 0.75):
        shares = harmonic_shares(SerrodyneSpec(1000.0, a))
        for n in (0, 1, 2, -1):
            assert shares[n] == pytest.approx(np.sinc(a - n) ** 2, abs=2e-3)
    assert harmonic_shares(SerrodyneSpec(0.0))[0] == 1.0


def test_calibrated_rise_time_reproduces_80_percent():
    tau = calibrate_rise_time(1000.0, 20.0, 0.80)
    assert tau == pytest.approx(CALIBRATED_RISE_TIME_NS, rel=1e-6)
    assert harmonic_shares(SerrodyneSpec(1000.0, 1.0, 20.0))[1] == pytest.approx(0.80, abs=1e-6)


def test_dac_without_smoothing_is_staircase():
    spec = SerrodyneSpec(1000.0, 1.0, 20.0, rise_time=0.0)
    # 20 samples per period: first harmonic of a sampled sawtooth is sinc(1/20)^2
    assert harmonic_shares(spec)[1] == pytest.approx(np.sinc(1 / 20) ** 2, abs=1e-5)


def test_serrodyne_validation():
    with pytest.raises(ModulatorRangeError):
        SerrodyneSpec(6000.0)
    with pytest.raises(ValueError):
        SerrodyneSpec(100.0, 1.5)
    with pytest.raises(ValueError):
        SerrodyneSpec(100.0, dac_rate=-1.0)
    with pytest.raises(ValueError):
        SerrodyneSpec(100.0, rise_time=0.1)


def test_gate_limits_the_shift():
    out = serrodyne(PULSE, SerrodyneSpec(300.0, gate=(-1.5, 1.5)))
    t = GRID.times
    outside = (t < -1.5) | (t >= 1.5)
    assert np.allclose(out.samples[outside], PULSE.samples[outside])
    with pytest.raises(ValueError):
        serrodyne(PULSE, SerrodyneSpec(300.0, gate=(2.0, 1.0)))


def test_gated_program():
    prog = GatedShiftProgram((GatedShift((-10.0, 0.0), 200.0), GatedShift((0.0, 10.0), -400.0)))
    out = gated_shifts(PULSE, prog)
    assert out.energy == pytest.approx(PULSE.energy, rel=1e-12)
    t = GRID.times
    k = (t >= 2.0) & (t < 8.0)
    inst = np.diff(np.unwrap(np.angle(out.samples[k]))) / (TWO_PI_C * GRID.dt)
    assert np.allclose(inst, -400.0, atol=1e-6)
    with pytest.raises(ProgramError):
        GatedShiftProgram((GatedShift((-10.0, 1.0), 200.0), GatedShift((0.0, 10.0), -400.0)))
    with pytest.raises(ValueError):
        gated_shifts(PULSE, GatedShiftProgram((GatedShift((-100.0, 0.0), 200.0),)))


def test_apply_action_dispatch_and_loss():
    assert np.allclose(apply_action(PULSE, SerrodyneSpec(0.0)).samples, PULSE.samples)
    with pytest.raises(TypeError):
        apply_action(PULSE, "shift")
    assert insertion_loss(PULSE, 3.0).energy == pytest.approx(PULSE.energy * 10 ** -0.3)
    assert insertion_loss(PULSE, 0.0) is PULSE
    with pytest.raises(ValueError):
        insertion_loss(PULSE, -1.0)


def test_imperfect_shift_is_phase_only():
    out = serrodyne(PULSE, SerrodyneSpec(1000.0, 1.0, 20.0, gate=(-5.0, 5.0)))
    assert out.energy == pytest.approx(PULSE.energy, rel=1e-12)
    t = GRID.times
    outside = (t < -5.0) | (t >= 5.0)
    assert np.allclose(out.samples[outside], PULSE.samples[outside])
