import numpy as np
import pytest

from afcsim.afc import CombSegment, ProcessorProgram
from afcsim.chain import ChainSpec, FPFilterSpec, Targeted, fp_transmission, restore_frequency, run_chain
from afcsim.errors import GridError
from afcsim.modulator import SerrodyneSpec
from afcsim.pulses import GaussianPulseSpec, gaussian_pulse
from afcsim.signal import TimeGrid, measure

GRID = TimeGrid.covering(-60.0, 200.0, 0.05)
PULSE = gaussian_pulse(GaussianPulseSpec.from_fwhm(0.0, 12.0), GRID)
PROGRAM = ProcessorProgram((CombSegment(0.0, 400.0, 20.0, eta=0.25, t_bg=0.5),))


def test_fp_lineshape():
    fp = FPFilterSpec(0.0, 80.0)
    f = np.array([0.0, 40.0, 200.0, 23000.0])
    t = np.abs(fp_transmission(fp, f)) ** 2
    assert t[0] == pytest.approx(1.0)
    assert t[1] == pytest.approx(0.5, rel=1e-3)
    assert t[2] == pytest.approx(1 / 26, rel=0.01)
    assert t[3] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        FPFilterSpec(0.0, 0.0)


def test_chain_without_program_is_identity():
    res = run_chain(PULSE, ChainSpec(ProcessorProgram(())))
    assert np.allclose(res.transmitted.samples, PULSE.samples)
    assert res.echo.energy == 0.0
    assert res.observables["echo"] is None


def test_shift_into_comb_and_restore():
    spec = ChainSpec(PROGRAM, input_actions=(SerrodyneSpec(200.0),))
    res = run_chain(PULSE, spec)
    assert res.output_energy == pytest.approx(PULSE.energy * (0.25 + 0.25), rel=1e-6)
    assert measure(res.echo).peak_time == pytest.approx(50.0, abs=GRID.dt)
    back = restore_frequency(res, {"echo": -200.0, "transmitted": -200.0}, FPFilterSpec(0.0))
    assert measure(back.echo).centroid_frequency == pytest.approx(0.0, abs=1.0)
    with pytest.raises(ValueError):
        restore_frequency(res, {"total": 0.0})


def test_targeted_output_action_touches_one_component():
    spec = ChainSpec(PROGRAM, (SerrodyneSpec(200.0),), (Targeted(SerrodyneSpec(-200.0), "echo"),))
    res = run_chain(PULSE, spec)
    assert measure(res.echo).centroid_frequency == pytest.approx(0.0, abs=1.0)
    assert measure(res.transmitted).centroid_frequency == pytest.approx(200.0, abs=1.0)
    with pytest.raises(ValueError):
        Targeted(SerrodyneSpec(0.0), "reflected")


def test_losses_and_coupling():
    spec = ChainSpec(ProcessorProgram(()), input_loss_db=1.0, output_loss_db=2.0, coupling_efficiency=0.5)
    res = run_chain(PULSE, spec)
    assert res.output_energy == pytest.approx(PULSE.energy * 10 ** -0.3 * 0.5)
    with pytest.raises(ValueError):
        ChainSpec(PROGRAM, coupling_efficiency=1.5)


def test_echo_wrapping_past_grid_end_rejected():
    short = TimeGrid.covering(-60.0, 60.0, 0.05)
    x = gaussian_pulse(GaussianPulseSpec.from_fwhm(0.0, 12.0, 200.0), short)
    with pytest.raises(GridError):
        run_chain(x, ChainSpec(PROGRAM))
