import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from afcsim.errors import EmptyFieldError, GridError, InvalidFieldError, PassivityError
from afcsim.signal import (
    TWO_PI_C,
    ComplexField,
    TimeGrid,
    apply_transfer,
    delay,
    filter_field,
    fwhm_of,
    measure,
    nyquist_warnings,
    overlap,
    to_spectrum,
    to_time,
    window_energy,
)

GRID = TimeGrid(-20.0, 0.1, 512)

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
samples = arrays(np.complex128, GRID.n, elements=st.complex_numbers(max_magnitude=10.0, allow_nan=False,
                                                                  allow_infinity=False))


def gaussian(grid, t0=0.0, tau=2.0, f=0.0):
    t = grid.times
    return ComplexField(grid, np.exp(-((t - t0) ** 2) / (2 * tau**2)) * np.exp(1j * TWO_PI_C * f * t))


# ---------------------------------------------------------------- grid


def test_grid_axes():
    g = TimeGrid(-5.0, 0.5, 8)
    assert g.times[0] == -5.0 and g.times[-1] == pytest.approx(-1.5)
    assert g.span == 4.0
    assert g.df == pytest.approx(250.0)
    assert g.frequencies[g.n // 2] == 0.0
    assert g.nyquist == pytest.approx(1000.0)


def test_grid_covering_is_even_and_reaches_stop():
    g = TimeGrid.covering(-60.0, 340.0, 0.05)
    assert g.n % 2 == 0
    assert g.t_end >= 340.0 - 1e-9


@pytest.mark.parametrize("kw", [dict(dt=0.0), dict(dt=-1.0), dict(n=1), dict(n=2.5), dict(t_start=math.inf)])
def test_grid_rejects_bad_parameters(kw):
    args = dict(t_start=0.0, dt=0.1, n=16)
    args.update(kw)
    with pytest.raises(GridError):
        TimeGrid(**args)


def test_refined_grid_keeps_window():
    g = GRID.refined(4)
    assert g.t_start == GRID.t_start and g.span == pytest.approx(GRID.span)


# ---------------------------------------------------------------- field


def test_field_rejects_nonfinite_and_wrong_shape():
    with pytest.raises(InvalidFieldError):
        ComplexField(GRID, np.full(GRID.n, np.nan))
    with pytest.raises(InvalidFieldError):
        ComplexField(GRID, np.zeros(GRID.n - 1))


def test_field_samples_are_read_only():
    f = ComplexField.zeros(GRID)
    with pytest.raises(ValueError):
        f.samples[0] = 1.0


def test_adding_fields_on_different_grids_fails():
    with pytest.raises(GridError):
        ComplexField.zeros(GRID) + ComplexField.zeros(TimeGrid(0.0, 0.1, 512))


# ---------------------------------------------------------------- transforms


def test_gaussian_spectrum_matches_analytic():
    tau, t0, f0 = 2.0, 1.5, 300.0
    spec = to_spectrum(gaussian(GRID, t0, tau, f0))
    f = spec.frequencies
    # FT of exp(-(t-t0)^2/2tau^2) exp(iKf0 t) with exp(-iKft)
    expected = tau * math.sqrt(2 * math.pi) * np.exp(-0.5 * (TWO_PI_C * (f - f0) * tau) ** 2) \
        * np.exp(-1j * TWO_PI_C * (f - f0) * t0)
    assert np.allclose(spec.samples, expected, atol=1e-9)


@given(samples)
def test_round_trip(x):
    f = ComplexField(GRID, x)
    assert np.allclose(to_time(to_spectrum(f)).samples, x, atol=1e-9 * (1 + np.abs(x).max()))


@given(samples)
def test_parseval(x):
    f = ComplexField(GRID, x)
    assert to_spectrum(f).energy == pytest.approx(f.energy, rel=1e-9, abs=1e-12)


@given(samples, samples, st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False))
def test_linearity(x, y, a):
    fx, fy = ComplexField(GRID, x), ComplexField(GRID, y)
    lhs = to_spectrum(fx.scaled(a) + fy).samples
    rhs = a * to_spectrum(fx).samples + to_spectrum(fy).samples
    assert np.allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(rhs).max()))


@given(st.integers(-40, 40))
def test_shift_theorem(k):
    g = gaussian(GRID, 0.0, 1.5, 120.0)
    t = k * GRID.dt
    shifted = delay(g, t)
    assert np.allclose(shifted.samples, gaussian(GRID, t, 1.5, 120.0).samples * np.exp(-1j * TWO_PI_C * 120.0 * t),
                       atol=1e-9)


@given(arrays(np.float64, GRID.n, elements=st.floats(-50.0, 50.0)))
def test_phase_only_transfer_conserves_energy(phase):
    f = gaussian(GRID, 0.0, 2.0)
    out = to_time(apply_transfer(to_spectrum(f), np.exp(1j * phase)))
    assert out.energy == pytest.approx(f.energy, rel=1e-9)


def test_transfer_forms_and_passivity():
    s = to_spectrum(gaussian(GRID))
    assert np.allclose(apply_transfer(s, 0.5).samples, 0.5 * s.samples)
    assert np.allclose(apply_transfer(s, lambda f: np.ones_like(f)).samples, s.samples)
    with pytest.raises(PassivityError):
        apply_transfer(s, 1.01)
    assert np.allclose(apply_transfer(s, 2.0, passive=False).samples, 2 * s.samples)
    with pytest.raises(InvalidFieldError):
        apply_transfer(s, np.full(GRID.n, np.inf))


def test_nyquist_guard_flags_edge_energy():
    assert nyquist_warnings(gaussian(GRID, 0.0, 2.0)) == ()
    edge = gaussian(GRID, 0.0, 2.0, 0.97 * GRID.nyquist)
    assert nyquist_warnings(edge) and "aliasing" in nyquist_warnings(edge)[0]


# ---------------------------------------------------------------- measurement


def test_measure_gaussian():
    tau = 3.0
    m = measure(gaussian(TimeGrid(-50.0, 0.01, 10000), 2.345, tau, 50.0))
    assert m.peak_time == pytest.approx(2.345, abs=1e-4)
    assert m.fwhm == pytest.approx(2 * math.sqrt(math.log(2)) * tau, rel=1e-5)
    assert m.centroid_frequency == pytest.approx(50.0, abs=1e-6)
    assert not m.multi_lobe
    assert m.energy == pytest.approx(tau * math.sqrt(math.pi), rel=1e-9)


def test_measure_flags_multiple_lobes():
    f = gaussian(GRID, -8.0, 1.0) + gaussian(GRID, 8.0, 1.0).scaled(0.9)
    assert measure(f).multi_lobe


def test_measure_empty_field():
    with pytest.raises(EmptyFieldError):
        measure(ComplexField.zeros(GRID))


def test_fwhm_of_triangle():
    t = np.linspace(-2, 2, 401)
    w, multi = fwhm_of(t, np.maximum(0.0, 1 - np.abs(t)))
    assert w == pytest.approx(1.0, abs=1e-9) and not multi


def test_window_energy_and_overlap():
    f = gaussian(GRID, 0.0, 2.0)
    assert window_energy(f, GRID.t_start, GRID.t_end) == pytest.approx(f.energy)
    assert overlap(f, f) == pytest.approx(f.energy)
    assert abs(overlap(f, f.scaled(1j)) - 1j * f.energy) < 1e-12


def test_filter_field_identity():
    f = gaussian(GRID, 1.0, 2.0, 40.0)
    assert np.allclose(filter_field(f, 1.0).samples, f.samples, atol=1e-12)
