"""Input controller -> AFC -> output controller -> Fabry-Perot filter.

After the AFC the transmitted and echo parts travel as two separate fields,
so output actions can address either one (physically: a time-gated output
modulator).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from .afc import ProcessorProgram, transfer_function
from .errors import EmptyFieldError, GridError
from .modulator import (
    GatedShiftProgram,
    ModulatorAction,
    SerrodyneSpec,
    apply_action,
    insertion_loss,
)
from .signal import (
    ComplexField,
    TimeGrid,
    apply_transfer,
    filter_field,
    measure,
    to_spectrum,
    to_time,
)

COMPONENTS = ("transmitted", "echo")


@dataclass(frozen=True)
class FPFilterSpec:
    """Etalon tuned to ``center``; ``linewidth`` is the intensity FWHM."""

    center: float
    linewidth: float = 80.0
    fsr: float = 23000.0

    def __post_init__(self):
        if not 0 < self.linewidth < self.fsr:
            raise ValueError("need 0 < linewidth < fsr")

    @property
    def mirror_reflectivity(self) -> float:
        coef = 1.0 / math.sin(math.pi * self.linewidth / (2.0 * self.fsr)) ** 2
        return ((coef + 2.0) - 2.0 * math.sqrt(coef + 1.0)) / coef


def fp_transmission(spec: FPFilterSpec, grid: Union[TimeGrid, np.ndarray]) -> np.ndarray:
    """Airy amplitude transmission, unity on resonance, period ``fsr``.

    Near a resonance the intensity is the Lorentzian
    ``1 / (1 + (2 d / linewidth)**2)``.
    """
    f = grid.frequencies if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)
    refl = spec.mirror_reflectivity
    round_trip = np.exp(-2j * np.pi * (f - spec.center) / spec.fsr)
    return (1.0 - refl) / (1.0 - refl * round_trip)


@dataclass(frozen=True)
class Targeted:
    """Output-controller action restricted to one component."""

    action: ModulatorAction
    component: str = "both"

    def __post_init__(self):
        if self.component not in ("both",) + COMPONENTS:
            raise ValueError(f"unknown component {self.component!r}")


@dataclass(frozen=True)
class ChainSpec:
    program: ProcessorProgram
    input_actions: tuple = ()
    output_actions: tuple = ()
    fp: Optional[FPFilterSpec] = None
    input_loss_db: float = 0.0
    output_loss_db: float = 0.0
    coupling_efficiency: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "input_actions", tuple(self.input_actions))
        object.__setattr__(self, "output_actions", tuple(
            a if isinstance(a, Targeted) else Targeted(a) for a in self.output_actions
        ))
        if not 0 <= self.coupling_efficiency <= 1:
            raise ValueError("coupling efficiency must lie in [0, 1]")


@dataclass(frozen=True)
class ChainResult:
    transmitted: ComplexField
    echo: ComplexField
    input_energy: float
    warnings: tuple = ()

    def field(self, component: str) -> ComplexField:
        return getattr(self, component)

    @property
    def total(self) -> ComplexField:
        return self.transmitted + self.echo

    @property
    def output_energy(self) -> float:
        return self.transmitted.energy + self.echo.energy

    @property
    def observables(self) -> dict:
        out = {}
        for name in COMPONENTS:
            try:
                out[name] = measure(self.field(name))
            except EmptyFieldError:
                out[name] = None
        return out


def _last_significant_time(f: ComplexField) -> float:
    inten = f.intensity
    if inten.max() == 0:
        return f.grid.t_start
    idx = np.nonzero(inten > 1e-10 * inten.max())[0]
    return float(f.times[idx[-1]])


def run_chain(field: ComplexField, spec: ChainSpec) -> ChainResult:
    x = field
    for action in spec.input_actions:
        x = apply_action(x, action)
    x = insertion_loss(x, spec.input_loss_db)

    grid = x.grid
    tf = transfer_function(spec.program, grid)
    if spec.program.max_delay > 0 and _last_significant_time(x) + spec.program.max_delay >= grid.t_end:
        raise GridError(
            f"echo delayed by {spec.program.max_delay:.4g} ns would wrap past the grid end {grid.t_end:.4g} ns"
        )
    s = to_spectrum(x)
    parts = {
        "transmitted": to_time(apply_transfer(s, tf.transmitted)),
        "echo": to_time(apply_transfer(s, tf.echo)),
    }
    for targeted in spec.output_actions:
        for name in COMPONENTS:
            if targeted.component in ("both", name):
                parts[name] = apply_action(parts[name], targeted.action)
    scale = math.sqrt(spec.coupling_efficiency)
    for name in COMPONENTS:
        y = insertion_loss(parts[name], spec.output_loss_db)
        if spec.fp is not None:
            y = filter_field(y, fp_transmission(spec.fp, grid))
        parts[name] = y.scaled(scale) if scale != 1.0 else y
    warnings = tuple(dict.fromkeys(x.warnings + parts["transmitted"].warnings + parts["echo"].warnings))
    return ChainResult(parts["transmitted"], parts["echo"], field.energy, warnings)


Shift = Union[float, SerrodyneSpec, GatedShiftProgram]


def restore_frequency(result: ChainResult, shifts: Mapping[str, Shift],
                      fp: Optional[FPFilterSpec] = None) -> ChainResult:
    """Apply output-controller shifts per component, then an optional filter.

    A plain number is an ungated ideal serrodyne shift in MHz.
    """
    parts = {name: result.field(name) for name in COMPONENTS}
    for name, shift in shifts.items():
        if name not in COMPONENTS:
            raise ValueError(f"unknown component {name!r}")
        action = SerrodyneSpec(float(shift)) if isinstance(shift, (int, float)) else shift
        parts[name] = apply_action(parts[name], action)
    if fp is not None:
        for name in COMPONENTS:
            parts[name] = filter_field(parts[name], fp_transmission(fp, parts[name].grid))
    warnings = tuple(dict.fromkeys(result.warnings + parts["transmitted"].warnings + parts["echo"].warnings))
    return ChainResult(parts["transmitted"], parts["echo"], result.input_energy, warnings)
