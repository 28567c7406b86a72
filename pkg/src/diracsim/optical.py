"""Jones-calculus model of the optical simulator.

Polarization H/V carries the upper/lower spinor component. Wave plates act as
constant 2x2 matrices; a spatial light modulator (SLM) imprints a phase on the
horizontal polarization only. Lenses are ideal Fourier transforms, so a plan
step tagged ``momentum`` acts in the Fourier plane.

A real SLM modulates only a fraction ``efficiency`` of the light. The rest
passes with zero phase and is assumed to interfere coherently with the
modulated part: ``comp1 -> (eta e^{if} + 1 - eta) comp1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DIRAC, FW, MOMENTUM, PhysicalParams, SpinorField, in_space
from .dirac1d import SIGMA0, SIGMA1, energy_fns

QWP45 = np.exp(1j * math.pi / 4) / math.sqrt(2) * (SIGMA0 - 1j * SIGMA1)
HWP45 = SIGMA1.copy()


@dataclass(frozen=True)
class Qwp45:
    """Quarter-wave plate at 45 degrees."""

    @property
    def matrix(self):
        return QWP45


@dataclass(frozen=True)
class Hwp45:
    """Half-wave plate at 45 degrees (swaps the polarizations)."""

    @property
    def matrix(self):
        return HWP45


@dataclass(frozen=True)
class SlmPhase:
    phase: np.ndarray = field(repr=False)
    efficiency: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"SLM efficiency must lie in (0, 1], got {self.efficiency}")

    @property
    def factor(self) -> np.ndarray:
        eta = self.efficiency
        return eta * np.exp(1j * np.asarray(self.phase)) + (1.0 - eta)


DeviceOp = Qwp45 | Hwp45 | SlmPhase


def apply_device(f: SpinorField, d: DeviceOp) -> SpinorField:
    if isinstance(d, SlmPhase):
        if np.shape(d.phase) != np.shape(f.comp1):
            raise ValueError(
                f"SLM phase has shape {np.shape(d.phase)}, field has {np.shape(f.comp1)}"
            )
        return f.with_components(d.factor * f.comp1, f.comp2)
    m = d.matrix
    return f.with_components(m[0, 0] * f.comp1 + m[0, 1] * f.comp2,
                             m[1, 0] * f.comp1 + m[1, 1] * f.comp2)


def device_matrices(d: DeviceOp, shape) -> np.ndarray:
    """Per-sample Jones matrices of a device, shape ``shape + (2, 2)``."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    if isinstance(d, SlmPhase):
        out = np.zeros(shape + (2, 2), dtype=complex)
        out[..., 0, 0] = d.factor
        out[..., 1, 1] = 1.0
        return out
    return np.broadcast_to(d.matrix, shape + (2, 2)).copy()


def invert_device(d: DeviceOp) -> list:
    """Devices undoing ``d`` (exactly only for ideal SLMs).

    A quarter-wave plate is inverted by another one plus a half-wave plate,
    since Q^2 = s1 and so Q^-1 = s1 Q.
    """
    if isinstance(d, SlmPhase):
        return [SlmPhase(-np.asarray(d.phase), d.efficiency)]
    if isinstance(d, Qwp45):
        return [Qwp45(), Hwp45()]
    return [Hwp45()]


@dataclass(frozen=True)
class ApparatusPlan:
    """Devices in the order the light meets them, each tagged with its plane."""

    steps: tuple = ()

    def __add__(self, other: ApparatusPlan) -> ApparatusPlan:
        return ApparatusPlan(self.steps + other.steps)

    def __len__(self):
        return len(self.steps)

    def count(self, kind) -> int:
        return sum(isinstance(d, kind) for d, _ in self.steps)

    def inverse(self) -> ApparatusPlan:
        steps = []
        for d, space in reversed(self.steps):
            steps.extend((inv, space) for inv in invert_device(d))
        return ApparatusPlan(tuple(steps))

    def matrices(self, shape) -> np.ndarray:
        """Composite per-sample Jones matrix; all steps must share one plane."""
        if len({space for _, space in self.steps}) > 1:
            raise ValueError("plan mixes planes; matrices are only defined within one plane")
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        out = np.broadcast_to(SIGMA0, shape + (2, 2)).copy()
        for d, _ in self.steps:
            out = device_matrices(d, shape) @ out
        return out

    def apply(self, f, convert=in_space):
        """Apply to ``f``; ``convert(f, space)`` moves the field between planes."""
        for d, space in self.steps:
            f = apply_device(convert(f, space), d)
        return f


def momentum_plan(devices) -> ApparatusPlan:
    return ApparatusPlan(tuple((d, MOMENTUM) for d in devices))


def fw_device_sequence(grid, params: PhysicalParams, efficiency: float = 1.0,
                       inverse: bool = False) -> ApparatusPlan:
    """Q P[-theta] H P[theta] Q in the Fourier plane, which equals the FW rotation.

    Written as an operator product, so light meets the rightmost Q first. The
    inverse rotation uses the same devices with ``theta -> -theta``.
    """
    theta = energy_fns(grid.p, params).theta
    if inverse:
        theta = -theta
    return momentum_plan([Qwp45(), SlmPhase(theta, efficiency), Hwp45(),
                           SlmPhase(-theta, efficiency), Qwp45()])


def evolution_plan(grid, params: PhysicalParams, t: float,
                   efficiency: float = 1.0, energy=None) -> ApparatusPlan:
    """Diagonal FW evolution: phase on H, swap, phase on (what was) V, swap back.

    ``energy`` overrides the per-bin energies (used for 2D momentum grids).
    """
    if energy is None:
        energy = energy_fns(grid.p, params).energy
    phi = energy * t
    return momentum_plan([SlmPhase(-phi, efficiency), Hwp45(),
                           SlmPhase(phi, efficiency), Hwp45()])


def run_apparatus(f0: SpinorField, params: PhysicalParams, t: float,
                  efficiency: float = 1.0, stage: str = "dirac") -> SpinorField:
    """Send ``f0`` through FW rotation, evolution and inverse rotation.

    ``stage="fw"`` stops before the inverse rotation, which is where the FW
    mean position is measured. The output keeps the input's space tag and is
    not renormalized.
    """
    if f0.rep != DIRAC:
        raise ValueError("apparatus input must be in the Dirac representation")
    grid = f0.grid
    plan = fw_device_sequence(grid, params, efficiency) + evolution_plan(grid, params, t, efficiency)
    if stage == "dirac":
        plan = plan + fw_device_sequence(grid, params, efficiency, inverse=True)
    elif stage != "fw":
        raise ValueError(f"unknown stage {stage!r}")
    out = plan.apply(in_space(f0, MOMENTUM))
    if stage == "fw":
        out = out.with_components(out.comp1, out.comp2, rep=FW)
    return in_space(out, f0.space)


def slm_coordinate(p, lens_focal: float, wavelength: float):
    """Position on the SLM for transverse momentum ``p``: ``X = lambda f p / h`` (h = 2 pi)."""
    return wavelength * lens_focal * np.asarray(p) / (2.0 * math.pi)


def slm_momentum(X, lens_focal: float, wavelength: float):
    return 2.0 * math.pi * np.asarray(X) / (wavelength * lens_focal)
