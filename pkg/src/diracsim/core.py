"""Grids, two-component spinor fields and the unitary Fourier transform.

Units throughout: hbar = 1, lengths in beam widths, times in the arbitrary
time unit of the simulation. The mass scale enters only through the Compton
wavelength, ``mc = 2*pi / lambda_c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

DIRAC = "dirac"
FW = "fw"
POSITION = "position"
MOMENTUM = "momentum"

_REPS = (DIRAC, FW)
_SPACES = (POSITION, MOMENTUM)

# Massless limit is capped so that the rest energy stays strictly positive.
MAX_COMPTON_WAVELENGTH = 1e6


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid of ``n`` points over ``extent``, centred on 0.

    ``x`` and ``p`` are both stored in increasing order, with
    ``x[n // 2] == 0`` and ``p[n // 2] == 0``.
    """

    n: int
    extent: float
    x: np.ndarray = field(init=False, repr=False, compare=False)
    p: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = np.arange(self.n) - self.n // 2
        object.__setattr__(self, "x", idx * self.dx)
        object.__setattr__(self, "p", idx * self.dp)
        self.x.flags.writeable = False
        self.p.flags.writeable = False

    @property
    def dx(self) -> float:
        return self.extent / self.n

    @property
    def dp(self) -> float:
        return 2.0 * math.pi / self.extent

    def measure(self, space: str) -> float:
        return self.dx if space == POSITION else self.dp


def make_grid(n: int, extent: float) -> Grid1D:
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 2, got {n}")
    if not extent > 0:
        raise ValueError(f"grid extent must be positive, got {extent}")
    return Grid1D(int(n), float(extent))


@dataclass(frozen=True)
class PhysicalParams:
    """Speed of light ``c`` and Compton wavelength ``lambda_c``."""

    c: float
    lambda_c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if not 0 < self.lambda_c <= MAX_COMPTON_WAVELENGTH:
            raise ValueError(
                f"lambda_c must lie in (0, {MAX_COMPTON_WAVELENGTH:g}], got {self.lambda_c}"
            )

    @property
    def mc(self) -> float:
        return 2.0 * math.pi / self.lambda_c

    @property
    def rest_energy(self) -> float:
        return self.mc * self.c


@dataclass(frozen=True)
class InitialStateParams:
    """Chirped Gaussian beam with polarization weights ``(a, b)``.

    ``chirp`` is ``lambda*R/pi`` in squared beam widths; ``chirp_sign``
    selects the sign of the quadratic phase ``exp(chirp_sign * i x^2 / chirp)``.
    ``chirp = inf`` gives a flat wavefront.
    """

    delta: float = 1.0
    chirp: float = 2.2**2
    a: complex = 1 / math.sqrt(2)
    b: complex = -1 / math.sqrt(2)
    chirp_sign: int = -1

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.chirp > 0:
            raise ValueError(f"chirp must be positive, got {self.chirp}")
        if self.chirp_sign not in (-1, 1):
            raise ValueError("chirp_sign must be +1 or -1")
        w = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(w - 1.0) > 1e-12:
            raise ValueError(f"|a|^2 + |b|^2 must be 1, got {w!r}")


@dataclass(frozen=True)
class SpinorField:
    grid: Grid1D
    comp1: np.ndarray
    comp2: np.ndarray
    rep: str = DIRAC
    space: str = POSITION

    def __post_init__(self):
        if self.rep not in _REPS:
            raise ValueError(f"unknown representation {self.rep!r}")
        if self.space not in _SPACES:
            raise ValueError(f"unknown space {self.space!r}")
        for comp in (self.comp1, self.comp2):
            if np.shape(comp) != (self.grid.n,):
                raise ValueError(
                    f"component shape {np.shape(comp)} does not match grid size {self.grid.n}"
                )

    @property
    def stacked(self) -> np.ndarray:
        """Components as a ``(n, 2)`` array, one spinor per sample."""
        return np.stack([self.comp1, self.comp2], axis=-1)

    def with_components(self, comp1, comp2, **tags) -> SpinorField:
        return replace(self, comp1=np.asarray(comp1, dtype=complex),
                       comp2=np.asarray(comp2, dtype=complex), **tags)

    def scaled(self, factor: complex) -> SpinorField:
        return self.with_components(factor * self.comp1, factor * self.comp2)


def spinor_from_stacked(grid, arr, rep, space) -> SpinorField:
    return SpinorField(grid, np.ascontiguousarray(arr[:, 0]),
                       np.ascontiguousarray(arr[:, 1]), rep, space)


def _require(f: SpinorField, *, rep=None, space=None):
    if rep is not None and f.rep != rep:
        raise ValueError(f"expected {rep} representation, got {f.rep}")
    if space is not None and f.space != space:
        raise ValueError(f"expected {space}-space field, got {f.space}")


def fourier(psi: np.ndarray, dx: float) -> np.ndarray:
    """Unitary transform of centred samples: (2 pi)^-1/2 sum psi(x) e^{-ipx} dx."""
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(psi, axes=0), axis=0), axes=0) * (
        dx / math.sqrt(2.0 * math.pi)
    )


def inverse_fourier(phi: np.ndarray, dx: float) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(phi, axes=0), axis=0), axes=0) * (
        math.sqrt(2.0 * math.pi) / dx
    )


def to_momentum(f: SpinorField) -> SpinorField:
    _require(f, space=POSITION)
    dx = f.grid.dx
    return f.with_components(fourier(f.comp1, dx), fourier(f.comp2, dx), space=MOMENTUM)


def to_position(f: SpinorField) -> SpinorField:
    _require(f, space=MOMENTUM)
    dx = f.grid.dx
    return f.with_components(inverse_fourier(f.comp1, dx), inverse_fourier(f.comp2, dx),
                             space=POSITION)


def in_space(f: SpinorField, space: str) -> SpinorField:
    if f.space == space:
        return f
    return to_momentum(f) if space == MOMENTUM else to_position(f)


def gaussian_packet(grid: Grid1D, *, a=1.0, b=0.0, center=0.0, width=1.0,
                    momentum=0.0, quadratic_phase=0.0) -> SpinorField:
    """Normalized Gaussian spinor ``(a, b) * exp(-(x-x0)^2/(4 w^2) + i p0 x + i q (x-x0)^2)``."""
    y = grid.x - center
    env = np.exp(-(y**2) / (4.0 * width**2) + 1j * (momentum * grid.x + quadratic_phase * y**2))
    f = SpinorField(grid, a * env, b * env, DIRAC, POSITION)
    return f.scaled(1.0 / math.sqrt(norm(f)))


def prepare_initial(grid: Grid1D, isp: InitialStateParams | None = None) -> SpinorField:
    """Chirped Gaussian initial state in the Dirac representation, position space."""
    isp = isp or InitialStateParams()
    if grid.extent < 16.0 * isp.delta:
        tail = math.erfc(grid.extent / (2.0 * math.sqrt(2.0) * isp.delta))
        raise ValueError(
            f"grid extent {grid.extent} < 16*delta; boundary tail mass ~{tail:.1e}"
        )
    q = isp.chirp_sign / isp.chirp if math.isfinite(isp.chirp) else 0.0
    env = np.exp(1j * q * grid.x**2) * np.exp(-grid.x**2 / (4.0 * isp.delta**2))
    f = SpinorField(grid, isp.a * env, isp.b * env, DIRAC, POSITION)
    return f.scaled(1.0 / math.sqrt(norm(f)))


def _check_pair(f: SpinorField, g: SpinorField):
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    if f.space != g.space:
        raise ValueError(f"fields in different spaces ({f.space} vs {g.space})")


def inner(f: SpinorField, g: SpinorField) -> complex:
    _check_pair(f, g)
    w = f.grid.measure(f.space)
    return complex((np.vdot(f.comp1, g.comp1) + np.vdot(f.comp2, g.comp2)) * w)


def norm(f: SpinorField) -> float:
    """Squared L2 norm (total probability)."""
    w = f.grid.measure(f.space)
    return float((np.sum(np.abs(f.comp1) ** 2) + np.sum(np.abs(f.comp2) ** 2)) * w)
