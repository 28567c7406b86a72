"""Beyond the free 1+1D case.

* 2+1D free evolution, with the FW rotation and its device decomposition.
* 3+1D evolution for states that are uniform along z (so only ``p_z = 0``
  contributes). The 4x4 FW matrix then couples components (1, 4) and (2, 3)
  pairwise, and each pair evolves like a 2+1D spinor.
* 1+1D evolution with a potential ``V1(x) s1``, which a position-dependent
  phase gauges away: ``psi(t) = e^{-i L} U_free(t) e^{+i L} psi(0)`` with
  ``L(x) = (1/c) int V1``. A split-step integrator serves as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .core import (DIRAC, FW, MOMENTUM, POSITION, Grid1D, PhysicalParams, SpinorField,
                   _require, fourier, in_space, inverse_fourier, make_grid)
from .dirac1d import SIGMA0, SIGMA1, SIGMA2, SIGMA3, evolve_dirac, propagator_matrices
from .optical import Hwp45, Qwp45, SlmPhase, evolution_plan, momentum_plan


# -- 2+1D ----------------------------------------------------------------------

@dataclass(frozen=True)
class Grid2D:
    gx: Grid1D
    gy: Grid1D

    @property
    def shape(self):
        return (self.gx.n, self.gy.n)

    def mesh(self, space: str):
        """``(X, Y)`` or ``(PX, PY)`` arrays indexed ``[ix, iy]``."""
        if space == POSITION:
            return np.meshgrid(self.gx.x, self.gy.x, indexing="ij")
        return np.meshgrid(self.gx.p, self.gy.p, indexing="ij")

    def measure(self, space: str) -> float:
        return self.gx.measure(space) * self.gy.measure(space)


def make_grid_2d(nx: int, extent_x: float, ny: int | None = None,
                 extent_y: float | None = None) -> Grid2D:
    return Grid2D(make_grid(nx, extent_x),
                  make_grid(ny or nx, extent_y if extent_y is not None else extent_x))


@dataclass(frozen=True)
class SpinorField2D:
    grid: Grid2D
    comp1: np.ndarray
    comp2: np.ndarray
    rep: str = DIRAC
    space: str = POSITION

    def __post_init__(self):
        for comp in (self.comp1, self.comp2):
            if np.shape(comp) != self.grid.shape:
                raise ValueError(f"component shape {np.shape(comp)} != grid {self.grid.shape}")

    @property
    def stacked(self):
        return np.stack([self.comp1, self.comp2], axis=-1)

    def with_components(self, comp1, comp2, **tags):
        return replace(self, comp1=np.asarray(comp1, dtype=complex),
                       comp2=np.asarray(comp2, dtype=complex), **tags)


def _fft2(psi, dx, dy):
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(psi))) * (dx * dy / (2 * math.pi))


def _ifft2(phi, dx, dy):
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(phi))) * (2 * math.pi / (dx * dy))


def in_space_2d(f: SpinorField2D, space: str) -> SpinorField2D:
    if f.space == space:
        return f
    dx, dy = f.grid.gx.dx, f.grid.gy.dx
    op = _fft2 if space == MOMENTUM else _ifft2
    return f.with_components(op(f.comp1, dx, dy), op(f.comp2, dx, dy), space=space)


def norm_2d(f: SpinorField2D) -> float:
    w = f.grid.measure(f.space)
    return float((np.sum(np.abs(f.comp1) ** 2) + np.sum(np.abs(f.comp2) ** 2)) * w)


def mean_position_2d(f: SpinorField2D):
    g = in_space_2d(f, POSITION)
    X, Y = g.grid.mesh(POSITION)
    d = np.abs(g.comp1) ** 2 + np.abs(g.comp2) ** 2
    total = np.sum(d)
    return float(np.sum(X * d) / total), float(np.sum(Y * d) / total)


def theta_prime(px, py):
    """Azimuth of the momentum, fixed by ``px - i py = |p| exp(-i theta')``.

    This is the principal argument of ``px + i py``, in (-pi, pi]. The origin
    maps to 0; there ``sin(theta) = 0`` so the choice has no effect.
    """
    return np.angle(np.asarray(px, dtype=float) + 1j * np.asarray(py, dtype=float))


def _angles_2d(px, py, params: PhysicalParams, conjugate: bool):
    pmag = np.hypot(px, py)
    theta = 0.5 * np.arctan(pmag / params.mc)
    tp = theta_prime(px, py)
    return theta, (-tp if conjugate else tp), np.hypot(params.rest_energy, params.c * pmag)


def fw_matrices_2d(px, py, params: PhysicalParams, conjugate: bool = False) -> np.ndarray:
    """``[[cos t, e^{-i t'} sin t], [-e^{i t'} sin t, cos t]]`` per bin.

    ``conjugate=True`` flips the sign of ``t'``, which is the FW rotation for
    the Hamiltonian with ``py -> -py``.
    """
    theta, tp, _ = _angles_2d(np.asarray(px, float), np.asarray(py, float), params, conjugate)
    cs, sn = np.cos(theta), np.sin(theta)
    out = np.empty(np.shape(theta) + (2, 2), dtype=complex)
    out[..., 0, 0] = cs
    out[..., 0, 1] = np.exp(-1j * tp) * sn
    out[..., 1, 0] = -np.exp(1j * tp) * sn
    out[..., 1, 1] = cs
    return out


def fw_unitary_2d(grid: Grid2D, params: PhysicalParams, conjugate: bool = False) -> np.ndarray:
    PX, PY = grid.mesh(MOMENTUM)
    return fw_matrices_2d(PX, PY, params, conjugate)


def hamiltonian_2d(px, py, params: PhysicalParams, conjugate: bool = False) -> np.ndarray:
    """``c (s1 px + s2 py) + mc^2 s3``; ``conjugate=True`` uses ``-py``."""
    px = np.asarray(px, dtype=float)
    py = -np.asarray(py, dtype=float) if conjugate else np.asarray(py, dtype=float)
    mc2, c = params.rest_energy, params.c
    h = np.empty(np.broadcast(px, py).shape + (2, 2), dtype=complex)
    h[..., 0, 0] = mc2
    h[..., 1, 1] = -mc2
    h[..., 0, 1] = c * (px - 1j * py)
    h[..., 1, 0] = c * (px + 1j * py)
    return h


def energy_2d(grid: Grid2D, params: PhysicalParams) -> np.ndarray:
    PX, PY = grid.mesh(MOMENTUM)
    return np.hypot(params.rest_energy, params.c * np.hypot(PX, PY))


def device_sequence_2d(grid: Grid2D, params: PhysicalParams, efficiency: float = 1.0,
                       inverse: bool = False, conjugate: bool = False):
    """P[-t'] Q P[-t] H P[t] Q P[t'] as a Fourier-plane plan (light meets P[t'] first).

    The inverse rotation is the same sequence with ``t -> -t``.
    """
    PX, PY = grid.mesh(MOMENTUM)
    theta, tp, _ = _angles_2d(PX, PY, params, conjugate)
    if inverse:
        theta = -theta
    return momentum_plan([SlmPhase(tp, efficiency), Qwp45(), SlmPhase(theta, efficiency),
                          Hwp45(), SlmPhase(-theta, efficiency), Qwp45(),
                          SlmPhase(-tp, efficiency)])


def global_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Best single phase ``phi`` with ``a ~ e^{i phi} b``."""
    return float(np.angle(np.vdot(b.ravel(), a.ravel())))


def evolution_plan_2d(grid: Grid2D, params: PhysicalParams, t: float, efficiency: float = 1.0):
    """H P[eps t] H P[-eps t], with the SLM phases taken as the real numbers ``+-eps t``."""
    return evolution_plan(None, params, t, efficiency, energy=energy_2d(grid, params))


def _apply_2d(mats: np.ndarray, f: SpinorField2D, **tags) -> SpinorField2D:
    out = np.einsum("xyij,xyj->xyi", mats, f.stacked)
    return f.with_components(out[..., 0], out[..., 1], **tags)


def evolve_2d(f: SpinorField2D, t: float, params: PhysicalParams,
              conjugate: bool = False) -> SpinorField2D:
    """FW-route free evolution in 2+1D; output keeps the input's space tag."""
    _require(f, rep=DIRAC)
    g = in_space_2d(f, MOMENTUM)
    U = fw_unitary_2d(g.grid, params, conjugate)
    h = _apply_2d(U, g, rep=FW)
    phase = np.exp(-1j * energy_2d(g.grid, params) * t)
    h = h.with_components(phase * h.comp1, np.conj(phase) * h.comp2)
    out = _apply_2d(np.conj(np.swapaxes(U, -1, -2)), h, rep=DIRAC)
    return in_space_2d(out, f.space)


def evolve_2d_direct(f: SpinorField2D, t: float, params: PhysicalParams,
                     conjugate: bool = False) -> SpinorField2D:
    """Oracle: per-bin ``cos(eps t) - i sin(eps t) H / eps``."""
    g = in_space_2d(f, MOMENTUM)
    PX, PY = g.grid.mesh(MOMENTUM)
    eps = energy_2d(g.grid, params)[..., None, None]
    h = hamiltonian_2d(PX, PY, params, conjugate)
    prop = np.cos(eps * t) * SIGMA0 - 1j * np.sin(eps * t) * h / eps
    return in_space_2d(_apply_2d(prop, g), f.space)


# -- 3+1D, z-uniform states ------------------------------------------------------

BETA = np.diag([1, 1, -1, -1]).astype(complex)


def alpha_matrices():
    out = []
    for s in (SIGMA1, SIGMA2, SIGMA3):
        a = np.zeros((4, 4), dtype=complex)
        a[:2, 2:] = s
        a[2:, :2] = s
        out.append(a)
    return out


def hamiltonian_4x4(px, py, params: PhysicalParams, pz=0.0) -> np.ndarray:
    ax, ay, az = alpha_matrices()
    px, py, pz = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (px, py, pz)))
    c = params.c
    return (c * (px[..., None, None] * ax + py[..., None, None] * ay + pz[..., None, None] * az)
            + params.rest_energy * BETA)


def fw_matrix_4x4(px, py, params: PhysicalParams) -> np.ndarray:
    """``cos t + beta (alpha . p / |p|) sin t`` at ``p_z = 0``."""
    ax, ay, _ = alpha_matrices()
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    pmag = np.hypot(px, py)
    theta = 0.5 * np.arctan(pmag / params.mc)
    safe = np.where(pmag > 0, pmag, 1.0)
    nx, ny = (px / safe)[..., None, None], (py / safe)[..., None, None]
    eye = np.eye(4, dtype=complex)
    return (np.cos(theta)[..., None, None] * eye
            + np.sin(theta)[..., None, None] * (BETA @ (nx * ax + ny * ay)))


# Pairs (phi1, phi4) and (phi2, phi3), zero-based.
PAIR_14 = (0, 3)
PAIR_23 = (1, 2)


@dataclass(frozen=True)
class Spinor4Pair:
    """Four-component spinor stored as two 2D fields: (phi1, phi4) and (phi2, phi3)."""

    pair14: SpinorField2D
    pair23: SpinorField2D

    def norm(self) -> float:
        return norm_2d(self.pair14) + norm_2d(self.pair23)

    def components(self) -> np.ndarray:
        """``(nx, ny, 4)`` array in the original component order."""
        out = np.empty(self.pair14.grid.shape + (4,), dtype=complex)
        out[..., 0], out[..., 3] = self.pair14.comp1, self.pair14.comp2
        out[..., 1], out[..., 2] = self.pair23.comp1, self.pair23.comp2
        return out

    @classmethod
    def from_components(cls, grid: Grid2D, comps, space=POSITION):
        comps = np.asarray(comps, dtype=complex)
        return cls(SpinorField2D(grid, comps[..., 0], comps[..., 3], DIRAC, space),
                   SpinorField2D(grid, comps[..., 1], comps[..., 2], DIRAC, space))


def evolve_3d_restricted(pair: Spinor4Pair, t: float, params: PhysicalParams) -> Spinor4Pair:
    """Evolve both pairs independently; (phi2, phi3) sees the conjugated azimuth."""
    return Spinor4Pair(evolve_2d(pair.pair14, t, params),
                       evolve_2d(pair.pair23, t, params, conjugate=True))


def evolve_4x4_fw(pair: Spinor4Pair, t: float, params: PhysicalParams) -> Spinor4Pair:
    """Oracle: full 4x4 FW rotation, ``exp(-i beta eps t)``, inverse rotation."""
    space = pair.pair14.space
    grid = pair.pair14.grid
    mom = Spinor4Pair(in_space_2d(pair.pair14, MOMENTUM), in_space_2d(pair.pair23, MOMENTUM))
    psi = mom.components()
    PX, PY = grid.mesh(MOMENTUM)
    U = fw_matrix_4x4(PX, PY, params)
    eps = energy_2d(grid, params)
    phases = np.exp(-1j * t * eps[..., None] * np.diag(BETA).real)
    psi = np.einsum("xyij,xyj->xyi", U, psi) * phases
    psi = np.einsum("xyji,xyj->xyi", np.conj(U), psi)
    out = Spinor4Pair.from_components(grid, psi, MOMENTUM)
    return Spinor4Pair(in_space_2d(out.pair14, space), in_space_2d(out.pair23, space))


# -- sigma_1 potentials ----------------------------------------------------------

def gauge_phase(grid: Grid1D, V1, params: PhysicalParams) -> np.ndarray:
    """``L(x) = (1/c) int_{x_min}^{x} V1``, trapezoid rule from the left edge."""
    return cumulative_trapezoid(np.asarray(V1, dtype=float), grid.x, initial=0.0) / params.c


def evolve_with_sigma1_potential(f: SpinorField, t: float, params: PhysicalParams,
                                 V1) -> SpinorField:
    """Evolve under ``H_free + V1(x) s1`` by gauging the potential into a phase."""
    _require(f, rep=DIRAC)
    pos = in_space(f, POSITION)
    phase = np.exp(1j * gauge_phase(pos.grid, V1, params))
    phi = pos.with_components(phase * pos.comp1, phase * pos.comp2)
    phi = evolve_dirac(phi, t, params)
    out = phi.with_components(np.conj(phase) * phi.comp1, np.conj(phase) * phi.comp2)
    return in_space(out, f.space)


def split_step_sigma1(f: SpinorField, times, params: PhysicalParams, V1,
                      dt: float = 1e-3) -> list:
    """Strang splitting of ``H_free + V1(x) s1``; returns position-space states at ``times``.

    Each requested time is reached with a whole number of steps of size close
    to ``dt``. The potential factor is ``cos(V1 h) - i s1 sin(V1 h)`` per sample.
    """
    _require(f, rep=DIRAC)
    V1 = np.asarray(V1, dtype=float)
    pos = in_space(f, POSITION)
    grid = pos.grid
    psi1, psi2 = pos.comp1.copy(), pos.comp2.copy()
    out, t_now = [], 0.0
    for t_target in times:
        span = t_target - t_now
        if span < -1e-12:
            raise ValueError("times must be non-decreasing and >= 0")
        steps = int(round(span / dt))
        if steps:
            h = span / steps
            kin = propagator_matrices(grid.p, h, params)
            cos_h, sin_h = np.cos(0.5 * V1 * h), np.sin(0.5 * V1 * h)
            k11, k12, k21, k22 = kin[:, 0, 0], kin[:, 0, 1], kin[:, 1, 0], kin[:, 1, 1]
            dx = grid.dx
            for _ in range(steps):
                psi1, psi2 = cos_h * psi1 - 1j * sin_h * psi2, cos_h * psi2 - 1j * sin_h * psi1
                a, b = fourier(psi1, dx), fourier(psi2, dx)
                a, b = k11 * a + k12 * b, k21 * a + k22 * b
                psi1, psi2 = inverse_fourier(a, dx), inverse_fourier(b, dx)
                psi1, psi2 = cos_h * psi1 - 1j * sin_h * psi2, cos_h * psi2 - 1j * sin_h * psi1
        t_now = t_target
        out.append(SpinorField(grid, psi1.copy(), psi2.copy(), DIRAC, POSITION))
    return out
