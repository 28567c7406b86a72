"""Momentum-space machinery for the free 1+1D Dirac Hamiltonian ``c p s1 + mc^2 s3``.

Every operator here is a function of momentum only, so it is stored as one
2x2 matrix per momentum bin. Three propagators are provided: the
Foldy-Wouthuysen route (rotate, diagonal phases, rotate back), a closed-form
matrix exponential used as an oracle, and the Heisenberg-picture expression
for the mean Dirac position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (DIRAC, FW, MOMENTUM, POSITION, Grid1D, PhysicalParams, SpinorField,
                   _require, in_space, spinor_from_stacked)

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class MomentumMatrixField:
    """A 2x2 complex matrix per momentum bin, stored as an ``(n, 2, 2)`` array."""

    data: np.ndarray

    @property
    def m11(self):
        return self.data[:, 0, 0]

    @property
    def m12(self):
        return self.data[:, 0, 1]

    @property
    def m21(self):
        return self.data[:, 1, 0]

    @property
    def m22(self):
        return self.data[:, 1, 1]

    @property
    def dagger(self) -> MomentumMatrixField:
        return MomentumMatrixField(np.conj(np.swapaxes(self.data, -1, -2)))

    def __matmul__(self, other):
        if isinstance(other, MomentumMatrixField):
            return MomentumMatrixField(self.data @ other.data)
        return MomentumMatrixField(self.data @ np.asarray(other))

    def __rmatmul__(self, other):
        return MomentumMatrixField(np.asarray(other) @ self.data)

    def apply(self, f: SpinorField) -> SpinorField:
        _require(f, space=MOMENTUM)
        out = np.einsum("kij,kj->ki", self.data, f.stacked)
        return spinor_from_stacked(f.grid, out, f.rep, f.space)

    def unitarity_error(self) -> float:
        prod = self.dagger.data @ self.data
        return float(np.max(np.abs(prod - SIGMA0)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.dagger.data)))


@dataclass(frozen=True)
class EnergyFns:
    """Per-bin energy ``eps(p)`` and FW rotation angle ``theta(p) = arctan(p/mc)/2``."""

    p: np.ndarray
    energy: np.ndarray
    theta: np.ndarray


def energy_fns(p, params: PhysicalParams) -> EnergyFns:
    p = np.asarray(p, dtype=float)
    c, mc2 = params.c, params.rest_energy
    return EnergyFns(p, np.hypot(mc2, c * p), 0.5 * np.arctan(p / params.mc))


def _momenta(grid_or_p):
    return grid_or_p.p if isinstance(grid_or_p, Grid1D) else np.asarray(grid_or_p, dtype=float)


def hamiltonian_matrices(p, params: PhysicalParams) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    mc2 = params.rest_energy
    h = np.empty(p.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = mc2
    h[..., 1, 1] = -mc2
    h[..., 0, 1] = h[..., 1, 0] = params.c * p
    return h


def hamiltonian(grid: Grid1D, params: PhysicalParams) -> MomentumMatrixField:
    return MomentumMatrixField(hamiltonian_matrices(grid.p, params))


def eigenspinors(p: float, params: PhysicalParams, unit_norm: bool = True):
    """Positive and negative energy spinors ``u(p)``, ``v(p)``.

    Both are eigenvectors of ``H(p)``. The negative-energy plane wave
    ``exp(-ipx)`` carries ``v(-p) = (cp, eps + mc^2)``.

    With ``unit_norm=False`` the prefactor ``[2 mc^2 (eps + mc^2)]^-1/2`` is used
    instead, which is not unit length for ``p != 0``.
    """
    mc2 = params.rest_energy
    eps = float(np.hypot(mc2, params.c * p))
    u = np.array([eps + mc2, params.c * p], dtype=complex)
    # v solves H v = -eps v; it is u with its components swapped and one sign flipped.
    v = np.array([-params.c * p, eps + mc2], dtype=complex)
    if unit_norm:
        scale = 1.0 / np.linalg.norm(u)
    else:
        scale = 1.0 / np.sqrt(2.0 * mc2 * (eps + mc2))
    return u * scale, v * scale


def rotation_matrices(theta) -> np.ndarray:
    """``[[cos t, sin t], [-sin t, cos t]]`` for each angle in ``theta``."""
    theta = np.asarray(theta, dtype=float)
    cs, sn = np.cos(theta), np.sin(theta)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = cs
    out[..., 0, 1] = sn
    out[..., 1, 0] = -sn
    out[..., 1, 1] = cs
    return out


def fw_unitary(grid: Grid1D, params: PhysicalParams) -> MomentumMatrixField:
    """Foldy-Wouthuysen rotation ``exp(i s2 theta(p))`` per bin."""
    return MomentumMatrixField(rotation_matrices(energy_fns(grid.p, params).theta))


def projector_dirac(grid_or_p, params: PhysicalParams, sign: int) -> MomentumMatrixField:
    """Energy-sign projector ``(eps + sign*H) / (2 eps)`` in the Dirac representation."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p = _momenta(grid_or_p)
    eps = energy_fns(p, params).energy[..., None, None]
    return MomentumMatrixField((eps * SIGMA0 + sign * hamiltonian_matrices(p, params)) / (2 * eps))


def projector_fw(sign: int) -> np.ndarray:
    if sign == 1:
        return np.diag([1.0, 0.0]).astype(complex)
    if sign == -1:
        return np.diag([0.0, 1.0]).astype(complex)
    raise ValueError("sign must be +1 or -1")


def to_fw(f: SpinorField, params: PhysicalParams) -> SpinorField:
    """Dirac -> FW representation; result is in momentum space."""
    _require(f, rep=DIRAC)
    g = in_space(f, MOMENTUM)
    out = fw_unitary(g.grid, params).apply(g)
    return out.with_components(out.comp1, out.comp2, rep=FW)


def from_fw(f: SpinorField, params: PhysicalParams) -> SpinorField:
    """FW -> Dirac representation; result is in momentum space."""
    _require(f, rep=FW)
    g = in_space(f, MOMENTUM)
    out = fw_unitary(g.grid, params).dagger.apply(g)
    return out.with_components(out.comp1, out.comp2, rep=DIRAC)


def evolve_fw_diagonal(f: SpinorField, t: float, params: PhysicalParams) -> SpinorField:
    """Upper (positive energy) component gets ``exp(-i eps t)``, lower ``exp(+i eps t)``."""
    _require(f, rep=FW, space=MOMENTUM)
    phase = np.exp(-1j * energy_fns(f.grid.p, params).energy * t)
    return f.with_components(phase * f.comp1, np.conj(phase) * f.comp2)


def evolve_dirac(f: SpinorField, t: float, params: PhysicalParams) -> SpinorField:
    """Free evolution through the FW representation; keeps the caller's space tag."""
    _require(f, rep=DIRAC)
    out = from_fw(evolve_fw_diagonal(to_fw(f, params), t, params), params)
    return in_space(out, f.space)


def propagator_matrices(p, t: float, params: PhysicalParams) -> np.ndarray:
    """Closed form ``exp(-i H t) = cos(eps t) - i sin(eps t) H / eps``."""
    p = np.asarray(p, dtype=float)
    eps = energy_fns(p, params).energy[..., None, None]
    h = hamiltonian_matrices(p, params)
    return np.cos(eps * t) * SIGMA0 - 1j * np.sin(eps * t) * h / eps


def evolve_dirac_direct(f: SpinorField, t: float, params: PhysicalParams) -> SpinorField:
    _require(f, rep=DIRAC)
    g = in_space(f, MOMENTUM)
    out = MomentumMatrixField(propagator_matrices(g.grid.p, t, params)).apply(g)
    return in_space(out, f.space)


def _expect(matrices: np.ndarray, phi: np.ndarray, dp: float) -> complex:
    return complex(np.einsum("ki,kij,kj->", np.conj(phi), matrices, phi) * dp)


def heisenberg_mean_x(f0: SpinorField, t: float, params: PhysicalParams) -> float:
    """Mean Dirac position at time ``t`` from the closed-form Heisenberg operator.

    x(t) = x(0) + c^2 p H^-1 t - (c/2i) H^-1 (e^{2iHt} - 1)(c p H^-1 - s1).
    Only ``x(0)`` needs position space; the rest are momentum-bin matrices.
    """
    _require(f0, rep=DIRAC)
    pos = in_space(f0, POSITION)
    x = pos.grid.x
    x0 = float(np.sum(x * (np.abs(pos.comp1) ** 2 + np.abs(pos.comp2) ** 2)) * pos.grid.dx)

    mom = in_space(f0, MOMENTUM)
    p = mom.grid.p
    c = params.c
    eps = energy_fns(p, params).energy[..., None, None]
    h = hamiltonian_matrices(p, params)
    h_inv = h / eps**2
    pc = (c * p)[..., None, None]
    drift = c * pc * h_inv * t
    exp2 = np.cos(2 * eps * t) * SIGMA0 + 1j * np.sin(2 * eps * t) * h / eps
    zb = -(c / 2j) * h_inv @ (exp2 - SIGMA0) @ (pc * h_inv - SIGMA1)
    return x0 + _expect(drift + zb, mom.stacked, mom.grid.dp).real


def drift_velocity(f: SpinorField, params: PhysicalParams) -> float:
    """Expectation of ``c^2 p H^-1``: the non-oscillating part of the Dirac velocity."""
    _require(f, rep=DIRAC)
    mom = in_space(f, MOMENTUM)
    p = mom.grid.p
    eps = energy_fns(p, params).energy[..., None, None]
    op = params.c**2 * p[..., None, None] * hamiltonian_matrices(p, params) / eps**2
    return _expect(op, mom.stacked, mom.grid.dp).real


def fw_velocity(f: SpinorField, params: PhysicalParams) -> float:
    """Expectation of ``c^2 p / (s3 eps)``, the constant velocity of the FW mean position."""
    g = f if f.rep == FW else to_fw(f, params)
    g = in_space(g, MOMENTUM)
    eps = energy_fns(g.grid.p, params).energy
    v = params.c**2 * g.grid.p / eps
    dens = np.abs(g.comp1) ** 2 - np.abs(g.comp2) ** 2
    return float(np.sum(v * dens) * g.grid.dp)


def position_correction_fw(f: SpinorField, params: PhysicalParams) -> float:
    """Expectation of ``mc^3 s2 / (2 eps^2)``, the gap between Dirac and FW positions.

    Evaluated on the FW-representation state, so that
    ``<x_D> = <x_FW> + position_correction_fw``.
    """
    g = f if f.rep == FW else to_fw(f, params)
    g = in_space(g, MOMENTUM)
    eps = energy_fns(g.grid.p, params).energy
    weight = params.mc * params.c**2 / (2.0 * eps**2)
    ops = weight[..., None, None] * SIGMA2
    return _expect(ops, g.stacked, g.grid.dp).real


def velocity_operator(params: PhysicalParams) -> np.ndarray:
    """``dx_D/dt = i[H, x_D] = c s1``, independent of momentum."""
    return params.c * SIGMA1
