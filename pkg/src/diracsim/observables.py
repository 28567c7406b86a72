"""Densities and mean positions in the Dirac and FW representations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FW, POSITION, PhysicalParams, SpinorField, _require, in_space
from .dirac1d import to_fw


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if self.sigma is not None and np.shape(self.sigma) != t.shape:
            raise ValueError("sigma must match times in length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)


def density(f: SpinorField):
    _require(f, space=POSITION)
    return np.abs(f.comp1) ** 2, np.abs(f.comp2) ** 2


def _mean(x, d) -> float:
    # Dividing by the total mass makes this the mean of the renormalized state.
    return float(np.sum(x * d) / np.sum(d))


def mean_x_dirac(f: SpinorField) -> float:
    _require(f, space=POSITION)
    d1, d2 = density(f)
    return _mean(f.grid.x, d1 + d2)


def _fw_position(f: SpinorField, params: PhysicalParams) -> SpinorField:
    g = f if f.rep == FW else to_fw(f, params)
    return in_space(g, POSITION)


def mean_x_fw(f: SpinorField, params: PhysicalParams) -> float:
    """Mean of the FW position operator (multiplication by x after the FW rotation)."""
    g = _fw_position(f, params)
    d1, d2 = density(g)
    return _mean(g.grid.x, d1 + d2)


def mean_x_fw_projected(f: SpinorField, params: PhysicalParams, sign: int):
    """Conditional mean FW position of one energy sign, and that sign's weight.

    ``sign=+1`` selects the upper FW component (particle), ``-1`` the lower
    (antiparticle). The weight is the unnormalized probability of the sign.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g = _fw_position(f, params)
    d = density(g)[0 if sign == 1 else 1]
    total = np.sum(density(g)[0] + density(g)[1])
    weight = float(np.sum(d) / total)
    if weight <= 1e-10:
        raise ValueError(f"energy-sign {sign:+d} projection has negligible weight {weight:.3g}")
    return _mean(g.grid.x, d), weight


def edge_mass(f: SpinorField, fraction: float = 1.0 / 16.0) -> float:
    """Probability within ``fraction * extent`` of either grid edge (relative to total)."""
    g = in_space(f, POSITION)
    d1, d2 = density(g)
    d = d1 + d2
    halfwidth = 0.5 * g.grid.extent * (1.0 - 2.0 * fraction)
    return float(np.sum(d[np.abs(g.grid.x) > halfwidth]) / np.sum(d))
