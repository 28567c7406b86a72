"""Free Dirac equation in 1+1D via the Foldy-Wouthuysen representation.

Simulates Zitterbewegung of the Dirac position, the drift of the FW mean
position, and a Jones-calculus model of the optical apparatus that realizes
the evolution with wave plates and spatial light modulators.
"""

from .core import (InitialStateParams, PhysicalParams, SpinorField, inner, make_grid, norm,
                   prepare_initial, to_momentum, to_position)
from .dirac1d import evolve_dirac, evolve_dirac_direct, fw_unitary, heisenberg_mean_x
from .observables import TimeSeries, mean_x_dirac, mean_x_fw, mean_x_fw_projected
from .analysis import ZbFit, fit_zb, scan_lambda
from .optical import run_apparatus

__all__ = [
    "InitialStateParams", "PhysicalParams", "SpinorField", "inner", "make_grid", "norm",
    "prepare_initial", "to_momentum", "to_position", "evolve_dirac", "evolve_dirac_direct",
    "fw_unitary", "heisenberg_mean_x", "TimeSeries", "mean_x_dirac", "mean_x_fw",
    "mean_x_fw_projected", "ZbFit", "fit_zb", "scan_lambda", "run_apparatus",
]
