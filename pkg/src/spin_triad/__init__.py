"""Optimal estimation of a qubit state from three parallel copies.

Subpackages are flat modules: ``tensor`` (dense operators), ``symmetry``
(permutations and symmetric projectors), ``estimation`` (POVMs, the
Q-map and fidelities), ``catalog`` (named POVMs and protocols),
``designs`` (unitary t-designs) and ``bounds`` (scalar bounds).
"""

from .errors import InvalidPovmError, InvalidStateError, NotHermitianError, ShapeError
from .estimation import (
    FidelityReport,
    Povm,
    average_fidelity_mc,
    coarse_grain,
    estimation_fidelity,
    optimal_estimators,
    q_map,
    random_povm,
    restrict_antisym,
    restrict_sym,
)
from .catalog import ANALYTIC, CATALOG, get_povm, m_1to2, m_2to1, octahedron_collective, local_xyz
from .designs import UnitarySet, frame_potential, get_set, haar_frame_potential, is_t_design
from .bounds import appendix_c_constants, verify_bound

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC",
    "CATALOG",
    "FidelityReport",
    "InvalidPovmError",
    "InvalidStateError",
    "NotHermitianError",
    "Povm",
    "ShapeError",
    "UnitarySet",
    "appendix_c_constants",
    "average_fidelity_mc",
    "coarse_grain",
    "estimation_fidelity",
    "frame_potential",
    "get_povm",
    "get_set",
    "haar_frame_potential",
    "is_t_design",
    "local_xyz",
    "m_1to2",
    "m_2to1",
    "octahedron_collective",
    "optimal_estimators",
    "q_map",
    "random_povm",
    "restrict_antisym",
    "restrict_sym",
    "verify_bound",
]
