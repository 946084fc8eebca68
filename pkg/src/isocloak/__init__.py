"""Layered isotropic approximations of a spherical electromagnetic near-cloak.

Submodules
----------
params    blow-up map, push-forwards, anisotropic reference media
laminate  two-phase isotropic layers reproducing the anisotropic means
cell      periodic cell problem for radially layered profiles
special   Riccati-Bessel functions of complex argument
radial    per-mode radial Maxwell solver and modal impedance values
measure   spectra, distances and convergence sweeps
cli       command-line front end
"""

from .cell import (
    PeriodicProfile,
    chi1_closed_form,
    convergence_table,
    homogenize_profile,
    solve_cell_1d,
)
from .errors import (
    CloakError,
    ConfigError,
    DomainError,
    InfeasibleLaminateError,
    ResonanceError,
    SingularMapError,
    SingularMediumError,
    SpecialFunctionRangeError,
    StiffnessError,
)
from .laminate import LayerStack, PhasePair, build_stack, gamma_cell, solve_phase_pair
from .measure import (
    ConvergenceRow,
    ExperimentConfig,
    annulus_field_gap,
    distance,
    spectrum,
    sweep,
)
from .params import (
    RECIPROCAL,
    PUSHFORWARD,
    CloakGeometry,
    HiddenObject,
    ObjectShell,
    RadialMedium,
    RadialTensor,
    build_reference_media,
    f_rho,
    f_rho_inv,
    gamma_star,
)
from .radial import TE, TM, DtnSpectrum, Mode, dtn_spectrum, modal_dtn, vacuum_dtn
from .special import psi, riccati_bessel, wronskian_defect, xi

__version__ = "0.1.0"
