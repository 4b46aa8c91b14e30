"""Spectral simulator for the renormalized cubic stochastic heat equation on
the 1- and 2-torus: exact Gaussian stepping with Wick renormalization,
stationary sampling by pullback burn-in, finite-time Lyapunov exponents of
the linearized flow, and constructive steering of those exponents to any
target value.
"""

__version__ = "0.1.0"

from .blocks import (
    BlockDecomposition,
    besov_norm,
    block,
    para_le,
    paraproduct,
    project_high,
    project_low,
    resonant,
)
from .ftle import (
    FtleSample,
    PotentialPath,
    adjoint_flow,
    ftle,
    ftle_for_run,
    operator_norm,
    tangent_flow,
)
from .grids import (
    SpectralField,
    TorusGrid,
    dealiased_product,
    heat_semigroup,
    inner_l2,
    l2_norm,
    sample_gff,
    sup_norm,
    to_physical,
    to_spectral,
)
from .noise import (
    NoiseStream,
    WickTriple,
    ou_step,
    ou_z_path,
    sample_stationary_z,
    wick_constant,
    wick_powers,
)
from .solver import (
    BlowUpError,
    FieldPath,
    RemainderPath,
    SolverConfig,
    remainder_step,
    renormalization_constant,
    solve_controlled,
    solve_remainder,
    split_drift,
)
from .stationary import (
    StationaryRun,
    calibrate_burn_in,
    deterministic_potential,
    renormalized_square,
    sample_stationary,
)
from .steering import (
    SteeringReport,
    SteeringTriple,
    kappa_for_rate,
    rate_support_demo,
    steer_to_rate,
    triple_for_square,
)
