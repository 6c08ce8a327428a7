"""Noise index of randomized consensus with randomly induced discretized
Laplacian (RIDL) update matrices.

Exact values via the lifted second-moment operator, spectral and
effective-resistance bounds, and Monte Carlo estimation, specialized to
update matrices sampled by Bernoulli node activation on an underlying
graph.
"""

from .errors import NumericalError, SingularMatrixError
from .graphs import (
    ErdosRenyiDraw,
    UndirectedGraph,
    average_effective_resistance,
    draw_erdos_renyi,
    is_connected,
    laplacian,
    laplacian_spectrum,
    make_complete,
    make_erdos_renyi,
    make_grid,
    make_path,
    make_star,
    read_edge_list,
    write_edge_list,
)
from .linalg import (
    SpectralData,
    kron,
    pseudoinverse_psd,
    solve,
    sym_eigen,
    symmetric_spectral_norm,
)
from .noise_index import (
    FAMILIES,
    NoiseReport,
    PredictedScaling,
    ResistanceBounds,
    complete_closed_form_bounds,
    compute_noise_report,
    exact_noise_index,
    family_asymptotics,
    generic_bounds,
    path_closed_form_bounds,
    resistance_bounds,
    ridl_bounds,
    star_closed_form_bounds,
)
from .ridl import (
    K_VARIANTS,
    ConsensusReport,
    ExpectedOperators,
    RidlConfig,
    StochasticMatrixSample,
    check_consensus_conditions,
    expected_l_kron_l,
    expected_operators,
    expected_p,
    expected_p_squared,
    induced_laplacian,
    k_operator_enumeration,
    k_operator_moments,
    omega_projector,
    sample_activation,
    sample_ridl,
)
from .simulator import (
    NOISE_DISTRIBUTIONS,
    SimConfig,
    SimEstimate,
    default_horizon,
    disagreement,
    estimate_noise_index,
    step,
)
from .tolerances import TOL, Tolerances

__version__ = "0.1.0"
