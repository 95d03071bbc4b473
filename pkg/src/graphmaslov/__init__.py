"""Spectra of Schrödinger operators on metric graphs, Maslov indices of
Lagrangian-plane paths in the trace space, and verification pipelines for the
spectral-flow index identity, the boundary-derivative formula, and
delta-coupling eigenvalue interlacing."""

from .graph import (
    Edge,
    MetricGraph,
    TraceVector,
    boundary_index,
    constant_potential,
    make_interval,
    make_star,
    validate_graph,
)
from .symplectic import (
    LagrangianFrame,
    SymplecticSpace,
    frame,
    intersection_basis,
    intersection_dim,
    is_lagrangian,
    omega,
    plane_distance,
    souriau_unitary,
)
from .edge_solver import (
    assemble_eigenfunction,
    fundamental_matrix,
    k_lambda_frame,
    k_path_sampler,
    propagator,
)
from .vertex import (
    BoundaryFamily,
    BoundaryPair,
    check_family,
    check_hypothesis,
    delta_star_family,
    delta_star_pair,
    dirichlet_pair,
    l_frame,
    neumann_pair,
    recover_f,
    robin_interval_family,
    robin_interval_pair,
)
from .maslov import (
    CrossingReport,
    LagrangianPath,
    MaslovResult,
    crossing_form,
    maslov_index,
    maslov_two_paths,
)
from .spectral import (
    Spectrum,
    eigenfunction_trace,
    eigenvalues_in,
    morse_index,
    secular_gap,
    spectral_floor,
    spectral_flow,
)
from .verify import (
    BoxReport,
    HadamardReport,
    InterlacingReport,
    eigenvalues_up_to,
    hadamard_check,
    interlacing_check,
    maslov_box,
)

__version__ = "0.1.0"
