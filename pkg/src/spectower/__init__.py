"""Towers of pattern-constrained symmetric matrices with prescribed spectra.

The library builds, for a graph family and a closed target set of reals, a
sequence of symmetric matrices A_1, A_2, ... where A_n realizes the graph
induced on the first n vertices, has the first n enumerated values of the
target set as its spectrum, and stays within a geometrically shrinking
operator-norm budget of the previous matrix extended by one diagonal entry.
Truncation and verification tooling quantifies how the finite matrices
approximate the limiting operator.
"""

from .graphs import (
    Graph,
    GraphFamily,
    GraphParseError,
    new_edges_at,
    parse_graph,
    prefix,
    render_graph,
)
from .iepg import (
    EdgeFloorError,
    EigenvalueCollisionError,
    IepgError,
    IepgProblem,
    IepgSolution,
    MaxIterationsError,
    SolverParams,
    free_coordinates,
    solve_iepg,
    spectral_jacobian,
)
from .spectra import (
    CoveringRadius,
    DenseSequence,
    Interval,
    Lattice,
    Point,
    RayDown,
    RayUp,
    SpectrumSpec,
    SpectrumSpecError,
    covering_radius,
    covering_radius_points,
    dense_enumerate,
    distance_to_set,
    parse_spectrum_spec,
    render_spectrum_spec,
)
from .symmetric import (
    EigResult,
    MatrixFormatError,
    SymmetricMatrix,
    eigh,
    eigh_dense,
    hausdorff,
    op_norm,
    op_norm_dense,
    parse_matrix_csv,
    render_matrix_csv,
)
from .tower import (
    BudgetUnattainableError,
    StepFailedError,
    Tower,
    TowerFormatError,
    TowerStep,
    TruncatedMatrix,
    assemble_truncation,
    build_tower,
    extend_step,
    load_tower,
    save_tower,
)
from .verify import (
    Check,
    Report,
    WindowGap,
    render_report,
    verify_tower,
    weyl_check,
    window_spectrum_gap,
)

__version__ = "0.1.0"
