"""Matched line-sweep solver for the 2D heat equation with interfaces."""

from .adi import (
    FieldState,
    OperatorSet,
    ProblemSpec,
    advance,
    assemble_operators,
    douglas_step,
    implicit_euler_step,
)
from .fields import PiecewiseField, SeparableField
from .geometry import (
    CircleInterface,
    CrossingTopology,
    Grid2D,
    LineCrossing,
    PolarLeafInterface,
    classify_grid,
    classify_node,
    find_crossings,
    normal_angle,
)
from .linalg import (
    PerturbedSystem,
    TridiagonalMatrix,
    leading_eigenvalues,
    reduce_and_solve,
    thomas_solve,
    woodbury_solve,
)
from .mib import (
    JumpData,
    OneSidedWeights,
    build_tangential_stencil,
    decomposed_flux_jump,
    fd_weights,
    solve_corner_fictitious,
    solve_regular_fictitious,
)
from .problems import ExampleCase, case_idents, get_case
from .stability import (
    SpectrumReport,
    StabilityMatrices,
    assemble_stability_matrices,
    magnify_apply,
    spectrum_report,
    write_spectrum_csv,
)
from .studies import (
    BoundednessResult,
    ConvergenceTable,
    ErrorRecord,
    boundedness_run,
    exact_error,
    run_case,
    spatial_convergence,
    temporal_convergence,
)

__version__ = "0.1.0"
