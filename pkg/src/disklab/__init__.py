"""disklab: numerical laboratory on the unit disk.

Truncated Taylor series, graded disk quadrature, a weight catalog with
superharmonicity testing, weighted Dirichlet energies, exact moment
tables of point distributions with their multiplicative structure, and
the reproducing-kernel model (h, a, b) attached to unit-mass weights.
"""

from .dbr import (
    DbrModel,
    berezin_transform,
    build_model,
    charge_moment_table,
    h_from_moments,
    kernel,
    kernel_series,
    laplacian_identity_check,
    moment_table_from_berezin,
    outer_function,
    phi_modulus_sq,
    rank_one_fit,
    riesz_atoms,
    szego_model,
    verify_h_identity,
    verify_isometry,
)
from .dirichlet import DilationReport, dilation_report, energy
from .errors import (
    DegenerateNodeSetError,
    DegenerateWeightError,
    DomainError,
    InconsistentTableError,
    NotDbrWeightError,
    NotWeaklyMultiplicativeError,
    SingularBoundaryDataError,
    SingularIntegrandError,
    SingularPointError,
    WeightSpecError,
)
from .moments import (
    FactorizationResult,
    GaussianRational,
    MomentTable,
    PointDistribution,
    atoms_table,
    centered_moments,
    dirac_table,
    factorize,
    measure_moments,
    point_moments,
    random_non_rank_one_distribution,
    random_rank_one_distribution,
    rank_one_coeffs,
    tensor_diag_check,
    weak_mult_check,
)
from .quadrature import (
    ALIAS_GUARD,
    CircleGrid,
    DiskGrid,
    integrate,
    make_circle_grid,
    make_disk_grid,
    richardson_check,
)
from .series import (
    TaylorSeries,
    constant_series,
    exp_reference,
    exp_series,
    geometric_series,
    monomial,
    zero_series,
)
from .weights import (
    Custom,
    GreenDecomposition,
    HarmonicBoundary,
    LogGreen,
    Scaled,
    Weight,
    grid_for_weight,
    l1_norm,
    normalize,
    parse_weight_spec,
    superharmonic_test,
    synthesize,
    uniform_weight,
)

__version__ = "0.1.0"
