"""curvedq: quantum mechanics on curved 2D surfaces with EM fields."""

from .charts import SurfaceChart, builtin_chart, cylinder, from_map, plane, sphere, torus
from .errors import (
    BadResolution,
    ConfigError,
    ConvergenceFailure,
    CurvedQError,
    DegenerateChart,
    GridMismatch,
    LinearSolveFailure,
    NonHermitianAssembly,
    NonPositiveFactor,
    OutOfDomain,
    PeriodicityViolation,
    QuadratureFailure,
    TaskError,
)
from .fields import (
    CartesianPotential,
    SurfacePotential,
    apply_surface_gauge,
    normal_gauge_fix,
    normal_gauge_gamma,
    pullback_potential,
    uniform_field_potential,
)
from .geometry import (
    AdaptedMetric3D,
    GeometryPointData,
    adapted_metric_at,
    geometric_potential,
    metric_at,
    rescale_factor,
    weingarten_at,
)
from .config import RunConfig, config_from_dict, load_config
from .expressions import compile_expression
from .grid import (
    Axis,
    Grid2D,
    GridND,
    average_to_faces,
    build_grid,
    face_array_shape,
    face_difference,
)
from .operators import (
    GeometrySample,
    HamiltonianOperator,
    PhysicalParams,
    WaveFunction,
    assemble_generic_hamiltonian,
    assemble_surface_hamiltonian,
    hermiticity_defect,
    normalize,
    sample_geometry,
    weighted_inner_product,
)
from .solvers import (
    EvolutionTrace,
    SpectrumResult,
    eigensolve_lowest,
    expectation_value,
    probability_current,
    propagate_cn,
)
from .tasks import run as run_task
from .validate import CheckResult, run_suite
from .systems import (
    SystemSpec,
    cylinder_closed_form,
    flux_ratio,
    oracle_spectra,
    reference_cylinder_hamiltonian,
    reference_sphere_hamiltonian,
    reference_torus_hamiltonian,
    sphere_closed_form,
    torus_axisymmetric_oracle,
)

__version__ = "0.1.0"
