"""1D Shallow Water-Exner simulator validated against a closed-form solution."""

from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    NumericalFailure,
    PositivityError,
    StepLimitError,
)
from .exact import ExactSolution, FrozenBedSolution, qb_of_exact, residual
from .harness import BenchmarkConfig, run_benchmark, run_convergence, verify_oracle
from .mesh import FieldSnapshot, Mesh1D, equilibrium_lift, norms, project_exact
from .schemes import BoundaryCondition, integrate, relaxation_step, rusanov_step
from .sediment_laws import (
    GrassLaw,
    SedimentLaw,
    bedload_rate,
    bedload_rate_dq,
    effective_params,
    fixed_bed,
    meyer_peter_muller,
    shields_stress,
    signed_bedload_rate,
)

__version__ = "0.1.0"
