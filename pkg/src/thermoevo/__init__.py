"""Evolutionary-equation toolkit for linear thermoelasticity.

Assembles rational material laws for the named thermoelastic model
families, certifies the positivity hypotheses behind causal well-posedness,
and solves the resulting space-time systems on a staggered 1-d grid with an
independent spectral reference solver for verification.
"""

from .errors import (
    ConfigError,
    InputError,
    OracleRejectionError,
    PoleProximityError,
    RealizationError,
    SingularSystemError,
    ThermoevoError,
    UnreachableTargetError,
    WindowDecayError,
)
from .evolution import (
    BACKWARD_EULER,
    TRAPEZOIDAL,
    EvolutionProblem,
    Trajectory,
    causality_test,
    energy_functional,
    solution_bound_check,
    solve,
    step_implicit,
)
from .forcing import assemble_forcing, time_grid
from .models import (
    CellLaw,
    MaterialLaw,
    ModelFamily,
    ModelSpec,
    assemble_material_law,
    canonical_spec,
    classify,
    compute_entropy,
    pattern_table,
    recover_theta,
    zero_pattern,
)
from .oracle import compare, spectral_solve
from .rational import (
    RationalMatrixFunction,
    StateSpaceRealization,
    eval_rational,
    realize_state_space,
    validate_realization,
)
from .signals import (
    WeightedSignal,
    antiderivative,
    apply_symbol_fl,
    read_signal_csv,
    weighted_norm,
    write_signal_csv,
)
from .spatial import (
    DiscreteSpatialOperator,
    Grid1D,
    build_operators,
    mode_decomposition,
    verify_skew_adjoint,
    write_operator_coo,
)
from .wellposed import (
    WellPosednessReport,
    Witness,
    check_condition_rho,
    check_symbol_boundary,
    certify_wellposedness,
    find_min_rho,
)

__version__ = "0.1.0"
