"""Projection-free online convex optimization over polytopes.

The core algorithm plays approximate Newton iterates on a self-concordant
barrier of the feasible set, so iterates are feasible by construction, and
recomputes the Hessian factorization only at infrequent landmark iterates.
"""

from .algorithm import (
    BaronsParams,
    BaronsState,
    DivergenceDetected,
    EuclideanBound,
    LocalNormBound,
    PreconditionViolated,
    barons_init,
    barons_round,
    compute_params,
    landmark_distance,
)
from .barrier import (
    Barrier,
    BarrierParams,
    HybridBarrier,
    LogBarrier,
    NotInterior,
    OracleConfig,
    barrier_params_log,
    grad_oracle,
    hess_oracle,
    hybrid_compose,
    log_barrier_gradient,
    log_barrier_hessian,
    log_barrier_value,
)
from .baselines import ftrl_exact_round, ogd_simplex_round, project_simplex
from .domain import (
    InfeasibleWitness,
    InvalidBounds,
    Polytope,
    ZeroRow,
    build_box,
    build_reduced_simplex,
    is_strictly_feasible,
    lift_to_simplex,
    load_polytope,
    polytope_new,
    save_polytope,
    shrink_toward,
    slacks,
)
from .harness import (
    LossLog,
    RunConfig,
    RunResult,
    Trace,
    best_fixed_comparator,
    read_csv,
    regret_curve,
    run_experiment,
    write_csv,
)
from .linalg import (
    DimensionMismatch,
    NotSpd,
    SpdFactor,
    dual_quad_norm,
    quad_norm,
    spd_factorize,
    spd_solve,
    spectral_sandwich_check,
)
from .losses import (
    LossEvent,
    NonPositiveReturn,
    PredictionOutOfRange,
    linear_adversary_iid_sphere,
    linear_loss,
    logloss_linear,
    portfolio_loss,
    returns_iid,
    returns_two_asset_adversarial,
)
from .newton import (
    MaxIterExceeded,
    ShiftedObjective,
    analytic_center,
    approx_newton_step,
    damped_newton_minimize,
    newton_decrement,
)

__version__ = "0.1.0"
