"""Inverse optimization of LPs and MILPs from observed optimal solutions.

The library recovers the weights of a linear objective from observed optima
by projected subgradient descent on the (convex) suboptimality loss, with
grid/random/duality-projection search baselines, exact forward solvers for
the two built-in instance families, structural verifiers for the
convergence guarantees and a reproducible experiment harness.
"""

from .simplex import SimplexSpec, project_onto_simplex, sample_uniform_simplex, upa_grid
from .oracles import (
    Dataset,
    LpInstance,
    PointSetInstance,
    SchedulingInstance,
    SizeLimitError,
    forward_argmax,
    lp_argmax,
    lp_vertex_enumeration,
    outcome_set,
    schedule_argmax,
    schedule_eval_order,
)
from .losses import (
    GammaConstants,
    LossReport,
    NotInPsiError,
    PsiCertificate,
    estimated_loss,
    gamma_constants,
    loss_report,
    prediction_loss_solution,
    prediction_loss_weights,
    psi_membership,
    subgradient,
    suboptimality_loss,
)
from .solvers import (
    SolverResult,
    Trace,
    chan_levels,
    chan_solve,
    frank_wolfe_min_distance,
    optimal_face_lmo,
    psgd,
    rpa_solve,
    upa_solve,
)
from .harness import (
    ExperimentConfig,
    aggregate_worst_case,
    gen_lp_instance,
    gen_scheduling_instance,
    run_experiment,
    run_trial,
    write_aggregated_csv,
    write_raw_csv,
)
from .verify import finite_iteration_bound, psi_fraction, verification_suite

__version__ = "0.1.0"
