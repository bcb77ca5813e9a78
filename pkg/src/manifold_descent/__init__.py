"""Descent methods on manifolds where the retraction is only defined
locally, with a benchmark catalog and a small CLI."""

from .bench import (
    METHOD_ORDER,
    BallMinResult,
    ScenarioResult,
    UnknownMethod,
    UnknownScenario,
    ball_minimize,
    corpus,
    default_iters,
    run_scenario,
    smallest_eigenvalue,
)
from .linalg import (
    EigenDecomposition,
    NonFinite,
    SingularMatrix,
    SymMatrix,
    is_invertible,
    solve_sym,
    spectral_split,
    sym_eig,
)
from .manifold import (
    Euclidean,
    NotOnManifold,
    NotTangent,
    OpenSubset,
    Sphere,
    StepTooLarge,
    open_ball,
)
from .objective import (
    Objective,
    Problem,
    QuadraticForm,
    builtin_problems,
    default_lipschitz,
    fd_gradient,
    negate,
    riemannian_grad,
    riemannian_hess,
)
from .optim import (
    METHODS,
    BacktrackingParams,
    IterateRecord,
    IterateTrace,
    LineSearchExhausted,
    MissingLipschitz,
    NewQNewtonParams,
    NoInvertibleRegularizer,
    StopCriteria,
    Termination,
    armijo_delta,
    armijo_rhs,
    backtracking_gd_step,
    local_bgd_delta,
    new_q_newton_step,
    newton_step,
    random_newton_step,
    run,
    standard_gd_step,
)

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "METHOD_ORDER",
    "BacktrackingParams",
    "BallMinResult",
    "EigenDecomposition",
    "Euclidean",
    "IterateRecord",
    "IterateTrace",
    "LineSearchExhausted",
    "MissingLipschitz",
    "NewQNewtonParams",
    "NoInvertibleRegularizer",
    "NonFinite",
    "NotOnManifold",
    "NotTangent",
    "Objective",
    "OpenSubset",
    "Problem",
    "QuadraticForm",
    "ScenarioResult",
    "SingularMatrix",
    "Sphere",
    "StepTooLarge",
    "StopCriteria",
    "SymMatrix",
    "Termination",
    "UnknownMethod",
    "UnknownScenario",
    "armijo_delta",
    "armijo_rhs",
    "backtracking_gd_step",
    "ball_minimize",
    "builtin_problems",
    "corpus",
    "default_iters",
    "default_lipschitz",
    "fd_gradient",
    "is_invertible",
    "local_bgd_delta",
    "negate",
    "new_q_newton_step",
    "newton_step",
    "open_ball",
    "random_newton_step",
    "riemannian_grad",
    "riemannian_hess",
    "run",
    "run_scenario",
    "standard_gd_step",
    "smallest_eigenvalue",
    "solve_sym",
    "spectral_split",
    "sym_eig",
]
